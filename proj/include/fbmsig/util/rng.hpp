#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fbmsig {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derive an independent stream key from a seed and up to two stream coordinates.
inline constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ (a + 0x632BE59BD9B4E019ULL)) ^
                      (b + 0x85157AF5ULL));
}

/// Counter-based generator: the k-th draw of a stream is a pure function of
/// (key, k), so substreams never interact and any draw can be reproduced
/// without replaying its predecessors.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

    constexpr std::uint64_t next_u64() noexcept {
        return splitmix64(key_ ^ splitmix64(counter_++));
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    constexpr std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fbmsig
