#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace fbmsig {

/// FNV-1a 64-bit, used for manifests and dataset fingerprints (not security).
class Fnv1a {
public:
    void update(std::span<const unsigned char> bytes) noexcept {
        for (unsigned char b : bytes) {
            state_ ^= b;
            state_ *= 0x100000001B3ULL;
        }
    }
    void update(std::string_view s) noexcept {
        update(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
    }
    template <typename T>
    void update_value(const T& v) noexcept {
        update(std::span(reinterpret_cast<const unsigned char*>(&v), sizeof(T)));
    }
    std::uint64_t digest() const noexcept { return state_; }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

std::string hash_file(const std::string& path);

}  // namespace fbmsig
