#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fbmsig/fbm.hpp"
#include "fbmsig/word.hpp"

namespace fbmsig {

/// Signature components of orders 0..depth. Level k is a dense vector of
/// length d^k indexed by word_index; level 0 is exactly 1 for any signature
/// produced by this module.
template <typename Scalar>
class TruncatedSignature {
public:
    using Level = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    TruncatedSignature(int d, int depth) : d_(d), depth_(depth) {
        if (d < 1) throw std::invalid_argument("TruncatedSignature: d must be >= 1");
        if (depth < 1) throw std::invalid_argument("TruncatedSignature: depth must be >= 1");
        levels_.reserve(static_cast<std::size_t>(depth) + 1);
        for (int k = 0; k <= depth; ++k)
            levels_.push_back(Level::Zero(static_cast<Eigen::Index>(int_pow(static_cast<std::size_t>(d), k))));
        levels_[0][0] = Scalar(1);
    }

    /// Signature of the constant path.
    static TruncatedSignature identity(int d, int depth) { return TruncatedSignature(d, depth); }

    int dim() const noexcept { return d_; }
    int depth() const noexcept { return depth_; }
    const Level& level(int k) const { return levels_.at(static_cast<std::size_t>(k)); }
    Level& level(int k) { return levels_.at(static_cast<std::size_t>(k)); }

    Scalar operator[](const Word& w) const {
        if (w.alphabet() != d_) throw std::invalid_argument("TruncatedSignature: word alphabet mismatch");
        if (w.length() > static_cast<std::size_t>(depth_))
            throw std::out_of_range("TruncatedSignature: word longer than truncation depth");
        return levels_[w.length()][static_cast<Eigen::Index>(word_index(w))];
    }

    std::size_t component_count() const noexcept {
        std::size_t n = 0;
        for (const auto& l : levels_) n += static_cast<std::size_t>(l.size());
        return n;
    }

    /// All components, level by level, in all_words(d, depth) order.
    Level flatten() const {
        Level out(static_cast<Eigen::Index>(component_count()));
        Eigen::Index pos = 0;
        for (const auto& l : levels_) {
            out.segment(pos, l.size()) = l;
            pos += l.size();
        }
        return out;
    }

    /// In place: this <- this (x) exp(increment), truncated. Horner form
    /// r_m = r_{m-1} (x) increment / (k - m + 1) + a_m, highest level first so
    /// the lower levels read are still the old ones.
    void extend_by_segment(const Eigen::Ref<const Level>& increment) {
        if (increment.size() != d_) throw std::invalid_argument("extend_by_segment: increment dimension mismatch");
        Level r, next;
        for (int k = depth_; k >= 1; --k) {
            r = levels_[1] + increment / Scalar(k);
            for (int m = 2; m <= k; ++m) {
                next.resize(r.size() * d_);
                Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>(next.data(), d_, r.size()).noalias() =
                    (increment / Scalar(k - m + 1)) * r.transpose();
                next += levels_[static_cast<std::size_t>(m)];
                r.swap(next);
            }
            levels_[static_cast<std::size_t>(k)] = r;
        }
    }

private:
    int d_;
    int depth_;
    std::vector<Level> levels_;
};

using Signature = TruncatedSignature<double>;

/// Signature of the straight segment with the given increment:
/// component w equals prod_j increment[w_j] / |w|!.
template <typename Derived>
TruncatedSignature<typename Derived::Scalar> segment_signature(const Eigen::MatrixBase<Derived>& increment, int depth) {
    using Scalar = typename Derived::Scalar;
    const auto d = static_cast<int>(increment.size());
    TruncatedSignature<Scalar> sig(d, depth);
    for (int k = 1; k <= depth; ++k) {
        const auto& prev = sig.level(k - 1);
        auto& cur = sig.level(k);
        Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>(cur.data(), d, prev.size()).noalias() =
            (increment / Scalar(k)) * prev.transpose();
    }
    return sig;
}

/// Chen product: level k of the result is sum_j a_j (x) b_{k-j}.
template <typename Scalar>
TruncatedSignature<Scalar> chen_concat(const TruncatedSignature<Scalar>& a, const TruncatedSignature<Scalar>& b) {
    if (a.dim() != b.dim() || a.depth() != b.depth())
        throw std::invalid_argument("chen_concat: signatures must share dimension and depth");
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    TruncatedSignature<Scalar> out(a.dim(), a.depth());
    for (int k = 1; k <= a.depth(); ++k) {
        auto& dst = out.level(k);
        for (int j = 0; j <= k; ++j) {
            const auto& left = a.level(j);
            const auto& right = b.level(k - j);
            Eigen::Map<Matrix>(dst.data(), right.size(), left.size()).noalias() += right * left.transpose();
        }
    }
    return out;
}

template <typename Scalar>
TruncatedSignature<Scalar> operator*(const TruncatedSignature<Scalar>& a, const TruncatedSignature<Scalar>& b) {
    return chen_concat(a, b);
}

/// Exact signature of the piecewise-linear interpolation of `p`.
inline Signature path_signature(const MultiPath& p, int depth) {
    Signature sig(static_cast<int>(p.dim()), depth);
    const auto& v = p.values();
    Eigen::VectorXd inc(p.dim());
    for (Eigen::Index j = 1; j < p.size(); ++j) {
        inc = v.col(j) - v.col(j - 1);
        sig.extend_by_segment(inc);
    }
    return sig;
}

/// Prepend the time grid as coordinate 1: (t, X^1, ..., X^d).
MultiPath time_augment(const MultiPath& p);

/// CSV `word,value`; word is dot-joined letters, empty for order 0.
void write_signature_csv(std::ostream& os, const Signature& sig);

}  // namespace fbmsig
