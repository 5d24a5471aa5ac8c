#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace fbmsig {

/// Pairwise summation; the result depends only on the values and their order.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct SampleStats {
    double mean = 0.0;
    double stderr_mean = 0.0;
    double std_dev = 0.0;
};

/// Sample mean, unbiased standard deviation and standard error of the mean.
inline SampleStats sample_stats(std::span<const double> v) {
    SampleStats st;
    const auto n = static_cast<double>(v.size());
    if (v.empty()) return st;
    st.mean = pairwise_sum(v) / n;
    if (v.size() < 2) return st;
    double ss = 0.0;
    double comp = 0.0;
    for (double x : v) {
        const double term = (x - st.mean) * (x - st.mean) - comp;
        const double next = ss + term;
        comp = (next - ss) - term;
        ss = next;
    }
    st.std_dev = std::sqrt(ss / (n - 1.0));
    st.stderr_mean = st.std_dev / std::sqrt(n);
    return st;
}

}  // namespace fbmsig
