#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fbmsig {

/// Hurst index, validated to lie in the open interval (0, 1).
class HurstParameter {
public:
    explicit HurstParameter(double h) : h_(h) {
        if (!(h > 0.0 && h < 1.0))
            throw std::invalid_argument("Hurst parameter must lie in (0, 1), got " + std::to_string(h));
    }
    double value() const noexcept { return h_; }
    friend bool operator==(HurstParameter, HurstParameter) = default;

private:
    double h_;
};

/// A d-dimensional path sampled on a strictly increasing time grid.
/// Column j of `values()` is the state at `times()[j]`.
class MultiPath {
public:
    MultiPath(Eigen::VectorXd times, Eigen::MatrixXd values);

    Eigen::Index dim() const noexcept { return values_.rows(); }
    Eigen::Index size() const noexcept { return values_.cols(); }
    const Eigen::VectorXd& times() const noexcept { return times_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

    /// Sub-path on grid points [first, last] inclusive.
    MultiPath slice(Eigen::Index first, Eigen::Index last) const;

private:
    Eigen::VectorXd times_;
    Eigen::MatrixXd values_;
};

enum class FbmMethod { cholesky, davies_harte };

struct FbmConfig {
    HurstParameter h{0.5};
    int d = 1;
    int n_steps = 1024;
    double horizon_t = 1.0;
    FbmMethod method = FbmMethod::davies_harte;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Raised when the circulant embedding is not positive semi-definite.
class CirculantEmbeddingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a formula is requested outside the Hurst regime it is defined for.
class UnsupportedRegimeError : public std::domain_error {
    using std::domain_error::domain_error;
};

/// E[B_s B_t] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
double fbm_cov(double s, double t, HurstParameter h);

/// E[(B_t - B_s)^2] = (t - s)^{2H} for s < t.
double increment_variance(double s, double t, HurstParameter h);

/// Normalising constant of the Volterra kernel.
double c_h(HurstParameter h);

/// Volterra kernel K(t, u) for H < 1/2; zero outside 0 < u < t. The inner
/// integral is evaluated by adaptive quadrature to `abs_tol` after
/// substitutions that remove its endpoint singularity.
double volterra_kernel(double t, double u, HurstParameter h, double abs_tol = 1e-10);

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
double fgn_autocovariance(long k, HurstParameter h);

/// Precomputes the factorisation for one configuration and then draws
/// independent paths by index. Path j, component i always uses the RNG
/// substream (seed, j, i), so batches are reproducible in any order.
class FbmSampler {
public:
    explicit FbmSampler(const FbmConfig& cfg);

    const FbmConfig& config() const noexcept { return cfg_; }
    MultiPath sample(std::uint64_t path_index) const;
    std::vector<MultiPath> sample_batch(std::size_t n_paths, unsigned threads = 1,
                                        std::uint64_t first_index = 0) const;

private:
    void fill_component(std::uint64_t path_index, int component, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) const;

    FbmConfig cfg_;
    Eigen::VectorXd circulant_sqrt_;   // davies_harte: sqrt(lambda_k / m)
    Eigen::MatrixXd cholesky_lower_;   // cholesky: L with L L^T = Cov(B_{t_i}, B_{t_j})
};

/// One path (index 0 of the configured stream).
MultiPath sample_fbm(const FbmConfig& cfg);

/// CSV with header `t,x1,...,xd`, one row per grid point, 17 significant digits.
void write_path_csv(std::ostream& os, const MultiPath& p);
MultiPath read_path_csv(std::istream& is);

}  // namespace fbmsig
