#include "fbmsig/fbm.hpp"

#include <cmath>
#include <algorithm>
#include <complex>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "fbmsig/quadrature.hpp"
#include "fbmsig/util/parallel.hpp"
#include "fbmsig/util/rng.hpp"

namespace fbmsig {

MultiPath::MultiPath(Eigen::VectorXd times, Eigen::MatrixXd values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() < 2) throw std::invalid_argument("MultiPath: need at least 2 grid points");
    if (values_.rows() < 1) throw std::invalid_argument("MultiPath: dimension must be positive");
    if (values_.cols() != times_.size())
        throw std::invalid_argument("MultiPath: values must have one column per grid point");
    for (Eigen::Index j = 1; j < times_.size(); ++j)
        if (!(times_[j] > times_[j - 1]))
            throw std::invalid_argument("MultiPath: times must be strictly increasing");
}

MultiPath MultiPath::slice(Eigen::Index first, Eigen::Index last) const {
    if (first < 0 || last >= size() || last <= first)
        throw std::out_of_range("MultiPath::slice: invalid range");
    const Eigen::Index n = last - first + 1;
    return MultiPath(times_.segment(first, n), values_.middleCols(first, n));
}

void FbmConfig::validate() const {
    if (d < 1) throw std::invalid_argument("FbmConfig: d must be >= 1");
    if (n_steps < 1) throw std::invalid_argument("FbmConfig: n_steps must be >= 1");
    if (!(horizon_t > 0.0)) throw std::invalid_argument("FbmConfig: horizon_t must be > 0");
}

double fbm_cov(double s, double t, HurstParameter h) {
    if (s < 0.0 || t < 0.0) throw std::domain_error("fbm_cov: times must be nonnegative");
    const double two_h = 2.0 * h.value();
    return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

double increment_variance(double s, double t, HurstParameter h) {
    if (s < 0.0 || !(s < t)) throw std::domain_error("increment_variance: need 0 <= s < t");
    return std::pow(t - s, 2.0 * h.value());
}

double c_h(HurstParameter h) {
    const double H = h.value();
    return std::sqrt(2.0 * H * std::tgamma((3.0 - 2.0 * H) / 2.0) /
                     (std::tgamma(2.0 - 2.0 * H) * std::tgamma(H + 0.5)));
}

double volterra_kernel(double t, double u, HurstParameter h, double abs_tol) {
    const double H = h.value();
    if (H >= 0.5) throw UnsupportedRegimeError("volterra_kernel: only defined here for H < 1/2");
    if (!(u > 0.0 && u < t)) return 0.0;

    const double first = std::pow(u / t, 0.5 - H) * std::pow(t - u, H - 0.5);

    // With v = u(1 + w) the inner integral is u^{2H-1} * J, where
    // J = int_0^W (1+w)^{H-3/2} w^{H-1/2} dw and W = (t-u)/u.
    // On [0, min(W,1)] put w = z^m, m = 1/(H+1/2), which cancels the w^{H-1/2}
    // singularity; on [1, W] put w = e^x so long tails stay cheap.
    const double W = (t - u) / u;
    const double m = 1.0 / (H + 0.5);
    const double head_end = std::pow(std::min(W, 1.0), 1.0 / m);
    auto head = [&](double z) { return m * std::pow(1.0 + std::pow(z, m), H - 1.5); };
    double J = integrate(head, 0.0, head_end, 0.5 * abs_tol).value;
    if (W > 1.0) {
        auto tail = [&](double x) {
            const double w = std::exp(x);
            return w * std::pow(1.0 + w, H - 1.5) * std::pow(w, H - 0.5);
        };
        J += integrate(tail, 0.0, std::log(W), 0.5 * abs_tol).value;
    }
    const double second = (0.5 - H) * std::pow(u, H - 0.5) * J;
    return c_h(h) * (first + second);
}

double fgn_autocovariance(long k, HurstParameter h) {
    const double two_h = 2.0 * h.value();
    const double a = std::abs(static_cast<double>(k));
    return 0.5 * (std::pow(a + 1.0, two_h) - 2.0 * std::pow(a, two_h) + std::pow(std::abs(a - 1.0), two_h));
}

FbmSampler::FbmSampler(const FbmConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const int n = cfg_.n_steps;
    const double dt = cfg_.horizon_t / n;
    if (cfg_.method == FbmMethod::davies_harte) {
        const int m = 2 * n;
        const double scale = std::pow(dt, 2.0 * cfg_.h.value());
        std::vector<std::complex<double>> row(m), eig;
        for (int k = 0; k <= n; ++k) row[k] = scale * fgn_autocovariance(k, cfg_.h);
        for (int k = n + 1; k < m; ++k) row[k] = row[m - k];
        Eigen::FFT<double> fft;
        fft.fwd(eig, row);
        double max_eig = 0.0;
        for (const auto& e : eig) max_eig = std::max(max_eig, e.real());
        circulant_sqrt_.resize(m);
        for (int k = 0; k < m; ++k) {
            double lambda = eig[k].real();
            if (lambda < 0.0) {
                if (lambda < -1e-10 * max_eig)
                    throw CirculantEmbeddingError(
                        "davies_harte: circulant embedding has a negative eigenvalue for this (H, n_steps); "
                        "use method=cholesky instead");
                lambda = 0.0;
            }
            circulant_sqrt_[k] = std::sqrt(lambda / m);
        }
    } else {
        Eigen::MatrixXd cov(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                cov(i, j) = fbm_cov((i + 1) * dt, (j + 1) * dt, cfg_.h);
                cov(j, i) = cov(i, j);
            }
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("cholesky: covariance factorisation failed (matrix not positive definite)");
        cholesky_lower_ = llt.matrixL();
    }
}

void FbmSampler::fill_component(std::uint64_t path_index, int component,
                                Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) const {
    CounterRng rng(stream_key(cfg_.seed, path_index, static_cast<std::uint64_t>(component)));
    const int n = cfg_.n_steps;
    out[0] = 0.0;
    if (cfg_.method == FbmMethod::davies_harte) {
        const Eigen::Index m = circulant_sqrt_.size();
        std::vector<std::complex<double>> xi(m), y;
        for (Eigen::Index k = 0; k < m; ++k) {
            const double re = rng.normal();
            const double im = rng.normal();
            xi[k] = circulant_sqrt_[k] * std::complex<double>(re, im);
        }
        Eigen::FFT<double> fft;
        fft.fwd(y, xi);
        double level = 0.0;
        for (int j = 0; j < n; ++j) {
            level += y[j].real();
            out[j + 1] = level;
        }
    } else {
        Eigen::VectorXd z(n);
        for (int j = 0; j < n; ++j) z[j] = rng.normal();
        out.tail(n) = (cholesky_lower_.triangularView<Eigen::Lower>() * z).transpose();
    }
}

MultiPath FbmSampler::sample(std::uint64_t path_index) const {
    const int n = cfg_.n_steps;
    Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(n + 1, 0.0, cfg_.horizon_t);
    Eigen::MatrixXd values(cfg_.d, n + 1);
    for (int i = 0; i < cfg_.d; ++i) fill_component(path_index, i, values.row(i));
    return MultiPath(std::move(times), std::move(values));
}

std::vector<MultiPath> FbmSampler::sample_batch(std::size_t n_paths, unsigned threads,
                                                std::uint64_t first_index) const {
    std::vector<MultiPath> out;
    out.reserve(n_paths);
    if (n_paths == 0) return out;
    // MultiPath has no default state; fill slots in place then move out.
    std::vector<std::optional<MultiPath>> slots(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t j) { slots[j].emplace(sample(first_index + j)); });
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

MultiPath sample_fbm(const FbmConfig& cfg) { return FbmSampler(cfg).sample(0); }

void write_path_csv(std::ostream& os, const MultiPath& p) {
    os << "t";
    for (Eigen::Index i = 0; i < p.dim(); ++i) os << ",x" << (i + 1);
    os << '\n';
    char buf[32];
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", p.times()[j]);
        os << buf;
        for (Eigen::Index i = 0; i < p.dim(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", p.values()(i, j));
            os << ',' << buf;
        }
        os << '\n';
    }
}

MultiPath read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("path csv: empty input");
    if (line.rfind("t,", 0) != 0) throw std::runtime_error("path csv: header must start with 't,'");
    const auto d = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
    std::vector<double> times;
    std::vector<double> flat;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                cells.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::runtime_error("path csv: bad number on row " + std::to_string(row));
            }
        }
        if (static_cast<Eigen::Index>(cells.size()) != d + 1)
            throw std::runtime_error("path csv: wrong column count on row " + std::to_string(row));
        times.push_back(cells[0]);
        flat.insert(flat.end(), cells.begin() + 1, cells.end());
    }
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd values = Eigen::Map<Eigen::MatrixXd>(flat.data(), d, n);
    return MultiPath(Eigen::Map<Eigen::VectorXd>(times.data(), n), std::move(values));
}

}  // namespace fbmsig
