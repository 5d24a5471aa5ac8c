#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fbmsig/fbm.hpp"
#include "fbmsig/lasso.hpp"

namespace fbmsig {

enum class PayoffType { call, asian, rainbow1, rainbow2 };

std::string to_string(PayoffType t);
PayoffType parse_payoff(const std::string& name);

struct PayoffKind {
    PayoffType type = PayoffType::call;
    double strike = 1.2;

    int required_dim() const noexcept {
        return (type == PayoffType::call || type == PayoffType::asian) ? 1 : 2;
    }
};

/// call:     max(X_T^1 - K, 0)
/// asian:    max(mean_j X_{t_j}^1 - K, 0)  (arithmetic mean over the grid)
/// rainbow1: max(X_T^1 - X_T^2, 0)
/// rainbow2: max(max(X_T^1, X_T^2) - K, 0)
double payoff(const MultiPath& path, const PayoffKind& kind);

/// fBm shifted to start at 1 in every coordinate, on [0, 1].
std::vector<MultiPath> make_price_paths(HurstParameter h, int d, std::size_t n_paths, int n_steps,
                                        std::uint64_t seed, unsigned threads = 1);

struct SweepConfig {
    std::vector<double> h_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::size_t n_train = 500;
    std::size_t n_test = 500;
    int n_steps = 256;
    int depth_k = 3;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::size_t replications = 1;  // seeds seed, seed + 1, ...
    CvPlan cv{200, 50, {}};
    LassoOptions lasso{};
    unsigned threads = 1;
};

struct SweepRow {
    std::string payoff;
    double h = 0.0;
    std::uint64_t seed = 0;
    std::string method;  // "lasso" or "signature"
    int depth_k = 0;     // 0 for the raw-sample baseline
    double lambda = 0.0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    int n_steps = 0;
};

/// Target generator for one cell: maps a price path to y. The default uses
/// `payoff`; tests substitute other functionals.
using TargetFn = double (*)(const MultiPath&, const PayoffKind&);

struct CellResult {
    SweepRow baseline;
    SweepRow signature;
};

/// One (H, seed) cell: simulate train/test paths, fit the raw-sample Lasso
/// baseline and the signature Lasso on the time-augmented paths, both tuned
/// by chronological CV, and report train/test MSE.
CellResult run_sweep_cell(const SweepConfig& cfg, const PayoffKind& p, double h, std::uint64_t seed,
                          TargetFn target = &payoff);

std::vector<SweepRow> run_hurst_sweep(const SweepConfig& cfg, const PayoffKind& p);

/// `payoff,H,seed,method,depth_k,lambda,train_mse,test_mse,n_train,n_test,n_steps`
void sweep_to_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> sweep_from_csv(std::istream& is);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fbmsig
