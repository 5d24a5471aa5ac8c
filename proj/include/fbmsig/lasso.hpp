#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbmsig/fbm.hpp"

namespace fbmsig {

/// Regression design. Column 0 is the constant 1 (label ""), the remaining
/// columns are features; for signature designs the label of a column is its
/// dot-joined word, in level-then-lexicographic order.
struct DesignMatrix {
    Eigen::MatrixXd x;
    std::vector<std::string> labels;

    Eigen::Index rows() const noexcept { return x.rows(); }
    Eigen::Index cols() const noexcept { return x.cols(); }
    /// Rows [first, first + count).
    DesignMatrix row_block(Eigen::Index first, Eigen::Index count) const;
};

/// One row per path: the truncated signature of the path (time-augmented
/// when `augment` is set) over its whole grid.
DesignMatrix build_design(const std::vector<MultiPath>& paths, int depth, bool augment, unsigned threads = 1);

/// Intercept column followed by every sampled value of every coordinate,
/// labelled `x<i>@<j>` (coordinate i, grid point j).
DesignMatrix build_raw_design(const std::vector<MultiPath>& paths);

/// sign(z) max(|z| - gamma, 0).
double soft_threshold(double z, double gamma);

struct LassoOptions {
    int max_iter = 100000;    // coordinate-descent cycles
    double tol = 1e-7;        // on the max absolute standardized-coefficient change per full cycle
    bool standardize = true;  // centre and unit-scale the penalised columns internally
    bool record_history = false;
};

struct LassoFit {
    std::vector<std::string> labels;
    Eigen::VectorXd coefficients;  // original feature scale; entry 0 is the intercept
    double lambda = 0.0;
    int n_iterations = 0;
    double final_objective = 0.0;
    bool converged = false;
    Eigen::VectorXd column_means;   // entry 0 unused
    Eigen::VectorXd column_scales;  // 0 marks a constant column that was dropped
    std::vector<double> objective_history;  // one entry per cycle when requested

    double intercept() const { return coefficients[0]; }
    Eigen::Index nonzeros() const;
};

/// sum_n (y_n - x_n beta)^2 + lambda sum_{j>=1} scale_j |beta_j|: the L1
/// penalty acts on the standardized coefficients and the intercept is free.
double lasso_objective(const LassoFit& fit, const DesignMatrix& x, const Eigen::VectorXd& y);

/// Smallest lambda for which every penalised coefficient is zero.
double lambda_max(const DesignMatrix& x, const Eigen::VectorXd& y, bool standardize = true);

/// Cyclic coordinate descent with covariance updates and active-set cycling.
/// Keeps its coefficients between calls so a decreasing lambda sequence is
/// warm-started.
class LassoSolver {
public:
    LassoSolver(const DesignMatrix& x, const Eigen::VectorXd& y, LassoOptions opts = {});

    LassoFit solve(double lambda);
    double lambda_max() const;

private:
    double full_cycle(double lambda);
    int active_cycles(double lambda, int budget, std::vector<double>* history);
    double objective(double lambda) const;

    LassoOptions opts_;
    const DesignMatrix* design_;
    const Eigen::VectorXd* y_;
    std::vector<Eigen::Index> columns_;  // penalised, non-constant columns
    Eigen::VectorXd means_, scales_;
    double y_mean_ = 0.0;
    double yy_ = 0.0;
    Eigen::MatrixXd gram_;
    Eigen::VectorXd xty_;
    Eigen::VectorXd beta_;  // standardized, indexed like columns_
    Eigen::VectorXd grad_;  // xty_ - gram_ beta_
};

LassoFit lasso_fit(const DesignMatrix& x, const Eigen::VectorXd& y, double lambda, const LassoOptions& opts = {});

/// Largest KKT violation in standardized coordinates.
double kkt_violation(const LassoFit& fit, const DesignMatrix& x, const Eigen::VectorXd& y);

Eigen::VectorXd predict(const LassoFit& fit, const DesignMatrix& x);

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

/// Chronological blocks of `block_train` rows followed by `block_test` rows.
/// An empty lambda grid means 50 log-spaced values from lambda_max down to
/// 1e-4 lambda_max (lambda_max taken over the training blocks only).
struct CvPlan {
    std::size_t block_train = 900;
    std::size_t block_test = 100;
    std::vector<double> lambda_grid;
};

struct CvBlock {
    std::size_t train_begin, train_end, test_begin, test_end;  // half-open
};

std::vector<CvBlock> cv_blocks(std::size_t n_rows, const CvPlan& plan);

struct CvRecord {
    double lambda;
    std::size_t block;
    double train_mse;
    double test_mse;
};

struct CvResult {
    double best_lambda = 0.0;
    std::vector<double> lambdas;
    std::vector<double> mean_test_mse;
    std::vector<CvRecord> records;
};

CvResult cv_fit(const DesignMatrix& x, const Eigen::VectorXd& y, const CvPlan& plan, const LassoOptions& opts = {});

/// log-spaced grid from hi down to hi * ratio.
std::vector<double> log_lambda_grid(double hi, std::size_t count = 50, double ratio = 1e-4);

/// {lambda, intercept, coefficients: [{word, value}], converged, n_iterations, objective}
void write_fit_json(std::ostream& os, const LassoFit& fit);
/// `lambda,block,train_mse,test_mse`
void write_cv_csv(std::ostream& os, const CvResult& cv);

}  // namespace fbmsig
