#include "fbmsig/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "fbmsig/signature.hpp"
#include "fbmsig/util/parallel.hpp"

namespace fbmsig {

DesignMatrix DesignMatrix::row_block(Eigen::Index first, Eigen::Index count) const {
    if (first < 0 || count < 0 || first + count > rows()) throw std::out_of_range("DesignMatrix::row_block");
    return {x.middleRows(first, count), labels};
}

DesignMatrix build_design(const std::vector<MultiPath>& paths, int depth, bool augment, unsigned threads) {
    if (paths.empty()) throw std::invalid_argument("build_design: no paths");
    if (depth < 1) throw std::invalid_argument("build_design: depth must be >= 1");
    const Eigen::Index d = paths.front().dim();
    for (const auto& p : paths)
        if (p.dim() != d) throw std::invalid_argument("build_design: paths have inconsistent dimensions");
    const int d_eff = static_cast<int>(d) + (augment ? 1 : 0);
    DesignMatrix out;
    for (const auto& w : all_words(d_eff, depth)) out.labels.push_back(w.to_string());
    out.x.resize(static_cast<Eigen::Index>(paths.size()), static_cast<Eigen::Index>(out.labels.size()));
    parallel_for(paths.size(), threads, [&](std::size_t n) {
        const Signature sig = augment ? path_signature(time_augment(paths[n]), depth) : path_signature(paths[n], depth);
        out.x.row(static_cast<Eigen::Index>(n)) = sig.flatten().transpose();
    });
    return out;
}

DesignMatrix build_raw_design(const std::vector<MultiPath>& paths) {
    if (paths.empty()) throw std::invalid_argument("build_raw_design: no paths");
    const Eigen::Index d = paths.front().dim();
    const Eigen::Index n = paths.front().size();
    for (const auto& p : paths)
        if (p.dim() != d || p.size() != n) throw std::invalid_argument("build_raw_design: paths have inconsistent shapes");
    DesignMatrix out;
    out.labels.emplace_back();
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out.labels.push_back("x" + std::to_string(i + 1) + "@" + std::to_string(j));
    out.x.resize(static_cast<Eigen::Index>(paths.size()), 1 + d * n);
    for (std::size_t r = 0; r < paths.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        out.x(row, 0) = 1.0;
        for (Eigen::Index i = 0; i < d; ++i) out.x.row(row).segment(1 + i * n, n) = paths[r].values().row(i);
    }
    return out;
}

double soft_threshold(double z, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("soft_threshold: gamma must be nonnegative");
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

Eigen::Index LassoFit::nonzeros() const {
    Eigen::Index n = 0;
    for (Eigen::Index j = 1; j < coefficients.size(); ++j) n += coefficients[j] != 0.0;
    return n;
}

namespace {

void check_inputs(const DesignMatrix& x, const Eigen::VectorXd& y) {
    if (x.rows() < 1 || x.rows() != y.size()) throw std::invalid_argument("lasso: rows(x) must equal len(y) >= 1");
    if (x.cols() < 1 || static_cast<std::size_t>(x.cols()) != x.labels.size())
        throw std::invalid_argument("lasso: labels must match the column count");
    if (!x.x.allFinite() || !y.allFinite()) throw std::invalid_argument("lasso: non-finite entries in x or y");
    if (!(x.x.col(0).array() == 1.0).all()) throw std::invalid_argument("lasso: column 0 must be the constant 1");
}

}  // namespace

LassoSolver::LassoSolver(const DesignMatrix& x, const Eigen::VectorXd& y, LassoOptions opts)
    : opts_(opts), design_(&x), y_(&y) {
    check_inputs(x, y);
    if (opts_.max_iter < 1 || !(opts_.tol > 0.0)) throw std::invalid_argument("lasso: bad max_iter or tol");
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    means_ = Eigen::VectorXd::Zero(p);
    scales_ = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 1; j < p; ++j) {
        const double m = x.x.col(j).mean();
        const double sd = std::sqrt((x.x.col(j).array() - m).square().mean());
        means_[j] = m;
        if (sd > 1e-12 * (1.0 + std::abs(m))) {
            scales_[j] = opts_.standardize ? sd : 1.0;
            columns_.push_back(j);
        }
    }
    const auto q = static_cast<Eigen::Index>(columns_.size());
    Eigen::MatrixXd xs(n, q);
    for (Eigen::Index k = 0; k < q; ++k) {
        const Eigen::Index j = columns_[static_cast<std::size_t>(k)];
        xs.col(k) = (x.x.col(j).array() - means_[j]) / scales_[j];
    }
    y_mean_ = y.mean();
    const Eigen::VectorXd yc = y.array() - y_mean_;
    yy_ = yc.squaredNorm();
    gram_ = Eigen::MatrixXd(q, q);
    gram_.setZero();
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(xs.transpose());
    gram_ = gram_.selfadjointView<Eigen::Lower>();
    xty_ = xs.transpose() * yc;
    beta_ = Eigen::VectorXd::Zero(q);
    grad_ = xty_;
}

double LassoSolver::lambda_max() const { return xty_.size() ? 2.0 * xty_.cwiseAbs().maxCoeff() : 0.0; }

double LassoSolver::full_cycle(double lambda) {
    double max_delta = 0.0;
    const double half = 0.5 * lambda;
    for (Eigen::Index k = 0; k < beta_.size(); ++k) {
        const double old = beta_[k];
        const double gkk = gram_(k, k);
        const double updated = soft_threshold(grad_[k] + gkk * old, half) / gkk;
        if (updated != old) {
            const double delta = updated - old;
            grad_.noalias() -= delta * gram_.col(k);
            beta_[k] = updated;
            max_delta = std::max(max_delta, std::abs(delta));
        }
    }
    return max_delta;
}

int LassoSolver::active_cycles(double lambda, int budget, std::vector<double>* history) {
    // Cycles over the current nonzero coefficients only, on the Gram block of
    // that set; the full gradient is brought up to date once at the end.
    std::vector<Eigen::Index> act;
    for (Eigen::Index k = 0; k < beta_.size(); ++k)
        if (beta_[k] != 0.0) act.push_back(k);
    if (act.empty() || budget <= 0) return 0;
    const Eigen::MatrixXd sub = gram_(act, act);
    const Eigen::VectorXd b0 = beta_(act);
    const Eigen::VectorXd xty = xty_(act);
    Eigen::VectorXd b = b0;
    Eigen::VectorXd g = grad_(act);
    const double half = 0.5 * lambda;
    const auto n = static_cast<Eigen::Index>(act.size());
    int used = 0;
    while (used < budget) {
        double max_delta = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double old = b[k];
            if (old == 0.0) continue;
            const double gkk = sub(k, k);
            const double updated = soft_threshold(g[k] + gkk * old, half) / gkk;
            if (updated != old) {
                const double delta = updated - old;
                g.noalias() -= delta * sub.col(k);
                b[k] = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        ++used;
        if (history) history->push_back(yy_ - b.dot(xty) - b.dot(g) + lambda * b.lpNorm<1>());
        if (max_delta < opts_.tol) break;
    }
    grad_.noalias() -= gram_(Eigen::all, act) * (b - b0);
    beta_(act) = b;
    return used;
}

double LassoSolver::objective(double lambda) const {
    const double rss = yy_ - beta_.dot(xty_) - beta_.dot(grad_);
    return rss + lambda * beta_.lpNorm<1>();
}

LassoFit LassoSolver::solve(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lasso: lambda must be finite and >= 0");
    LassoFit fit;
    fit.labels = design_->labels;
    fit.lambda = lambda;
    auto* history = opts_.record_history ? &fit.objective_history : nullptr;
    int iter = 0;
    while (iter < opts_.max_iter) {
        const double full = full_cycle(lambda);
        ++iter;
        if (history) history->push_back(objective(lambda));
        if (full < opts_.tol) {
            fit.converged = true;
            break;
        }
        iter += active_cycles(lambda, opts_.max_iter - iter, history);
    }
    fit.n_iterations = iter;
    const Eigen::Index p = design_->cols();
    fit.coefficients = Eigen::VectorXd::Zero(p);
    fit.column_means = means_;
    fit.column_scales = scales_;
    double intercept = y_mean_;
    for (std::size_t k = 0; k < columns_.size(); ++k) {
        const Eigen::Index j = columns_[k];
        const double b = beta_[static_cast<Eigen::Index>(k)] / scales_[j];
        fit.coefficients[j] = b;
        intercept -= b * means_[j];
    }
    fit.coefficients[0] = intercept;
    fit.final_objective = lasso_objective(fit, *design_, *y_);
    return fit;
}

double lasso_objective(const LassoFit& fit, const DesignMatrix& x, const Eigen::VectorXd& y) {
    const double rss = (y - x.x * fit.coefficients).squaredNorm();
    double penalty = 0.0;
    for (Eigen::Index j = 1; j < fit.coefficients.size(); ++j)
        penalty += fit.column_scales[j] * std::abs(fit.coefficients[j]);
    return rss + fit.lambda * penalty;
}

double lambda_max(const DesignMatrix& x, const Eigen::VectorXd& y, bool standardize) {
    LassoOptions o;
    o.standardize = standardize;
    return LassoSolver(x, y, o).lambda_max();
}

LassoFit lasso_fit(const DesignMatrix& x, const Eigen::VectorXd& y, double lambda, const LassoOptions& opts) {
    LassoSolver solver(x, y, opts);
    return solver.solve(lambda);
}

double kkt_violation(const LassoFit& fit, const DesignMatrix& x, const Eigen::VectorXd& y) {
    const Eigen::VectorXd r = y - x.x * fit.coefficients;
    double worst = 0.0;
    for (Eigen::Index j = 1; j < x.cols(); ++j) {
        const double scale = fit.column_scales[j];
        if (scale == 0.0) continue;
        const double g = 2.0 * (x.x.col(j).array() - fit.column_means[j]).matrix().dot(r) / scale;
        const double b = fit.coefficients[j];
        const double v = b != 0.0 ? std::abs(g - fit.lambda * (b > 0 ? 1.0 : -1.0)) : std::max(0.0, std::abs(g) - fit.lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

Eigen::VectorXd predict(const LassoFit& fit, const DesignMatrix& x) {
    if (x.labels != fit.labels) throw std::invalid_argument("predict: design columns do not match the fit");
    return x.x * fit.coefficients;
}

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
    if (pred.size() != truth.size() || pred.size() < 1) throw std::invalid_argument("mse: lengths must match and be >= 1");
    return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

std::vector<CvBlock> cv_blocks(std::size_t n_rows, const CvPlan& plan) {
    if (plan.block_train < 1 || plan.block_test < 1) throw std::invalid_argument("cv: block sizes must be positive");
    const std::size_t span = plan.block_train + plan.block_test;
    if (n_rows < span)
        throw std::invalid_argument("cv: need at least " + std::to_string(span) + " rows, have " + std::to_string(n_rows));
    std::vector<CvBlock> out;
    for (std::size_t start = 0; start + span <= n_rows; start += span)
        out.push_back({start, start + plan.block_train, start + plan.block_train, start + span});
    return out;
}

std::vector<double> log_lambda_grid(double hi, std::size_t count, double ratio) {
    if (!(hi > 0.0)) return {0.0};
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        g[i] = hi * std::pow(ratio, frac);
    }
    return g;
}

CvResult cv_fit(const DesignMatrix& x, const Eigen::VectorXd& y, const CvPlan& plan, const LassoOptions& opts) {
    check_inputs(x, y);
    const auto blocks = cv_blocks(static_cast<std::size_t>(x.rows()), plan);
    struct Fold {
        DesignMatrix train, test;
        Eigen::VectorXd y_train, y_test;
        std::optional<LassoSolver> solver;
    };
    std::vector<Fold> folds(blocks.size());
    double hi = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& blk = blocks[b];
        auto& f = folds[b];
        const auto tr0 = static_cast<Eigen::Index>(blk.train_begin);
        const auto trn = static_cast<Eigen::Index>(blk.train_end - blk.train_begin);
        const auto te0 = static_cast<Eigen::Index>(blk.test_begin);
        const auto ten = static_cast<Eigen::Index>(blk.test_end - blk.test_begin);
        f.train = x.row_block(tr0, trn);
        f.test = x.row_block(te0, ten);
        f.y_train = y.segment(tr0, trn);
        f.y_test = y.segment(te0, ten);
        f.solver.emplace(f.train, f.y_train, opts);
        hi = std::max(hi, f.solver->lambda_max());
    }
    CvResult res;
    res.lambdas = plan.lambda_grid.empty() ? log_lambda_grid(hi) : plan.lambda_grid;
    for (std::size_t i = 0; i < res.lambdas.size(); ++i) {
        if (!(res.lambdas[i] >= 0.0)) throw std::invalid_argument("cv: lambda grid must be nonnegative");
        if (i && !(res.lambdas[i] < res.lambdas[i - 1])) throw std::invalid_argument("cv: lambda grid must be decreasing");
    }
    res.mean_test_mse.assign(res.lambdas.size(), 0.0);
    for (std::size_t i = 0; i < res.lambdas.size(); ++i) {
        for (std::size_t b = 0; b < folds.size(); ++b) {
            auto& f = folds[b];
            const LassoFit fit = f.solver->solve(res.lambdas[i]);
            const double train = mse(predict(fit, f.train), f.y_train);
            const double test = mse(predict(fit, f.test), f.y_test);
            res.records.push_back({res.lambdas[i], b, train, test});
            res.mean_test_mse[i] += test / static_cast<double>(folds.size());
        }
    }
    // first minimum along the decreasing grid: ties go to the larger lambda
    std::size_t best = 0;
    for (std::size_t i = 1; i < res.lambdas.size(); ++i)
        if (res.mean_test_mse[i] < res.mean_test_mse[best] * (1.0 - 1e-12)) best = i;
    res.best_lambda = res.lambdas[best];
    return res;
}

void write_fit_json(std::ostream& os, const LassoFit& fit) {
    nlohmann::ordered_json j;
    j["lambda"] = fit.lambda;
    j["intercept"] = fit.intercept();
    auto coefs = nlohmann::ordered_json::array();
    for (std::size_t k = 1; k < fit.labels.size(); ++k)
        coefs.push_back({{"word", fit.labels[k]}, {"value", fit.coefficients[static_cast<Eigen::Index>(k)]}});
    j["coefficients"] = std::move(coefs);
    j["converged"] = fit.converged;
    j["n_iterations"] = fit.n_iterations;
    j["objective"] = fit.final_objective;
    os << j.dump(2) << '\n';
}

void write_cv_csv(std::ostream& os, const CvResult& cv) {
    os << "lambda,block,train_mse,test_mse\n";
    char buf[128];
    for (const auto& r : cv.records) {
        std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g\n", r.lambda, r.block, r.train_mse, r.test_mse);
        os << buf;
    }
}

}  // namespace fbmsig
