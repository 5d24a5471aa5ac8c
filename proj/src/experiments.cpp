#include "fbmsig/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fbmsig/util/rng.hpp"

namespace fbmsig {

std::string to_string(PayoffType t) {
    switch (t) {
        case PayoffType::call: return "call";
        case PayoffType::asian: return "asian";
        case PayoffType::rainbow1: return "rainbow1";
        case PayoffType::rainbow2: return "rainbow2";
    }
    return "call";
}

PayoffType parse_payoff(const std::string& name) {
    if (name == "call") return PayoffType::call;
    if (name == "asian") return PayoffType::asian;
    if (name == "rainbow1") return PayoffType::rainbow1;
    if (name == "rainbow2") return PayoffType::rainbow2;
    throw std::invalid_argument("unknown payoff '" + name + "' (call, asian, rainbow1, rainbow2)");
}

double payoff(const MultiPath& path, const PayoffKind& kind) {
    if (path.dim() != kind.required_dim())
        throw std::invalid_argument("payoff: " + to_string(kind.type) + " needs d = " +
                                    std::to_string(kind.required_dim()) + ", path has d = " +
                                    std::to_string(path.dim()));
    const auto& v = path.values();
    const Eigen::Index last = path.size() - 1;
    switch (kind.type) {
        case PayoffType::call: return std::max(v(0, last) - kind.strike, 0.0);
        case PayoffType::asian: return std::max(v.row(0).mean() - kind.strike, 0.0);
        case PayoffType::rainbow1: return std::max(v(0, last) - v(1, last), 0.0);
        case PayoffType::rainbow2: return std::max(std::max(v(0, last), v(1, last)) - kind.strike, 0.0);
    }
    return 0.0;
}

std::vector<MultiPath> make_price_paths(HurstParameter h, int d, std::size_t n_paths, int n_steps,
                                        std::uint64_t seed, unsigned threads) {
    FbmConfig cfg;
    cfg.h = h;
    cfg.d = d;
    cfg.n_steps = n_steps;
    cfg.horizon_t = 1.0;
    cfg.seed = seed;
    auto paths = FbmSampler(cfg).sample_batch(n_paths, threads);
    std::vector<MultiPath> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.emplace_back(p.times(), (p.values().array() + 1.0).matrix());
    return out;
}

namespace {

struct FitSummary {
    double lambda, train_mse, test_mse;
};

FitSummary tune_and_fit(const DesignMatrix& train, const Eigen::VectorXd& y_train, const DesignMatrix& test,
                        const Eigen::VectorXd& y_test, const SweepConfig& cfg) {
    const CvResult cv = cv_fit(train, y_train, cfg.cv, cfg.lasso);
    const LassoFit fit = lasso_fit(train, y_train, cv.best_lambda, cfg.lasso);
    return {cv.best_lambda, mse(predict(fit, train), y_train), mse(predict(fit, test), y_test)};
}

}  // namespace

CellResult run_sweep_cell(const SweepConfig& cfg, const PayoffKind& p, double h_value, std::uint64_t seed,
                          TargetFn target) {
    const HurstParameter h(h_value);
    const std::uint64_t cell_key = stream_key(seed, std::bit_cast<std::uint64_t>(h_value));
    const std::size_t total = cfg.n_train + cfg.n_test;
    const auto paths = make_price_paths(h, p.required_dim(), total, cfg.n_steps, cell_key, cfg.threads);

    Eigen::VectorXd y(static_cast<Eigen::Index>(total));
    CounterRng noise(stream_key(cell_key, 0x6E6F697365ULL));
    for (std::size_t n = 0; n < total; ++n) {
        y[static_cast<Eigen::Index>(n)] = target(paths[n], p);
        if (cfg.noise_sigma > 0.0) y[static_cast<Eigen::Index>(n)] += cfg.noise_sigma * noise.normal();
    }
    const auto ntr = static_cast<Eigen::Index>(cfg.n_train);
    const auto nte = static_cast<Eigen::Index>(cfg.n_test);
    const Eigen::VectorXd y_train = y.head(ntr);
    const Eigen::VectorXd y_test = y.tail(nte);

    auto row = [&](const char* method, int depth, const FitSummary& s) {
        return SweepRow{to_string(p.type), h_value, seed, method, depth, s.lambda, s.train_mse, s.test_mse,
                        cfg.n_train, cfg.n_test, cfg.n_steps};
    };

    const DesignMatrix raw = build_raw_design(paths);
    const auto base = tune_and_fit(raw.row_block(0, ntr), y_train, raw.row_block(ntr, nte), y_test, cfg);

    const DesignMatrix sig = build_design(paths, cfg.depth_k, true, cfg.threads);
    const auto sigfit = tune_and_fit(sig.row_block(0, ntr), y_train, sig.row_block(ntr, nte), y_test, cfg);

    return {row("lasso", 0, base), row("signature", cfg.depth_k, sigfit)};
}

std::vector<SweepRow> run_hurst_sweep(const SweepConfig& cfg, const PayoffKind& p) {
    std::vector<SweepRow> rows;
    for (std::size_t r = 0; r < cfg.replications; ++r) {
        const std::uint64_t seed = cfg.seed + r;
        for (double h : cfg.h_grid) {
            const auto cell = run_sweep_cell(cfg, p, h, seed);
            rows.push_back(cell.baseline);
            rows.push_back(cell.signature);
        }
    }
    return rows;
}

void sweep_to_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "payoff,H,seed,method,depth_k,lambda,train_mse,test_mse,n_train,n_test,n_steps\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%llu,%s,%d,%.17g,%.17g,%.17g,%zu,%zu,%d\n", r.payoff.c_str(), r.h,
                      static_cast<unsigned long long>(r.seed), r.method.c_str(), r.depth_k, r.lambda, r.train_mse,
                      r.test_mse, r.n_train, r.n_test, r.n_steps);
        os << buf;
    }
}

std::vector<SweepRow> sweep_from_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) ||
        line != "payoff,H,seed,method,depth_k,lambda,train_mse,test_mse,n_train,n_test,n_steps")
        throw std::runtime_error("sweep csv: unexpected header");
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 11) throw std::runtime_error("sweep csv: expected 11 fields");
        rows.push_back(SweepRow{f[0], std::stod(f[1]), std::stoull(f[2]), f[3], std::stoi(f[4]), std::stod(f[5]),
                                std::stod(f[6]), std::stod(f[7]), std::stoull(f[8]), std::stoull(f[9]),
                                std::stoi(f[10])});
    }
    return rows;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need equal lengths >= 2");
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const auto n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace fbmsig
