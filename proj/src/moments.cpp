#include "fbmsig/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "fbmsig/util/parallel.hpp"
#include "fbmsig/util/rng.hpp"
#include "fbmsig/util/summation.hpp"

namespace fbmsig {

std::string to_string(BoundRegime r) {
    return r == BoundRegime::young_h_gt_half ? "young" : "rough";
}

std::string to_string(BoundKind k) {
    switch (k) {
        case BoundKind::none: return "none";
        case BoundKind::young: return "young";
        case BoundKind::first_moment: return "first_moment";
        case BoundKind::second_moment: return "second_moment";
        case BoundKind::covariance: return "covariance";
    }
    return "none";
}

namespace {

void check_interval(double s, double t) {
    if (!(s >= 0.0 && s < t)) throw BoundDomainError("bound: need 0 <= s < t");
}

void check_rough(HurstParameter h, int n, const char* what) {
    if (!(h.value() < 0.5)) throw BoundDomainError(std::string(what) + ": requires H < 1/2");
    if (n > static_cast<int>(std::floor(1.0 / h.value())))
        throw BoundDomainError(std::string(what) + ": order " + std::to_string(n) + " exceeds floor(1/H)");
}

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

}  // namespace

double beta_kh(int k, HurstParameter h) {
    const double H = h.value();
    if (k < 1) throw BoundDomainError("beta_kh: k must be >= 1");
    if (!(H < 0.5)) throw BoundDomainError("beta_kh: requires H < 1/2");
    if (2.0 * k * H >= 1.0) throw BoundDomainError("beta_kh: requires 2kH < 1 (constant diverges)");
    return std::numbers::pi * (0.5 - H) / std::cos(std::numbers::pi * H) + 1.0 / (1.0 - 2.0 * k * H);
}

BoundValue bound_young(int p, int q, HurstParameter h, double s, double t) {
    if (p < 1 || q < 1) throw BoundDomainError("bound_young: word lengths must be positive");
    if (!(h.value() > 0.5)) throw BoundDomainError("bound_young: requires H > 1/2");
    check_interval(s, t);
    if ((p + q) % 2 != 0) return {0.0, true};
    const int k = (p + q) / 2;
    const double log_b = 2.0 * k * std::numbers::ln2 - log_factorial(k) + 2.0 * k * h.value() * std::log(t - s);
    return {std::exp(log_b), false};
}

BoundValue bound_first_moment(int n, HurstParameter h, double s, double t) {
    if (n < 1) throw BoundDomainError("bound_first_moment: n must be positive");
    check_interval(s, t);
    check_rough(h, n, "bound_first_moment");
    if (n % 2 != 0) return {0.0, true};
    const int k = n / 2;
    const double H = h.value();
    const double log_b = std::log(beta_kh(k, h)) - log_factorial(k) - k * std::log(H) + n * H * std::log(t - s);
    return {std::exp(log_b), false};
}

double bound_second_moment(int n, HurstParameter h, double s, double t) {
    if (n < 1) throw BoundDomainError("bound_second_moment: n must be positive");
    check_interval(s, t);
    check_rough(h, n, "bound_second_moment");
    const double H = h.value();
    const double beta = beta_kh(n, h);
    // n^2 + 2^{2n} n^5 beta / H^n, with the second term formed in log space
    const double log_tail = 2.0 * n * std::numbers::ln2 + 5.0 * std::log(n) + std::log(beta) - n * std::log(H);
    const double log_inner = std::log(static_cast<double>(n) * n + std::exp(log_tail));
    const double log_b = 4.0 * n * std::numbers::ln2 - log_factorial(n) - n * std::log(H) + log_inner +
                         2.0 * n * H * std::log(t - s);
    return std::exp(log_b);
}

BoundValue bound_covariance_rough(int p, int q, HurstParameter h, double s, double t) {
    if (p < 1 || q < 1) throw BoundDomainError("bound_covariance_rough: word lengths must be positive");
    const int n = p + q;
    check_interval(s, t);
    check_rough(h, n, "bound_covariance_rough");
    if (n % 2 != 0) return {0.0, true};
    const int k = n / 2;
    const double H = h.value();
    const double log_b = n * std::numbers::ln2 + std::log(beta_kh(k, h)) - log_factorial(k) - k * std::log(H) +
                         2.0 * k * H * std::log(t - s);
    return {std::exp(log_b), false};
}

SignatureSample::SignatureSample(int d, int depth, HurstParameter h, double s, double t, std::size_t n_paths,
                                 int n_steps, std::uint64_t seed, const MonteCarloOptions& opts)
    : d_(d), depth_(depth) {
    if (!(s >= 0.0 && s < t)) throw std::invalid_argument("SignatureSample: need 0 <= s < t");
    if (n_steps < 1) throw std::invalid_argument("SignatureSample: n_steps must be >= 1");
    const double dt = (t - s) / n_steps;
    const double lead = std::round(s / dt);
    if (std::abs(lead * dt - s) > 1e-9 * std::max(1.0, t))
        throw std::invalid_argument("SignatureSample: s must be a multiple of (t - s) / n_steps");
    const int lead_steps = static_cast<int>(lead);

    FbmConfig cfg;
    cfg.h = h;
    cfg.d = d;
    cfg.n_steps = lead_steps + n_steps;
    cfg.horizon_t = t;
    cfg.method = opts.method;
    cfg.seed = seed;
    const FbmSampler sampler(cfg);

    std::vector<std::optional<Signature>> slots(n_paths);
    parallel_for(n_paths, opts.threads, [&](std::size_t j) {
        const MultiPath path = sampler.sample(j);
        slots[j].emplace(path_signature(lead_steps == 0 ? path : path.slice(lead_steps, cfg.n_steps), depth));
    });
    sigs_.reserve(n_paths);
    for (auto& s_opt : slots) sigs_.push_back(std::move(*s_opt));
}

std::vector<double> SignatureSample::products(const Word& i, const std::optional<Word>& j) const {
    std::vector<double> out(sigs_.size());
    for (std::size_t n = 0; n < sigs_.size(); ++n) out[n] = j ? sigs_[n][i] * sigs_[n][*j] : sigs_[n][i];
    return out;
}

BoundKind default_bound_kind(HurstParameter h, bool paired) {
    if (h.value() > 0.5) return paired ? BoundKind::young : BoundKind::none;
    if (h.value() < 0.5) return paired ? BoundKind::covariance : BoundKind::first_moment;
    return BoundKind::none;
}

BoundValue bound_for(BoundKind kind, const Word& i, const std::optional<Word>& j, HurstParameter h, double s,
                     double t) {
    const int p = static_cast<int>(i.length());
    const int q = j ? static_cast<int>(j->length()) : 0;
    switch (kind) {
        case BoundKind::none:
            if ((p + q) % 2 != 0) return {0.0, true};
            return {std::numeric_limits<double>::infinity(), false};
        case BoundKind::young:
            if (!j) throw BoundDomainError("young bound needs a pair of words");
            return bound_young(p, q, h, s, t);
        case BoundKind::first_moment:
            if (j) throw BoundDomainError("first-moment bound takes a single word");
            return bound_first_moment(p, h, s, t);
        case BoundKind::second_moment:
            if (!j || !(*j == i)) throw BoundDomainError("second-moment bound needs word_j == word_i");
            return {bound_second_moment(p, h, s, t), false};
        case BoundKind::covariance:
            if (!j) throw BoundDomainError("covariance bound needs a pair of words");
            return bound_covariance_rough(p, q, h, s, t);
    }
    return {std::numeric_limits<double>::infinity(), false};
}

namespace {

MomentReport make_report(const SignatureSample& sample, const Word& word_i, const std::optional<Word>& word_j,
                         HurstParameter h, double s, double t, int n_steps, BoundKind kind, BoundValue bound) {
    MomentReport r;
    r.word_i = word_i;
    r.word_j = word_j;
    r.h = h;
    r.interval = {s, t};
    const auto values = sample.products(word_i, word_j);
    const auto stats = sample_stats(values);
    r.mc_estimate = stats.mean;
    r.mc_stderr = stats.stderr_mean;
    r.n_paths = sample.n_paths();
    r.n_steps = n_steps;
    r.kind = kind;
    r.bound = bound.value;
    r.satisfied = r.mc_estimate - 3.0 * r.mc_stderr <= r.bound;
    if (bound.vanishes) r.diagnostic = "odd total order: expectation is exactly zero";
    if (r.n_paths < 100) {
        if (!r.diagnostic.empty()) r.diagnostic += "; ";
        r.diagnostic += "warning: n_paths < 100, standard error unreliable";
    }
    return r;
}

int alphabet_of(const Word& i, const std::optional<Word>& j) {
    int d = i.alphabet();
    if (j && j->alphabet() != d) throw std::invalid_argument("mc_moment: words must share an alphabet");
    return d;
}

}  // namespace

MomentReport mc_moment(const Word& word_i, const std::optional<Word>& word_j, HurstParameter h, double s, double t,
                       std::size_t n_paths, int n_steps, std::uint64_t seed, std::optional<BoundKind> kind,
                       const MonteCarloOptions& opts) {
    if (word_i.empty() || (word_j && word_j->empty()))
        throw std::invalid_argument("mc_moment: words must be non-empty");
    if (n_paths < 2) throw std::invalid_argument("mc_moment: need at least 2 paths");
    const BoundKind k = kind.value_or(default_bound_kind(h, word_j.has_value()));
    const BoundValue bound = bound_for(k, word_i, word_j, h, s, t);
    const int d = alphabet_of(word_i, word_j);
    const int depth = static_cast<int>(std::max(word_i.length(), word_j ? word_j->length() : 0));
    const SignatureSample sample(d, depth, h, s, t, n_paths, n_steps, seed, opts);
    return make_report(sample, word_i, word_j, h, s, t, n_steps, k, bound);
}

ScalingResult scaling_check(const Word& word, HurstParameter h, double t, std::size_t n_paths, int n_steps,
                            std::uint64_t seed, const MonteCarloOptions& opts) {
    if (word.empty() || word.length() % 2 != 0)
        throw std::invalid_argument("scaling_check: word length must be even and positive (odd gives 0/0)");
    if (!(t > 0.0)) throw std::invalid_argument("scaling_check: t must be positive");
    const int depth = static_cast<int>(word.length());
    const SignatureSample over_t(word.alphabet(), depth, h, 0.0, t, n_paths, n_steps, stream_key(seed, 1), opts);
    const SignatureSample over_one(word.alphabet(), depth, h, 0.0, 1.0, n_paths, n_steps, stream_key(seed, 2), opts);
    const auto num = sample_stats(over_t.products(word, std::nullopt));
    const auto den = sample_stats(over_one.products(word, std::nullopt));
    if (std::abs(den.mean) <= 3.0 * den.stderr_mean)
        throw std::runtime_error("scaling_check: denominator estimate is indistinguishable from zero");
    ScalingResult r;
    r.ratio = num.mean / den.mean;
    r.stderr_ratio = std::abs(r.ratio) * std::hypot(num.stderr_mean / num.mean, den.stderr_mean / den.mean);
    r.expected = std::pow(t, h.value() * static_cast<double>(word.length()));
    return r;
}

std::vector<MomentReport> bound_sweep(BoundRegime regime, const std::vector<double>& h_grid,
                                      const std::vector<std::pair<int, int>>& order_pairs, std::size_t n_paths,
                                      int n_steps, std::uint64_t seed, const MonteCarloOptions& opts) {
    struct Cell {
        BoundKind kind;
        Word i;
        std::optional<Word> j;
    };
    std::vector<Cell> cells;
    auto ones = [](int n) { return Word::repeated(1, 1, static_cast<std::size_t>(n)); };
    std::vector<int> first_moment_orders;
    for (const auto& [p, q] : order_pairs) {
        if (p < 1 || q < 1) throw std::invalid_argument("bound_sweep: orders must be positive");
        if (regime == BoundRegime::young_h_gt_half) {
            cells.push_back({BoundKind::young, ones(p), ones(q)});
            continue;
        }
        cells.push_back({BoundKind::covariance, ones(p), ones(q)});
        if (p == q) cells.push_back({BoundKind::second_moment, ones(p), ones(p)});
        if (std::find(first_moment_orders.begin(), first_moment_orders.end(), p + q) == first_moment_orders.end())
            first_moment_orders.push_back(p + q);
    }
    for (int n : first_moment_orders) cells.push_back({BoundKind::first_moment, ones(n), std::nullopt});

    std::vector<MomentReport> out;
    const double s = 0.0;
    const double t = 1.0;
    for (std::size_t hi = 0; hi < h_grid.size(); ++hi) {
        const HurstParameter h(h_grid[hi]);
        std::vector<std::pair<const Cell*, BoundValue>> feasible;
        int depth = 0;
        for (const auto& c : cells) {
            try {
                if (regime == BoundRegime::young_h_gt_half && !(h.value() > 0.5))
                    throw BoundDomainError("young regime requires H > 1/2");
                if (regime == BoundRegime::rough_h_lt_half && !(h.value() < 0.5))
                    throw BoundDomainError("rough regime requires H < 1/2");
                const BoundValue b = bound_for(c.kind, c.i, c.j, h, s, t);
                feasible.emplace_back(&c, b);
                depth = std::max<int>(depth, static_cast<int>(std::max(c.i.length(), c.j ? c.j->length() : 0)));
            } catch (const BoundDomainError& e) {
                MomentReport r;
                r.word_i = c.i;
                r.word_j = c.j;
                r.h = h;
                r.interval = {s, t};
                r.n_paths = n_paths;
                r.n_steps = n_steps;
                r.kind = c.kind;
                r.bound = std::numeric_limits<double>::quiet_NaN();
                r.mc_estimate = std::numeric_limits<double>::quiet_NaN();
                r.mc_stderr = std::numeric_limits<double>::quiet_NaN();
                r.satisfied = false;
                r.skipped = true;
                r.diagnostic = e.what();
                out.push_back(std::move(r));
            }
        }
        if (feasible.empty()) continue;
        const SignatureSample sample(1, depth, h, s, t, n_paths, n_steps, stream_key(seed, hi), opts);
        for (const auto& [c, b] : feasible) out.push_back(make_report(sample, c->i, c->j, h, s, t, n_steps, c->kind, b));
    }
    return out;
}

void write_moment_csv(std::ostream& os, const std::vector<MomentReport>& reports) {
    os << "regime,H,word_i,word_j,s,t,n_paths,n_steps,estimate,stderr,bound,satisfied\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : reports) {
        const double H = r.h.value();
        const char* regime = H > 0.5 ? "young" : (H < 0.5 ? "rough" : "none");
        os << regime << ',' << num(H) << ',' << r.word_i.to_string() << ','
           << (r.word_j ? r.word_j->to_string() : std::string()) << ',' << num(r.interval.first) << ','
           << num(r.interval.second) << ',' << r.n_paths << ',' << r.n_steps << ',' << num(r.mc_estimate) << ','
           << num(r.mc_stderr) << ',' << num(r.bound) << ','
           << (r.skipped ? "skipped" : (r.satisfied ? "true" : "false")) << '\n';
    }
}

}  // namespace fbmsig
