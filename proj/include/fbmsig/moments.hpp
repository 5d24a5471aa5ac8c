#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fbmsig/fbm.hpp"
#include "fbmsig/signature.hpp"
#include "fbmsig/word.hpp"

namespace fbmsig {

/// Raised when a moment bound is requested outside its validity domain.
class BoundDomainError : public std::domain_error {
    using std::domain_error::domain_error;
};

enum class BoundRegime { young_h_gt_half, rough_h_lt_half };

enum class BoundKind {
    none,           // no bound applies (e.g. H = 1/2, or a single word with H > 1/2)
    young,          // E[S_I S_J] for H > 1/2
    first_moment,   // E[S_I] for H < 1/2
    second_moment,  // E[S_I^2] for H < 1/2
    covariance,     // E[S_I S_J] for H < 1/2
};

std::string to_string(BoundRegime r);
std::string to_string(BoundKind k);

/// A bound value, or the statement that the expectation is exactly zero
/// (odd total order).
struct BoundValue {
    double value = 0.0;
    bool vanishes = false;
};

/// pi (1/2 - H) / cos(pi H) + 1 / (1 - 2kH); requires H < 1/2 and 2kH < 1.
double beta_kh(int k, HurstParameter h);

/// 2^{2k} / k! (t-s)^{2kH} with p + q = 2k, for H > 1/2.
BoundValue bound_young(int p, int q, HurstParameter h, double s, double t);

/// beta_{k,H} / (k! H^k) (t-s)^{nH} with n = 2k, for H < 1/2.
BoundValue bound_first_moment(int n, HurstParameter h, double s, double t);

/// 2^{4n} / (n! H^n) (n^2 + 2^{2n} n^5 beta_{n,H} / H^n) (t-s)^{2nH}, for H < 1/2.
double bound_second_moment(int n, HurstParameter h, double s, double t);

/// 2^n beta_{k,H} / (k! H^k) (t-s)^{2kH} with p + q = 2k = n, for H < 1/2.
BoundValue bound_covariance_rough(int p, int q, HurstParameter h, double s, double t);

struct MomentReport {
    Word word_i{1};
    std::optional<Word> word_j;
    HurstParameter h{0.5};
    std::pair<double, double> interval{0.0, 1.0};
    double mc_estimate = 0.0;
    double mc_stderr = 0.0;
    std::size_t n_paths = 0;
    int n_steps = 0;
    BoundKind kind = BoundKind::none;
    double bound = 0.0;  // +inf when kind == none
    bool satisfied = true;
    bool skipped = false;  // infeasible cell recorded without simulation
    std::string diagnostic;
};

struct MonteCarloOptions {
    FbmMethod method = FbmMethod::davies_harte;
    unsigned threads = 1;
};

/// Truncated signatures of independent fBm paths restricted to [s, t]. The
/// grid has `n_steps` steps across [s, t] and starts at 0, so s must be a
/// multiple of (t - s) / n_steps.
class SignatureSample {
public:
    SignatureSample(int d, int depth, HurstParameter h, double s, double t, std::size_t n_paths, int n_steps,
                    std::uint64_t seed, const MonteCarloOptions& opts = {});

    /// Per-path values of S_i (or S_i S_j).
    std::vector<double> products(const Word& i, const std::optional<Word>& j) const;

    std::size_t n_paths() const noexcept { return sigs_.size(); }
    int dim() const noexcept { return d_; }
    int depth() const noexcept { return depth_; }

private:
    int d_;
    int depth_;
    std::vector<Signature> sigs_;
};

/// Bound matching (kind, word lengths). Odd total order gives vanishes = true.
/// BoundKind::none yields +inf.
BoundValue bound_for(BoundKind kind, const Word& i, const std::optional<Word>& j, HurstParameter h, double s,
                     double t);

/// Default bound kind for a moment: H > 1/2 with a pair -> young; H < 1/2
/// single word -> first_moment, pair -> covariance; otherwise none.
BoundKind default_bound_kind(HurstParameter h, bool paired);

MomentReport mc_moment(const Word& word_i, const std::optional<Word>& word_j, HurstParameter h, double s, double t,
                       std::size_t n_paths, int n_steps, std::uint64_t seed,
                       std::optional<BoundKind> kind = std::nullopt, const MonteCarloOptions& opts = {});

struct ScalingResult {
    double ratio = 0.0;
    double stderr_ratio = 0.0;
    double expected = 0.0;  // t^{H |word|}
};

/// E[S_w over [0,t]] / E[S_w over [0,1]] from two independent samples.
ScalingResult scaling_check(const Word& word, HurstParameter h, double t, std::size_t n_paths, int n_steps,
                            std::uint64_t seed, const MonteCarloOptions& opts = {});

/// One report per feasible (H, cell); infeasible cells are recorded with
/// skipped = true and the domain error text. Young regime: one `young` cell
/// per (p, q). Rough regime: a `covariance` cell per (p, q), a
/// `second_moment` cell when p == q, and a `first_moment` cell for each
/// distinct p + q. Words are all-ones over a one-letter alphabet.
std::vector<MomentReport> bound_sweep(BoundRegime regime, const std::vector<double>& h_grid,
                                      const std::vector<std::pair<int, int>>& order_pairs, std::size_t n_paths,
                                      int n_steps, std::uint64_t seed, const MonteCarloOptions& opts = {});

/// CSV `regime,H,word_i,word_j,s,t,n_paths,n_steps,estimate,stderr,bound,satisfied`.
void write_moment_csv(std::ostream& os, const std::vector<MomentReport>& reports);

}  // namespace fbmsig
