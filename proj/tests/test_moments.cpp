#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fbmsig/moments.hpp"
#include "oracles/brute_signature.hpp"

using namespace fbmsig;

namespace {

constexpr double kPi = std::numbers::pi;

Word ones(std::size_t n) { return Word::repeated(1, 1, n); }

}  // namespace

TEST(Beta, Examples) {
    EXPECT_NEAR(beta_kh(1, HurstParameter(0.25)), 3.11072073453959156, 1e-13);
    EXPECT_NEAR(beta_kh(2, HurstParameter(0.2)), kPi * 0.3 / std::cos(0.2 * kPi) + 5.0, 1e-12);
    EXPECT_NEAR(beta_kh(2, HurstParameter(0.2)), 6.16496662323528104, 1e-12);
    EXPECT_THROW(beta_kh(1, HurstParameter(0.5)), BoundDomainError);
    EXPECT_THROW(beta_kh(1, HurstParameter(0.7)), BoundDomainError);
    EXPECT_THROW(beta_kh(3, HurstParameter(0.2)), BoundDomainError);
}

TEST(BoundYoung, Examples) {
    const HurstParameter h(0.75);
    EXPECT_DOUBLE_EQ(bound_young(1, 1, h, 0, 1).value, 4.0);
    EXPECT_DOUBLE_EQ(bound_young(2, 2, h, 0, 1).value, 8.0);
    EXPECT_DOUBLE_EQ(bound_young(1, 3, h, 0, 1).value, 8.0);
    EXPECT_NEAR(bound_young(1, 1, HurstParameter(0.6), 0, 2).value, 4.0 * std::pow(2.0, 1.2), 1e-12);
    EXPECT_TRUE(bound_young(1, 2, h, 0, 1).vanishes);
    EXPECT_THROW(bound_young(1, 1, HurstParameter(0.4), 0, 1), BoundDomainError);
    EXPECT_THROW(bound_young(1, 1, h, 1, 1), BoundDomainError);
}

TEST(BoundFirstMoment, Examples) {
    const HurstParameter h(0.25);
    const double full = bound_first_moment(2, h, 0, 1).value;
    EXPECT_NEAR(full, 12.4428829381583662, 1e-12);
    EXPECT_NEAR(bound_first_moment(2, h, 0, 0.5).value, full * std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(bound_first_moment(2, h, 0.5, 1.0).value, full * std::sqrt(0.5), 1e-12);
    EXPECT_TRUE(bound_first_moment(3, h, 0, 1).vanishes);
    EXPECT_THROW(bound_first_moment(4, h, 0, 1), BoundDomainError);
    EXPECT_THROW(bound_first_moment(2, HurstParameter(0.6), 0, 1), BoundDomainError);
}

TEST(BoundSecondMoment, Examples) {
    EXPECT_NEAR(bound_second_moment(1, HurstParameter(0.25), 0, 1), 3249.37803216854176, 1e-9);
    EXPECT_NEAR(bound_second_moment(1, HurstParameter(0.25), 0, 1),
                (16.0 / 0.25) * (1.0 + 4.0 * 3.11072073453959156 / 0.25), 1e-9);
    EXPECT_NEAR(bound_second_moment(2, HurstParameter(0.2), 0, 1) / 252529832.887717055, 1.0, 1e-13);
    EXPECT_THROW(bound_second_moment(3, HurstParameter(0.2), 0, 1), BoundDomainError);
    EXPECT_THROW(bound_second_moment(3, HurstParameter(0.4), 0, 1), BoundDomainError);
    EXPECT_GE(bound_second_moment(1, HurstParameter(0.25), 0, 1), 1.0);
}

TEST(BoundCovarianceRough, Examples) {
    EXPECT_NEAR(bound_covariance_rough(1, 1, HurstParameter(0.25), 0, 1).value, 49.7715317526334650, 1e-11);
    EXPECT_NEAR(bound_covariance_rough(1, 3, HurstParameter(0.2), 0, 1).value, 1232.99332464705607, 1e-9);
    EXPECT_NEAR(bound_covariance_rough(1, 3, HurstParameter(0.2), 0, 1).value,
                16.0 * beta_kh(2, HurstParameter(0.2)) / (2.0 * 0.04), 1e-9);
    EXPECT_TRUE(bound_covariance_rough(1, 2, HurstParameter(0.25), 0, 1).vanishes);
    EXPECT_THROW(bound_covariance_rough(2, 2, HurstParameter(0.3), 0, 1), BoundDomainError);
    EXPECT_THROW(bound_covariance_rough(1, 1, HurstParameter(0.75), 0, 1), BoundDomainError);
}

TEST(Bounds, MonotoneInIntervalLength) {
    for (double len : {0.1, 0.5, 1.0, 2.0}) {
        const double next = len * 1.5;
        EXPECT_LT(bound_young(2, 2, HurstParameter(0.7), 0, len).value,
                  bound_young(2, 2, HurstParameter(0.7), 0, next).value);
        EXPECT_LT(bound_first_moment(2, HurstParameter(0.2), 0, len).value,
                  bound_first_moment(2, HurstParameter(0.2), 0, next).value);
        EXPECT_LT(bound_second_moment(2, HurstParameter(0.2), 0, len),
                  bound_second_moment(2, HurstParameter(0.2), 0, next));
        EXPECT_LT(bound_covariance_rough(1, 1, HurstParameter(0.3), 0, len).value,
                  bound_covariance_rough(1, 1, HurstParameter(0.3), 0, next).value);
    }
}

TEST(Bounds, LargeOrderStaysFinite) {
    const double v = bound_young(20, 20, HurstParameter(0.9), 0, 1).value;
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_NEAR(std::log(v), 40 * std::log(2.0) - std::lgamma(21.0), 1e-10);
}

TEST(BoundFor, DispatchesByKind) {
    EXPECT_TRUE(std::isinf(bound_for(BoundKind::none, ones(2), std::nullopt, HurstParameter(0.5), 0, 1).value));
    EXPECT_TRUE(bound_for(BoundKind::none, ones(1), std::nullopt, HurstParameter(0.5), 0, 1).vanishes);
    EXPECT_DOUBLE_EQ(bound_for(BoundKind::young, ones(1), ones(1), HurstParameter(0.75), 0, 1).value, 4.0);
    EXPECT_EQ(default_bound_kind(HurstParameter(0.75), true), BoundKind::young);
    EXPECT_EQ(default_bound_kind(HurstParameter(0.75), false), BoundKind::none);
    EXPECT_EQ(default_bound_kind(HurstParameter(0.25), false), BoundKind::first_moment);
    EXPECT_EQ(default_bound_kind(HurstParameter(0.25), true), BoundKind::covariance);
    EXPECT_EQ(default_bound_kind(HurstParameter(0.5), true), BoundKind::none);
}

TEST(McMoment, MeanOfLevelOneIsZero) {
    for (double h : {0.25, 0.5, 0.75}) {
        const auto r = mc_moment(ones(1), std::nullopt, HurstParameter(h), 0, 1, 4000, 128, 11);
        EXPECT_LE(std::abs(r.mc_estimate), 3 * r.mc_stderr) << h;
        EXPECT_TRUE(r.satisfied);
    }
}

TEST(McMoment, SecondMomentOfLevelOne) {
    const auto r = mc_moment(ones(1), ones(1), HurstParameter(0.75), 0, 1, 10000, 256, 12);
    EXPECT_LE(std::abs(r.mc_estimate - 1.0), 3 * r.mc_stderr);
    EXPECT_EQ(r.kind, BoundKind::young);
    EXPECT_DOUBLE_EQ(r.bound, 4.0);
    EXPECT_TRUE(r.satisfied);
}

TEST(McMoment, BrownianLevelTwoSquared) {
    const auto r = mc_moment(ones(2), ones(2), HurstParameter(0.5), 0, 1, 10000, 256, 13);
    EXPECT_LE(std::abs(r.mc_estimate - 0.75), 3 * r.mc_stderr);
    EXPECT_TRUE(std::isinf(r.bound));
}

TEST(McMoment, SubintervalVariance) {
    const auto r = mc_moment(ones(1), ones(1), HurstParameter(0.3), 0.5, 1.0, 10000, 64, 14);
    EXPECT_LE(std::abs(r.mc_estimate - std::pow(0.5, 0.6)), 3 * r.mc_stderr);
    EXPECT_EQ(r.interval.first, 0.5);
}

TEST(McMoment, SymmetricInWordOrder) {
    const Word i(2, {1, 2}), j(2, {2, 2});
    const auto a = mc_moment(i, j, HurstParameter(0.6), 0, 1, 500, 64, 15);
    const auto b = mc_moment(j, i, HurstParameter(0.6), 0, 1, 500, 64, 15);
    EXPECT_EQ(a.mc_estimate, b.mc_estimate);
    EXPECT_EQ(a.mc_stderr, b.mc_stderr);
}

TEST(McMoment, SmallSampleDiagnostic) {
    const auto r = mc_moment(ones(2), std::nullopt, HurstParameter(0.5), 0, 1, 50, 16, 16);
    EXPECT_NE(r.diagnostic.find("warning"), std::string::npos);
    const auto big = mc_moment(ones(2), std::nullopt, HurstParameter(0.5), 0, 1, 100, 16, 16);
    EXPECT_TRUE(big.diagnostic.empty());
}

TEST(McMoment, PropagatesDomainErrors) {
    EXPECT_THROW(mc_moment(ones(2), ones(2), HurstParameter(0.3), 0, 1, 10, 8, 1), BoundDomainError);
    EXPECT_THROW(mc_moment(Word(2, {1}), Word(3, {1}), HurstParameter(0.6), 0, 1, 10, 8, 1), std::invalid_argument);
}

TEST(McMoment, ParallelMatchesSerial) {
    MonteCarloOptions par;
    par.threads = 4;
    const auto a = mc_moment(ones(2), std::nullopt, HurstParameter(0.4), 0, 1, 300, 32, 17);
    const auto b = mc_moment(ones(2), std::nullopt, HurstParameter(0.4), 0, 1, 300, 32, 17, std::nullopt, par);
    EXPECT_NEAR(a.mc_estimate, b.mc_estimate, 1e-12);
}

TEST(McMoment, RefinementChangesLittle) {
    const auto coarse = mc_moment(ones(2), std::nullopt, HurstParameter(0.3), 0, 1, 4000, 128, 18);
    const auto fine = mc_moment(ones(2), std::nullopt, HurstParameter(0.3), 0, 1, 4000, 256, 19);
    const double se = std::hypot(coarse.mc_stderr, fine.mc_stderr);
    EXPECT_LT(std::abs(coarse.mc_estimate - fine.mc_estimate), 3 * se);
}

TEST(McMoment, MatchesWickOracleOnCoarseGrid) {
    // exact E[S_I S_J] for the 4-segment PL discretization
    for (double h : {0.5, 0.7}) {
        const Word i(2, {1, 2}), j(2, {1, 2});
        const double exact = oracle::pl_signature_moment(i.letters(), j.letters(), h, 4, 1.0);
        const auto r = mc_moment(i, j, HurstParameter(h), 0, 1, 20000, 4, 20);
        EXPECT_LE(std::abs(r.mc_estimate - exact), 3 * r.mc_stderr) << h << " exact " << exact;
    }
    const double exact = oracle::pl_signature_moment({1, 1}, {}, 0.75, 4, 1.0);
    const auto r = mc_moment(ones(2), std::nullopt, HurstParameter(0.75), 0, 1, 20000, 4, 21);
    EXPECT_NEAR(exact, 0.5, 1e-12);
    EXPECT_LE(std::abs(r.mc_estimate - exact), 3 * r.mc_stderr);
}

TEST(ScalingCheck, Examples) {
    const auto a = scaling_check(ones(2), HurstParameter(0.5), 4.0, 20000, 64, 30);
    EXPECT_DOUBLE_EQ(a.expected, 4.0);
    EXPECT_LE(std::abs(a.ratio - 4.0), 3 * a.stderr_ratio);

    const auto b = scaling_check(ones(2), HurstParameter(0.25), 2.0, 20000, 64, 31);
    EXPECT_NEAR(b.expected, std::sqrt(2.0), 1e-15);
    EXPECT_LE(std::abs(b.ratio - std::sqrt(2.0)), 3 * b.stderr_ratio);

    const auto c = scaling_check(ones(2), HurstParameter(0.4), 1.0, 5000, 32, 32);
    EXPECT_DOUBLE_EQ(c.expected, 1.0);
    EXPECT_LE(std::abs(c.ratio - 1.0), 3 * c.stderr_ratio);
}

TEST(ScalingCheck, OddWordIsRejected) {
    EXPECT_THROW(scaling_check(ones(1), HurstParameter(0.5), 2.0, 1000, 16, 1), std::invalid_argument);
}

TEST(BoundSweep, EmptyGrids) {
    EXPECT_TRUE(bound_sweep(BoundRegime::young_h_gt_half, {}, {{1, 1}}, 100, 16, 1).empty());
    EXPECT_TRUE(bound_sweep(BoundRegime::young_h_gt_half, {0.7}, {}, 100, 16, 1).empty());
}

TEST(BoundSweep, InfeasibleCellsAreSkippedWithRecord) {
    const auto rep = bound_sweep(BoundRegime::rough_h_lt_half, {0.3}, {{2, 2}}, 100, 16, 1);
    ASSERT_FALSE(rep.empty());
    for (const auto& r : rep) {
        EXPECT_TRUE(r.skipped);
        EXPECT_FALSE(r.diagnostic.empty());
    }
    const auto wrong = bound_sweep(BoundRegime::young_h_gt_half, {0.3}, {{1, 1}}, 100, 16, 1);
    ASSERT_EQ(wrong.size(), 1u);
    EXPECT_TRUE(wrong[0].skipped);
}

TEST(BoundSweep, DeterministicAndSatisfied) {
    const auto a = bound_sweep(BoundRegime::rough_h_lt_half, {0.2, 0.45}, {{1, 1}}, 500, 32, 5);
    const auto b = bound_sweep(BoundRegime::rough_h_lt_half, {0.2, 0.45}, {{1, 1}}, 500, 32, 5);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].mc_estimate, b[i].mc_estimate);
        EXPECT_TRUE(a[i].satisfied);
        EXPECT_FALSE(a[i].skipped);
    }
}

TEST(MomentCsv, Header) {
    std::stringstream ss;
    write_moment_csv(ss, bound_sweep(BoundRegime::young_h_gt_half, {0.75}, {{1, 1}}, 100, 16, 1));
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "regime,H,word_i,word_j,s,t,n_paths,n_steps,estimate,stderr,bound,satisfied");
    std::getline(ss, line);
    EXPECT_EQ(line.rfind("young,0.75,1,1,0,1,100,16,", 0), 0u) << line;
}
