#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>

#include "fbmsig/airquality.hpp"
#include "fbmsig/lasso.hpp"
#include "fbmsig/word.hpp"

using namespace fbmsig;

namespace {

const char* kHeader = "Date;Time;CO(GT);NO2(GT);T;RH;AH;;\n";

AirQualityFrame synthetic(std::size_t hours, std::uint64_t seed, bool constant = false, double missing = 0.0) {
    std::stringstream ss;
    write_synthetic_air_quality(ss, hours, seed, constant, missing);
    return parse_air_quality(ss);
}

AirQualityConfig small_config() {
    AirQualityConfig cfg;
    cfg.cv = CvPlan{200, 50, {}};
    cfg.windows.standardization_windows = 200;
    cfg.windows.window_len = 24;
    cfg.overlay_points = 40;
    return cfg;
}

}  // namespace

TEST(Parse, TenRowFixtureWithOneSentinel) {
    std::stringstream ss;
    ss << kHeader;
    for (int h = 0; h < 10; ++h)
    {
        char stamp[32];
        std::snprintf(stamp, sizeof stamp, "%s;%02d.00.00", h < 6 ? "10/03/2004" : "11/03/2004", (18 + h) % 24);
        ss << stamp << ";2,6;" << (h == 4 ? "-200" : "113") << ";13,6;48,9;0,7578;;\n";
    }
    const auto f = parse_air_quality(ss);
    ASSERT_EQ(f.size(), 10u);
    EXPECT_EQ(f.valid_count(kNo2), 9u);
    EXPECT_EQ(f.valid_count(kTemperature), 10u);
    EXPECT_FALSE(f.valid[4][kNo2]);
    EXPECT_DOUBLE_EQ(f.values[0][kTemperature], 13.6);
    EXPECT_DOUBLE_EQ(f.values[0][kHumidity], 48.9);
    EXPECT_EQ(format_hour(f.hours[0]), "2004-03-10T18:00");
    EXPECT_EQ(format_hour(f.hours[6]), "2004-03-11T00:00");
}

TEST(Parse, DecimalComma) {
    std::stringstream ss;
    ss << kHeader << "10/03/2004;18.00.00;2,6;23,5;-1,25;100;0;;\n";
    const auto f = parse_air_quality(ss);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_DOUBLE_EQ(f.values[0][kNo2], 23.5);
    EXPECT_DOUBLE_EQ(f.values[0][kTemperature], -1.25);
    EXPECT_DOUBLE_EQ(f.values[0][kHumidity], 100.0);
}

TEST(Parse, MalformedRowsAreReportedAndSkipped) {
    std::stringstream ss;
    ss << kHeader << "10/03/2004;18.00.00;2,6;100;10;50;0;;\n"
       << "10/03/2004;19.00.00;2,6\n"
       << "10/03/2004;xx;2,6;100;10;50;0;;\n"
       << "10/03/2004;20.00.00;2,6;abc;10;50;0;;\n"
       << ";;;;;;;;\n"
       << "10/03/2004;21.00.00;2,6;100;10;50;0;;\n"
       << "10/03/2004;21.00.00;2,6;100;10;50;0;;\n"
       << "11/03/2004;01.00.00;2,6;100;10;50;0;;\n";
    const auto f = parse_air_quality(ss);
    EXPECT_EQ(f.size(), 3u);
    EXPECT_EQ(f.diagnostics.size(), 4u);
    ASSERT_EQ(f.gaps.size(), 2u);
    EXPECT_EQ(f.gaps[0], 1u);
    EXPECT_EQ(f.gaps[1], 2u);
}

TEST(Parse, MissingColumnsAndFile) {
    std::stringstream ss("Date;Time;T;RH\n");
    EXPECT_THROW(parse_air_quality(ss), std::runtime_error);
    EXPECT_THROW(load_air_quality("/nonexistent/AirQualityUCI.csv"), std::runtime_error);
}

TEST(Parse, HashIsDeterministic) {
    EXPECT_EQ(synthetic(300, 1).hash(), synthetic(300, 1).hash());
    EXPECT_NE(synthetic(300, 1).hash(), synthetic(300, 2).hash());
}

TEST(Windows, CountOnFullyValidFixture) {
    const auto ds = make_windows(synthetic(200, 3));
    EXPECT_EQ(ds.size(), 32u);
    EXPECT_EQ(ds.targets.size(), 32);
    EXPECT_EQ(ds.windows[0].dim(), 3);
    EXPECT_EQ(ds.windows[0].size(), 168);
    EXPECT_EQ(ds.windows[0].times()[0], 0.0);
    EXPECT_EQ(ds.windows[0].times()[167], 1.0);
}

TEST(Windows, MaskedHourDropsCoveringWindows) {
    auto f = synthetic(400, 4);
    f.valid[100][kTemperature] = false;
    const auto ds = make_windows(f);
    EXPECT_EQ(ds.size(), 131u);
    for (std::size_t w = 0; w < ds.size(); ++w) {
        const bool covers = ds.window_start_hours[w] <= f.hours[100] && f.hours[100] <= ds.target_hours[w];
        EXPECT_FALSE(covers);
    }
}

TEST(Windows, MaskedTargetDropsOnlyThatWindow) {
    auto f = synthetic(200, 5);
    f.valid[190][kNo2] = false;
    // hour 190 is the target of one window and an input of 9 later ones
    EXPECT_EQ(make_windows(f).size(), 32u - 10u);
}

TEST(Windows, TargetFollowsLastInput) {
    const auto f = synthetic(220, 6);
    const auto ds = make_windows(f);
    for (std::size_t w = 0; w < ds.size(); ++w) {
        EXPECT_EQ(ds.target_hours[w], ds.window_start_hours[w] + 168);
        const auto row = static_cast<std::size_t>(ds.target_hours[w] - f.hours[0]);
        EXPECT_EQ(ds.targets[static_cast<Eigen::Index>(w)], f.values[row][kNo2]);
        const double last_input = ds.windows[w].values()(kNo2, 167) * ds.channel_scale[kNo2] + ds.channel_mean[kNo2];
        EXPECT_NEAR(last_input, f.values[row - 1][kNo2], 1e-9);
    }
}

TEST(Windows, TooShortIsAnError) {
    EXPECT_THROW(make_windows(synthetic(168, 7)), std::runtime_error);
    EXPECT_EQ(make_windows(synthetic(169, 7)).size(), 1u);
}

TEST(Windows, StandardizationUsesEarlyWindowsOnly) {
    WindowOptions opts;
    opts.standardization_windows = 10;
    auto f = synthetic(400, 8);
    const auto base = make_windows(f, opts);
    // changing late data must not move the constants
    for (std::size_t i = 300; i < f.size(); ++i) f.values[i][kNo2] += 1000.0;
    const auto moved = make_windows(f, opts);
    EXPECT_EQ(base.channel_mean, moved.channel_mean);
    EXPECT_EQ(base.channel_scale, moved.channel_scale);
    EXPECT_EQ(base.standardization_end_hour, base.target_hours[9]);
}

TEST(Windows, SignatureDesignHas85Columns) {
    const auto ds = make_windows(synthetic(180, 9));
    const auto d = build_design(ds.windows, 3, true);
    EXPECT_EQ(d.cols(), 85);
    EXPECT_EQ(d.cols(), static_cast<Eigen::Index>(predictor_count(4, 3)));
}

TEST(Leakage, ChronologicalSplitPasses) {
    const auto ds = make_windows(synthetic(800, 10), WindowOptions{1, 168, 200});
    EXPECT_TRUE(check_no_leakage(ds, 500, CvPlan{200, 50, {}}));
    auto shuffled = ds;
    std::swap(shuffled.target_hours[10], shuffled.target_hours[300]);
    EXPECT_FALSE(check_no_leakage(shuffled, 500, CvPlan{200, 50, {}}));
    auto wide = make_windows(synthetic(800, 10), WindowOptions{1, 168, 400});
    EXPECT_FALSE(check_no_leakage(wide, 500, CvPlan{200, 50, {}}));
}

TEST(Pipeline, ConstantNo2IsPredictedExactly) {
    const auto res = run_air_quality(synthetic(600, 11, true, 0.0), small_config());
    EXPECT_TRUE(res.leakage_free);
    ASSERT_EQ(res.rows.size(), 3u);
    for (const auto& r : res.rows) EXPECT_LE(r.test_mse, 1e-12) << r.method;
}

TEST(Pipeline, OutputsAndDeterminism) {
    auto f = synthetic(700, 12);
    f.valid[50][kNo2] = false;
    const auto a = run_air_quality(f, small_config());
    const auto b = run_air_quality(f, small_config());
    EXPECT_TRUE(a.leakage_free);
    EXPECT_EQ(a.n_train + a.n_test, a.n_windows);
    ASSERT_EQ(a.rows.size(), 3u);
    EXPECT_EQ(a.rows[0].method, "lasso");
    EXPECT_EQ(a.rows[1].depth_k, 2);
    EXPECT_EQ(a.rows[2].depth_k, 3);
    EXPECT_EQ(a.overlay.size(), 3u * 40u);
    EXPECT_FALSE(a.history.empty());
    std::stringstream ra, rb, oa, ob;
    write_aq_results_csv(ra, a.rows);
    write_aq_results_csv(rb, b.rows);
    write_aq_overlay_csv(oa, a.overlay);
    write_aq_overlay_csv(ob, b.overlay);
    EXPECT_EQ(ra.str(), rb.str());
    EXPECT_EQ(oa.str(), ob.str());
    EXPECT_EQ(ra.str().substr(0, ra.str().find('\n')), "method,depth_k,lambda,train_mse,test_mse");
    EXPECT_EQ(oa.str().substr(0, oa.str().find('\n')), "timestamp,truth,prediction,method");
    std::stringstream ha;
    write_aq_history_csv(ha, a.history);
    EXPECT_EQ(ha.str().substr(0, ha.str().find('\n')), "method,depth_k,epoch,objective");
}
