#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbmsig/fbm.hpp"
#include "fbmsig/lasso.hpp"

namespace fbmsig {

enum Channel : int { kNo2 = 0, kTemperature = 1, kHumidity = 2 };

/// Hourly NO2 / temperature / relative humidity series. Timestamps are
/// hours since 1970-01-01T00:00 on the file's local clock. Missing cells
/// (sentinel -200) are kept with valid = false; gaps in the hourly clock are
/// recorded, never filled.
struct AirQualityFrame {
    std::vector<std::int64_t> hours;
    std::vector<std::array<double, 3>> values;
    std::vector<std::array<bool, 3>> valid;
    std::vector<std::size_t> gaps;          // row i starts after a gap (hours[i] - hours[i-1] > 1)
    std::vector<std::string> diagnostics;   // one entry per skipped row

    std::size_t size() const noexcept { return hours.size(); }
    std::size_t valid_count(Channel c) const;
    /// FNV-1a over timestamps, values and mask.
    std::string hash() const;
};

/// Parses the published semicolon-delimited, decimal-comma CSV and keeps
/// the NO2(GT), T and RH columns.
AirQualityFrame parse_air_quality(std::istream& is);
AirQualityFrame load_air_quality(const std::string& path);

/// `YYYY-MM-DDTHH:00`
std::string format_hour(std::int64_t hour);

struct WindowOptions {
    int horizon = 1;
    std::size_t window_len = 168;
    /// Channel mean/scale come from the inputs of the earliest windows only.
    std::size_t standardization_windows = 900;
};

/// Window n covers the `window_len` hours before its target hour, on a
/// window-local time grid in [0, 1]; channels are standardized.
struct WindowedDataset {
    std::vector<MultiPath> windows;
    Eigen::VectorXd targets;
    std::vector<std::int64_t> target_hours;
    std::vector<std::int64_t> window_start_hours;
    std::size_t window_len = 168;
    std::array<double, 3> channel_mean{};
    std::array<double, 3> channel_scale{};
    std::int64_t standardization_end_hour = 0;  // constants use hours strictly before this

    std::size_t size() const noexcept { return windows.size(); }
};

WindowedDataset make_windows(const AirQualityFrame& frame, const WindowOptions& opts = {});

struct AirQualityConfig {
    std::vector<int> depths{2, 3};
    CvPlan cv{900, 100, {}};
    double test_fraction = 0.2;
    std::size_t overlay_points = 250;
    WindowOptions windows{};
    LassoOptions lasso{};
    unsigned threads = 1;
};

struct AirQualityRow {
    std::string method;
    int depth_k = 0;
    double lambda = 0.0;
    double train_mse = 0.0;
    double test_mse = 0.0;
};

struct OverlayRow {
    std::string timestamp;
    double truth = 0.0;
    double prediction = 0.0;
    std::string method;
};

struct HistoryRow {
    std::string method;
    int depth_k = 0;
    int epoch = 0;
    double objective = 0.0;
};

struct AirQualityResults {
    std::vector<AirQualityRow> rows;
    std::vector<OverlayRow> overlay;
    std::vector<HistoryRow> history;
    std::size_t n_windows = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    bool leakage_free = false;
};

/// True when every CV test target and every held-out target lies strictly
/// after the training targets it is scored against, and the standardization
/// constants use only hours before the first test target.
bool check_no_leakage(const WindowedDataset& data, std::size_t n_train, const CvPlan& plan);

AirQualityResults run_air_quality(const AirQualityFrame& frame, const AirQualityConfig& cfg);

/// `method,depth_k,lambda,train_mse,test_mse`
void write_aq_results_csv(std::ostream& os, const std::vector<AirQualityRow>& rows);
/// `timestamp,truth,prediction,method`
void write_aq_overlay_csv(std::ostream& os, const std::vector<OverlayRow>& rows);
/// `method,depth_k,epoch,objective`
void write_aq_history_csv(std::ostream& os, const std::vector<HistoryRow>& rows);

/// Writes a synthetic file in the published format: NO2 follows an
/// autoregressive model driven by temperature and humidity with daily
/// seasonality, and a few cells carry the -200 sentinel. With
/// `constant_no2` set NO2 is fixed at 50.
void write_synthetic_air_quality(std::ostream& os, std::size_t n_hours, std::uint64_t seed,
                                 bool constant_no2 = false, double missing_rate = 0.002);

}  // namespace fbmsig
