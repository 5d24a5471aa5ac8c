#include "fbmsig/airquality.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fbmsig/util/hash.hpp"
#include "fbmsig/util/rng.hpp"

namespace fbmsig {

namespace {

constexpr double kMissing = -200.0;

// Howard Hinnant's civil-calendar conversions.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

bool parse_int(const std::string& s, int& out) {
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_decimal_comma(std::string s, double& out) {
    std::replace(s.begin(), s.end(), ',', '.');
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

// "10/03/2004" + "18.00.00" -> hours since epoch
bool parse_timestamp(const std::string& date, const std::string& time, std::int64_t& hour) {
    const auto dp = split(date, '/');
    const auto tp = split(time, '.');
    int dd = 0, mm = 0, yy = 0, hh = 0;
    if (dp.size() != 3 || tp.empty()) return false;
    if (!parse_int(dp[0], dd) || !parse_int(dp[1], mm) || !parse_int(dp[2], yy) || !parse_int(tp[0], hh)) return false;
    if (mm < 1 || mm > 12 || dd < 1 || dd > 31 || hh < 0 || hh > 23) return false;
    hour = days_from_civil(yy, static_cast<unsigned>(mm), static_cast<unsigned>(dd)) * 24 + hh;
    return true;
}

}  // namespace

std::size_t AirQualityFrame::valid_count(Channel c) const {
    return static_cast<std::size_t>(std::count_if(valid.begin(), valid.end(), [c](const auto& v) { return v[c]; }));
}

std::string AirQualityFrame::hash() const {
    Fnv1a h;
    for (std::size_t i = 0; i < size(); ++i) {
        h.update_value(hours[i]);
        for (int c = 0; c < 3; ++c) {
            h.update_value(values[i][c]);
            const unsigned char flag = valid[i][c] ? 1 : 0;
            h.update_value(flag);
        }
    }
    return h.hex();
}

std::string format_hour(std::int64_t hour) {
    std::int64_t days = hour >= 0 ? hour / 24 : -((-hour + 23) / 24);
    const auto hh = static_cast<int>(hour - days * 24);
    std::int64_t y = 0;
    unsigned m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:00", static_cast<long long>(y), m, d, hh);
    return buf;
}

AirQualityFrame parse_air_quality(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("air quality: empty file");
    const auto header = split(line, ';');
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::runtime_error("air quality: missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_date = column("Date"), c_time = column("Time"), c_no2 = column("NO2(GT)"),
                      c_t = column("T"), c_rh = column("RH");
    const std::size_t needed = std::max({c_date, c_time, c_no2, c_t, c_rh}) + 1;

    AirQualityFrame f;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        const auto cells = split(line, ';');
        if (std::all_of(cells.begin(), cells.end(), [](const std::string& c) { return c.empty(); })) continue;
        auto reject = [&](const std::string& why) {
            f.diagnostics.push_back("row " + std::to_string(row) + ": " + why);
        };
        if (cells.size() < needed) {
            reject("too few fields");
            continue;
        }
        std::int64_t hour = 0;
        if (!parse_timestamp(cells[c_date], cells[c_time], hour)) {
            reject("bad timestamp");
            continue;
        }
        if (!f.hours.empty() && hour <= f.hours.back()) {
            reject("timestamp not increasing");
            continue;
        }
        std::array<double, 3> v{};
        std::array<bool, 3> ok{};
        bool bad = false;
        const std::size_t cols[3] = {c_no2, c_t, c_rh};
        for (int c = 0; c < 3; ++c) {
            if (!parse_decimal_comma(cells[cols[c]], v[c])) {
                bad = true;
                break;
            }
            ok[c] = v[c] != kMissing;
        }
        if (bad) {
            reject("unparseable value");
            continue;
        }
        if (!f.hours.empty() && hour - f.hours.back() > 1) f.gaps.push_back(f.hours.size());
        f.hours.push_back(hour);
        f.values.push_back(v);
        f.valid.push_back(ok);
    }
    return f;
}

AirQualityFrame load_air_quality(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("air quality: cannot open dataset file '" + path + "'");
    return parse_air_quality(in);
}

WindowedDataset make_windows(const AirQualityFrame& frame, const WindowOptions& opts) {
    if (opts.window_len < 2 || opts.horizon < 1) throw std::invalid_argument("make_windows: bad window options");
    const std::size_t L = opts.window_len;
    const auto H = static_cast<std::size_t>(opts.horizon);
    const std::size_t n = frame.size();

    // run[i]: length of the run of consecutive hours with all channels valid ending at row i
    std::vector<std::size_t> run(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool all_ok = frame.valid[i][0] && frame.valid[i][1] && frame.valid[i][2];
        if (!all_ok) continue;
        run[i] = (i > 0 && frame.hours[i] - frame.hours[i - 1] == 1) ? run[i - 1] + 1 : 1;
    }
    std::vector<std::size_t> last_rows;  // last input row of each window
    for (std::size_t i = L - 1; i + H < n; ++i) {
        if (run[i] < L) continue;
        const std::size_t target = i + H;
        if (frame.hours[target] - frame.hours[i] != static_cast<std::int64_t>(H)) continue;
        if (!frame.valid[target][kNo2]) continue;
        last_rows.push_back(i);
    }
    if (last_rows.empty())
        throw std::runtime_error("make_windows: fewer than " + std::to_string(L + H) + " contiguous valid hours");

    WindowedDataset ds;
    ds.window_len = L;
    const std::size_t n_std = std::min(std::max<std::size_t>(opts.standardization_windows, 1), last_rows.size());
    const std::size_t first_row = last_rows.front() + 1 - L;
    const std::size_t end_row = last_rows[n_std - 1] + 1;  // exclusive
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0, sq = 0.0;
        std::size_t cnt = 0;
        for (std::size_t i = first_row; i < end_row; ++i) {
            if (!frame.valid[i][c]) continue;
            sum += frame.values[i][c];
            ++cnt;
        }
        const double mean = sum / static_cast<double>(cnt);
        for (std::size_t i = first_row; i < end_row; ++i)
            if (frame.valid[i][c]) sq += (frame.values[i][c] - mean) * (frame.values[i][c] - mean);
        const double sd = std::sqrt(sq / static_cast<double>(cnt));
        ds.channel_mean[c] = mean;
        ds.channel_scale[c] = sd > 0.0 ? sd : 1.0;
    }
    ds.standardization_end_hour = frame.hours[end_row - 1] + 1;

    const Eigen::VectorXd local_time = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(L), 0.0, 1.0);
    ds.targets.resize(static_cast<Eigen::Index>(last_rows.size()));
    for (std::size_t w = 0; w < last_rows.size(); ++w) {
        const std::size_t first = last_rows[w] + 1 - L;
        Eigen::MatrixXd v(3, static_cast<Eigen::Index>(L));
        for (std::size_t j = 0; j < L; ++j)
            for (int c = 0; c < 3; ++c)
                v(c, static_cast<Eigen::Index>(j)) = (frame.values[first + j][c] - ds.channel_mean[c]) / ds.channel_scale[c];
        ds.windows.emplace_back(local_time, std::move(v));
        const std::size_t target = last_rows[w] + H;
        ds.targets[static_cast<Eigen::Index>(w)] = frame.values[target][kNo2];
        ds.target_hours.push_back(frame.hours[target]);
        ds.window_start_hours.push_back(frame.hours[first]);
    }
    return ds;
}

bool check_no_leakage(const WindowedDataset& data, std::size_t n_train, const CvPlan& plan) {
    if (n_train == 0 || n_train >= data.size()) return false;
    const auto& th = data.target_hours;
    for (std::size_t i = 1; i < th.size(); ++i)
        if (th[i] <= th[i - 1]) return false;
    for (const auto& b : cv_blocks(n_train, plan)) {
        const auto last_train = *std::max_element(th.begin() + static_cast<std::ptrdiff_t>(b.train_begin),
                                                  th.begin() + static_cast<std::ptrdiff_t>(b.train_end));
        for (std::size_t i = b.test_begin; i < b.test_end; ++i)
            if (th[i] <= last_train) return false;
        if (data.standardization_end_hour > th[b.test_begin]) return false;
    }
    const auto last_train = *std::max_element(th.begin(), th.begin() + static_cast<std::ptrdiff_t>(n_train));
    for (std::size_t i = n_train; i < th.size(); ++i)
        if (th[i] <= last_train) return false;
    return data.standardization_end_hour <= th[n_train];
}

AirQualityResults run_air_quality(const AirQualityFrame& frame, const AirQualityConfig& cfg) {
    WindowOptions wopts = cfg.windows;
    const WindowedDataset data = make_windows(frame, wopts);
    AirQualityResults res;
    res.n_windows = data.size();
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
        throw std::invalid_argument("air quality: test_fraction must lie in (0, 1)");
    res.n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(cfg.test_fraction * data.size())));
    if (res.n_test >= data.size()) throw std::runtime_error("air quality: not enough windows for a test split");
    res.n_train = data.size() - res.n_test;
    res.leakage_free = check_no_leakage(data, res.n_train, cfg.cv);
    if (!res.leakage_free) throw std::logic_error("air quality: chronological leakage detected");

    const auto ntr = static_cast<Eigen::Index>(res.n_train);
    const auto nte = static_cast<Eigen::Index>(res.n_test);
    const Eigen::VectorXd y_train = data.targets.head(ntr);
    const Eigen::VectorXd y_test = data.targets.tail(nte);
    const std::size_t n_overlay = std::min(cfg.overlay_points, res.n_test);

    auto evaluate = [&](const DesignMatrix& design, const std::string& method, int depth) {
        const DesignMatrix train = design.row_block(0, ntr);
        const DesignMatrix test = design.row_block(ntr, nte);
        const CvResult cv = cv_fit(train, y_train, cfg.cv, cfg.lasso);
        LassoOptions final_opts = cfg.lasso;
        final_opts.record_history = true;
        const LassoFit fit = lasso_fit(train, y_train, cv.best_lambda, final_opts);
        const Eigen::VectorXd pred_test = predict(fit, test);
        res.rows.push_back({method, depth, cv.best_lambda, mse(predict(fit, train), y_train), mse(pred_test, y_test)});
        for (std::size_t i = 0; i < n_overlay; ++i)
            res.overlay.push_back({format_hour(data.target_hours[res.n_train + i]), y_test[static_cast<Eigen::Index>(i)],
                                   pred_test[static_cast<Eigen::Index>(i)], method + (depth ? "_k" + std::to_string(depth) : "")});
        for (std::size_t e = 0; e < fit.objective_history.size(); ++e)
            res.history.push_back({method, depth, static_cast<int>(e + 1), fit.objective_history[e]});
    };

    evaluate(build_raw_design(data.windows), "lasso", 0);
    for (int depth : cfg.depths) evaluate(build_design(data.windows, depth, true, cfg.threads), "signature", depth);
    return res;
}

void write_aq_results_csv(std::ostream& os, const std::vector<AirQualityRow>& rows) {
    os << "method,depth_k,lambda,train_mse,test_mse\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.17g\n", r.method.c_str(), r.depth_k, r.lambda, r.train_mse,
                      r.test_mse);
        os << buf;
    }
}

void write_aq_overlay_csv(std::ostream& os, const std::vector<OverlayRow>& rows) {
    os << "timestamp,truth,prediction,method\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%s\n", r.timestamp.c_str(), r.truth, r.prediction,
                      r.method.c_str());
        os << buf;
    }
}

void write_aq_history_csv(std::ostream& os, const std::vector<HistoryRow>& rows) {
    os << "method,depth_k,epoch,objective\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g\n", r.method.c_str(), r.depth_k, r.epoch, r.objective);
        os << buf;
    }
}

void write_synthetic_air_quality(std::ostream& os, std::size_t n_hours, std::uint64_t seed, bool constant_no2,
                                 double missing_rate) {
    os << "Date;Time;CO(GT);PT08.S1(CO);NMHC(GT);C6H6(GT);PT08.S2(NMHC);NOx(GT);PT08.S3(NOx);NO2(GT);"
          "PT08.S4(NO2);PT08.S5(O3);T;RH;AH;;\n";
    CounterRng rng(stream_key(seed, 0xA1));
    const std::int64_t start = days_from_civil(2004, 3, 10) * 24 + 18;
    double temp_noise = 0.0, no2_dev = 0.0;
    std::vector<double> no2_hist;
    auto dec = [](double v, int digits) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.*f", digits, v);
        std::string s = buf;
        std::replace(s.begin(), s.end(), '.', ',');
        return s;
    };
    for (std::size_t i = 0; i < n_hours; ++i) {
        const std::int64_t hour = start + static_cast<std::int64_t>(i);
        const double day_phase = 2.0 * std::numbers::pi * static_cast<double>(hour % 24) / 24.0;
        const double season = 2.0 * std::numbers::pi * static_cast<double>(i) / (24.0 * 365.0);
        temp_noise = 0.9 * temp_noise + 0.8 * rng.normal();
        const double temp = 15.0 - 8.0 * std::cos(season) + 5.0 * std::sin(day_phase - 1.0) + temp_noise;
        const double rh = std::clamp(55.0 - 1.5 * (temp - 15.0) + 6.0 * rng.normal(), 5.0, 99.0);
        const double lag24 = no2_hist.size() >= 24 ? no2_hist[no2_hist.size() - 24] : 0.0;
        no2_dev = 0.7 * no2_dev + 0.15 * lag24 - 1.5 * (temp - 15.0) * 0.3 + 0.25 * (rh - 55.0) +
                  12.0 * std::sin(2.0 * day_phase) * 0.3 + 8.0 * rng.normal();
        no2_hist.push_back(no2_dev);
        const double no2 = constant_no2 ? 50.0 : std::max(5.0, 110.0 + no2_dev);

        std::int64_t y = 0;
        unsigned m = 0, d = 0;
        civil_from_days(hour / 24, y, m, d);
        char date[32], time[16];
        std::snprintf(date, sizeof date, "%02u/%02u/%04lld", d, m, static_cast<long long>(y));
        std::snprintf(time, sizeof time, "%02d.00.00", static_cast<int>(hour % 24));
        const bool miss_no2 = !constant_no2 && rng.uniform() < missing_rate;
        const bool miss_met = rng.uniform() < 0.5 * missing_rate;
        os << date << ';' << time << ";2,6;1360;150;11,9;1046;166;1056;"
           << (miss_no2 ? std::string("-200") : std::to_string(static_cast<int>(std::lround(no2)))) << ";1692;1268;"
           << (miss_met ? std::string("-200") : dec(temp, 1)) << ';' << (miss_met ? std::string("-200") : dec(rh, 1))
           << ";0,7578;;\n";
    }
}

}  // namespace fbmsig
