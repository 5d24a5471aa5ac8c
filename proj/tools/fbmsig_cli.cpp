#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fbmsig/airquality.hpp"
#include "fbmsig/experiments.hpp"
#include "fbmsig/fbm.hpp"
#include "fbmsig/moments.hpp"
#include "fbmsig/signature.hpp"
#include "fbmsig/util/hash.hpp"
#include "fbmsig/util/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fbmsig;

namespace {

/// Bad user input discovered after parsing; exits with the usage code.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Common {
    std::string out_dir = "out";
    unsigned threads = 0;
    std::uint64_t seed = 0;
};

const CLI::Validator kHurst(
    [](std::string& s) -> std::string {
        try {
            const double h = std::stod(s);
            if (h > 0.0 && h < 1.0) return {};
        } catch (const std::exception&) {
        }
        return "Hurst parameter must lie in the open interval (0, 1), got " + s;
    },
    "H in (0,1)");

class Run {
public:
    Run(const Common& c, std::string command) : dir_(c.out_dir), command_(std::move(command)) {
        fs::create_directories(dir_);
        manifest_["command"] = command_;
        manifest_["seed"] = c.seed;
        manifest_["threads"] = resolve_threads(c.threads);
    }

    json& config() { return manifest_["config"]; }

    std::ofstream open(const std::string& name) {
        const auto path = dir_ / name;
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        files_.push_back(name);
        return os;
    }

    void finish() {
        json artifacts = json::array();
        for (const auto& name : files_)
            artifacts.push_back({{"file", name}, {"fnv1a", hash_file((dir_ / name).string())}});
        manifest_["artifacts"] = artifacts;
        std::ofstream os(dir_ / "manifest.json");
        os << manifest_.dump(2) << '\n';
        if (!os) throw std::runtime_error("cannot write manifest");
        std::cout << "wrote " << files_.size() << " file(s) and manifest.json to " << dir_.string() << '\n';
    }

private:
    fs::path dir_;
    std::string command_;
    json manifest_;
    std::vector<std::string> files_;
};

FbmMethod parse_method(const std::string& s) {
    if (s == "davies_harte") return FbmMethod::davies_harte;
    if (s == "cholesky") return FbmMethod::cholesky;
    throw UsageError("unknown method '" + s + "' (davies_harte, cholesky)");
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(text);
        if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) || hi < lo)
            throw UsageError("grid must look like lo:hi:step, got '" + text + "'");
        const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long i = 0; i <= n; ++i) out.push_back(std::round((lo + i * step) * 1e12) / 1e12);
    } else {
        std::istringstream is(text);
        std::string item;
        while (std::getline(is, item, ',')) {
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw UsageError("bad grid value '" + item + "'");
            }
        }
    }
    for (double h : out)
        if (!(h > 0.0 && h < 1.0)) throw UsageError("Hurst grid values must lie in (0, 1)");
    return out;
}

std::pair<int, int> parse_pair(const std::string& text) {
    int p = 0, q = 0;
    char comma = 0;
    std::istringstream is(text);
    if (!(is >> p >> comma >> q) || comma != ',' || p < 1 || q < 1)
        throw UsageError("order pair must look like p,q with p, q >= 1, got '" + text + "'");
    return {p, q};
}

void cmd_simulate(const Common& c, double h, int d, int n_steps, double horizon, std::size_t n_paths,
                  const std::string& method) {
    FbmConfig cfg;
    cfg.h = HurstParameter(h);
    cfg.d = d;
    cfg.n_steps = n_steps;
    cfg.horizon_t = horizon;
    cfg.method = parse_method(method);
    cfg.seed = c.seed;
    cfg.validate();
    Run run(c, "simulate");
    run.config() = {{"h", h}, {"d", d}, {"n_steps", n_steps}, {"horizon", horizon}, {"paths", n_paths},
                    {"method", method}};
    const auto paths = FbmSampler(cfg).sample_batch(n_paths, c.threads);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "path_%04zu.csv", i);
        auto os = run.open(name);
        write_path_csv(os, paths[i]);
    }
    run.finish();
}

void cmd_signature(const Common& c, const std::string& in, int depth, bool augment) {
    if (depth < 1) throw UsageError("--depth must be >= 1");
    std::ifstream is(in);
    if (!is) throw std::runtime_error("cannot open path file '" + in + "'");
    auto path = read_path_csv(is);
    if (augment) path = time_augment(path);
    Run run(c, "signature");
    run.config() = {{"in", in}, {"in_fnv1a", hash_file(in)}, {"depth", depth}, {"augment", augment}};
    auto os = run.open("signature.csv");
    write_signature_csv(os, path_signature(path, depth));
    os.close();
    run.finish();
}

void cmd_moments(const Common& c, const std::string& regime, const std::vector<double>& h_grid,
                 const std::vector<std::string>& pairs, std::size_t n_paths, int n_steps, const std::string& method) {
    BoundRegime r;
    if (regime == "young")
        r = BoundRegime::young_h_gt_half;
    else if (regime == "rough")
        r = BoundRegime::rough_h_lt_half;
    else
        throw UsageError("--regime must be young or rough");
    std::vector<std::pair<int, int>> orders;
    for (const auto& p : pairs) orders.push_back(parse_pair(p));
    MonteCarloOptions opts;
    opts.method = parse_method(method);
    opts.threads = c.threads;
    Run run(c, "moments");
    run.config() = {{"regime", regime}, {"h", h_grid}, {"pairs", pairs}, {"paths", n_paths}, {"n_steps", n_steps},
                    {"method", method}};
    const auto reports = bound_sweep(r, h_grid, orders, n_paths, n_steps, c.seed, opts);
    auto os = run.open("moments.csv");
    write_moment_csv(os, reports);
    os.close();
    std::size_t bad = 0, skipped = 0;
    for (const auto& rep : reports) {
        skipped += rep.skipped;
        bad += !rep.skipped && !rep.satisfied;
    }
    std::cout << reports.size() << " cell(s), " << skipped << " skipped, " << bad << " violating\n";
    run.finish();
}

void cmd_sweep(const Common& c, SweepConfig cfg, const std::string& payoff_name, double strike,
               const std::string& grid) {
    PayoffKind kind{parse_payoff(payoff_name), strike};
    cfg.h_grid = parse_grid(grid);
    cfg.seed = c.seed;
    cfg.threads = c.threads;
    Run run(c, "sweep");
    run.config() = {{"payoff", payoff_name},
                    {"strike", strike},
                    {"h_grid", cfg.h_grid},
                    {"n_train", cfg.n_train},
                    {"n_test", cfg.n_test},
                    {"n_steps", cfg.n_steps},
                    {"depth", cfg.depth_k},
                    {"noise", cfg.noise_sigma},
                    {"replications", cfg.replications},
                    {"cv_train", cfg.cv.block_train},
                    {"cv_test", cfg.cv.block_test}};
    const auto rows = run_hurst_sweep(cfg, kind);
    auto os = run.open("sweep.csv");
    sweep_to_csv(os, rows);
    os.close();
    run.finish();
}

void cmd_airquality(const Common& c, std::string data, AirQualityConfig cfg) {
    if (data.empty()) {
        if (const char* env = std::getenv("FBMSIG_AIRQUALITY_DATA")) data = env;
    }
    if (data.empty()) throw UsageError("no dataset: pass --data or set FBMSIG_AIRQUALITY_DATA");
    if (!fs::exists(data)) throw std::runtime_error("air quality dataset not found: " + data);
    cfg.threads = c.threads;
    const auto frame = load_air_quality(data);
    for (const auto& d : frame.diagnostics) std::cerr << "warning: " << d << '\n';
    Run run(c, "airquality");
    run.config() = {{"data", data},
                    {"data_hash", frame.hash()},
                    {"depths", cfg.depths},
                    {"cv_train", cfg.cv.block_train},
                    {"cv_test", cfg.cv.block_test},
                    {"test_fraction", cfg.test_fraction},
                    {"overlay", cfg.overlay_points},
                    {"standardization_windows", cfg.windows.standardization_windows}};
    const auto res = run_air_quality(frame, cfg);
    {
        auto os = run.open("aq_results.csv");
        write_aq_results_csv(os, res.rows);
    }
    {
        auto os = run.open("aq_overlay.csv");
        write_aq_overlay_csv(os, res.overlay);
    }
    {
        auto os = run.open("aq_history.csv");
        write_aq_history_csv(os, res.history);
    }
    for (const auto& r : res.rows)
        std::cout << r.method << (r.depth_k ? " K=" + std::to_string(r.depth_k) : "") << ": test MSE " << r.test_mse
                  << '\n';
    run.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fBm path simulation, signature features and sparse regression"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_config("--config", "", "TOML/INI file with option values; flags on the command line win");
    app.require_subcommand(1);

    Common common;
    app.add_option("--out-dir", common.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", common.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--seed", common.seed, "Base RNG seed")->capture_default_str();

    double h = 0.5, horizon = 1.0;
    int d = 1, n_steps = 1024;
    std::size_t n_paths = 1;
    std::string method = "davies_harte";
    auto* sim = app.add_subcommand("simulate", "Sample fBm paths to CSV");
    sim->add_option("--h", h, "Hurst parameter")->required()->check(kHurst);
    sim->add_option("--d", d, "Dimension")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--n-steps", n_steps, "Grid steps")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--horizon", horizon, "Terminal time")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--paths", n_paths, "Number of paths")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--method", method, "davies_harte or cholesky")->capture_default_str();

    std::string in;
    int depth = 3;
    bool augment = false;
    auto* sig = app.add_subcommand("signature", "Truncated signature of a path CSV");
    sig->add_option("--in", in, "Path CSV (t,x1,...,xd)")->required();
    sig->add_option("--depth", depth, "Truncation depth")->capture_default_str();
    sig->add_flag("--augment", augment, "Prepend time as coordinate 1");

    std::string regime = "young";
    std::vector<std::string> h_list{"0.75"};
    std::vector<std::string> pairs{"1,1"};
    std::size_t mc_paths = 10000;
    int mc_steps = 1024;
    std::string mc_method = "davies_harte";
    auto* mom = app.add_subcommand("moments", "Monte Carlo signature moments against their bounds");
    mom->add_option("--regime", regime, "young or rough")->capture_default_str();
    mom->add_option("--h", h_list, "Hurst values")->capture_default_str()->check(kHurst);
    mom->add_option("--pairs", pairs, "Word-length pairs p,q")->capture_default_str();
    mom->add_option("--paths", mc_paths, "Monte Carlo paths")->capture_default_str()->check(CLI::PositiveNumber);
    mom->add_option("--n-steps", mc_steps, "Grid steps")->capture_default_str()->check(CLI::PositiveNumber);
    mom->add_option("--method", mc_method, "davies_harte or cholesky")->capture_default_str();

    SweepConfig sweep;
    std::string payoff_name = "call", grid = "0.1:0.9:0.1";
    double strike = 1.2;
    auto* swp = app.add_subcommand("sweep", "Lasso vs signature Lasso across Hurst values");
    swp->add_option("--payoff", payoff_name, "call, asian, rainbow1, rainbow2")->capture_default_str();
    swp->add_option("--strike", strike, "Strike")->capture_default_str();
    swp->add_option("--h-grid", grid, "lo:hi:step or comma list")->capture_default_str();
    swp->add_option("--n-train", sweep.n_train, "Training paths")->capture_default_str()->check(CLI::PositiveNumber);
    swp->add_option("--n-test", sweep.n_test, "Test paths")->capture_default_str()->check(CLI::PositiveNumber);
    swp->add_option("--n-steps", sweep.n_steps, "Grid steps")->capture_default_str()->check(CLI::PositiveNumber);
    swp->add_option("--depth", sweep.depth_k, "Signature depth")->capture_default_str()->check(CLI::PositiveNumber);
    swp->add_option("--noise", sweep.noise_sigma, "Target noise sigma")->capture_default_str()->check(CLI::NonNegativeNumber);
    swp->add_option("--replications", sweep.replications, "Seeds per H")->capture_default_str()->check(CLI::PositiveNumber);
    swp->add_option("--cv-train", sweep.cv.block_train, "CV training block")->capture_default_str()->check(CLI::PositiveNumber);
    swp->add_option("--cv-test", sweep.cv.block_test, "CV test block")->capture_default_str()->check(CLI::PositiveNumber);

    AirQualityConfig aq;
    std::string data;
    auto* air = app.add_subcommand("airquality", "NO2 one-hour-ahead forecasting comparison");
    air->add_option("--data", data, "Dataset CSV (default: $FBMSIG_AIRQUALITY_DATA)");
    air->add_option("--depths", aq.depths, "Signature depths")->delimiter(',')->capture_default_str()->check(CLI::PositiveNumber);
    air->add_option("--cv-train", aq.cv.block_train, "CV training block")->capture_default_str()->check(CLI::PositiveNumber);
    air->add_option("--cv-test", aq.cv.block_test, "CV test block")->capture_default_str()->check(CLI::PositiveNumber);
    air->add_option("--test-fraction", aq.test_fraction, "Held-out fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    air->add_option("--overlay", aq.overlay_points, "Overlay points")->capture_default_str();
    air->add_option("--standardization-windows", aq.windows.standardization_windows, "Windows used for channel scaling")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim) {
            cmd_simulate(common, h, d, n_steps, horizon, n_paths, method);
        } else if (*sig) {
            cmd_signature(common, in, depth, augment);
        } else if (*mom) {
            std::vector<double> hs;
            for (const auto& s : h_list) hs.push_back(std::stod(s));
            cmd_moments(common, regime, hs, pairs, mc_paths, mc_steps, mc_method);
        } else if (*swp) {
            cmd_sweep(common, sweep, payoff_name, strike, grid);
        } else if (*air) {
            cmd_airquality(common, data, aq);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
