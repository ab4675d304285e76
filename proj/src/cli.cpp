#include "heattrack/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "heattrack/error.hpp"
#include "heattrack/flatness.hpp"
#include "heattrack/hum.hpp"
#include "heattrack/pde.hpp"
#include "heattrack/special_functions.hpp"
#include "heattrack/targets.hpp"
#include "heattrack/transmutation.hpp"

namespace heattrack::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string version() { return HEATTRACK_VERSION; }

namespace {

const std::set<std::string> kCommands{"track", "cost-curve", "gs", "transmute", "hum", "verify"};
const std::set<std::string> kFamilies{"zero", "ramp", "sine", "bump_integral", "samples", "manufactured"};

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
    throw Error(ErrorKind::Config, key + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) config_error(where.empty() ? key : where + "." + key, "unknown key");
    }
}

double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) config_error(where + key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) config_error(where + key, "expected a finite number");
    return x;
}

long long get_integer(const json& obj, const std::string& where, const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) config_error(where + key, "expected an integer");
    return v.get<long long>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) config_error(where + key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> get_list(const json& obj, const std::string& where, const char* key,
                             const std::vector<double>& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array()) config_error(where + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) config_error(where + key, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) config_error(key, what);
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> header(const ExperimentConfig& cfg) {
    return {"config_hash=" + hash_hex(cfg.hash) + " version=" + version()};
}

json meta(const ExperimentConfig& cfg) { return {{"config_hash", hash_hex(cfg.hash)}, {"version", version()}}; }

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Finite values as numbers; infinities and NaN as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void prepare_output(const ExperimentConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + cfg.output_dir.string());
}

TimeGrid time_grid(const ExperimentConfig& cfg) { return TimeGrid(cfg.t_end, cfg.n_steps); }
SpaceGrid space_grid(const ExperimentConfig& cfg) { return SpaceGrid(cfg.length, cfg.n_cells); }

std::shared_ptr<const Target> make_target(const ExperimentConfig& cfg) {
    const TargetSpec& t = cfg.target;
    if (t.family == "zero") return std::make_shared<ZeroTarget>(cfg.t_end);
    if (t.family == "ramp") return std::make_shared<RampTarget>(t.slope, cfg.t_end);
    if (t.family == "sine") return std::make_shared<SineTarget>(t.amplitude, t.frequency, cfg.t_end);
    if (t.family == "bump_integral") {
        return std::make_shared<BumpIntegralTarget>(t.amplitude, t.onset, t.width, normalize_bump(t.r), cfg.t_end);
    }
    if (t.family == "samples") {
        Signal s = read_signal_csv(t.path);
        if (std::abs(s.grid().t_end() - cfg.t_end) > 1e-12 * std::max(1.0, cfg.t_end)) {
            config_error("target.path", "samples end at t = " + fmt(s.grid().t_end()) + ", grid.t_end is " +
                                            fmt(cfg.t_end));
        }
        return std::make_shared<SampledTarget>(std::move(s));
    }
    config_error("target.family", "'" + t.family + "' is not available for command " + cfg.command);
}

json cost_report_json(const CostReport& r) {
    return {{"eps", r.eps},
            {"delta", num(r.delta)},
            {"v_sup_norm", r.v_sup_norm},
            {"gs_argument", r.gs_argument},
            {"bound_value", num(r.bound_value)},
            {"log_bound_value", num(r.log_bound_value)},
            {"fitted_C", r.fitted_C},
            {"terms_used_max", r.terms_used_max},
            {"truncation_residual", r.truncation_residual},
            {"series_converged", r.series_converged},
            {"delta_clamped", r.delta_clamped},
            {"w1inf_norm", r.w1inf_norm},
            {"length", r.length},
            {"t_end", r.t_end},
            {"s", r.s}};
}

SeriesOptions series_options(const ExperimentConfig& cfg) { return {cfg.tol_series, cfg.n_max}; }

void say(bool quiet, const std::string& line) {
    if (!quiet) std::cout << line << '\n';
}

// ---- verify properties ----

struct Property {
    std::string name;
    bool pass;
    json measured;
};

double heat_exact(double t, double x, double k) { return std::exp(-k * k * t) * std::cos(k * x) + x; }

double heat_error(double L, double T, int n_cells, int n_steps, double k) {
    const SpaceGrid xg(L, n_cells);
    const TimeGrid tg(T, n_steps);
    std::vector<double> left(tg.size()), right(tg.size()), init(xg.size());
    for (int n = 0; n <= n_steps; ++n) {
        left[n] = heat_exact(tg.node(n), 0.0, k);
        right[n] = heat_exact(tg.node(n), L, k);
    }
    for (int j = 0; j <= n_cells; ++j) init[j] = heat_exact(0.0, xg.node(j), k);
    const HeatField y = solve_heat_forward({xg, tg, Signal(tg, left), Signal(tg, right), init});
    double err = 0.0;
    for (int n = 0; n <= n_steps; ++n) {
        for (int j = 0; j <= n_cells; ++j) err = std::max(err, std::abs(y(n, j) - heat_exact(tg.node(n), xg.node(j), k)));
    }
    return err;
}

// Two sweeps over y = exp(-k^2 t) cos(k x) + x: dx refined with dt = dx^2
// (time error of higher order), and dt refined from n_steps with dx = dt_min / 4.
Property heat_convergence(const ExperimentConfig& cfg) {
    const double k = std::numbers::pi / cfg.length;
    std::vector<double> ex, et;
    for (int m : {1, 2, 4}) {
        const int cells = m * cfg.n_cells;
        const double dx = cfg.length / cells;
        const int steps = std::max(2, static_cast<int>(std::ceil(cfg.t_end / (dx * dx))));
        ex.push_back(heat_error(cfg.length, cfg.t_end, cells, steps, k));
    }
    const int fine_cells = static_cast<int>(std::ceil(4.0 * cfg.length * 4 * cfg.n_steps / cfg.t_end));
    for (int m : {1, 2, 4}) et.push_back(heat_error(cfg.length, cfg.t_end, fine_cells, m * cfg.n_steps, k));
    const double ox = std::min(std::log2(ex[0] / ex[1]), std::log2(ex[1] / ex[2]));
    const double ot = std::min(std::log2(et[0] / et[1]), std::log2(et[1] / et[2]));
    const bool pass = ox >= 1.8 && ot >= 1.8 && ex[2] <= 1e-3 && et[2] <= 1e-3;
    return {"heat_solver_convergence", pass,
            {{"dx_errors", ex}, {"dt_errors", et}, {"dx_order", ox}, {"dt_order", ot}, {"finest_error_limit", 1e-3}}};
}

Property wave_energy_property(const ExperimentConfig& cfg) {
    const SpaceGrid xg(cfg.length, 64);
    const PseudoTimeGrid sg(200 * xg.dx(), 200);
    std::vector<double> z0(xg.size()), z1(xg.size(), 0.0);
    for (int j = 0; j <= 64; ++j) {
        const double x = xg.node(j) / cfg.length;
        z0[j] = std::sin(std::numbers::pi * x) + 0.5 * std::sin(3.0 * std::numbers::pi * x);
    }
    const WaveField z = solve_wave({xg, sg, WaveSignal(sg, std::vector<double>(sg.size(), 0.0)), z0, z1});
    const double e0 = wave_energy(z, static_cast<std::size_t>(sg.n_half()));
    double drift = 0.0;
    for (std::size_t kk = 0; kk + 1 < sg.size(); ++kk) drift = std::max(drift, std::abs(wave_energy(z, kk) - e0) / e0);
    return {"wave_energy_drift", drift <= 1e-10, {{"relative_drift", drift}, {"limit", 1e-10}}};
}

std::vector<double> random_signal(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<Property> dual_properties(const ExperimentConfig& cfg) {
    const HumOperator op(SpaceGrid(cfg.length, 40), TimeGrid(cfg.t_end, 400));
    const TimeGrid& tg = op.tgrid();
    std::mt19937_64 rng(cfg.seed);
    const double tol = 10.0 * std::max(tg.dt(), op.xgrid().dx() * op.xgrid().dx());
    double sym = 0.0, dual = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Signal f(tg, random_signal(rng, tg.size()));
        const Signal g(tg, random_signal(rng, tg.size()));
        const double scale = op.norm(f) * op.norm(g);
        sym = std::max(sym, std::abs(op.inner(op.apply_gramian(f), g) - op.inner(f, op.apply_gramian(g))) / scale);
        dual = std::max(dual, std::abs(op.inner(g, op.apply_Bstar(f)) - op.inner(op.forward(g), f)) / scale);
    }
    return {{"gramian_symmetry", sym <= 1e-8, {{"max_relative_asymmetry", sym}, {"limit", 1e-8}}},
            {"discrete_duality", dual <= tol, {{"max_relative_gap", dual}, {"limit", tol}}}};
}

Property kernel_mass_property(const ExperimentConfig& cfg) {
    const SpaceGrid xg(cfg.length, 20);
    const TransmutationPlan plan = make_plan(TimeGrid(cfg.t_end, 50), xg, cfg.tol_k, cfg.quad_nodes);
    double lo = 2.0, hi = 0.0;
    for (int n = 1; n <= 50; ++n) {
        const double m = kernel_mass(plan, plan.tgrid.node(n));
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    const bool pass = lo >= 1.0 - 2.0 * cfg.tol_k && hi <= 1.0;
    return {"kernel_mass", pass, {{"min_mass", lo}, {"max_mass", hi}, {"tol_k", cfg.tol_k}}};
}

Property factorial_property() {
    const bool ok = factorial_inequality_check(200);
    return {"factorial_inequality", ok, {{"i_max", 200}}};
}

Property gs_property(const ExperimentConfig& cfg) {
    std::vector<double> xs(cfg.gs_points);
    for (int i = 0; i < cfg.gs_points; ++i) xs[i] = cfg.gs_x_max * i / (cfg.gs_points - 1);
    bool pass = true;
    json per_s = json::array();
    for (double s : cfg.gs_s_values) {
        const double C = fit_gs_upper_constant(s, xs);
        double worst_lower = -1e300, worst_upper = -1e300;
        for (double x : xs) {
            const double lg = gs_eval(s, x).log_value;
            worst_lower = std::max(worst_lower, s * std::pow(x, 1.0 / s) - lg);
            worst_upper = std::max(worst_upper, lg - (std::log(C) + C * std::pow(x, 1.0 / s)));
        }
        const bool ok = worst_lower <= 1e-12 && worst_upper <= 1e-12;
        pass = pass && ok;
        per_s.push_back({{"s", s}, {"fitted_C", C}, {"max_log_lower_excess", worst_lower},
                         {"max_log_upper_excess", worst_upper}, {"pass", ok}});
    }
    double g1 = 0.0;
    for (double x : {1.0, 5.0, 10.0}) g1 = std::max(g1, std::abs(gs_eval(1.0, x).value / std::exp(x) - 1.0));
    pass = pass && g1 <= 1e-12;
    return {"gs_sandwich", pass, {{"per_s", per_s}, {"g1_max_relative_error", g1}}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const fs::path& base_dir, const CliOptions& overrides) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
    reject_unknown(doc, "",
                   {"command", "grid", "target", "s", "eps", "eps_list", "series", "gs", "transmute", "hum", "seed",
                    "output_dir"});
    ExperimentConfig cfg;
    cfg.command = overrides.command ? *overrides.command : get_string(doc, "", "command", "");
    require(kCommands.count(cfg.command) > 0, "command",
            "expected one of track, cost-curve, gs, transmute, hum, verify (got '" + cfg.command + "')");

    const json empty = json::object();
    auto section = [&](const char* name) -> const json& {
        if (!doc.contains(name)) return empty;
        if (!doc.at(name).is_object()) config_error(name, "expected an object");
        return doc.at(name);
    };

    const json& grid = section("grid");
    reject_unknown(grid, "grid", {"length", "t_end", "n_cells", "n_steps"});
    cfg.length = get_number(grid, "grid.", "length", cfg.length);
    cfg.t_end = get_number(grid, "grid.", "t_end", cfg.t_end);
    cfg.n_cells = static_cast<int>(get_integer(grid, "grid.", "n_cells", cfg.n_cells));
    cfg.n_steps = static_cast<int>(get_integer(grid, "grid.", "n_steps", cfg.n_steps));
    require(cfg.length > 0, "grid.length", "must be positive");
    require(cfg.t_end > 0, "grid.t_end", "must be positive");
    require(cfg.n_cells >= 4, "grid.n_cells", "must be at least 4");
    require(cfg.n_steps >= 2, "grid.n_steps", "must be at least 2");

    const json& target = section("target");
    reject_unknown(target, "target", {"family", "slope", "amplitude", "frequency", "onset", "width", "r", "path"});
    TargetSpec& t = cfg.target;
    t.family = get_string(target, "target.", "family", cfg.command == "hum" ? "manufactured" : t.family);
    require(kFamilies.count(t.family) > 0, "target.family",
            "expected one of zero, ramp, sine, bump_integral, samples, manufactured");
    t.slope = get_number(target, "target.", "slope", t.slope);
    t.amplitude = get_number(target, "target.", "amplitude", t.amplitude);
    t.frequency = get_number(target, "target.", "frequency", t.frequency);
    t.onset = get_number(target, "target.", "onset", t.onset);
    t.width = get_number(target, "target.", "width", t.width);
    t.r = get_number(target, "target.", "r", t.r);
    const std::string target_path = get_string(target, "target.", "path", "");
    if (t.family == "samples") {
        require(!target_path.empty(), "target.path", "required for the samples family");
        t.path = resolve(base_dir, target_path);
        require(fs::exists(t.path), "target.path", "file not found: " + t.path.string());
    }
    if (t.family == "bump_integral") {
        require(t.width > 0, "target.width", "must be positive");
        require(t.onset >= 0, "target.onset", "must be nonnegative (flatness at t = 0)");
        require(t.r > 1, "target.r", "must exceed 1");
    }

    cfg.s = get_number(doc, "", "s", cfg.s);
    cfg.eps = get_number(doc, "", "eps", cfg.command == "hum" ? 0.05 : cfg.eps);
    cfg.eps_list = get_list(doc, "", "eps_list", {});
    const json& series = section("series");
    reject_unknown(series, "series", {"tol", "n_max"});
    cfg.tol_series = get_number(series, "series.", "tol", cfg.tol_series);
    cfg.n_max = static_cast<int>(get_integer(series, "series.", "n_max", cfg.n_max));
    require(cfg.tol_series > 0, "series.tol", "must be positive");
    require(cfg.n_max >= 6 && cfg.n_max <= 64, "series.n_max", "must lie in [6, 64]");

    const json& gs = section("gs");
    reject_unknown(gs, "gs", {"s_values", "x_max", "n_points"});
    cfg.gs_s_values = get_list(gs, "gs.", "s_values", cfg.gs_s_values);
    cfg.gs_x_max = get_number(gs, "gs.", "x_max", cfg.gs_x_max);
    cfg.gs_points = static_cast<int>(get_integer(gs, "gs.", "n_points", cfg.gs_points));
    require(!cfg.gs_s_values.empty(), "gs.s_values", "must not be empty");
    for (double s : cfg.gs_s_values) require(s > 0 && s <= 1, "gs.s_values", "entries must lie in (0, 1]");
    require(cfg.gs_x_max > 0, "gs.x_max", "must be positive");
    require(cfg.gs_points >= 2, "gs.n_points", "must be at least 2");

    const json& tr = section("transmute");
    reject_unknown(tr, "transmute", {"wave_control", "tol_k", "quad_nodes"});
    const std::string wave = get_string(tr, "transmute.", "wave_control", "");
    cfg.tol_k = get_number(tr, "transmute.", "tol_k", cfg.tol_k);
    cfg.quad_nodes = static_cast<int>(get_integer(tr, "transmute.", "quad_nodes", cfg.quad_nodes));
    require(cfg.tol_k > 0 && cfg.tol_k < 1e-3, "transmute.tol_k", "must lie in (0, 1e-3)");
    require(cfg.quad_nodes >= 2 && cfg.quad_nodes <= 64, "transmute.quad_nodes", "must lie in [2, 64]");
    if (cfg.command == "transmute") {
        require(!wave.empty(), "transmute.wave_control", "required for the transmute command");
        cfg.wave_control = resolve(base_dir, wave);
        require(fs::exists(cfg.wave_control), "transmute.wave_control", "file not found: " + cfg.wave_control.string());
    }

    const json& hum = section("hum");
    reject_unknown(hum, "hum", {"max_iters", "grad_tol", "smoothing_sigma", "tol_disc"});
    cfg.max_iters = static_cast<int>(get_integer(hum, "hum.", "max_iters", cfg.max_iters));
    cfg.grad_tol = get_number(hum, "hum.", "grad_tol", cfg.grad_tol);
    cfg.smoothing_sigma = get_number(hum, "hum.", "smoothing_sigma", cfg.smoothing_sigma);
    cfg.tol_disc = get_number(hum, "hum.", "tol_disc", cfg.tol_disc);
    require(cfg.max_iters >= 1, "hum.max_iters", "must be positive");
    require(cfg.grad_tol > 0, "hum.grad_tol", "must be positive");
    require(cfg.smoothing_sigma > 0, "hum.smoothing_sigma", "must be positive");
    require(cfg.tol_disc >= 0, "hum.tol_disc", "must be nonnegative");

    const long long seed = get_integer(doc, "", "seed", 0);
    require(seed >= 0, "seed", "must be nonnegative");
    cfg.seed = overrides.seed ? *overrides.seed : static_cast<std::uint64_t>(seed);
    const std::string out = get_string(doc, "", "output_dir", ".");
    cfg.output_dir = overrides.out_dir ? *overrides.out_dir : resolve(base_dir, out);

    if (cfg.command == "track" || cfg.command == "cost-curve") {
        require(cfg.s > 0 && cfg.s < 1, "s", "must lie in (0, 1)");
        require(t.family != "manufactured", "target.family", "'manufactured' is only available for hum");
    }
    if (cfg.command == "track") require(cfg.eps > 0, "eps", "must be positive");
    if (cfg.command == "hum") require(cfg.eps >= 0, "eps", "must be nonnegative");
    if (cfg.command == "cost-curve") {
        require(cfg.eps_list.size() >= 2, "eps_list", "needs at least 2 entries");
        for (double e : cfg.eps_list) require(e > 0, "eps_list", "entries must be positive");
    }

    // Canonical form: every effective setting, with paths as written.
    json canon = {{"command", cfg.command},
                  {"grid", {{"length", cfg.length}, {"t_end", cfg.t_end}, {"n_cells", cfg.n_cells}, {"n_steps", cfg.n_steps}}},
                  {"target",
                   {{"family", t.family},
                    {"slope", t.slope},
                    {"amplitude", t.amplitude},
                    {"frequency", t.frequency},
                    {"onset", t.onset},
                    {"width", t.width},
                    {"r", t.r},
                    {"path", target_path}}},
                  {"s", cfg.s},
                  {"eps", cfg.eps},
                  {"eps_list", cfg.eps_list},
                  {"series", {{"tol", cfg.tol_series}, {"n_max", cfg.n_max}}},
                  {"gs", {{"s_values", cfg.gs_s_values}, {"x_max", cfg.gs_x_max}, {"n_points", cfg.gs_points}}},
                  {"transmute", {{"wave_control", wave}, {"tol_k", cfg.tol_k}, {"quad_nodes", cfg.quad_nodes}}},
                  {"hum",
                   {{"max_iters", cfg.max_iters},
                    {"grad_tol", cfg.grad_tol},
                    {"smoothing_sigma", cfg.smoothing_sigma},
                    {"tol_disc", cfg.tol_disc}}},
                  {"seed", cfg.seed}};
    cfg.canonical = canon.dump();
    cfg.hash = fnv1a(cfg.canonical);
    return cfg;
}

int run_track(const ExperimentConfig& cfg, bool quiet) {
    prepare_output(cfg);
    const TimeGrid tg = time_grid(cfg);
    const SpaceGrid xg = space_grid(cfg);
    const auto target = make_target(cfg);
    const TrackingResult result = approximate_tracking(target, cfg.s, cfg.eps, cfg.length, tg, series_options(cfg));
    const Signal& control = result.control.control;
    const Signal flux = closed_loop_flux(control, xg);
    const Signal w = target->sample(tg);
    const Signal w_delta = sample_flat_target(result.build.target, tg);

    std::vector<double> e_w(tg.size()), e_wd(tg.size());
    for (std::size_t n = 0; n < tg.size(); ++n) {
        e_w[n] = flux[n] - w[n];
        e_wd[n] = flux[n] - w_delta[n];
    }
    const Signal err_w(tg, e_w), err_wd(tg, e_wd);
    const double solver_tol = 5e-3;
    const double sup_w = signal_norm(err_w, NormKind::Sup);
    json errors = meta(cfg);
    errors.update({{"eps", cfg.eps},
                   {"solver_tolerance", solver_tol},
                   {"sup_error_target", sup_w},
                   {"l2_error_target", signal_norm(err_w, NormKind::L2)},
                   {"sup_error_mollified", signal_norm(err_wd, NormKind::Sup)},
                   {"l2_error_mollified", signal_norm(err_wd, NormKind::L2)},
                   {"within_tolerance", sup_w <= cfg.eps + solver_tol}});
    json report = meta(cfg);
    report.update(cost_report_json(result.report));

    const auto h = header(cfg);
    write_signal_csv(cfg.output_dir / "control.csv", control, h);
    write_signal_csv(cfg.output_dir / "target.csv", w, h);
    write_signal_csv(cfg.output_dir / "mollified_target.csv", w_delta, h);
    write_signal_csv(cfg.output_dir / "simulated_flux.csv", flux, h);
    write_json(cfg.output_dir / "cost_report.json", report);
    write_json(cfg.output_dir / "errors.json", errors);
    say(quiet, "track: sup |flux - w| = " + fmt(sup_w) + ", |v|_sup = " + fmt(result.report.v_sup_norm));
    return kOk;
}

int run_cost_curve(const ExperimentConfig& cfg, bool quiet) {
    prepare_output(cfg);
    const TimeGrid tg = time_grid(cfg);
    const auto target = make_target(cfg);
    std::vector<double> eps = cfg.eps_list;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    std::vector<CostReport> reports(eps.size());
    std::vector<std::exception_ptr> failures(eps.size());
    const int count = static_cast<int>(eps.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i) {
        try {
            reports[i] = approximate_tracking(target, cfg.s, eps[i], cfg.length, tg, series_options(cfg)).report;
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    const fs::path path = cfg.output_dir / "cost_curve.csv";
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << "# " << header(cfg).front() << '\n' << "eps,delta,v_sup_norm,bound_value\n";
    json rows = json::array();
    for (const CostReport& r : reports) {
        out << fmt(r.eps) << ',' << fmt(r.delta) << ',' << fmt(r.v_sup_norm) << ',' << fmt(r.bound_value) << '\n';
        rows.push_back(cost_report_json(r));
    }
    if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
    json doc = meta(cfg);
    doc["rows"] = rows;
    write_json(cfg.output_dir / "cost_curve.json", doc);
    say(quiet, "cost-curve: " + std::to_string(reports.size()) + " rows written to " + path.string());
    return kOk;
}

int run_gs(const ExperimentConfig& cfg, bool quiet) {
    prepare_output(cfg);
    std::vector<double> xs(cfg.gs_points);
    for (int i = 0; i < cfg.gs_points; ++i) xs[i] = cfg.gs_x_max * i / (cfg.gs_points - 1);
    const fs::path path = cfg.output_dir / "gs.csv";
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << "# " << header(cfg).front() << '\n' << "s,x,value,lower_bound,upper_bound_fitC\n";
    json fits = json::array();
    for (double s : cfg.gs_s_values) {
        const double C = s < 1.0 ? fit_gs_upper_constant(s, xs) : 1.0;
        for (double x : xs) {
            const double upper = s < 1.0 ? gs_upper_bound(s, x, C) : gs_closed_bound_s_ge_1(s, x);
            const double lower = s < 1.0 ? gs_lower_bound(s, x) : std::exp(x);
            out << fmt(s) << ',' << fmt(x) << ',' << fmt(gs_eval(s, x).value) << ',' << fmt(lower) << ','
                << fmt(upper) << '\n';
        }
        fits.push_back({{"s", s}, {"fitted_C", C}});
    }
    if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
    json doc = meta(cfg);
    doc["fits"] = fits;
    write_json(cfg.output_dir / "gs_fit.json", doc);
    say(quiet, "gs: " + std::to_string(xs.size() * cfg.gs_s_values.size()) + " rows written to " + path.string());
    return kOk;
}

int run_transmute(const ExperimentConfig& cfg, bool quiet) {
    prepare_output(cfg);
    const SpaceGrid xg = space_grid(cfg);
    const TransmutationPlan plan = make_plan(time_grid(cfg), xg, cfg.tol_k, cfg.quad_nodes);
    const WaveSignal g = read_wave_signal_csv(cfg.wave_control);
    const Signal v = transmute_signal(g, plan);

    std::vector<double> g_plan(plan.sgrid.size());
    for (std::size_t k = 0; k < g_plan.size(); ++k) g_plan[k] = g.sample(plan.sgrid.node(static_cast<int>(k)));
    const std::vector<double> zeros(xg.size(), 0.0);
    const WaveField z = solve_wave({xg, plan.sgrid, WaveSignal(plan.sgrid, std::move(g_plan)), zeros, zeros});
    const TransmutationReport r = verify_transmutation(z, plan);

    write_signal_csv(cfg.output_dir / "heat_control.csv", v, header(cfg));
    json doc = meta(cfg);
    doc.update({{"heat_residual", r.heat_residual},
                {"flux_identity", r.flux_identity},
                {"direct_solve_gap", r.direct_solve_gap},
                {"s_max", plan.sgrid.s_max()},
                {"tol_k", plan.tol_k},
                {"quad_nodes", plan.quad_nodes}});
    write_json(cfg.output_dir / "transmute_report.json", doc);
    say(quiet, "transmute: residual " + fmt(r.heat_residual) + ", direct-solve gap " + fmt(r.direct_solve_gap));
    return kOk;
}

int run_hum(const ExperimentConfig& cfg, bool quiet) {
    prepare_output(cfg);
    DualConfig dc{space_grid(cfg), time_grid(cfg), cfg.eps, cfg.smoothing_sigma, cfg.max_iters, cfg.grad_tol, cfg.tol_disc};
    const HumOperator op(dc.xgrid, dc.tgrid);
    const Signal w = cfg.target.family == "manufactured" ? manufactured_target(op).w : make_target(cfg)->sample(dc.tgrid);
    const HumResult result = synthesize_and_verify(w, dc);
    const HumReport& r = result.report;
    json doc = meta(cfg);
    doc.update({{"eps", r.eps},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"tracking_error_l2", r.tracking_error_l2},
                {"f_norm", r.f_norm},
                {"v_norm", r.v_norm},
                {"grad_norm", r.grad_norm},
                {"smoothing_sigma", r.smoothing_sigma},
                {"cg_condition_estimate", num(r.cg_condition_estimate)},
                {"within_tolerance", r.within_tolerance}});
    const auto h = header(cfg);
    write_signal_csv(cfg.output_dir / "hum_target.csv", w, h);
    write_signal_csv(cfg.output_dir / "hum_control.csv", result.state.Bstar_p, h);
    write_signal_csv(cfg.output_dir / "dual_variable.csv", result.state.f, h);
    write_signal_csv(cfg.output_dir / "tracked_flux.csv", result.tracked_flux, h);
    write_json(cfg.output_dir / "hum_report.json", doc);
    say(quiet, "hum: tracking error " + fmt(r.tracking_error_l2) + " after " + std::to_string(r.iterations) +
                   " iterations");
    return kOk;
}

int run_verify(const ExperimentConfig& cfg, bool quiet) {
    prepare_output(cfg);
    std::vector<Property> props;
    props.push_back(heat_convergence(cfg));
    props.push_back(wave_energy_property(cfg));
    for (auto& p : dual_properties(cfg)) props.push_back(std::move(p));
    props.push_back(kernel_mass_property(cfg));
    props.push_back(factorial_property());
    props.push_back(gs_property(cfg));

    json doc = meta(cfg);
    json list = json::array();
    bool all = true;
    for (const auto& p : props) {
        list.push_back({{"name", p.name}, {"pass", p.pass}, {"measured", p.measured}});
        all = all && p.pass;
        if (!p.pass) std::cerr << "property failed: " << p.name << '\n';
        say(quiet, std::string(p.pass ? "PASS " : "FAIL ") + p.name);
    }
    doc["properties"] = list;
    doc["all_pass"] = all;
    write_json(cfg.output_dir / "verify.json", doc);
    return all ? kOk : kPropertyFailure;
}

int run(const CliOptions& options) {
    try {
        std::ifstream in(options.config_path);
        if (!in) throw Error(ErrorKind::Io, "cannot read config " + options.config_path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        const ExperimentConfig cfg = parse_config(buf.str(), options.config_path.parent_path(), options);
        if (cfg.command == "track") return run_track(cfg, options.quiet);
        if (cfg.command == "cost-curve") return run_cost_curve(cfg, options.quiet);
        if (cfg.command == "gs") return run_gs(cfg, options.quiet);
        if (cfg.command == "transmute") return run_transmute(cfg, options.quiet);
        if (cfg.command == "hum") return run_hum(cfg, options.quiet);
        return run_verify(cfg, options.quiet);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::Io: return kIoError;
            case ErrorKind::Config:
            case ErrorKind::InvalidInput:
            case ErrorKind::InvalidGrid:
            case ErrorKind::GridTooCoarse:
            case ErrorKind::IncompatibleGrid:
            case ErrorKind::InvalidOrder:
            case ErrorKind::OutOfRange:
            case ErrorKind::OutOfDomain:
            case ErrorKind::IncompatibleTarget:
            case ErrorKind::InsufficientSupport:
            case ErrorKind::InvalidSignal: return kConfigError;
            default: return kPropertyFailure;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kPropertyFailure;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Boundary flux tracking for the 1D heat equation"};
    CliOptions options;
    std::string command, config, out;
    std::uint64_t seed = 0;
    app.add_option("command", command, "track, cost-curve, gs, transmute, hum or verify (overrides the config)");
    app.add_option("--config", config, "JSON experiment config")->required();
    auto* out_opt = app.add_option("--out", out, "output directory (overrides output_dir)");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized property checks");
    app.add_flag("--quiet", options.quiet, "suppress the summary on stdout");
    app.set_version_flag("--version", version());
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }
    if (!command.empty()) options.command = command;
    options.config_path = config;
    if (*out_opt) options.out_dir = fs::path(out);
    if (*seed_opt) options.seed = seed;
    return run(options);
}

}  // namespace heattrack::cli
