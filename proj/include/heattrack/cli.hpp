#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace heattrack::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kPropertyFailure = 3, kIoError = 4 };

struct TargetSpec {
    std::string family = "ramp";  // zero, ramp, sine, bump_integral, samples, manufactured (hum only)
    double slope = 1.0;
    double amplitude = 1.0;
    double frequency = 1.0;
    double onset = 0.0;
    double width = 0.5;
    double r = 1.5;
    std::filesystem::path path;
};

struct ExperimentConfig {
    std::string command;
    double length = 1.0;
    double t_end = 1.0;
    int n_cells = 50;
    int n_steps = 500;
    TargetSpec target;
    double s = 0.5;
    double eps = 0.1;
    std::vector<double> eps_list;
    double tol_series = 1e-12;
    int n_max = 64;
    std::vector<double> gs_s_values{0.3, 0.5, 0.8};
    double gs_x_max = 30.0;
    int gs_points = 300;
    std::filesystem::path wave_control;
    double tol_k = 1e-14;
    int quad_nodes = 16;
    int max_iters = 500;
    double grad_tol = 1e-6;
    double smoothing_sigma = 1e-8;
    double tol_disc = 5e-3;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";

    std::string canonical;    // normalized JSON the hash is taken over
    std::uint64_t hash = 0;   // FNV-1a 64 of `canonical`
};

struct CliOptions {
    std::optional<std::string> command;
    std::filesystem::path config_path;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

/// Parses and validates a JSON config. Relative paths resolve against
/// `base_dir`. Throws Error(Config) naming the offending key.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir,
                              const CliOptions& overrides = {});

int run_track(const ExperimentConfig& cfg, bool quiet);
int run_cost_curve(const ExperimentConfig& cfg, bool quiet);
int run_gs(const ExperimentConfig& cfg, bool quiet);
int run_transmute(const ExperimentConfig& cfg, bool quiet);
int run_hum(const ExperimentConfig& cfg, bool quiet);
int run_verify(const ExperimentConfig& cfg, bool quiet);

/// Loads the config, dispatches the command, and maps errors to exit codes.
int run(const CliOptions& options);

/// argv front end: heattrack [command] --config <path> [--out <dir>] [--seed <u64>] [--quiet]
int main_entry(int argc, char** argv);

std::string version();

}  // namespace heattrack::cli
