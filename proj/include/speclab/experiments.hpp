#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speclab/config.hpp"

namespace speclab {

// A finished experiment: machine-readable summary plus optional CSV tables.
struct RunResult {
    Config resolved;               // config with defaults filled in
    std::uint64_t hash = 0;        // hash of the resolved config
    std::string verdict_line;      // one-line human summary
    bool ok = true;                // false -> CLI exit code 4
    std::string summary_json;      // schema: {experiment, config_hash, seed, verdicts, values}
    std::vector<std::pair<std::string, std::string>> csv_tables;  // name -> contents
};

// Executes the experiment named by cfg["", "experiment"]. Throws
// std::invalid_argument for config errors (CLI exit 2) and std::runtime_error
// for numerical failures (CLI exit 3).
RunResult run_experiment(const Config& cfg, std::uint64_t seed, int threads);

// Cartesian sweep over comma-separated list values under [sweep]; one summary
// row per grid point plus log-log fits for declared decay laws.
RunResult run_sweep(const Config& cfg, std::uint64_t seed, int threads);

// Fills in every default for the named experiment and validates the result
// without running anything (unknown experiments, unknown keys, and unparsable
// values throw std::invalid_argument). Backs the CLI --dry-run path.
Config resolve_experiment_config(const Config& cfg);

// Same for a sweep config: resolves the base experiment, validates the [sweep]
// lists, the fit declarations, and the grid-size cap.
Config resolve_sweep_config(const Config& cfg, std::size_t* point_count = nullptr);

// Registered experiment names, sorted.
std::vector<std::string> experiment_names();

std::string tool_version();

// Named reproduction configs shipped with the tool (one per acceptance check).
std::vector<std::string> reproduction_names();
Config reproduction_config(const std::string& name);

// Least-squares line y = slope*x + intercept with coefficient of determination.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Convenience: fit log(y) vs log(x); requires positive y (zeros are dropped
// and reported via n_used).
struct DecayFit {
    LineFit fit;
    int n_used = 0;
};
DecayFit fit_decay(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace speclab
