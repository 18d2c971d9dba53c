#pragma once
// Run configuration, experiment dispatch, deterministic output layout, and
// run manifests. One experiment per invocation; `sweep` fans independent
// configs out to a worker pool.

#include <filesystem>
#include <optional>
#include <string>

#include "tflab/evolve.hpp"
#include "tflab/norms.hpp"

namespace tflab {

enum class Experiment {
    Params,
    Coercivity,
    Symbol,
    Spectrum,
    InvertCheck,
    Simulate,
    Picard,
    Reconstruct
};

struct RunConfig {
    double n = 2.0;
    double x_min = 1e-6;
    double x_max = 1e6;
    int n_nodes = 1024;
    std::optional<ExponentConfig> exponents; // nullopt = auto
    SolveOptions solve;
    Experiment experiment = Experiment::Params;
    std::filesystem::path out_dir = "out";
    unsigned long seed = 0;

    double amplitude = 0.01;    // perturbation amplitude for runs
    double alpha = 0.0;         // symbol / spectrum weight (0 = range midpoint)
    int alpha_samples = 200;    // coercivity table
    double xi_max = 100.0;      // symbol scan extent
    int n_xi = 2000;
    std::string input_csv;      // reconstruct: optional (x,u) samples
};

// theorem-driven exponent selection: p from the admissible window, margins
// at 45% of the binding constraint, smallest admissible k_tilde
ExponentConfig auto_exponents(const MobilityParams& par);

// key = value lines; '#' comments; unknown keys rejected
RunConfig parse_config_file(const std::filesystem::path& file);
void apply_config_line(RunConfig& cfg, const std::string& key,
                       const std::string& value);

// executes the experiment, writes outputs + manifest.json under out_dir;
// returns the process exit status (0 ok, 2 validation, 3 numerical guard)
int run(const RunConfig& cfg);

std::string experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& s);

// two-column CSV with 17 significant digits
void write_grid_function_csv(const std::filesystem::path& file,
                             const GridFunction& u);
GridFunction read_grid_function_csv(const std::filesystem::path& file);

} // namespace tflab
