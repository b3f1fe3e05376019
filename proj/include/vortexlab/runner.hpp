#pragma once

#include "vortexlab/decay.hpp"
#include "vortexlab/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace vortexlab {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitNonConvergence = 2, kExitInvalidConfig = 3, kExitPrecondition = 4 };

struct OracleParams {
    int m = 0;
    double tol = 1e-13;
    double offset = 0.1;  ///< eta(t0) - eta* of the shot
};

struct PerturbationParams {
    double amplitude = 1e-3;
    int max_mode = 3;
};

struct HessianParams {
    std::vector<double> eta0;  ///< empty selects zero
    double null_tol = 1e-10;
    int max_mode = 0;          ///< Fourier oracle modes; 0 selects Ntheta / 2 - 1
};

struct SweepCell {
    double b = 0.0;
    int k = 1;
    int m = 0;
    std::optional<int> max_iter;
};

struct SweepParams {
    std::vector<double> b{0.0, 1.0};
    std::vector<int> k{1, 3};
    std::vector<int> m{0, 1};
    double tau_per_weight = 0.5;  ///< tau = tau_per_weight * k
    double horizon = 14.0;        ///< decay length in units of the inverse linearized rate
    std::vector<SweepCell> cells; ///< explicit cells replace the product grid when non-empty
};

struct RunConfig {
    std::string scenario = "check";
    ModelSpec model = ModelSpec::circle(1, 0.5);
    MetricSpec metric;
    Grid grid{0.0, 14.0, 513, 16};
    OracleParams oracle;
    PerturbationParams perturbation;
    SolveConfig solve;
    TheoremOptions analysis;
    HessianParams hessian;
    SweepParams sweep;
    std::string input_field;  ///< analyze an existing field CSV instead of solving
    std::uint64_t seed = 1;
    std::string output = "vortexlab_out";
    int workers = 1;

    void validate() const;
};

/// Parses a config object; unknown keys and type mismatches throw InvalidConfig naming the field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Semantic content of the config with defaults filled in (excludes output directory and worker count).
nlohmann::json semantic_json(const RunConfig& c);
std::string config_hash(const RunConfig& c);

/// Cells of a sweep in output order.
std::vector<SweepCell> sweep_cells(const SweepParams& s);
/// Upper end of the t-range giving `horizon` decay lengths for a cell.
double sweep_horizon_T(double t0, double b, double rate, double horizon);

struct RunOutcome {
    int exit_code = kExitOk;
    std::string error;
    nlohmann::json report;
};

/// Executes the configured scenario into config.output and writes run.json.
RunOutcome run(const RunConfig& config);

/// Maps an exception to its exit code.
int exit_code_for(const std::exception& e);

}  // namespace vortexlab
