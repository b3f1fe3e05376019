#pragma once

#include "vortexlab/loops.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vortexlab {

enum class BoundaryMode { Penalty, Project };

std::string to_string(BoundaryMode m);
BoundaryMode boundary_mode_from_string(const std::string& s);

struct SolveConfig {
    double tol_residual = 1e-8;
    int max_iter = 30;
    BoundaryMode boundary = BoundaryMode::Penalty;
    double penalty_weight = 0.0;  ///< <= 0 selects e^{2bT}
    double min_penalty_weight = 1e-3;  ///< stagnation divides the weight by 10 down to this floor
    double damping = 1.0;         ///< initial step fraction
    int max_cg_iter = 20000;
    double cg_relative_tol = 1e-2;

    void validate() const;
};

/// Perturbation direction (v, xi) over the grid.
struct FieldDirection {
    std::vector<Eigen::MatrixXcd> v;
    std::vector<Eigen::MatrixXd> xi;

    static FieldDirection zeros(const Grid& grid, int n, int d);
    double dot(const FieldDirection& o) const;
};

/// Residual-space vector: interior rows plus the optional boundary loop at T.
struct ResidualVector {
    std::vector<Eigen::MatrixXcd> r1;
    std::vector<Eigen::MatrixXd> r2;
    Eigen::MatrixXcd b1;  ///< Ntheta x n
    Eigen::MatrixXd b2;   ///< Ntheta x d
    double dot(const ResidualVector& o) const;
};

/// Jacobian of the discrete residual at a temporal field, applied matrix-free.
class LinearizedOperator {
public:
    /// scale_r2: multiply the second equation by e^{-bt}; boundary_weight > 0 appends sqrt(w) times the
    /// linearized loop residual at the last row.
    LinearizedOperator(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric, bool scale_r2 = false,
                       double boundary_weight = 0.0);

    ResidualVector apply(const FieldDirection& d) const;
    FieldDirection apply_transpose(const ResidualVector& r) const;

private:
    CylinderField f_;
    ModelSpec spec_;
    MetricSpec metric_;
    bool scale_r2_;
    double bw_;
    FiniteDifference4 fd_;
    std::vector<Eigen::MatrixXd> c_;  ///< (W^T eta)_j
    Eigen::VectorXd w1_, w2_;         ///< per-row weights of the v- and xi-parts of the second equation
};

/// Matrix-free Jacobian of vortex_residual (unscaled, no boundary rows).
LinearizedOperator linearized_operator(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric);

struct SolveCertificate {
    int iterations = 0;
    std::vector<double> residual_history;  ///< sup residual before each iteration and at the end
    double final_residual_sup = 0.0;
    double final_residual_l2 = 0.0;
    std::vector<double> band_residual_sup;  ///< sup over four equal t-bands
    BoundaryMode boundary_mode = BoundaryMode::Penalty;
    double boundary_weight = 0.0;  ///< final penalty weight
    std::vector<int> cg_iterations;
};

struct SolveResult {
    CylinderField field;
    SolveCertificate certificate;
};

/// Gauss-Newton relaxation with the first row held fixed; throws NonConvergence on failure.
SolveResult relax(const CylinderField& initial, const ModelSpec& spec, const MetricSpec& metric, const SolveConfig& config);

/// Adds a smooth band-limited perturbation that vanishes at both t-ends.
CylinderField perturb(const CylinderField& f, double amplitude, std::uint64_t seed, int max_mode = 3);

}  // namespace vortexlab
