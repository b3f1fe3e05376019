#pragma once

#include "vortexlab/loops.hpp"

#include <vector>

namespace vortexlab {

/// Rotationally symmetric vortex u = rho(t) e^{i m theta}, eta = eta(t) on the circle model with weight k.
/// Reduced system: rho' = (m + k eta) rho, eta' = e^{2bt}(k rho^2 / 2 - tau).
struct SeparableSolution {
    int k = 1;
    double tau = 0.5;
    double b = 0.0;
    int m = 0;
    double t0 = 0.0;
    double T = 1.0;
    double tol = 1e-13;
    double rho0 = 0.0;  ///< shooting parameter
    double eta_start = 0.0;
    bool fixed_point = false;
    std::vector<double> t, rho, eta;  ///< samples from the accepted shot
    double shooting_residual = 0.0;   ///< |(rho, eta)(T) - (rho*, -m/k)|
    int bisection_steps = 0;

    double rho_star() const;
    double eta_star() const;
    ModelSpec spec() const { return ModelSpec::circle(k, tau); }
};

/// Shoots for the solution decaying to the fixed point; eta(t0) = eta* + offset.
/// offset = 0 returns the fixed point itself.
SeparableSolution separable_vortex(int k, double tau, double b, int m, double t0, double T, double tol = 1e-13,
                                   double offset = 0.1);

/// Re-integrates the accepted shot at the given ascending times; rows (t, rho, eta, rho').
Eigen::MatrixXd sample_separable(const SeparableSolution& sol, const std::vector<double>& times);

/// Samples the solution on a temporal cylinder field.
CylinderField to_field(const SeparableSolution& sol, const Grid& grid);

/// 2pi int_{t1}^{t2} (rho'^2 + e^{2bt} mu^2) dt, the on-shell energy of the band.
double ode_energy(const SeparableSolution& sol, double t1, double t2);

/// Decay rate of the linearization at the fixed point for b = 0: sqrt(2 k tau).
double linearized_rate(int k, double tau);

/// Eigenvalues of the 2 x 2 linearization of the reduced system at the fixed point (b = 0).
Eigen::Vector2d linearization_eigenvalues(int k, double tau);

/// Slice-restricted Hessian spectrum at a critical loop by Fourier modes |p| <= max_mode,
/// one eigenvalue per real dimension of the grid operator.
std::vector<double> fourier_hessian_blocks(const CriticalLoop& c, const ModelSpec& spec, int max_mode);

}  // namespace vortexlab
