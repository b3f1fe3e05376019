#pragma once

#include "vortexlab/gauge.hpp"
#include "vortexlab/oracles.hpp"

#include <cstdint>

namespace vortexlab {

/// Largest |omega(X_xi z, w) - <d mu(z) w, xi>| over random (z, w, xi).
double hamiltonian_identity_defect(const ModelSpec& spec, int samples, std::uint64_t seed);

/// Largest |X_xi(z) - (exp(s xi) z - z) / s| over random (z, xi) at step s.
double action_difference_defect(const ModelSpec& spec, double s, int samples, std::uint64_t seed);

/// Angle error of the torus holonomy of a constant connection, compared with exp(-2 pi eta).
double torus_holonomy_error(const Eigen::VectorXd& eta, int N);

/// Error of the matrix holonomy of a piecewise-constant u(r) connection against the ordered product formula.
double matrix_holonomy_error(int r, int pieces, int N, std::uint64_t seed);

/// Random based torus gauge with Fourier modes up to max_mode and integer winding per factor.
LoopGauge random_based_gauge(int N, int d, std::uint64_t seed, int max_mode, double amplitude, int winding);

struct GaugeInvarianceDefect {
    double energy = 0.0;    ///< |E(g.w) - E(w)| / E(w)
    double residual = 0.0;  ///< |l2(g.w) - l2(w)|
};

/// Compares energy and residual norms of a temporal field and its image under a t-independent gauge.
GaugeInvarianceDefect gauge_invariance_defect(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                                              const LoopGauge& g);

/// Sup of the vortex residual of the sampled oracle on [t0, T] with Nt nodes.
double oracle_residual(const SeparableSolution& sol, int Nt, int Ntheta);

}  // namespace vortexlab
