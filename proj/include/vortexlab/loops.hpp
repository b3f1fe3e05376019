#pragma once

#include "vortexlab/gauge.hpp"

namespace vortexlab {

/// Loop theta -> (exp(-theta eta0) z0, eta0) with mu(z0) = 0 and exp(-2pi eta0) in the stabilizer of z0.
struct CriticalLoop {
    TargetPoint z0;
    Eigen::VectorXd eta0;
    GroupElement hol;
    int order = 1;  ///< order of the holonomy

    GaugedLoop sample(const ModelSpec& spec, int N) const;
};

/// Builds a critical loop and checks that its holonomy fixes z0; throws PreconditionFailed otherwise.
CriticalLoop make_critical(const ModelSpec& spec, const TargetPoint& z0, const Eigen::VectorXd& eta0);

struct LoopResidual {
    Eigen::MatrixXcd upsilon;  ///< x' + X_eta(x), N x n
    Eigen::MatrixXd mu;        ///< mu(x), N x d
    double sup = 0.0;
    double l2 = 0.0;
};

LoopResidual loop_residual(const GaugedLoop& y, const ModelSpec& spec);

/// Linearization of the loop residual at y in direction (v, xi).
LoopResidual loop_linearization(const GaugedLoop& y, const ModelSpec& spec, const Eigen::MatrixXcd& v,
                                const Eigen::MatrixXd& xi);

struct DistanceReport {
    double holonomy_distance = 0.0;  ///< group distance from the holonomy to the chosen stabilizer element
    double connection_offset = 0.0;  ///< |eta_tilde - eta0| with eta_tilde = -log_scaled(Hol)
    double loop_distance = 0.0;      ///< sup distance of the straightened loop to z0
};

struct NearestCritical {
    CriticalLoop critical;
    LoopGauge gauge;  ///< straightening path h_eta(theta) exp(-theta eta0); ends at the stabilizer element
    GaugedLoop straightened;
    DistanceReport report;
};

/// Default threshold: min(tube radius, gap / 4).
double default_critical_threshold(const ModelSpec& spec);

/// Nearest critical loop; threshold <= 0 selects the default.
NearestCritical nearest_critical(const GaugedLoop& y, const ModelSpec& spec, double threshold = 0.0);

/// Local action of a loop close to the critical set, evaluated on the straightened loop.
double local_action(const GaugedLoop& y, const ModelSpec& spec, double threshold = 0.0);
/// -int lambda(x, x') + int <mu(x), eta> without straightening.
double naive_local_action(const GaugedLoop& y, const ModelSpec& spec);

struct HessianPackage {
    Eigen::MatrixXd H;            ///< real coordinates per node: (Re v_j, Im v_j)_j then xi_a
    Eigen::MatrixXd S;            ///< slice rows and Nyquist-mode rows
    Eigen::MatrixXd Q;            ///< orthonormal basis of ker S
    Eigen::VectorXd eigenvalues;  ///< of Q^T H Q, ascending
    int kernel_dim = 0;
    double symmetry_defect = 0.0;
};

/// Slice-restricted Hessian at a critical loop on N theta nodes.
HessianPackage hessian_assemble(const CriticalLoop& c, const ModelSpec& spec, int N, double null_tol = 1e-10);

/// Order of the isotropy group of the critical loop.
int isotropy_order(const CriticalLoop& c, const ModelSpec& spec);

}  // namespace vortexlab
