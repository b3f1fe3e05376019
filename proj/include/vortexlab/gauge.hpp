#pragma once

#include "vortexlab/fields.hpp"

#include <functional>
#include <vector>

namespace vortexlab {

/// Gauge transformation over the theta-grid.
/// Torus: lifted angles phi (N x d) with g(theta_j) = exp(phi_j); increment = phi(2pi) - phi(0),
/// which lies in 2pi Z^d for a genuine loop and is arbitrary for a path.
/// Matrix: unitary values at the nodes.
struct LoopGauge {
    Backend backend = Backend::Torus;
    Eigen::MatrixXd phi;
    Eigen::VectorXd increment;
    std::vector<Eigen::MatrixXcd> mats;

    static LoopGauge identity(int N, int d);
    static LoopGauge torus(const Eigen::MatrixXd& phi, const Eigen::VectorXd& increment);
    static LoopGauge matrix(std::vector<Eigen::MatrixXcd> mats);
    int size() const { return backend == Backend::Torus ? int(phi.rows()) : int(mats.size()); }
    GroupElement at(int j) const;
    /// Value at theta = 2pi (equals at(0) for loops).
    GroupElement end() const;
    bool based(double tol = 1e-12) const;
    bool periodic(double tol = 1e-9) const;
    /// g^{-1} dg/dtheta at the nodes (torus backend), N x d.
    Eigen::MatrixXd log_derivative() const;
};

/// Loop in C^r x u(r) for the matrix backend.
struct MatrixLoop {
    Eigen::MatrixXcd x;                 ///< N x r
    std::vector<Eigen::MatrixXcd> eta;  ///< N skew-Hermitian matrices
};

/// Pointwise product g1 g2.
LoopGauge compose(const LoopGauge& g1, const LoopGauge& g2);

/// g . (x, eta) = (g^{-1} x, Ad_{g^{-1}} eta + g^{-1} g').
GaugedLoop act_on_loop(const LoopGauge& g, const GaugedLoop& y, const ModelSpec& spec);
MatrixLoop act_on_loop(const LoopGauge& g, const MatrixLoop& y);

/// Solution of Psi' + eta Psi = 0, Psi(0) = e, on the nodes plus the endpoint 2pi (N + 1 values).
struct HorizontalPath {
    Backend backend = Backend::Torus;
    Eigen::MatrixXd psi;                ///< torus: lifted angles, (N + 1) x d
    std::vector<Eigen::MatrixXcd> mats; ///< matrix: N + 1 unitaries
    GroupElement at(int j) const;
    GroupElement end() const { return at(int(backend == Backend::Torus ? psi.rows() : mats.size()) - 1); }
};

/// Torus: exact integration of band-limited eta (N x d samples).
HorizontalPath horizontal_path(const Eigen::MatrixXd& eta);
/// Matrix: fourth-order Magnus steps on N uniform intervals with eta evaluated at Gauss points.
HorizontalPath horizontal_path(const std::function<Eigen::MatrixXcd(double)>& eta, int N);
/// Matrix: eta given by node samples, evaluated between nodes by trigonometric interpolation.
HorizontalPath horizontal_path(const std::vector<Eigen::MatrixXcd>& eta);

GroupElement holonomy(const Eigen::MatrixXd& eta);
GroupElement holonomy(const std::vector<Eigen::MatrixXcd>& eta);

/// Based gauge h with h . eta constant, and that constant.
struct CanonicalGauge {
    LoopGauge h;
    AlgebraElement eta_const;
};
CanonicalGauge canonical_based_gauge(const Eigen::MatrixXd& eta);
CanonicalGauge canonical_based_gauge(const std::vector<Eigen::MatrixXcd>& eta);

/// Torus gauge transformation over the (t, theta)-grid: Phi = exp(phi).
/// phi[a] is Nt x Ntheta; winding[a] is the constant angle increment around each circle.
struct PathGauge {
    Grid grid;
    std::vector<Eigen::MatrixXd> phi;
    Eigen::VectorXd winding;
    bool t_independent = false;

    /// Same loop gauge on every circle.
    static PathGauge constant_in_t(const Grid& grid, const LoopGauge& g);
};

/// Transforms u by Phi^{-1} and the connection by A + dphi; keeps the temporal form for t-independent gauges.
CylinderField act_on_field(const PathGauge& g, const CylinderField& f, const ModelSpec& spec);

struct TemporalGauge {
    PathGauge gauge;
    CylinderField field;    ///< temporal
    double defect = 0.0;    ///< sup of the remaining dt-component
};

/// Solves d_t Phi = -A_t Phi with Phi(t0) = e and returns the temporal representative.
TemporalGauge temporal_gauge(const CylinderField& f, const ModelSpec& spec);

}  // namespace vortexlab
