#pragma once

#include "vortexlab/model.hpp"
#include "vortexlab/spectral.hpp"

#include <utility>
#include <vector>

namespace vortexlab {

/// Uniform grid on [t0, T] x S^1.
struct Grid {
    double t0 = 0.0;
    double T = 1.0;
    int Nt = 16;
    int Ntheta = 16;

    void validate() const;
    double ht() const { return (T - t0) / (Nt - 1); }
    double htheta() const { return kTwoPi / Ntheta; }
    double t(int i) const { return t0 + i * ht(); }
    double theta(int j) const { return j * htheta(); }
    /// Index of the node nearest to t, clamped to the grid.
    int index_of(double t) const;
};

/// Conformal cylinder metric e^{2bt}(dt^2 + dtheta^2).
struct MetricSpec {
    double b = 0.0;
    double weight(double t) const;  ///< e^{2bt}
};

/// A loop (x, eta) in C^n x g sampled on N equispaced angles.
struct GaugedLoop {
    Eigen::MatrixXcd x;   ///< N x n
    Eigen::MatrixXd eta;  ///< N x d
    int size() const { return int(x.rows()); }
};

/// Discretized pair (u, A) on a cylinder grid; A = A_t dt + eta dtheta.
struct CylinderField {
    Grid grid;
    int n = 1;
    int d = 1;
    std::vector<Eigen::MatrixXcd> u;   ///< n components, each Nt x Ntheta
    std::vector<Eigen::MatrixXd> eta;  ///< d components
    std::vector<Eigen::MatrixXd> At;   ///< d components, empty in temporal gauge

    static CylinderField zeros(const Grid& grid, int n, int d, bool temporal = true);
    bool temporal() const { return At.empty(); }
    Eigen::VectorXcd u_at(int i, int j) const;
    Eigen::VectorXd eta_at(int i, int j) const;
    Eigen::VectorXd At_at(int i, int j) const;
    /// The loop at time index i.
    GaugedLoop row(int i) const;
    /// Largest absolute difference of all components.
    double max_difference(const CylinderField& o) const;
};

struct CovariantDerivative {
    std::vector<Eigen::MatrixXcd> Dt;      ///< d_t u + X_{A_t} u
    std::vector<Eigen::MatrixXcd> Dtheta;  ///< d_theta u + X_eta u
};

CovariantDerivative covariant_d(const CylinderField& f, const ModelSpec& spec);

/// Curvature coefficient of dt ^ dtheta: d_t eta - d_theta A_t.
std::vector<Eigen::MatrixXd> curvature(const CylinderField& f);

/// Moment map on the grid, one matrix per torus factor.
std::vector<Eigen::MatrixXd> moment_field(const CylinderField& f, const ModelSpec& spec);

struct VortexResidual {
    std::vector<Eigen::MatrixXcd> r1;
    std::vector<Eigen::MatrixXd> r2;
    double sup = 0.0;
    double l2 = 0.0;  ///< with volume weight e^{2bt}
};

/// r1 = d_t u + J(d_theta u + X_eta u), r2 = d_t eta + e^{2bt} mu(u); temporal fields only.
VortexResidual vortex_residual(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric);

/// e_b = 1/2(|d_eta u|^2 + e^{-2bt}|F|^2 + e^{2bt}|mu|^2) on the grid.
Eigen::MatrixXd energy_density(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric);

/// Integral of e_b over t-indices [i1, i2] and the full circle.
double total_energy(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric, int i1, int i2);
/// Integral of a grid function over t-indices [i1, i2] and the circle.
double integrate_band(const Eigen::MatrixXd& g, const Grid& grid, int i1, int i2);
/// Integral over the circle at each time index.
Eigen::VectorXd integrate_circles(const Eigen::MatrixXd& g, const Grid& grid);

/// |E(w)|-consistency of the energy identity on a band.
struct EnergyIdentity {
    double energy = 0.0;
    double holomorphic_term = 0.0;  ///< integral of |dbar_A u|^2 + 1/2 |F + *mu|^2
    double topological_term = 0.0;  ///< integral of u^*omega - d<mu, A>
    double defect = 0.0;            ///< energy - holomorphic_term - topological_term
};

EnergyIdentity energy_identity_defect(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                                      int i1, int i2);

/// Sup-norm defects of |d_A u|^2 = |del_A u|^2 + |dbar_A u|^2 and
/// u^*omega - d<mu, A> = 1/2(|del_A u|^2 - |dbar_A u|^2) - <F, *mu> over the grid interior.
std::pair<double, double> pointwise_identities_defect(const CylinderField& f, const ModelSpec& spec,
                                                      const MetricSpec& metric);

/// Derivative in t (fourth order) and theta (spectral) of a component.
Eigen::MatrixXcd dt(const Eigen::MatrixXcd& f, const Grid& grid);
Eigen::MatrixXd dt(const Eigen::MatrixXd& f, const Grid& grid);
Eigen::MatrixXcd dtheta(const Eigen::MatrixXcd& f);
Eigen::MatrixXd dtheta(const Eigen::MatrixXd& f);

}  // namespace vortexlab
