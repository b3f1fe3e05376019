#pragma once

#include "vortexlab/lie.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace vortexlab {

/// Linear torus action on C^n with integer weights and a shifted moment map.
struct ModelSpec {
    int n = 1;
    int d = 1;
    Eigen::MatrixXi W;       ///< d x n weight matrix
    Eigen::VectorXd tau;     ///< moment-map shift, one entry per torus factor
    double eps = 0.0;        ///< tubular radius; 0 means "use the default"

    /// Checks shapes and positivity of tau; throws InvalidConfig.
    void validate() const;
    /// Real d x n copy of the weights.
    Eigen::MatrixXd weights() const { return W.cast<double>(); }

    /// n = d = 1 model with weight k and shift tau.
    static ModelSpec circle(int k, double tau);
};

using TargetPoint = Eigen::VectorXcd;

/// mu_a(z) = tau_a - 1/2 sum_j W_aj |z_j|^2.
Eigen::VectorXd moment_map(const ModelSpec& spec, const TargetPoint& z);
/// Derivative of the moment map at z in direction w.
Eigen::VectorXd moment_map_derivative(const ModelSpec& spec, const TargetPoint& z, const Eigen::VectorXcd& w);
/// X_xi(z)_j = i (W^T xi)_j z_j.
Eigen::VectorXcd infinitesimal_action(const ModelSpec& spec, const Eigen::VectorXd& xi, const TargetPoint& z);
/// Group action exp(phi) . z, with phi the lifted torus angles.
TargetPoint act_point(const ModelSpec& spec, const Eigen::VectorXd& phi, const TargetPoint& z);
/// omega = sum_j dx_j ^ dy_j.
double omega(const Eigen::VectorXcd& v, const Eigen::VectorXcd& w);
/// Primitive lambda = 1/2 sum_j (x_j dy_j - y_j dx_j) evaluated at z on v.
double liouville(const TargetPoint& z, const Eigen::VectorXcd& v);

/// A vertex of the level-set polytope {x >= 0 : W x = 2 tau}, x_j = |z_j|^2.
struct LevelVertex {
    std::vector<int> support;
    Eigen::VectorXd x;
};

/// Enumerates the vertices of the level-set polytope (the minimal orbit-type strata).
std::vector<LevelVertex> level_vertices(const ModelSpec& spec);

struct RegularityResult {
    bool regular = false;
    bool level_set_empty = false;
    std::vector<int> violating_support;  ///< first support whose weight columns do not span R^d
};

/// Checks that every realizable support has weight columns spanning R^d.
RegularityResult is_regular(const ModelSpec& spec);

/// Finite stabilizer group of a point, listed element by element.
struct Stabilizer {
    std::vector<int> support;
    std::vector<GroupElement> elements;  ///< identity first
    std::vector<GroupElement> generators;
    long order = 1;
};

/// Support of z: indices with |z_j| above tol.
std::vector<int> support_of(const TargetPoint& z, double tol = 1e-8);
Stabilizer stabilizer_of_support(const ModelSpec& spec, const std::vector<int>& support);
Stabilizer stabilizer(const ModelSpec& spec, const TargetPoint& z);

/// Minimal distance between distinct stabilizer elements over all strata; +inf when all are trivial.
double min_stabilizer_gap(const ModelSpec& spec);

/// Default tubular radius: half the smallest level-set radius.
double default_eps(const ModelSpec& spec);
/// Tubular radius in use: the configured value capped by the default.
double tube_radius(const ModelSpec& spec);

struct LevelProjection {
    TargetPoint z;
    Eigen::VectorXd xi;
    double defect = 0.0;
    std::vector<double> newton_history;  ///< |mu(z_k)| per Newton iterate
};

/// Solves x = z + J L_z(xi) with mu(z) = 0.
LevelProjection project_to_level(const ModelSpec& spec, const TargetPoint& x, int max_iter = 50, double tol = 1e-12);

/// A point of the level set built from the first polytope vertex.
TargetPoint level_point(const ModelSpec& spec);

/// Smith normal form U A V = D of a small integer matrix; returns the diagonal.
struct SmithForm {
    Eigen::MatrixXi U, D, V;
};
SmithForm smith_normal_form(const Eigen::MatrixXi& A);

}  // namespace vortexlab
