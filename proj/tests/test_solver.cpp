#include "vortexlab/errors.hpp"
#include "vortexlab/oracles.hpp"
#include "vortexlab/solver.hpp"

#include "doctest.h"

#include <random>

using namespace vortexlab;

namespace {

FieldDirection random_direction(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    FieldDirection d = FieldDirection::zeros(g, 1, 1);
    for (int i = 0; i < g.Nt; ++i)
        for (int k = 0; k < g.Ntheta; ++k) {
            d.v[0](i, k) = cplx(N(rng), N(rng));
            d.xi[0](i, k) = N(rng);
        }
    return d;
}

CylinderField shifted(const CylinderField& f, const FieldDirection& d, double s) {
    CylinderField g = f;
    g.u[0] += s * d.v[0];
    g.eta[0] += s * d.xi[0];
    return g;
}

double max_diff(const ResidualVector& a, const VortexResidual& p, const VortexResidual& m, double h) {
    const Eigen::MatrixXcd d1 = (p.r1[0] - m.r1[0]) / (2.0 * h) - a.r1[0];
    const Eigen::MatrixXd d2 = (p.r2[0] - m.r2[0]) / (2.0 * h) - a.r2[0];
    return std::max(d1.cwiseAbs().maxCoeff(), d2.cwiseAbs().maxCoeff());
}

ResidualVector combine(const ResidualVector& a, double s, const ResidualVector& b) {
    ResidualVector r = a;
    r.r1[0] = a.r1[0] + s * b.r1[0];
    r.r2[0] = a.r2[0] + s * b.r2[0];
    return r;
}

}  // namespace

TEST_CASE("linearized operator matches finite differences") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 1.0, 0, 0.0, 1.5);
    const Grid g{0.0, 1.5, 33, 16};
    const CylinderField f = to_field(sol, g);
    const LinearizedOperator L = linearized_operator(f, sol.spec(), MetricSpec{1.0});
    std::mt19937_64 rng(5);
    const double h = 1e-5;
    for (int trial = 0; trial < 10; ++trial) {
        const FieldDirection d = random_direction(g, rng);
        const VortexResidual p = vortex_residual(shifted(f, d, h), sol.spec(), MetricSpec{1.0});
        const VortexResidual m = vortex_residual(shifted(f, d, -h), sol.spec(), MetricSpec{1.0});
        const ResidualVector a = L.apply(d);
        const double scale = std::max(a.r1[0].cwiseAbs().maxCoeff(), a.r2[0].cwiseAbs().maxCoeff());
        CHECK(max_diff(a, p, m, h) < 1e-6 * scale);
    }
}

TEST_CASE("linearized operator is linear and its transpose is the adjoint") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 4.0);
    const Grid g{0.0, 4.0, 33, 16};
    const CylinderField f = to_field(sol, g);
    const LinearizedOperator L = linearized_operator(f, sol.spec(), MetricSpec{0.0});
    std::mt19937_64 rng(9);
    const FieldDirection d1 = random_direction(g, rng), d2 = random_direction(g, rng);
    FieldDirection s = d1;
    s.v[0] += 2.5 * d2.v[0];
    s.xi[0] += 2.5 * d2.xi[0];
    const ResidualVector lhs = L.apply(s);
    const ResidualVector rhs = combine(L.apply(d1), 2.5, L.apply(d2));
    CHECK((lhs.r1[0] - rhs.r1[0]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((lhs.r2[0] - rhs.r2[0]).cwiseAbs().maxCoeff() < 1e-10);

    const ResidualVector r = L.apply(d2);
    const double a = L.apply(d1).dot(r);
    const double b = d1.dot(L.apply_transpose(r));
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
}

TEST_CASE("constant critical field needs no iterations") {
    const ModelSpec s = ModelSpec::circle(1, 0.5);
    const Grid g{0.0, 2.0, 33, 16};
    CylinderField f = CylinderField::zeros(g, 1, 1);
    f.u[0].setConstant(1.0);
    const SolveResult r = relax(f, s, MetricSpec{0.0}, SolveConfig{});
    CHECK(r.certificate.iterations == 0);
    CHECK(r.certificate.final_residual_sup < 1e-12);
}

TEST_CASE("perturbed oracle relaxes back on shell") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 14.0);
    const Grid g{0.0, 14.0, 257, 64};
    const CylinderField f0 = to_field(sol, g);
    const CylinderField p = perturb(f0, 1e-3, 3);
    CHECK(vortex_residual(p, sol.spec(), MetricSpec{0.0}).sup > 1e-4);
    CHECK((p.u[0].row(0) - f0.u[0].row(0)).cwiseAbs().maxCoeff() < 1e-15);
    const SolveResult r = relax(p, sol.spec(), MetricSpec{0.0}, SolveConfig{});
    CHECK(r.certificate.iterations <= 30);
    CHECK(r.certificate.final_residual_sup <= 1e-8);
    CHECK(r.certificate.band_residual_sup.size() == 4);
    CHECK(r.field.u[0].row(0) == p.u[0].row(0));
}

TEST_CASE("relaxation is deterministic") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 14.0);
    const CylinderField p = perturb(to_field(sol, Grid{0.0, 14.0, 257, 16}), 1e-3, 3);
    const SolveResult a = relax(p, sol.spec(), MetricSpec{0.0}, SolveConfig{});
    const SolveResult b = relax(p, sol.spec(), MetricSpec{0.0}, SolveConfig{});
    CHECK(a.field.u[0] == b.field.u[0]);
    CHECK(a.field.eta[0] == b.field.eta[0]);
    CHECK(a.certificate.residual_history == b.certificate.residual_history);
}

TEST_CASE("relaxation with a growing metric factor") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 1.0, 0, 0.0, 2.8);
    const Grid g{0.0, 2.8, 257, 16};
    SolveConfig cfg;
    cfg.tol_residual = 1e-7;
    const SolveResult r = relax(perturb(to_field(sol, g), 1e-3, 11), sol.spec(), MetricSpec{1.0}, cfg);
    CHECK(r.certificate.final_residual_sup <= 1e-7);
}

TEST_CASE("non-convergence and configuration errors") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 8.0);
    const Grid g{0.0, 8.0, 65, 16};
    SolveConfig cfg;
    cfg.max_iter = 0;
    CHECK_THROWS_AS(relax(perturb(to_field(sol, g), 1e-2, 3), sol.spec(), MetricSpec{0.0}, cfg), NonConvergence);
    SolveConfig bad;
    bad.tol_residual = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidConfig);
    CHECK(boundary_mode_from_string(to_string(BoundaryMode::Project)) == BoundaryMode::Project);
    CHECK_THROWS_AS(boundary_mode_from_string("clamp"), InvalidConfig);
}
