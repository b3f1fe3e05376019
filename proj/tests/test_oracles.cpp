#include "vortexlab/diagnostics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/loops.hpp"
#include "vortexlab/oracles.hpp"

#include "doctest.h"

#include <algorithm>

using namespace vortexlab;

TEST_CASE("zero offset returns the fixed point") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 5.0, 1e-13, 0.0);
    CHECK(sol.fixed_point);
    CHECK(sol.rho_star() == doctest::Approx(1.0));
    CHECK(sol.eta_star() == 0.0);
    CHECK(oracle_residual(sol, 65, 16) <= 1e-12);
}

TEST_CASE("linearization at the fixed point") {
    for (int k : {1, 2, 3}) {
        const double tau = 0.5 * k;
        const Eigen::Vector2d ev = linearization_eigenvalues(k, tau);
        CHECK(std::abs(ev(0)) == doctest::Approx(linearized_rate(k, tau)));
        CHECK(std::abs(ev(1)) == doctest::Approx(linearized_rate(k, tau)));
        CHECK(ev(0) * ev(1) < 0.0);
    }
    CHECK(linearized_rate(1, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("shooting converges to the fixed point") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 14.0);
    CHECK(sol.shooting_residual < 1e-6);
    CHECK(std::abs(sol.eta.front() - 0.1) < 1e-12);
    CHECK(std::abs(sol.rho.back() - 1.0) < 1e-5);
}

TEST_CASE("winding solution has holonomy of order k") {
    const SeparableSolution sol = separable_vortex(3, 1.5, 0.0, 1, 0.0, 6.0);
    CHECK(sol.eta_star() == doctest::Approx(-1.0 / 3.0));
    const Grid g{0.0, 6.0, 257, 32};
    const CylinderField f = to_field(sol, g);
    const NearestCritical nc = nearest_critical(f.row(g.Nt - 1), sol.spec());
    CHECK(nc.critical.order == 3);
    CHECK(nc.critical.eta0(0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("sampled oracle residual is small and converges at fourth order") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 8.0);
    const double r512 = oracle_residual(sol, 513, 64);
    CHECK(r512 <= 1e-7);
    const double ratio = oracle_residual(sol, 129, 16) / oracle_residual(sol, 257, 16);
    CHECK(ratio > 16.0 * 0.7);
    CHECK(ratio < 16.0 * 1.3);
}

TEST_CASE("oracle with the sign of the second equation flipped is not a solution") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 8.0);
    const Grid g{0.0, 8.0, 257, 16};
    CylinderField f = to_field(sol, g);
    const double good = vortex_residual(f, sol.spec(), MetricSpec{0.0}).sup;
    for (int i = 0; i < g.Nt; ++i) f.eta[0].row(i).array() = 2.0 * sol.eta_star() - f.eta[0].row(i).array();
    CHECK(vortex_residual(f, sol.spec(), MetricSpec{0.0}).sup > 1e3 * good);
}

TEST_CASE("sample_separable matches the shot") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 1.0, 0, 0.0, 2.5);
    const Eigen::MatrixXd s = sample_separable(sol, {0.0, 1.0, 2.0});
    CHECK(s(0, 1) == doctest::Approx(sol.rho.front()));
    CHECK(s(2, 0) == 2.0);
    const double mu = 0.5 - 0.5 * s(1, 1) * s(1, 1);
    CHECK(s(1, 3) == doctest::Approx(s(1, 2) * s(1, 1)));
    CHECK(std::isfinite(mu));
}

TEST_CASE("invalid oracle parameters") {
    CHECK_THROWS(separable_vortex(1, -0.5, 0.0, 0, 0.0, 4.0));
    CHECK_THROWS(separable_vortex(1, 0.5, 0.0, 0, 4.0, 1.0));
}

TEST_CASE("Fourier Hessian blocks agree with the grid Hessian") {
    const ModelSpec s = ModelSpec::circle(3, 1.5);
    const CriticalLoop c = make_critical(s, TargetPoint::Ones(1), Eigen::VectorXd::Constant(1, -1.0 / 3.0));
    const int N = 64;
    const HessianPackage hp = hessian_assemble(c, s, N);
    CHECK(hp.kernel_dim == 0);
    std::vector<double> four = fourier_hessian_blocks(c, s, N / 2 - 1);
    std::vector<double> grid(hp.eigenvalues.data(), hp.eigenvalues.data() + hp.eigenvalues.size());
    auto low = [&](std::vector<double> v) {
        v.erase(std::remove_if(v.begin(), v.end(), [&](double x) { return std::abs(x) > N / 4.0; }), v.end());
        return v;
    };
    const auto a = low(four), b = low(grid);
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    CHECK(worst < 1e-9);
}
