#include "vortexlab/diagnostics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/loops.hpp"

#include "doctest.h"

using namespace vortexlab;

namespace {

const cplx I(0.0, 1.0);

/// Loop x = e^{i theta}, eta = -1/3 + delta on the weight-3 circle model.
GaugedLoop winding_loop(int N, double delta) {
    GaugedLoop y{Eigen::MatrixXcd(N, 1), Eigen::MatrixXd::Constant(N, 1, -1.0 / 3.0 + delta)};
    for (int j = 0; j < N; ++j) y.x(j, 0) = std::exp(I * (kTwoPi * j / N));
    return y;
}

}  // namespace

TEST_CASE("critical loops have zero residual") {
    const ModelSpec s = ModelSpec::circle(3, 1.5);
    for (double e : {0.0, -1.0 / 3.0, -2.0 / 3.0}) {
        const CriticalLoop c = make_critical(s, TargetPoint::Ones(1), Eigen::VectorXd::Constant(1, e));
        CHECK(loop_residual(c.sample(s, 32), s).sup < 1e-12);
    }
    CHECK_THROWS_AS(make_critical(s, TargetPoint::Ones(1), Eigen::VectorXd::Constant(1, 0.1)), PreconditionFailed);
}

TEST_CASE("nearest critical loop for a holonomy angle of 2pi/3 + 0.01") {
    const ModelSpec s = ModelSpec::circle(3, 1.5);
    const GaugedLoop y = winding_loop(64, -0.01 / kTwoPi);
    const NearestCritical nc = nearest_critical(y, s);
    CHECK(nc.critical.order == 3);
    CHECK(nc.critical.eta0(0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(nc.report.holonomy_distance == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(nc.report.connection_offset == doctest::Approx(0.01 / kTwoPi).epsilon(1e-6));
    CHECK(loop_residual(nc.straightened, s).sup < 0.05);
}

TEST_CASE("loops far from the critical set are rejected") {
    const ModelSpec s = ModelSpec::circle(3, 1.5);
    GaugedLoop y = winding_loop(64, 0.0);
    y.x *= 0.5;
    CHECK_THROWS_AS(nearest_critical(y, s), NotNearCritical);
}

TEST_CASE("local action vanishes on critical loops") {
    const ModelSpec s = ModelSpec::circle(3, 1.5);
    const CriticalLoop c = make_critical(s, TargetPoint::Ones(1), Eigen::VectorXd::Constant(1, -1.0 / 3.0));
    CHECK(std::abs(local_action(c.sample(s, 64), s)) < 1e-12);
    const ModelSpec s1 = ModelSpec::circle(1, 0.5);
    const CriticalLoop c1 = make_critical(s1, TargetPoint::Ones(1), Eigen::VectorXd::Zero(1));
    CHECK(std::abs(local_action(c1.sample(s1, 64), s1)) < 1e-12);
}

TEST_CASE("local action is invariant under based gauges while the naive action is not") {
    const ModelSpec s = ModelSpec::circle(3, 1.5);
    GaugedLoop y = winding_loop(64, 0.002);
    for (int j = 0; j < 64; ++j) y.x(j, 0) *= 1.0 + 0.01 * std::cos(kTwoPi * j / 64);
    const double a0 = local_action(y, s);
    const double n0 = naive_local_action(y, s);
    for (int w : {0, 1, -2}) {
        const GaugedLoop gy = act_on_loop(random_based_gauge(64, 1, 7 + w, 2, 0.3, w), y, s);
        CHECK(std::abs(local_action(gy, s) - a0) < 1e-10);
        if (w != 0) CHECK(std::abs(naive_local_action(gy, s) - n0) > 1.0);
    }
}

TEST_CASE("Hessian at a critical loop") {
    const ModelSpec s = ModelSpec::circle(3, 1.5);
    const CriticalLoop c = make_critical(s, TargetPoint::Ones(1), Eigen::VectorXd::Constant(1, -1.0 / 3.0));
    const HessianPackage hp = hessian_assemble(c, s, 32);
    CHECK(hp.symmetry_defect < 1e-12);
    CHECK(hp.kernel_dim == 0);
    CHECK(hp.Q.cols() == hp.eigenvalues.size());
    CHECK((hp.S * hp.Q).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(hessian_assemble(c, s, 15), GridMismatch);
}

TEST_CASE("isotropy order") {
    const ModelSpec s3 = ModelSpec::circle(3, 1.5);
    CHECK(isotropy_order(make_critical(s3, TargetPoint::Ones(1), Eigen::VectorXd::Zero(1)), s3) == 3);
    const ModelSpec s1 = ModelSpec::circle(1, 0.5);
    CHECK(isotropy_order(make_critical(s1, TargetPoint::Ones(1), Eigen::VectorXd::Zero(1)), s1) == 1);

    ModelSpec s;
    s.n = 2;
    s.d = 1;
    s.W.resize(1, 2);
    s.W << 2, 3;
    s.tau = Eigen::VectorXd::Constant(1, 1.0);
    TargetPoint z(2);
    z << 1.0, 0.0;
    CHECK(isotropy_order(make_critical(s, z, Eigen::VectorXd::Zero(1)), s) == 2);
}

TEST_CASE("infinitesimal gauge directions lie in the kernel of the linearization") {
    const ModelSpec s = ModelSpec::circle(3, 1.5);
    const CriticalLoop c = make_critical(s, TargetPoint::Ones(1), Eigen::VectorXd::Constant(1, -1.0 / 3.0));
    const int N = 64;
    const GaugedLoop y = c.sample(s, N);
    Eigen::MatrixXcd v(N, 1);
    Eigen::MatrixXd xi(N, 1);
    for (int j = 0; j < N; ++j) {
        const double th = kTwoPi * j / N;
        const double phi = std::sin(th) + 0.5 * std::cos(2.0 * th);
        const double dphi = std::cos(th) - std::sin(2.0 * th);
        v(j, 0) = -infinitesimal_action(s, Eigen::VectorXd::Constant(1, phi), y.x.row(j).transpose())(0);
        xi(j, 0) = dphi;
    }
    const LoopResidual L = loop_linearization(y, s, v, xi);
    CHECK(L.sup < 1e-12);

    Eigen::MatrixXcd w = v;
    w.col(0) *= I;
    CHECK(loop_linearization(y, s, w, Eigen::MatrixXd::Zero(N, 1)).sup > 1e-3);
}
