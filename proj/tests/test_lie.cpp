#include "vortexlab/errors.hpp"
#include "vortexlab/lie.hpp"

#include <random>

#include "doctest.h"

using namespace vortexlab;

namespace {

Eigen::MatrixXcd random_skew(int r, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXcd A(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) A(i, j) = cplx(N(rng), N(rng));
    return 0.5 * (A - A.adjoint());
}

AlgebraElement scalar(double c) { return AlgebraElement::torus(Eigen::VectorXd::Constant(1, c)); }

}  // namespace

TEST_CASE("exp of zero is the identity") {
    CHECK(exp_g(scalar(0.0)).angles(0) == 0.0);
    const GroupElement g = exp_g(AlgebraElement::matrix(Eigen::MatrixXcd::Zero(2, 2)));
    CHECK((g.mat - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("torus exp keeps the angle modulo 2 pi") {
    CHECK(exp_g(scalar(kPi)).angles(0) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(exp_g(scalar(-kPi / 2)).angles(0) == doctest::Approx(1.5 * kPi));
    CHECK(exp_g(scalar(5 * kTwoPi + 0.25)).angles(0) == doctest::Approx(0.25));
}

TEST_CASE("matrix exp of diag(i pi, -i pi) is minus the identity") {
    Eigen::MatrixXcd xi = Eigen::MatrixXcd::Zero(2, 2);
    xi(0, 0) = cplx(0, kPi);
    xi(1, 1) = cplx(0, -kPi);
    const GroupElement g = exp_g(AlgebraElement::matrix(xi));
    CHECK((g.mat + Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("one-parameter subgroup law") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXcd xi = random_skew(3, rng);
    const GroupElement a = exp_g(AlgebraElement::matrix(0.3 * xi));
    const GroupElement b = exp_g(AlgebraElement::matrix(0.9 * xi));
    const GroupElement c = exp_g(AlgebraElement::matrix(1.2 * xi));
    CHECK((multiply(a, b).mat - c.mat).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c.mat.adjoint() * c.mat - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("scaled logarithm on the principal branch") {
    CHECK(log_scaled(GroupElement::identity(Backend::Torus, 1)).coeffs(0) == 0.0);
    const Eigen::VectorXd third = Eigen::VectorXd::Constant(1, kTwoPi / 3);
    CHECK(log_scaled(GroupElement::torus(third)).coeffs(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    const Eigen::VectorXd half = Eigen::VectorXd::Constant(1, kPi);
    CHECK(log_scaled(GroupElement::torus(half)).coeffs(0) == doctest::Approx(0.5));
    const Eigen::VectorXd neg = Eigen::VectorXd::Constant(1, 1.5 * kPi);
    CHECK(log_scaled(GroupElement::torus(neg)).coeffs(0) == doctest::Approx(-0.25));
}

TEST_CASE("exp(2 pi log g) recovers g") {
    std::mt19937_64 rng(5);
    for (int s = 0; s < 20; ++s) {
        const GroupElement g = exp_g(AlgebraElement::matrix(random_skew(3, rng)));
        const GroupElement back = exp_g(log_scaled(g) * kTwoPi);
        CHECK((back.mat - g.mat).cwiseAbs().maxCoeff() < 1e-10);
    }
    std::uniform_real_distribution<double> U(0.0, kTwoPi);
    for (int s = 0; s < 20; ++s) {
        const GroupElement g = GroupElement::torus(Eigen::Vector2d(U(rng), U(rng)));
        const GroupElement back = exp_g(log_scaled(g) * kTwoPi);
        CHECK(group_distance(back, g) < 1e-10);
    }
}

TEST_CASE("matrix logarithm refuses eigenvalue -1") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    m(1, 1) = -1.0;
    CHECK_THROWS_AS(log_scaled(GroupElement::matrix(m)), BranchCut);
}

TEST_CASE("torus adjoint, bracket and inner product") {
    const AlgebraElement xi = AlgebraElement::torus(Eigen::Vector2d(0.3, -1.2));
    const AlgebraElement zeta = AlgebraElement::torus(Eigen::Vector2d(2.0, 0.5));
    const GroupElement g = GroupElement::torus(Eigen::Vector2d(1.0, 4.0));
    CHECK((adjoint(g, xi).coeffs - xi.coeffs).norm() == 0.0);
    CHECK(bracket(xi, zeta).norm() == 0.0);
    CHECK(inner(xi, zeta) == doctest::Approx(0.3 * 2.0 - 1.2 * 0.5));
}

TEST_CASE("matrix inner product is Ad-invariant and bracket is skew") {
    std::mt19937_64 rng(7);
    for (int s = 0; s < 10; ++s) {
        const AlgebraElement xi = AlgebraElement::matrix(random_skew(3, rng));
        const AlgebraElement zeta = AlgebraElement::matrix(random_skew(3, rng));
        const AlgebraElement chi = AlgebraElement::matrix(random_skew(3, rng));
        const GroupElement g = exp_g(AlgebraElement::matrix(random_skew(3, rng)));
        CHECK(std::abs(inner(adjoint(g, xi), adjoint(g, zeta)) - inner(xi, zeta)) < 1e-12);
        CHECK(bracket(xi, xi).norm() < 1e-15);
        CHECK(std::abs(inner(bracket(xi, zeta), chi) + inner(zeta, bracket(xi, chi))) < 1e-12);
        CHECK((xi.mat + xi.mat.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("group distance is symmetric and satisfies the triangle inequality") {
    std::mt19937_64 rng(11);
    for (int s = 0; s < 20; ++s) {
        const GroupElement a = exp_g(AlgebraElement::matrix(0.3 * random_skew(2, rng)));
        const GroupElement b = exp_g(AlgebraElement::matrix(0.3 * random_skew(2, rng)));
        const GroupElement c = exp_g(AlgebraElement::matrix(0.3 * random_skew(2, rng)));
        CHECK(std::abs(group_distance(a, b) - group_distance(b, a)) < 1e-12);
        CHECK(group_distance(a, c) <= group_distance(a, b) + group_distance(b, c) + 1e-12);
    }
}

TEST_CASE("element order of rational torus angles") {
    CHECK(element_order(GroupElement::torus(Eigen::VectorXd::Constant(1, kTwoPi / 3))) == 3);
    CHECK(element_order(GroupElement::torus(Eigen::Vector2d(kPi, kTwoPi / 4))) == 4);
    CHECK(element_order(GroupElement::torus(Eigen::VectorXd::Constant(1, 1.0))) == 0);
}
