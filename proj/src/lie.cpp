#include "vortexlab/lie.hpp"

#include "vortexlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace vortexlab {

namespace {

void require_same(Backend a, Backend b) {
    if (a != b) throw Error("backend mismatch");
}

/// Eigen-decomposition of a unitary matrix as U diag(e^{i angle}) U*.
void unitary_angles(const Eigen::MatrixXcd& g, Eigen::MatrixXcd& U, Eigen::VectorXd& angles) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(g);
    U = schur.matrixU();
    const Eigen::MatrixXcd& T = schur.matrixT();
    angles.resize(T.rows());
    for (Eigen::Index i = 0; i < T.rows(); ++i) angles(i) = std::arg(T(i, i));
}

double centered_fraction(double angle) {
    double x = wrap_angle(angle) / kTwoPi;
    if (x > 0.5) x -= 1.0;
    return x;
}

}  // namespace

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

AlgebraElement AlgebraElement::torus(const Eigen::VectorXd& c) {
    AlgebraElement x;
    x.backend = Backend::Torus;
    x.coeffs = c;
    return x;
}

AlgebraElement AlgebraElement::matrix(const Eigen::MatrixXcd& m) {
    AlgebraElement x;
    x.backend = Backend::Matrix;
    x.mat = m;
    return x;
}

AlgebraElement AlgebraElement::zero_like(const AlgebraElement& x) {
    if (x.backend == Backend::Torus) return torus(Eigen::VectorXd::Zero(x.coeffs.size()));
    return matrix(Eigen::MatrixXcd::Zero(x.mat.rows(), x.mat.cols()));
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
    require_same(backend, o.backend);
    return backend == Backend::Torus ? torus(coeffs + o.coeffs) : matrix(mat + o.mat);
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
    require_same(backend, o.backend);
    return backend == Backend::Torus ? torus(coeffs - o.coeffs) : matrix(mat - o.mat);
}

AlgebraElement AlgebraElement::operator*(double s) const {
    return backend == Backend::Torus ? torus(coeffs * s) : matrix(mat * s);
}

double AlgebraElement::norm() const {
    return std::sqrt(std::max(0.0, inner(*this, *this)));
}

GroupElement GroupElement::torus(const Eigen::VectorXd& a) {
    GroupElement g;
    g.backend = Backend::Torus;
    g.angles = a.unaryExpr([](double v) { return wrap_angle(v); });
    return g;
}

GroupElement GroupElement::matrix(const Eigen::MatrixXcd& m) {
    GroupElement g;
    g.backend = Backend::Matrix;
    g.mat = m;
    return g;
}

GroupElement GroupElement::identity(Backend backend, int dim) {
    if (backend == Backend::Torus) return torus(Eigen::VectorXd::Zero(dim));
    return matrix(Eigen::MatrixXcd::Identity(dim, dim));
}

GroupElement exp_g(const AlgebraElement& xi) {
    if (xi.backend == Backend::Torus) return GroupElement::torus(xi.coeffs);
    // xi = i H with H Hermitian.
    const Eigen::MatrixXcd H = cplx(0, -1) * xi.mat;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()));
    const Eigen::VectorXd& lam = es.eigenvalues();
    Eigen::VectorXcd phase(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) phase(i) = std::polar(1.0, lam(i));
    const Eigen::MatrixXcd& V = es.eigenvectors();
    return GroupElement::matrix(V * phase.asDiagonal() * V.adjoint());
}

AlgebraElement log_scaled(const GroupElement& g) {
    if (g.backend == Backend::Torus) {
        return AlgebraElement::torus(g.angles.unaryExpr([](double a) { return centered_fraction(a); }));
    }
    Eigen::MatrixXcd U;
    Eigen::VectorXd ang;
    unitary_angles(g.mat, U, ang);
    Eigen::VectorXcd d(ang.size());
    for (Eigen::Index i = 0; i < ang.size(); ++i) {
        if (kPi - std::abs(ang(i)) < kBranchTolerance) {
            throw BranchCut("eigenvalue -1 has no principal logarithm");
        }
        d(i) = cplx(0, ang(i) / kTwoPi);
    }
    return AlgebraElement::matrix(U * d.asDiagonal() * U.adjoint());
}

GroupElement multiply(const GroupElement& g, const GroupElement& h) {
    require_same(g.backend, h.backend);
    if (g.backend == Backend::Torus) return GroupElement::torus(g.angles + h.angles);
    return GroupElement::matrix(g.mat * h.mat);
}

GroupElement inverse(const GroupElement& g) {
    if (g.backend == Backend::Torus) return GroupElement::torus(-g.angles);
    return GroupElement::matrix(g.mat.adjoint());
}

AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& xi) {
    require_same(g.backend, xi.backend);
    if (g.backend == Backend::Torus) return xi;
    return AlgebraElement::matrix(g.mat * xi.mat * g.mat.adjoint());
}

AlgebraElement bracket(const AlgebraElement& xi, const AlgebraElement& zeta) {
    require_same(xi.backend, zeta.backend);
    if (xi.backend == Backend::Torus) return AlgebraElement::torus(Eigen::VectorXd::Zero(xi.coeffs.size()));
    return AlgebraElement::matrix(xi.mat * zeta.mat - zeta.mat * xi.mat);
}

double inner(const AlgebraElement& xi, const AlgebraElement& zeta) {
    require_same(xi.backend, zeta.backend);
    if (xi.backend == Backend::Torus) return xi.coeffs.dot(zeta.coeffs);
    return -(xi.mat * zeta.mat).trace().real();
}

double group_distance(const GroupElement& g, const GroupElement& h) {
    return kTwoPi * log_scaled(multiply(inverse(g), h)).norm();
}

int element_order(const GroupElement& g, int max_order, double tol) {
    Eigen::VectorXd ang;
    if (g.backend == Backend::Torus) {
        ang = g.angles;
    } else {
        Eigen::MatrixXcd U;
        unitary_angles(g.mat, U, ang);
    }
    for (int q = 1; q <= max_order; ++q) {
        bool ok = true;
        for (Eigen::Index i = 0; i < ang.size() && ok; ++i) {
            const double x = q * ang(i) / kTwoPi;
            ok = std::abs(x - std::round(x)) <= tol * q;
        }
        if (ok) return q;
    }
    return 0;
}

}  // namespace vortexlab
