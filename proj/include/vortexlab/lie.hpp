#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace vortexlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class Backend { Torus, Matrix };

/// Element of the Lie algebra: a real d-vector for tori, a skew-Hermitian matrix otherwise.
struct AlgebraElement {
    Backend backend = Backend::Torus;
    Eigen::VectorXd coeffs;
    Eigen::MatrixXcd mat;

    static AlgebraElement torus(const Eigen::VectorXd& c);
    static AlgebraElement matrix(const Eigen::MatrixXcd& m);
    static AlgebraElement zero_like(const AlgebraElement& x);

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement operator-(const AlgebraElement& o) const;
    AlgebraElement operator*(double s) const;
    double norm() const;
};

/// Element of the group: angles in [0, 2pi) for tori, a unitary matrix otherwise.
struct GroupElement {
    Backend backend = Backend::Torus;
    Eigen::VectorXd angles;
    Eigen::MatrixXcd mat;

    static GroupElement torus(const Eigen::VectorXd& angles);
    static GroupElement matrix(const Eigen::MatrixXcd& m);
    static GroupElement identity(Backend backend, int dim);

    int dim() const { return backend == Backend::Torus ? int(angles.size()) : int(mat.rows()); }
};

/// Reduces an angle to [0, 2pi).
double wrap_angle(double a);

GroupElement exp_g(const AlgebraElement& xi);
/// Returns a with exp_g(2 pi a) = g on the principal branch.
AlgebraElement log_scaled(const GroupElement& g);

GroupElement multiply(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);
AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& xi);
AlgebraElement bracket(const AlgebraElement& xi, const AlgebraElement& zeta);
double inner(const AlgebraElement& xi, const AlgebraElement& zeta);

/// Bi-invariant distance 2 pi |log_scaled(g^-1 h)|.
double group_distance(const GroupElement& g, const GroupElement& h);

/// Smallest q in [1, max_order] with g^q = e within tol, or 0 if none.
int element_order(const GroupElement& g, int max_order = 1000, double tol = 1e-9);

/// Half-width of the band around eigenangle pi inside which the matrix logarithm refuses to choose.
inline constexpr double kBranchTolerance = 1e-10;

}  // namespace vortexlab
