#pragma once

#include <Eigen/Dense>

#include <vector>

namespace vortexlab {

/// Fourier differentiation matrix on N equispaced points of [0, 2pi) (N even, Nyquist mode dropped).
const Eigen::MatrixXd& spectral_diff_matrix(int N);

/// Applies the periodic spectral derivative to each column of f (rows are theta nodes).
Eigen::MatrixXd spectral_derivative(const Eigen::MatrixXd& f);
Eigen::MatrixXcd spectral_derivative(const Eigen::MatrixXcd& f);

/// Antiderivative F with F(0) = 0 of a periodic band-limited sample vector, including the mean slope.
Eigen::VectorXd spectral_antiderivative(const Eigen::VectorXd& f);

/// Trigonometric interpolation of periodic samples at an arbitrary angle.
double trig_interpolate(const Eigen::VectorXd& f, double theta);

/// Fourth-order first-derivative stencils on a uniform non-periodic grid.
class FiniteDifference4 {
public:
    FiniteDifference4() = default;
    FiniteDifference4(int n, double h);

    /// Derivative along rows (index 0 is the first sample) for every column.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& f) const;
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& f) const;
    /// Transpose of apply.
    Eigen::MatrixXd apply_transpose(const Eigen::MatrixXd& f) const;
    Eigen::MatrixXcd apply_transpose(const Eigen::MatrixXcd& f) const;

    /// Stencil for row i: first column index and five weights.
    int start(int i) const;
    const double* weights(int i) const;
    int size() const { return n_; }

private:
    int n_ = 0;
    double h_ = 1.0;
    template <class Mat>
    Mat apply_impl(const Mat& f) const;
    template <class Mat>
    Mat apply_transpose_impl(const Mat& f) const;
};

/// Fourth-order cumulative integral on a uniform grid, starting at zero.
Eigen::VectorXd cumulative_integral4(const Eigen::VectorXd& f, double h);

/// Fourth-order quadrature weights (trapezoid with Gregory end corrections) for n uniform points.
Eigen::VectorXd quadrature_weights4(int n, double h);

/// Compensated summation.
class KahanSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

}  // namespace vortexlab
