#include "vortexlab/spectral.hpp"

#include "vortexlab/errors.hpp"
#include "vortexlab/lie.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace vortexlab {

namespace {

struct RealDft {
    double a0 = 0.0, nyq = 0.0;
    std::vector<double> a, b;  // modes 1 .. N/2-1
};

RealDft real_dft(const Eigen::VectorXd& f) {
    const int N = int(f.size());
    RealDft c;
    c.a.assign(N / 2, 0.0);
    c.b.assign(N / 2, 0.0);
    const double h = kTwoPi / N;
    for (int i = 0; i < N; ++i) {
        c.a0 += f(i);
        c.nyq += (i % 2 == 0 ? 1.0 : -1.0) * f(i);
    }
    c.a0 /= N;
    c.nyq /= N;
    for (int k = 1; k < N / 2; ++k) {
        double sa = 0.0, sb = 0.0;
        for (int i = 0; i < N; ++i) {
            sa += f(i) * std::cos(k * i * h);
            sb += f(i) * std::sin(k * i * h);
        }
        c.a[k] = 2.0 * sa / N;
        c.b[k] = 2.0 * sb / N;
    }
    return c;
}

}  // namespace

const Eigen::MatrixXd& spectral_diff_matrix(int N) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Eigen::MatrixXd>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it != cache.end()) return *it->second;
    if (N < 2 || N % 2 != 0) throw GridMismatch("spectral differentiation needs an even point count");
    auto D = std::make_unique<Eigen::MatrixXd>(N, N);
    const double h = kTwoPi / N;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            if (i == j) {
                (*D)(i, j) = 0.0;
            } else {
                const double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
                (*D)(i, j) = 0.5 * sgn / std::tan(0.5 * (i - j) * h);
            }
        }
    }
    auto& ref = *D;
    cache.emplace(N, std::move(D));
    return ref;
}

Eigen::MatrixXd spectral_derivative(const Eigen::MatrixXd& f) {
    return spectral_diff_matrix(int(f.rows())) * f;
}

Eigen::MatrixXcd spectral_derivative(const Eigen::MatrixXcd& f) {
    return spectral_diff_matrix(int(f.rows())).cast<cplx>() * f;
}

Eigen::VectorXd spectral_antiderivative(const Eigen::VectorXd& f) {
    const int N = int(f.size());
    const RealDft c = real_dft(f);
    const double h = kTwoPi / N;
    Eigen::VectorXd F(N);
    for (int i = 0; i < N; ++i) {
        const double th = i * h;
        double s = c.a0 * th;
        for (int k = 1; k < N / 2; ++k) {
            s += c.a[k] * std::sin(k * th) / k - c.b[k] * (std::cos(k * th) - 1.0) / k;
        }
        F(i) = s;
    }
    return F;
}

double trig_interpolate(const Eigen::VectorXd& f, double theta) {
    const int N = int(f.size());
    const RealDft c = real_dft(f);
    double s = c.a0 + c.nyq * std::cos(0.5 * N * theta);
    for (int k = 1; k < N / 2; ++k) s += c.a[k] * std::cos(k * theta) + c.b[k] * std::sin(k * theta);
    return s;
}

namespace {

constexpr double kStencilFirst[5] = {-25, 48, -36, 16, -3};
constexpr double kStencilSecond[5] = {-3, -10, 18, -6, 1};
constexpr double kStencilCentral[5] = {1, -8, 0, 8, -1};
constexpr double kStencilPenult[5] = {-1, 6, -18, 10, 3};
constexpr double kStencilLast[5] = {3, -16, 36, -48, 25};

}  // namespace

FiniteDifference4::FiniteDifference4(int n, double h) : n_(n), h_(h) {
    if (n < 5) throw GridMismatch("fourth-order stencils need at least five points");
}

int FiniteDifference4::start(int i) const {
    if (i <= 1) return 0;
    if (i >= n_ - 2) return n_ - 5;
    return i - 2;
}

const double* FiniteDifference4::weights(int i) const {
    if (i == 0) return kStencilFirst;
    if (i == 1) return kStencilSecond;
    if (i == n_ - 2) return kStencilPenult;
    if (i == n_ - 1) return kStencilLast;
    return kStencilCentral;
}

template <class Mat>
Mat FiniteDifference4::apply_impl(const Mat& f) const {
    Mat out = Mat::Zero(f.rows(), f.cols());
    const double s = 1.0 / (12.0 * h_);
    for (int i = 0; i < n_; ++i) {
        const int st = start(i);
        const double* w = weights(i);
        for (int k = 0; k < 5; ++k)
            if (w[k] != 0.0) out.row(i) += (w[k] * s) * f.row(st + k);
    }
    return out;
}

template <class Mat>
Mat FiniteDifference4::apply_transpose_impl(const Mat& f) const {
    Mat out = Mat::Zero(f.rows(), f.cols());
    const double s = 1.0 / (12.0 * h_);
    for (int i = 0; i < n_; ++i) {
        const int st = start(i);
        const double* w = weights(i);
        for (int k = 0; k < 5; ++k)
            if (w[k] != 0.0) out.row(st + k) += (w[k] * s) * f.row(i);
    }
    return out;
}

Eigen::MatrixXd FiniteDifference4::apply(const Eigen::MatrixXd& f) const { return apply_impl(f); }
Eigen::MatrixXcd FiniteDifference4::apply(const Eigen::MatrixXcd& f) const { return apply_impl(f); }
Eigen::MatrixXd FiniteDifference4::apply_transpose(const Eigen::MatrixXd& f) const { return apply_transpose_impl(f); }
Eigen::MatrixXcd FiniteDifference4::apply_transpose(const Eigen::MatrixXcd& f) const {
    return apply_transpose_impl(f);
}

Eigen::VectorXd cumulative_integral4(const Eigen::VectorXd& f, double h) {
    const Eigen::Index n = f.size();
    Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
    if (n < 4) {
        for (Eigen::Index i = 1; i < n; ++i) F(i) = F(i - 1) + 0.5 * h * (f(i - 1) + f(i));
        return F;
    }
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        double seg;
        if (i == 0) {
            seg = 9 * f(0) + 19 * f(1) - 5 * f(2) + f(3);
        } else if (i == n - 2) {
            seg = f(n - 4) - 5 * f(n - 3) + 19 * f(n - 2) + 9 * f(n - 1);
        } else {
            seg = -f(i - 1) + 13 * f(i) + 13 * f(i + 1) - f(i + 2);
        }
        F(i + 1) = F(i) + h * seg / 24.0;
    }
    return F;
}

Eigen::VectorXd quadrature_weights4(int n, double h) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
    if (n < 2) return Eigen::VectorXd::Zero(n);
    if (n < 6) {
        w(0) = w(n - 1) = 0.5 * h;
        return w;
    }
    const double c[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (int k = 0; k < 3; ++k) {
        w(k) = c[k] * h;
        w(n - 1 - k) = c[k] * h;
    }
    return w;
}

}  // namespace vortexlab
