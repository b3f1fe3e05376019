#include "vortexlab/oracles.hpp"

#include "vortexlab/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace vortexlab {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 3>;  // rho, eta, accumulated energy

struct Reduced {
    int k, m;
    double tau, b;
    void operator()(const State& s, State& ds, double t) const {
        const double rho = s[0], eta = s[1];
        const double drho = (m + k * eta) * rho;
        const double mu = tau - 0.5 * k * rho * rho;
        const double w = std::exp(2.0 * b * t);
        ds[0] = drho;
        ds[1] = -w * mu;
        ds[2] = kTwoPi * (drho * drho + w * mu * mu);
    }
};

struct Decided {
    int verdict;
};

auto make_stepper(double tol) {
    return odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
}

/// +1 if the shot overshoots the fixed point, -1 if it falls back, judged on [t0, T].
int classify(const SeparableSolution& s, double rho0) {
    const Reduced sys{s.k, s.m, s.tau, s.b};
    const double rs = s.rho_star(), es = s.eta_star();
    State x{rho0, s.eta_start, 0.0};
    auto obs = [&](const State& y, double) {
        const double sgn = s.m + s.k * y[1];
        if (!std::isfinite(y[0]) || y[0] > rs) throw Decided{+1};
        if (sgn < 0.0 && y[0] < rs) throw Decided{-1};
    };
    try {
        odeint::integrate_adaptive(make_stepper(s.tol), sys, x, s.t0, s.T, 1e-3, obs);
    } catch (const Decided& d) {
        return d.verdict;
    } catch (const odeint::step_adjustment_error&) {
        throw StiffnessAbort("step size underflow during shooting");
    }
    const double unstable = std::exp(s.b * s.T) * (x[0] - rs) + (x[1] - es);
    return unstable > 0.0 ? +1 : -1;
}

}  // namespace

double SeparableSolution::rho_star() const { return std::sqrt(2.0 * tau / k); }
double SeparableSolution::eta_star() const { return -double(m) / k; }

SeparableSolution separable_vortex(int k, double tau, double b, int m, double t0, double T, double tol,
                                   double offset) {
    if (k < 1 || !(tau > 0.0) || b < 0.0 || !(T > t0) || !(tol > 0.0))
        throw InvalidConfig("separable vortex: need k >= 1, tau > 0, b >= 0, T > t0, tol > 0");
    if (std::abs(m) >= k) throw InvalidConfig("separable vortex: need |m| < k");
    SeparableSolution s;
    s.k = k;
    s.tau = tau;
    s.b = b;
    s.m = m;
    s.t0 = t0;
    s.T = T;
    s.tol = tol;
    s.eta_start = s.eta_star() + offset;
    if (offset == 0.0) {
        s.fixed_point = true;
        s.rho0 = s.rho_star();
    } else {
        if (offset < 0.0) throw InvalidConfig("separable vortex: offset must be nonnegative");
        double lo = 1e-8 * s.rho_star(), hi = s.rho_star();
        if (classify(s, lo) != -1 || classify(s, hi) != +1) throw ShootingFailed("initial bracket does not straddle");
        for (int it = 0; it < 80 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (classify(s, mid) > 0 ? hi : lo) = mid;
            s.bisection_steps = it + 1;
        }
        s.rho0 = 0.5 * (lo + hi);
    }
    std::vector<double> times;
    const int samples = 201;
    for (int i = 0; i < samples; ++i) times.push_back(t0 + (T - t0) * i / (samples - 1));
    const Eigen::MatrixXd smp = sample_separable(s, times);
    for (int i = 0; i < samples; ++i) {
        s.t.push_back(smp(i, 0));
        s.rho.push_back(smp(i, 1));
        s.eta.push_back(smp(i, 2));
    }
    s.shooting_residual = std::hypot(s.rho.back() - s.rho_star(), s.eta.back() - s.eta_star());
    return s;
}

Eigen::MatrixXd sample_separable(const SeparableSolution& sol, const std::vector<double>& times) {
    Eigen::MatrixXd out(times.size(), 4);
    if (times.empty()) return out;
    if (times.front() < sol.t0 - 1e-12 || times.back() > sol.T + 1e-12)
        throw RangeMismatch("sample times outside the solution interval");
    if (sol.fixed_point) {
        for (size_t i = 0; i < times.size(); ++i) out.row(i) << times[i], sol.rho_star(), sol.eta_star(), 0.0;
        return out;
    }
    const Reduced sys{sol.k, sol.m, sol.tau, sol.b};
    State x{sol.rho0, sol.eta_start, 0.0};
    std::vector<double> ts;
    if (times.front() > sol.t0) ts.push_back(sol.t0);
    ts.insert(ts.end(), times.begin(), times.end());
    size_t row = 0;
    auto obs = [&](const State& y, double t) {
        if (row < times.size() && t >= times[row] - 1e-14) {
            out.row(row) << t, y[0], y[1], (sol.m + sol.k * y[1]) * y[0];
            ++row;
        }
    };
    try {
        odeint::integrate_times(make_stepper(sol.tol), sys, x, ts.begin(), ts.end(), 1e-3, obs);
    } catch (const odeint::step_adjustment_error&) {
        throw StiffnessAbort("step size underflow while sampling");
    }
    return out;
}

CylinderField to_field(const SeparableSolution& sol, const Grid& grid) {
    grid.validate();
    if (grid.t0 < sol.t0 - 1e-12 || grid.T > sol.T + 1e-12) throw RangeMismatch("grid extends beyond the solution");
    std::vector<double> times(grid.Nt);
    for (int i = 0; i < grid.Nt; ++i) times[i] = grid.t(i);
    times.back() = std::min(times.back(), sol.T);
    const Eigen::MatrixXd smp = sample_separable(sol, times);
    CylinderField f = CylinderField::zeros(grid, 1, 1);
    for (int j = 0; j < grid.Ntheta; ++j) {
        const cplx phase = std::polar(1.0, sol.m * grid.theta(j));
        for (int i = 0; i < grid.Nt; ++i) {
            f.u[0](i, j) = smp(i, 1) * phase;
            f.eta[0](i, j) = smp(i, 2);
        }
    }
    return f;
}

double ode_energy(const SeparableSolution& sol, double t1, double t2) {
    if (sol.fixed_point) return 0.0;
    const Reduced sys{sol.k, sol.m, sol.tau, sol.b};
    State x{sol.rho0, sol.eta_start, 0.0};
    std::vector<double> ts{sol.t0, t1, t2};
    std::vector<double> e;
    auto obs = [&](const State& y, double) { e.push_back(y[2]); };
    odeint::integrate_times(make_stepper(sol.tol), sys, x, ts.begin(), ts.end(), 1e-3, obs);
    return e[2] - e[1];
}

Eigen::Vector2d linearization_eigenvalues(int k, double tau) {
    const double rs = std::sqrt(2.0 * tau / k);
    Eigen::Matrix2d J;
    J << 0.0, k * rs, k * rs, 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(J);
    return es.eigenvalues();
}

double linearized_rate(int k, double tau) { return -linearization_eigenvalues(k, tau)(0); }

std::vector<double> fourier_hessian_blocks(const CriticalLoop& c, const ModelSpec& spec, int max_mode) {
    const std::vector<int> S = support_of(c.z0);
    const int s = int(S.size()), d = spec.d;
    const Eigen::VectorXd cw = spec.weights().transpose() * c.eta0;
    Eigen::MatrixXd B(d, s);
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < s; ++i) B(a, i) = spec.W(a, S[i]) * std::abs(c.z0(S[i]));

    std::vector<double> out;
    const int dim = 2 * s + d;
    const cplx I(0, 1);
    for (int p = -max_mode; p <= max_mode; ++p) {
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
        M.block(0, s, s, s) = -I * double(p) * Eigen::MatrixXcd::Identity(s, s);
        M.block(s, 0, s, s) = I * double(p) * Eigen::MatrixXcd::Identity(s, s);
        M.block(0, 2 * s, s, d) = -B.transpose().cast<cplx>();
        M.block(2 * s, 0, d, s) = -B.cast<cplx>();
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, dim);
        C.block(0, s, d, s) = B.cast<cplx>();
        C.block(0, 2 * s, d, d) = I * double(p) * Eigen::MatrixXcd::Identity(d, d);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullV);
        int rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-12) ++rank;
        const Eigen::MatrixXcd Q = svd.matrixV().rightCols(dim - rank);
        Eigen::MatrixXcd Mr = Q.adjoint() * M * Q;
        Mr = 0.5 * (Mr + Mr.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Mr, Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
    }
    for (int j = 0; j < spec.n; ++j) {
        if (std::find(S.begin(), S.end(), j) != S.end()) continue;
        for (int q = -max_mode; q <= max_mode; ++q) {
            out.push_back(-(q + cw(j)));
            out.push_back(-(q + cw(j)));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace vortexlab
