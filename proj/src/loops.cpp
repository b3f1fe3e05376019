#include "vortexlab/loops.hpp"

#include "vortexlab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vortexlab {

namespace {

double circle_integral(const Eigen::VectorXd& g) {
    KahanSum s;
    for (Eigen::Index j = 0; j < g.size(); ++j) s.add(g(j));
    return s.value() * kTwoPi / double(g.size());
}

Eigen::MatrixXcd theta_derivative(const Eigen::MatrixXcd& x) { return spectral_derivative(x); }

}  // namespace

GaugedLoop CriticalLoop::sample(const ModelSpec& spec, int N) const {
    GaugedLoop y;
    y.x.resize(N, spec.n);
    y.eta.resize(N, spec.d);
    for (int j = 0; j < N; ++j) {
        const double th = kTwoPi * j / N;
        y.x.row(j) = act_point(spec, -th * eta0, z0).transpose();
        y.eta.row(j) = eta0.transpose();
    }
    return y;
}

CriticalLoop make_critical(const ModelSpec& spec, const TargetPoint& z0, const Eigen::VectorXd& eta0) {
    if (moment_map(spec, z0).cwiseAbs().maxCoeff() > 1e-9) throw PreconditionFailed("base point is not on the level set");
    CriticalLoop c;
    c.z0 = z0;
    c.eta0 = eta0;
    c.hol = exp_g(AlgebraElement::torus(-kTwoPi * eta0));
    const Stabilizer st = stabilizer(spec, z0);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& k : st.elements) best = std::min(best, group_distance(k, c.hol));
    if (best > 1e-9) throw PreconditionFailed("holonomy does not fix the base point");
    c.order = element_order(c.hol);
    return c;
}

LoopResidual loop_residual(const GaugedLoop& y, const ModelSpec& spec) {
    const int N = y.size();
    LoopResidual r;
    r.upsilon = theta_derivative(y.x);
    r.mu.resize(N, spec.d);
    Eigen::VectorXd sq(N);
    for (int j = 0; j < N; ++j) {
        const Eigen::VectorXcd x = y.x.row(j).transpose();
        r.upsilon.row(j) += infinitesimal_action(spec, y.eta.row(j).transpose(), x).transpose();
        r.mu.row(j) = moment_map(spec, x).transpose();
        sq(j) = r.upsilon.row(j).squaredNorm() + r.mu.row(j).squaredNorm();
    }
    r.sup = std::sqrt(sq.maxCoeff());
    r.l2 = std::sqrt(circle_integral(sq));
    return r;
}

LoopResidual loop_linearization(const GaugedLoop& y, const ModelSpec& spec, const Eigen::MatrixXcd& v,
                                const Eigen::MatrixXd& xi) {
    const int N = y.size();
    LoopResidual r;
    r.upsilon = theta_derivative(v);
    r.mu.resize(N, spec.d);
    Eigen::VectorXd sq(N);
    for (int j = 0; j < N; ++j) {
        const Eigen::VectorXcd x = y.x.row(j).transpose();
        const Eigen::VectorXcd vj = v.row(j).transpose();
        r.upsilon.row(j) += infinitesimal_action(spec, y.eta.row(j).transpose(), vj).transpose();
        r.upsilon.row(j) += infinitesimal_action(spec, xi.row(j).transpose(), x).transpose();
        r.mu.row(j) = moment_map_derivative(spec, x, vj).transpose();
        sq(j) = r.upsilon.row(j).squaredNorm() + r.mu.row(j).squaredNorm();
    }
    r.sup = std::sqrt(sq.maxCoeff());
    r.l2 = std::sqrt(circle_integral(sq));
    return r;
}

double default_critical_threshold(const ModelSpec& spec) {
    return std::min(tube_radius(spec), 0.25 * min_stabilizer_gap(spec));
}

NearestCritical nearest_critical(const GaugedLoop& y, const ModelSpec& spec, double threshold) {
    if (threshold <= 0.0) threshold = default_critical_threshold(spec);
    const LoopResidual res = loop_residual(y, spec);
    double dx = 0.0, dmu = 0.0;
    for (int j = 0; j < y.size(); ++j) {
        dx = std::max(dx, res.upsilon.row(j).norm());
        dmu = std::max(dmu, res.mu.row(j).norm());
    }
    if (dx > threshold || dmu > threshold)
        throw NotNearCritical("loop derivative " + std::to_string(dx) + " or moment " + std::to_string(dmu) +
                              " exceeds threshold " + std::to_string(threshold));

    const int N = y.size();
    const HorizontalPath path = horizontal_path(y.eta);
    const GroupElement hol = path.end();
    const Eigen::VectorXd L = log_scaled(hol).coeffs;
    const Eigen::VectorXd eta_tilde = -L;

    const LevelProjection proj = project_to_level(spec, y.x.row(0).transpose());
    const Stabilizer st = stabilizer(spec, proj.z);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity(), second = best_d;
    for (int i = 0; i < int(st.elements.size()); ++i) {
        const double dist = group_distance(st.elements[i], hol);
        if (dist < best_d) {
            second = best_d;
            best_d = dist;
            best = i;
        } else if (dist < second) {
            second = dist;
        }
    }
    if (std::isfinite(second) && std::abs(second - best_d) <= 1e-12 * std::max(1.0, best_d))
        throw AmbiguousStabilizer("holonomy is equidistant from two stabilizer elements");

    const Eigen::VectorXd kappa = log_scaled(st.elements[best]).coeffs;
    Eigen::VectorXd eta0(spec.d);
    for (int a = 0; a < spec.d; ++a) eta0(a) = -kappa(a) + std::round(eta_tilde(a) + kappa(a));

    Eigen::MatrixXd phi(N, spec.d);
    Eigen::VectorXd inc(spec.d);
    for (int a = 0; a < spec.d; ++a) {
        for (int j = 0; j < N; ++j) phi(j, a) = path.psi(j, a) - (kTwoPi * j / N) * (L(a) + eta0(a));
        const double loop_part = path.psi(N, a) - kTwoPi * L(a);
        inc(a) = kTwoPi * std::round(loop_part / kTwoPi) - kTwoPi * eta0(a);
    }

    NearestCritical out;
    out.critical = make_critical(spec, proj.z, eta0);
    out.gauge = LoopGauge::torus(phi, inc);
    out.straightened = act_on_loop(out.gauge, y, spec);
    out.report.holonomy_distance = best_d;
    out.report.connection_offset = (eta_tilde - eta0).norm();
    double ld = 0.0;
    for (int j = 0; j < N; ++j) ld = std::max(ld, (out.straightened.x.row(j).transpose() - proj.z).norm());
    out.report.loop_distance = ld;
    return out;
}

double naive_local_action(const GaugedLoop& y, const ModelSpec& spec) {
    const int N = y.size();
    const Eigen::MatrixXcd dx = theta_derivative(y.x);
    Eigen::VectorXd g(N);
    for (int j = 0; j < N; ++j) {
        const Eigen::VectorXcd x = y.x.row(j).transpose();
        g(j) = -liouville(x, dx.row(j).transpose()) + moment_map(spec, x).dot(y.eta.row(j).transpose());
    }
    return circle_integral(g);
}

double local_action(const GaugedLoop& y, const ModelSpec& spec, double threshold) {
    const NearestCritical nc = nearest_critical(y, spec, threshold);
    return naive_local_action(y, spec) + spec.tau.dot(nc.gauge.increment);
}

HessianPackage hessian_assemble(const CriticalLoop& c, const ModelSpec& spec, int N, double null_tol) {
    if (N < 16 || N % 2 != 0) throw GridMismatch("Hessian assembly needs an even node count of at least 16");
    const int n = spec.n, d = spec.d, dim = N * (2 * n + d);
    const GaugedLoop y = c.sample(spec, N);
    const Eigen::MatrixXd& D = spectral_diff_matrix(N);
    const Eigen::VectorXd cw = spec.weights().transpose() * c.eta0;
    auto re = [N](int j) { return 2 * j * N; };
    auto im = [N](int j) { return (2 * j + 1) * N; };
    auto xi = [N, n](int a) { return (2 * n + a) * N; };

    HessianPackage P;
    P.H = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < n; ++j) {
        P.H.block(re(j), im(j), N, N) = -D;
        P.H.block(im(j), re(j), N, N) = D;
        for (int i = 0; i < N; ++i) {
            P.H(re(j) + i, re(j) + i) = -cw(j);
            P.H(im(j) + i, im(j) + i) = -cw(j);
        }
        for (int a = 0; a < d; ++a) {
            const double w = spec.W(a, j);
            if (w == 0) continue;
            for (int i = 0; i < N; ++i) {
                const double xr = y.x(i, j).real(), xim = y.x(i, j).imag();
                P.H(re(j) + i, xi(a) + i) = -w * xr;
                P.H(im(j) + i, xi(a) + i) = -w * xim;
                P.H(xi(a) + i, re(j) + i) = -w * xr;
                P.H(xi(a) + i, im(j) + i) = -w * xim;
            }
        }
    }

    P.S = Eigen::MatrixXd::Zero(d * N + 2 * n + d, dim);
    for (int a = 0; a < d; ++a) {
        P.S.block(a * N, xi(a), N, N) = D;
        for (int j = 0; j < n; ++j) {
            const double w = spec.W(a, j);
            if (w == 0) continue;
            for (int i = 0; i < N; ++i) {
                P.S(a * N + i, im(j) + i) += w * y.x(i, j).real();
                P.S(a * N + i, re(j) + i) -= w * y.x(i, j).imag();
            }
        }
    }
    for (int comp = 0; comp < 2 * n + d; ++comp)
        for (int i = 0; i < N; ++i) P.S(d * N + comp, comp * N + i) = ((i % 2 == 0) ? 1.0 : -1.0) / std::sqrt(double(N));

    Eigen::BDCSVD<Eigen::MatrixXd> svd(P.S, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > null_tol) ++rank;
    P.Q = svd.matrixV().rightCols(dim - rank);

    Eigen::MatrixXd Hs = P.Q.transpose() * P.H * P.Q;
    P.symmetry_defect = (Hs - Hs.transpose()).cwiseAbs().maxCoeff();
    Hs = 0.5 * (Hs + Hs.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs, Eigen::EigenvaluesOnly);
    P.eigenvalues = es.eigenvalues();
    P.kernel_dim = int((P.eigenvalues.array().abs() < 1e-8).count());
    return P;
}

int isotropy_order(const CriticalLoop& c, const ModelSpec& spec) {
    return int(stabilizer(spec, c.z0).order);
}

}  // namespace vortexlab
