#include "vortexlab/model.hpp"

#include "vortexlab/errors.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace vortexlab {

void ModelSpec::validate() const {
    if (n < 1 || d < 1) throw InvalidConfig("model: n and d must be positive");
    if (W.rows() != d || W.cols() != n) throw InvalidConfig("model.weights: expected a d x n matrix");
    if (tau.size() != d) throw InvalidConfig("model.tau: expected d entries");
    for (Eigen::Index a = 0; a < d; ++a) {
        if (!(tau(a) > 0.0) || !std::isfinite(tau(a))) throw InvalidConfig("model.tau: entries must be positive");
    }
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidConfig("model.eps: must be a nonnegative number");
}

ModelSpec ModelSpec::circle(int k, double tau) {
    ModelSpec s;
    s.n = 1;
    s.d = 1;
    s.W = Eigen::MatrixXi::Constant(1, 1, k);
    s.tau = Eigen::VectorXd::Constant(1, tau);
    return s;
}

Eigen::VectorXd moment_map(const ModelSpec& spec, const TargetPoint& z) {
    return spec.tau - 0.5 * spec.weights() * z.cwiseAbs2();
}

Eigen::VectorXd moment_map_derivative(const ModelSpec& spec, const TargetPoint& z, const Eigen::VectorXcd& w) {
    Eigen::VectorXd re(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) re(j) = (std::conj(z(j)) * w(j)).real();
    return -spec.weights() * re;
}

Eigen::VectorXcd infinitesimal_action(const ModelSpec& spec, const Eigen::VectorXd& xi, const TargetPoint& z) {
    const Eigen::VectorXd c = spec.weights().transpose() * xi;
    Eigen::VectorXcd out(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) out(j) = cplx(0, c(j)) * z(j);
    return out;
}

TargetPoint act_point(const ModelSpec& spec, const Eigen::VectorXd& phi, const TargetPoint& z) {
    const Eigen::VectorXd c = spec.weights().transpose() * phi;
    TargetPoint out(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) out(j) = std::polar(1.0, c(j)) * z(j);
    return out;
}

double omega(const Eigen::VectorXcd& v, const Eigen::VectorXcd& w) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < v.size(); ++j) s += (std::conj(v(j)) * w(j)).imag();
    return s;
}

double liouville(const TargetPoint& z, const Eigen::VectorXcd& v) {
    return 0.5 * omega(z, v);
}

namespace {

bool next_combination(std::vector<int>& c, int n) {
    const int k = int(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& W, const std::vector<int>& cols) {
    Eigen::MatrixXd out(W.rows(), Eigen::Index(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) out.col(Eigen::Index(i)) = W.col(cols[i]);
    return out;
}

}  // namespace

std::vector<LevelVertex> level_vertices(const ModelSpec& spec) {
    if (spec.n > 12 || spec.d > 12) throw SizeLimit("level-set enumeration supports n, d <= 12");
    const Eigen::MatrixXd W = spec.weights();
    const Eigen::VectorXd rhs = 2.0 * spec.tau;
    const double tol = 1e-10 * (1.0 + rhs.norm());
    std::vector<LevelVertex> out;
    auto add = [&](const Eigen::VectorXd& x) {
        for (const auto& v : out)
            if ((v.x - x).norm() <= tol) return;
        LevelVertex v;
        v.x = x;
        for (int j = 0; j < spec.n; ++j)
            if (x(j) > tol) v.support.push_back(j);
        out.push_back(std::move(v));
    };
    if (rhs.norm() <= tol) add(Eigen::VectorXd::Zero(spec.n));
    for (int size = 1; size <= std::min(spec.n, spec.d); ++size) {
        std::vector<int> comb(size);
        std::iota(comb.begin(), comb.end(), 0);
        do {
            const Eigen::MatrixXd WB = columns(W, comb);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(WB);
            if (qr.rank() < size) continue;
            const Eigen::VectorXd xb = qr.solve(rhs);
            if ((WB * xb - rhs).norm() > tol) continue;
            if (xb.minCoeff() < -tol) continue;
            Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.n);
            for (int i = 0; i < size; ++i) x(comb[i]) = std::max(0.0, xb(i));
            add(x);
        } while (next_combination(comb, spec.n));
    }
    return out;
}

RegularityResult is_regular(const ModelSpec& spec) {
    RegularityResult r;
    const auto verts = level_vertices(spec);
    if (verts.empty()) {
        r.level_set_empty = true;
        return r;
    }
    const Eigen::MatrixXd W = spec.weights();
    for (const auto& v : verts) {
        int rank = 0;
        if (!v.support.empty()) {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(columns(W, v.support));
            rank = int(lu.rank());
        }
        if (rank < spec.d) {
            r.violating_support = v.support;
            return r;
        }
    }
    r.regular = true;
    return r;
}

SmithForm smith_normal_form(const Eigen::MatrixXi& A) {
    using M = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index r = A.rows(), c = A.cols();
    M D = A.cast<long long>();
    M U = M::Identity(r, r);
    M V = M::Identity(c, c);
    auto swap_rows = [&](Eigen::Index i, Eigen::Index j) { D.row(i).swap(D.row(j)); U.row(i).swap(U.row(j)); };
    auto swap_cols = [&](Eigen::Index i, Eigen::Index j) { D.col(i).swap(D.col(j)); V.col(i).swap(V.col(j)); };
    for (Eigen::Index t = 0; t < std::min(r, c); ++t) {
        while (true) {
            // pivot: smallest nonzero magnitude in the trailing block
            long long best = 0;
            Eigen::Index pi = -1, pj = -1;
            for (Eigen::Index i = t; i < r; ++i)
                for (Eigen::Index j = t; j < c; ++j)
                    if (D(i, j) != 0 && (best == 0 || std::llabs(D(i, j)) < best)) {
                        best = std::llabs(D(i, j));
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) break;
            swap_rows(t, pi);
            swap_cols(t, pj);
            bool clean = true;
            for (Eigen::Index i = t + 1; i < r; ++i) {
                const long long q = D(i, t) / D(t, t);
                if (q != 0) {
                    D.row(i) -= q * D.row(t);
                    U.row(i) -= q * U.row(t);
                }
                if (D(i, t) != 0) clean = false;
            }
            for (Eigen::Index j = t + 1; j < c; ++j) {
                const long long q = D(t, j) / D(t, t);
                if (q != 0) {
                    D.col(j) -= q * D.col(t);
                    V.col(j) -= q * V.col(t);
                }
                if (D(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            // divisibility of the trailing block by the pivot
            Eigen::Index bad = -1;
            for (Eigen::Index i = t + 1; i < r && bad < 0; ++i)
                for (Eigen::Index j = t + 1; j < c; ++j)
                    if (D(i, j) % D(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            D.row(t) += D.row(bad);
            U.row(t) += U.row(bad);
        }
        if (D(t, t) < 0) {
            D.row(t) *= -1;
            U.row(t) *= -1;
        }
    }
    return {U.cast<int>(), D.cast<int>(), V.cast<int>()};
}

std::vector<int> support_of(const TargetPoint& z, double tol) {
    std::vector<int> s;
    for (Eigen::Index j = 0; j < z.size(); ++j)
        if (std::abs(z(j)) > tol) s.push_back(int(j));
    return s;
}

Stabilizer stabilizer_of_support(const ModelSpec& spec, const std::vector<int>& support) {
    Stabilizer st;
    st.support = support;
    const int d = spec.d;
    Eigen::MatrixXi M(Eigen::Index(support.size()), d);
    for (size_t i = 0; i < support.size(); ++i) M.row(Eigen::Index(i)) = spec.W.col(support[i]).transpose();
    const SmithForm snf = smith_normal_form(M);
    std::vector<int> orders;
    for (int i = 0; i < d; ++i) {
        const int di = (i < M.rows()) ? snf.D(i, i) : 0;
        if (di == 0) throw NotLocallyFree("stabilizer of the support is infinite");
        orders.push_back(std::abs(di));
    }
    st.order = 1;
    for (int o : orders) st.order *= o;
    if (st.order > 1000000) throw SizeLimit("stabilizer too large to enumerate");
    const Eigen::MatrixXd V = snf.V.cast<double>();
    for (int i = 0; i < d; ++i)
        if (orders[i] > 1) st.generators.push_back(GroupElement::torus(kTwoPi * V.col(i) / orders[i]));
    std::vector<int> idx(d, 0);
    while (true) {
        Eigen::VectorXd psi(d);
        for (int i = 0; i < d; ++i) psi(i) = double(idx[i]) / orders[i];
        st.elements.push_back(GroupElement::torus(kTwoPi * V * psi));
        int i = 0;
        while (i < d && ++idx[i] == orders[i]) idx[i++] = 0;
        if (i == d) break;
    }
    return st;
}

Stabilizer stabilizer(const ModelSpec& spec, const TargetPoint& z) {
    return stabilizer_of_support(spec, support_of(z, 1e-8 * (1.0 + z.norm())));
}

double min_stabilizer_gap(const ModelSpec& spec) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& v : level_vertices(spec)) {
        const Stabilizer st = stabilizer_of_support(spec, v.support);
        for (size_t i = 1; i < st.elements.size(); ++i) {
            gap = std::min(gap, kTwoPi * log_scaled(st.elements[i]).norm());
        }
    }
    return gap;
}

double default_eps(const ModelSpec& spec) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& v : level_vertices(spec)) r = std::min(r, std::sqrt(v.x.sum()));
    return std::isfinite(r) ? 0.5 * r : 0.0;
}

double tube_radius(const ModelSpec& spec) {
    const double e = default_eps(spec);
    return spec.eps > 0.0 ? std::min(spec.eps, e) : e;
}

LevelProjection project_to_level(const ModelSpec& spec, const TargetPoint& x, int max_iter, double tol) {
    const Eigen::MatrixXd W = spec.weights();
    const Eigen::VectorXd ax = x.cwiseAbs2();
    const double ftol = tol * (1.0 + spec.tau.norm());
    LevelProjection out;
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(spec.d);
    auto residual = [&](const Eigen::VectorXd& q, Eigen::VectorXd& scale) {
        scale = (Eigen::VectorXd::Ones(spec.n) - W.transpose() * q);
        Eigen::VectorXd r = spec.tau;
        for (int j = 0; j < spec.n; ++j) r -= 0.5 * W.col(j) * ax(j) / (scale(j) * scale(j));
        return r;
    };
    Eigen::VectorXd s;
    Eigen::VectorXd F = residual(xi, s);
    out.newton_history.push_back(F.norm());
    int it = 0;
    while (F.norm() > ftol) {
        if (it++ >= max_iter) throw NewtonDiverged("level projection did not converge");
        Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(spec.d, spec.d);
        for (int j = 0; j < spec.n; ++j) Jm -= W.col(j) * W.col(j).transpose() * ax(j) / std::pow(s(j), 3);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Jm);
        if (lu.rank() < spec.d) throw OutsideTube("moment map is degenerate at the projected point");
        const Eigen::VectorXd step = -lu.solve(F);
        double alpha = 1.0;
        Eigen::VectorXd trial, strial, Ft;
        for (int k = 0; k < 60; ++k) {
            trial = xi + alpha * step;
            Ft = residual(trial, strial);
            if (strial.minCoeff() > 0.0 && Ft.norm() < F.norm()) break;
            alpha *= 0.5;
        }
        if (strial.minCoeff() <= 0.0) throw OutsideTube("normal coordinate leaves the tube");
        xi = trial;
        s = strial;
        F = Ft;
        out.newton_history.push_back(F.norm());
    }
    out.xi = xi;
    out.z.resize(spec.n);
    for (int j = 0; j < spec.n; ++j) out.z(j) = x(j) / s(j);
    const Eigen::VectorXd c = W.transpose() * xi;
    Eigen::VectorXcd rec(spec.n);
    for (int j = 0; j < spec.n; ++j) rec(j) = (1.0 - c(j)) * out.z(j);
    out.defect = (x - rec).norm();
    const double eps = tube_radius(spec);
    if ((x - out.z).norm() >= eps) throw OutsideTube("point is farther than eps from the level set");
    return out;
}

TargetPoint level_point(const ModelSpec& spec) {
    const auto verts = level_vertices(spec);
    if (verts.empty()) throw PreconditionFailed("level set is empty");
    TargetPoint z(spec.n);
    for (int j = 0; j < spec.n; ++j) z(j) = std::sqrt(verts.front().x(j));
    return z;
}

}  // namespace vortexlab
