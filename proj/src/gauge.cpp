#include "vortexlab/gauge.hpp"

#include "vortexlab/errors.hpp"

#include <cmath>

namespace vortexlab {

namespace {

Eigen::VectorXd node_angles(int N) {
    Eigen::VectorXd th(N);
    for (int j = 0; j < N; ++j) th(j) = kTwoPi * j / N;
    return th;
}

/// Derivative of lifted angles whose total increment over the circle is inc.
Eigen::VectorXd lifted_derivative(const Eigen::VectorXd& phi, double inc) {
    const Eigen::VectorXd th = node_angles(int(phi.size()));
    const double slope = inc / kTwoPi;
    Eigen::MatrixXd periodic = phi - slope * th;
    return spectral_derivative(periodic).col(0).array() + slope;
}

/// Spectral derivative of a periodic matrix-valued sample sequence.
std::vector<Eigen::MatrixXcd> matrix_derivative(const std::vector<Eigen::MatrixXcd>& g) {
    const int N = int(g.size());
    const int r = int(g.front().rows()), c = int(g.front().cols());
    Eigen::MatrixXcd stacked(N, r * c);
    for (int j = 0; j < N; ++j) stacked.row(j) = Eigen::Map<const Eigen::RowVectorXcd>(g[j].data(), r * c);
    const Eigen::MatrixXcd d = spectral_derivative(stacked);
    std::vector<Eigen::MatrixXcd> out(N, Eigen::MatrixXcd(r, c));
    for (int j = 0; j < N; ++j) Eigen::Map<Eigen::RowVectorXcd>(out[j].data(), r * c) = d.row(j);
    return out;
}

/// Trigonometric interpolant of periodic matrix samples.
class MatrixInterpolant {
public:
    explicit MatrixInterpolant(const std::vector<Eigen::MatrixXcd>& s) : N_(int(s.size())) {
        if (N_ < 2 || N_ % 2 != 0) throw GridMismatch("matrix interpolation needs an even node count");
        const int half = N_ / 2;
        coef_.assign(N_, Eigen::MatrixXcd::Zero(s.front().rows(), s.front().cols()));
        for (int k = -half; k < half; ++k) {
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(s.front().rows(), s.front().cols());
            for (int j = 0; j < N_; ++j) acc += std::polar(1.0, -kTwoPi * k * j / N_) * s[j];
            coef_[k + half] = acc / double(N_);
        }
    }
    Eigen::MatrixXcd operator()(double theta) const {
        const int half = N_ / 2;
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(coef_.front().rows(), coef_.front().cols());
        for (int k = -half + 1; k < half; ++k) out += std::polar(1.0, k * theta) * coef_[k + half];
        out += std::cos(half * theta) * coef_[0];
        return out;
    }

private:
    int N_;
    std::vector<Eigen::MatrixXcd> coef_;
};

}  // namespace

LoopGauge LoopGauge::identity(int N, int d) {
    return torus(Eigen::MatrixXd::Zero(N, d), Eigen::VectorXd::Zero(d));
}

LoopGauge LoopGauge::torus(const Eigen::MatrixXd& phi, const Eigen::VectorXd& increment) {
    if (phi.cols() != increment.size()) throw GridMismatch("gauge increment has the wrong rank");
    LoopGauge g;
    g.backend = Backend::Torus;
    g.phi = phi;
    g.increment = increment;
    return g;
}

LoopGauge LoopGauge::matrix(std::vector<Eigen::MatrixXcd> mats) {
    LoopGauge g;
    g.backend = Backend::Matrix;
    g.mats = std::move(mats);
    return g;
}

GroupElement LoopGauge::at(int j) const {
    if (backend == Backend::Torus) return GroupElement::torus(phi.row(j).transpose());
    return GroupElement::matrix(mats[j]);
}

GroupElement LoopGauge::end() const {
    if (backend == Backend::Torus) return GroupElement::torus(phi.row(0).transpose() + increment);
    return GroupElement::matrix(mats[0]);
}

bool LoopGauge::based(double tol) const {
    return group_distance(at(0), GroupElement::identity(backend, at(0).dim())) <= tol;
}

bool LoopGauge::periodic(double tol) const {
    if (backend == Backend::Matrix) return true;
    for (Eigen::Index a = 0; a < increment.size(); ++a) {
        const double q = increment(a) / kTwoPi;
        if (std::abs(q - std::round(q)) > tol) return false;
    }
    return true;
}

Eigen::MatrixXd LoopGauge::log_derivative() const {
    if (backend != Backend::Torus) throw GridMismatch("log_derivative is defined for torus gauges");
    Eigen::MatrixXd out(phi.rows(), phi.cols());
    for (Eigen::Index a = 0; a < phi.cols(); ++a) out.col(a) = lifted_derivative(phi.col(a), increment(a));
    return out;
}

LoopGauge compose(const LoopGauge& g1, const LoopGauge& g2) {
    if (g1.backend != g2.backend || g1.size() != g2.size()) throw GridMismatch("gauges on different grids");
    if (g1.backend == Backend::Torus) return LoopGauge::torus(g1.phi + g2.phi, g1.increment + g2.increment);
    std::vector<Eigen::MatrixXcd> m(g1.size());
    for (int j = 0; j < g1.size(); ++j) m[j] = g1.mats[j] * g2.mats[j];
    return LoopGauge::matrix(std::move(m));
}

GaugedLoop act_on_loop(const LoopGauge& g, const GaugedLoop& y, const ModelSpec& spec) {
    if (g.backend != Backend::Torus) throw GridMismatch("torus loop needs a torus gauge");
    if (g.size() != y.size() || g.phi.cols() != y.eta.cols()) throw GridMismatch("gauge and loop grids differ");
    GaugedLoop out;
    out.x.resize(y.x.rows(), y.x.cols());
    for (int j = 0; j < y.size(); ++j)
        out.x.row(j) = act_point(spec, -g.phi.row(j).transpose(), y.x.row(j).transpose()).transpose();
    out.eta = y.eta + g.log_derivative();
    return out;
}

MatrixLoop act_on_loop(const LoopGauge& g, const MatrixLoop& y) {
    if (g.backend != Backend::Matrix) throw GridMismatch("matrix loop needs a matrix gauge");
    if (g.size() != int(y.eta.size()) || g.size() != int(y.x.rows())) throw GridMismatch("gauge and loop grids differ");
    const auto dg = matrix_derivative(g.mats);
    MatrixLoop out;
    out.x.resize(y.x.rows(), y.x.cols());
    out.eta.resize(y.eta.size());
    for (int j = 0; j < g.size(); ++j) {
        const Eigen::MatrixXcd ginv = g.mats[j].adjoint();
        out.x.row(j) = (ginv * y.x.row(j).transpose()).transpose();
        out.eta[j] = ginv * y.eta[j] * g.mats[j] + ginv * dg[j];
    }
    return out;
}

GroupElement HorizontalPath::at(int j) const {
    if (backend == Backend::Torus) return GroupElement::torus(psi.row(j).transpose());
    return GroupElement::matrix(mats[j]);
}

HorizontalPath horizontal_path(const Eigen::MatrixXd& eta) {
    const int N = int(eta.rows());
    if (N < 16) throw GridMismatch("horizontal path needs at least 16 nodes");
    HorizontalPath p;
    p.backend = Backend::Torus;
    p.psi.resize(N + 1, eta.cols());
    for (Eigen::Index a = 0; a < eta.cols(); ++a) {
        const Eigen::VectorXd F = spectral_antiderivative(eta.col(a));
        p.psi.col(a).head(N) = -F;
        p.psi(N, a) = -kTwoPi * eta.col(a).mean();
    }
    return p;
}

HorizontalPath horizontal_path(const std::function<Eigen::MatrixXcd(double)>& eta, int N) {
    if (N < 16) throw GridMismatch("horizontal path needs at least 16 nodes");
    const double h = kTwoPi / N;
    const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
    HorizontalPath p;
    p.backend = Backend::Matrix;
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Identity(eta(0.0).rows(), eta(0.0).cols());
    p.mats.push_back(psi);
    for (int k = 0; k < N; ++k) {
        const Eigen::MatrixXcd A1 = -eta(k * h + c1 * h);
        const Eigen::MatrixXcd A2 = -eta(k * h + c2 * h);
        const Eigen::MatrixXcd Omega = 0.5 * h * (A1 + A2) + (std::sqrt(3.0) / 12.0) * h * h * (A2 * A1 - A1 * A2);
        psi = exp_g(AlgebraElement::matrix(Omega)).mat * psi;
        p.mats.push_back(psi);
    }
    return p;
}

HorizontalPath horizontal_path(const std::vector<Eigen::MatrixXcd>& eta) {
    const MatrixInterpolant interp(eta);
    return horizontal_path([&interp](double th) { return interp(th); }, int(eta.size()));
}

GroupElement holonomy(const Eigen::MatrixXd& eta) {
    Eigen::VectorXd ang(eta.cols());
    for (Eigen::Index a = 0; a < eta.cols(); ++a) ang(a) = -kTwoPi * eta.col(a).mean();
    return GroupElement::torus(ang);
}

GroupElement holonomy(const std::vector<Eigen::MatrixXcd>& eta) { return horizontal_path(eta).end(); }

CanonicalGauge canonical_based_gauge(const Eigen::MatrixXd& eta) {
    const int N = int(eta.rows());
    const HorizontalPath p = horizontal_path(eta);
    const AlgebraElement L = log_scaled(p.end());
    const Eigen::VectorXd th = node_angles(N);
    Eigen::MatrixXd phi(N, eta.cols());
    Eigen::VectorXd inc(eta.cols());
    for (Eigen::Index a = 0; a < eta.cols(); ++a) {
        phi.col(a) = p.psi.col(a).head(N) - th * L.coeffs(a);
        inc(a) = p.psi(N, a) - kTwoPi * L.coeffs(a);
        inc(a) = kTwoPi * std::round(inc(a) / kTwoPi);
    }
    return {LoopGauge::torus(phi, inc), L * -1.0};
}

CanonicalGauge canonical_based_gauge(const std::vector<Eigen::MatrixXcd>& eta) {
    const int N = int(eta.size());
    const HorizontalPath p = horizontal_path(eta);
    const AlgebraElement L = log_scaled(p.end());
    std::vector<Eigen::MatrixXcd> h(N);
    for (int j = 0; j < N; ++j) h[j] = p.mats[j] * exp_g(L * (-kTwoPi * j / N)).mat;
    return {LoopGauge::matrix(std::move(h)), L * -1.0};
}

PathGauge PathGauge::constant_in_t(const Grid& grid, const LoopGauge& g) {
    if (g.backend != Backend::Torus || g.size() != grid.Ntheta) throw GridMismatch("loop gauge does not fit the grid");
    PathGauge p;
    p.grid = grid;
    p.winding = g.increment;
    p.t_independent = true;
    for (Eigen::Index a = 0; a < g.phi.cols(); ++a)
        p.phi.push_back(Eigen::MatrixXd::Ones(grid.Nt, 1) * g.phi.col(a).transpose());
    return p;
}

CylinderField act_on_field(const PathGauge& g, const CylinderField& f, const ModelSpec& spec) {
    if (g.grid.Nt != f.grid.Nt || g.grid.Ntheta != f.grid.Ntheta || int(g.phi.size()) != f.d)
        throw GridMismatch("gauge and field grids differ");
    CylinderField out = f;
    for (int j = 0; j < f.n; ++j) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
        for (int a = 0; a < f.d; ++a)
            if (spec.W(a, j) != 0) c += double(spec.W(a, j)) * g.phi[a];
        out.u[j] = (f.u[j].array() * (c.array() * cplx(0, -1)).exp()).matrix();
    }
    const Eigen::VectorXd th = node_angles(f.grid.Ntheta);
    const bool temporal_out = f.temporal() && g.t_independent;
    if (!temporal_out && f.temporal()) out.At.assign(f.d, Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta));
    for (int a = 0; a < f.d; ++a) {
        const double slope = g.winding(a) / kTwoPi;
        const Eigen::MatrixXd periodic = g.phi[a] - slope * Eigen::MatrixXd::Ones(f.grid.Nt, 1) * th.transpose();
        out.eta[a] = f.eta[a] + dtheta(periodic) + Eigen::MatrixXd::Constant(f.grid.Nt, f.grid.Ntheta, slope);
        if (!temporal_out) out.At[a] += dt(g.phi[a], f.grid);
    }
    return out;
}

TemporalGauge temporal_gauge(const CylinderField& f, const ModelSpec& spec) {
    TemporalGauge r;
    r.gauge.grid = f.grid;
    r.gauge.winding = Eigen::VectorXd::Zero(f.d);
    for (int a = 0; a < f.d; ++a) {
        Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
        if (!f.temporal())
            for (int j = 0; j < f.grid.Ntheta; ++j)
                phi.col(j) = -cumulative_integral4(f.At[a].col(j), f.grid.ht());
        r.gauge.phi.push_back(std::move(phi));
    }
    if (f.temporal()) {
        r.gauge.t_independent = true;
        r.field = f;
        return r;
    }
    CylinderField g = act_on_field(r.gauge, f, spec);
    for (const auto& At : g.At) r.defect = std::max(r.defect, At.cwiseAbs().maxCoeff());
    g.At.clear();
    r.field = std::move(g);
    return r;
}

}  // namespace vortexlab
