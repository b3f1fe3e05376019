#include "vortexlab/fields.hpp"

#include "vortexlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vortexlab {

void Grid::validate() const {
    if (!(T > t0)) throw InvalidConfig("grid: T must exceed t0");
    if (Nt < 16) throw InvalidConfig("grid.Nt: at least 16 points required");
    if (Ntheta < 16 || Ntheta % 2 != 0) throw InvalidConfig("grid.Ntheta: must be even and at least 16");
}

int Grid::index_of(double t) const {
    const int i = int(std::lround((t - t0) / ht()));
    return std::clamp(i, 0, Nt - 1);
}

double MetricSpec::weight(double t) const { return std::exp(2.0 * b * t); }

CylinderField CylinderField::zeros(const Grid& grid, int n, int d, bool temporal) {
    grid.validate();
    CylinderField f;
    f.grid = grid;
    f.n = n;
    f.d = d;
    f.u.assign(n, Eigen::MatrixXcd::Zero(grid.Nt, grid.Ntheta));
    f.eta.assign(d, Eigen::MatrixXd::Zero(grid.Nt, grid.Ntheta));
    if (!temporal) f.At.assign(d, Eigen::MatrixXd::Zero(grid.Nt, grid.Ntheta));
    return f;
}

Eigen::VectorXcd CylinderField::u_at(int i, int j) const {
    Eigen::VectorXcd z(n);
    for (int c = 0; c < n; ++c) z(c) = u[c](i, j);
    return z;
}

Eigen::VectorXd CylinderField::eta_at(int i, int j) const {
    Eigen::VectorXd e(d);
    for (int a = 0; a < d; ++a) e(a) = eta[a](i, j);
    return e;
}

Eigen::VectorXd CylinderField::At_at(int i, int j) const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    if (!temporal())
        for (int a = 0; a < d; ++a) e(a) = At[a](i, j);
    return e;
}

GaugedLoop CylinderField::row(int i) const {
    GaugedLoop y;
    y.x.resize(grid.Ntheta, n);
    y.eta.resize(grid.Ntheta, d);
    for (int c = 0; c < n; ++c) y.x.col(c) = u[c].row(i).transpose();
    for (int a = 0; a < d; ++a) y.eta.col(a) = eta[a].row(i).transpose();
    return y;
}

double CylinderField::max_difference(const CylinderField& o) const {
    double m = 0.0;
    for (int c = 0; c < n; ++c) m = std::max(m, (u[c] - o.u[c]).cwiseAbs().maxCoeff());
    for (int a = 0; a < d; ++a) m = std::max(m, (eta[a] - o.eta[a]).cwiseAbs().maxCoeff());
    if (!temporal() && !o.temporal())
        for (int a = 0; a < d; ++a) m = std::max(m, (At[a] - o.At[a]).cwiseAbs().maxCoeff());
    return m;
}

Eigen::MatrixXcd dt(const Eigen::MatrixXcd& f, const Grid& grid) {
    return FiniteDifference4(grid.Nt, grid.ht()).apply(f);
}

Eigen::MatrixXd dt(const Eigen::MatrixXd& f, const Grid& grid) {
    return FiniteDifference4(grid.Nt, grid.ht()).apply(f);
}

Eigen::MatrixXd dtheta(const Eigen::MatrixXd& f) {
    return f * spectral_diff_matrix(int(f.cols())).transpose();
}

Eigen::MatrixXcd dtheta(const Eigen::MatrixXcd& f) {
    const Eigen::MatrixXd& D = spectral_diff_matrix(int(f.cols()));
    Eigen::MatrixXcd out(f.rows(), f.cols());
    out.real() = f.real() * D.transpose();
    out.imag() = f.imag() * D.transpose();
    return out;
}

namespace {

/// Pointwise (W^T v)_j for a d-component grid function.
Eigen::MatrixXd weight_combination(const ModelSpec& spec, const std::vector<Eigen::MatrixXd>& v, int j) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(v.front().rows(), v.front().cols());
    for (int a = 0; a < spec.d; ++a)
        if (spec.W(a, j) != 0) c += double(spec.W(a, j)) * v[a];
    return c;
}

Eigen::MatrixXcd times_i(const Eigen::MatrixXd& c, const Eigen::MatrixXcd& u) {
    return (c.cast<cplx>().array() * u.array() * cplx(0, 1)).matrix();
}

Eigen::VectorXd row_weights(const Grid& grid, const MetricSpec& metric, double power) {
    Eigen::VectorXd w(grid.Nt);
    for (int i = 0; i < grid.Nt; ++i) w(i) = std::exp(power * metric.b * grid.t(i));
    return w;
}

}  // namespace

CovariantDerivative covariant_d(const CylinderField& f, const ModelSpec& spec) {
    CovariantDerivative D;
    for (int j = 0; j < f.n; ++j) {
        Eigen::MatrixXcd dth = dtheta(f.u[j]) + times_i(weight_combination(spec, f.eta, j), f.u[j]);
        Eigen::MatrixXcd dtt = dt(f.u[j], f.grid);
        if (!f.temporal()) dtt += times_i(weight_combination(spec, f.At, j), f.u[j]);
        D.Dt.push_back(std::move(dtt));
        D.Dtheta.push_back(std::move(dth));
    }
    return D;
}

std::vector<Eigen::MatrixXd> curvature(const CylinderField& f) {
    std::vector<Eigen::MatrixXd> F;
    for (int a = 0; a < f.d; ++a) {
        Eigen::MatrixXd Fa = dt(f.eta[a], f.grid);
        if (!f.temporal()) Fa -= dtheta(f.At[a]);
        F.push_back(std::move(Fa));
    }
    return F;
}

std::vector<Eigen::MatrixXd> moment_field(const CylinderField& f, const ModelSpec& spec) {
    std::vector<Eigen::MatrixXd> mu;
    for (int a = 0; a < spec.d; ++a) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Constant(f.grid.Nt, f.grid.Ntheta, spec.tau(a));
        for (int j = 0; j < f.n; ++j)
            if (spec.W(a, j) != 0) m -= 0.5 * double(spec.W(a, j)) * f.u[j].cwiseAbs2();
        mu.push_back(std::move(m));
    }
    return mu;
}

Eigen::VectorXd integrate_circles(const Eigen::MatrixXd& g, const Grid& grid) {
    Eigen::VectorXd out(g.rows());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        KahanSum s;
        for (Eigen::Index j = 0; j < g.cols(); ++j) s.add(g(i, j));
        out(i) = s.value() * grid.htheta();
    }
    return out;
}

double integrate_band(const Eigen::MatrixXd& g, const Grid& grid, int i1, int i2) {
    if (i1 < 0 || i2 >= grid.Nt || i2 < i1) throw RangeMismatch("band outside the grid");
    const Eigen::VectorXd circ = integrate_circles(g, grid);
    const Eigen::VectorXd w = quadrature_weights4(i2 - i1 + 1, grid.ht());
    KahanSum s;
    for (int i = i1; i <= i2; ++i) s.add(w(i - i1) * circ(i));
    return s.value();
}

VortexResidual vortex_residual(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric) {
    if (!f.temporal()) throw NotTemporal("vortex residual requires a temporal connection");
    VortexResidual r;
    const CovariantDerivative D = covariant_d(f, spec);
    const auto mu = moment_field(f, spec);
    const Eigen::VectorXd w = row_weights(f.grid, metric, 2.0);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
    for (int j = 0; j < f.n; ++j) {
        r.r1.push_back(D.Dt[j] + cplx(0, 1) * D.Dtheta[j]);
        sq += r.r1.back().cwiseAbs2();
    }
    for (int a = 0; a < f.d; ++a) {
        r.r2.push_back(dt(f.eta[a], f.grid) + w.asDiagonal() * mu[a]);
        sq += r.r2.back().cwiseAbs2();
    }
    r.sup = std::sqrt(sq.maxCoeff());
    r.l2 = std::sqrt(std::max(0.0, integrate_band(w.asDiagonal() * sq, f.grid, 0, f.grid.Nt - 1)));
    return r;
}

Eigen::MatrixXd energy_density(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric) {
    const CovariantDerivative D = covariant_d(f, spec);
    const auto F = curvature(f);
    const auto mu = moment_field(f, spec);
    const Eigen::VectorXd wp = row_weights(f.grid, metric, 2.0);
    const Eigen::VectorXd wm = row_weights(f.grid, metric, -2.0);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
    for (int j = 0; j < f.n; ++j) e += D.Dt[j].cwiseAbs2() + D.Dtheta[j].cwiseAbs2();
    for (int a = 0; a < f.d; ++a) {
        e += wm.asDiagonal() * F[a].cwiseAbs2();
        e += wp.asDiagonal() * mu[a].cwiseAbs2();
    }
    return 0.5 * e;
}

double total_energy(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric, int i1, int i2) {
    return integrate_band(energy_density(f, spec, metric), f.grid, i1, i2);
}

namespace {

/// omega(d_t u, d_theta u) on the grid.
Eigen::MatrixXd pullback_omega(const CylinderField& f) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
    for (int j = 0; j < f.n; ++j) {
        const Eigen::MatrixXcd a = dt(f.u[j], f.grid);
        const Eigen::MatrixXcd b = dtheta(f.u[j]);
        w += (a.conjugate().array() * b.array()).imag().matrix();
    }
    return w;
}

}  // namespace

EnergyIdentity energy_identity_defect(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                                      int i1, int i2) {
    EnergyIdentity r;
    const CovariantDerivative D = covariant_d(f, spec);
    const auto F = curvature(f);
    const auto mu = moment_field(f, spec);
    const Eigen::VectorXd wp = row_weights(f.grid, metric, 2.0);
    const Eigen::VectorXd wm = row_weights(f.grid, metric, -2.0);
    r.energy = total_energy(f, spec, metric, i1, i2);

    Eigen::MatrixXd hol = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
    for (int j = 0; j < f.n; ++j) hol += 0.5 * (D.Dt[j] + cplx(0, 1) * D.Dtheta[j]).cwiseAbs2();
    for (int a = 0; a < f.d; ++a) {
        const Eigen::MatrixXd s = F[a] + wp.asDiagonal() * mu[a];
        hol += 0.5 * wm.asDiagonal() * s.cwiseAbs2();
    }
    r.holomorphic_term = integrate_band(hol, f.grid, i1, i2);

    Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
    for (int a = 0; a < f.d; ++a) pair += mu[a].cwiseProduct(f.eta[a]);
    const Eigen::VectorXd circ = integrate_circles(pair, f.grid);
    r.topological_term = integrate_band(pullback_omega(f), f.grid, i1, i2) - (circ(i2) - circ(i1));
    r.defect = r.energy - r.holomorphic_term - r.topological_term;
    return r;
}

std::pair<double, double> pointwise_identities_defect(const CylinderField& f, const ModelSpec& spec,
                                                      const MetricSpec& metric) {
    (void)metric;
    const CovariantDerivative D = covariant_d(f, spec);
    const auto F = curvature(f);
    const auto mu = moment_field(f, spec);
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
    Eigen::MatrixXd del = full, dbar = full;
    for (int j = 0; j < f.n; ++j) {
        full += D.Dt[j].cwiseAbs2() + D.Dtheta[j].cwiseAbs2();
        del += 0.5 * (D.Dt[j] - cplx(0, 1) * D.Dtheta[j]).cwiseAbs2();
        dbar += 0.5 * (D.Dt[j] + cplx(0, 1) * D.Dtheta[j]).cwiseAbs2();
    }
    const Eigen::MatrixXd first = full - del - dbar;

    Eigen::MatrixXd lhs = pullback_omega(f);
    Eigen::MatrixXd rhs = 0.5 * (del - dbar);
    for (int a = 0; a < f.d; ++a) {
        lhs -= dt(Eigen::MatrixXd(mu[a].cwiseProduct(f.eta[a])), f.grid);
        if (!f.temporal()) lhs += dtheta(Eigen::MatrixXd(mu[a].cwiseProduct(f.At[a])));
        rhs -= F[a].cwiseProduct(mu[a]);
    }
    const Eigen::MatrixXd second = lhs - rhs;
    const int lo = 2, hi = f.grid.Nt - 3;
    double d1 = 0.0, d2 = 0.0;
    for (int i = lo; i <= hi; ++i) {
        d1 = std::max(d1, first.row(i).cwiseAbs().maxCoeff());
        d2 = std::max(d2, second.row(i).cwiseAbs().maxCoeff());
    }
    return {d1, d2};
}

}  // namespace vortexlab
