#include "vortexlab/solver.hpp"

#include "vortexlab/errors.hpp"

#include <cmath>
#include <random>

namespace vortexlab {

std::string to_string(BoundaryMode m) { return m == BoundaryMode::Penalty ? "penalty" : "project"; }

BoundaryMode boundary_mode_from_string(const std::string& s) {
    if (s == "penalty") return BoundaryMode::Penalty;
    if (s == "project") return BoundaryMode::Project;
    throw InvalidConfig("solve.boundary: expected \"penalty\" or \"project\", got \"" + s + "\"");
}

void SolveConfig::validate() const {
    if (!(tol_residual > 0.0)) throw InvalidConfig("solve.tol_residual: must be positive");
    if (max_iter < 0) throw InvalidConfig("solve.max_iter: must be nonnegative");
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidConfig("solve.damping: must lie in (0, 1]");
    if (max_cg_iter < 1) throw InvalidConfig("solve.max_cg_iter: must be positive");
    if (!(min_penalty_weight > 0.0)) throw InvalidConfig("solve.min_penalty_weight: must be positive");
    if (!(cg_relative_tol > 0.0 && cg_relative_tol < 1.0)) throw InvalidConfig("solve.cg_relative_tol: must lie in (0, 1)");
}

FieldDirection FieldDirection::zeros(const Grid& grid, int n, int d) {
    FieldDirection z;
    z.v.assign(n, Eigen::MatrixXcd::Zero(grid.Nt, grid.Ntheta));
    z.xi.assign(d, Eigen::MatrixXd::Zero(grid.Nt, grid.Ntheta));
    return z;
}

double FieldDirection::dot(const FieldDirection& o) const {
    double s = 0.0;
    for (size_t j = 0; j < v.size(); ++j) s += (v[j].conjugate().cwiseProduct(o.v[j])).real().sum();
    for (size_t a = 0; a < xi.size(); ++a) s += xi[a].cwiseProduct(o.xi[a]).sum();
    return s;
}

double ResidualVector::dot(const ResidualVector& o) const {
    double s = 0.0;
    for (size_t j = 0; j < r1.size(); ++j) s += (r1[j].conjugate().cwiseProduct(o.r1[j])).real().sum();
    for (size_t a = 0; a < r2.size(); ++a) s += r2[a].cwiseProduct(o.r2[a]).sum();
    if (b1.size() > 0 && o.b1.size() > 0) s += (b1.conjugate().cwiseProduct(o.b1)).real().sum();
    if (b2.size() > 0 && o.b2.size() > 0) s += b2.cwiseProduct(o.b2).sum();
    return s;
}

namespace {

const cplx kI(0.0, 1.0);

FieldDirection axpy(double a, const FieldDirection& x, const FieldDirection& y) {
    FieldDirection r = y;
    for (size_t j = 0; j < x.v.size(); ++j) r.v[j] += a * x.v[j];
    for (size_t k = 0; k < x.xi.size(); ++k) r.xi[k] += a * x.xi[k];
    return r;
}

void mask_rows(FieldDirection& d, bool last) {
    for (auto& m : d.v) {
        m.row(0).setZero();
        if (last) m.row(m.rows() - 1).setZero();
    }
    for (auto& m : d.xi) {
        m.row(0).setZero();
        if (last) m.row(m.rows() - 1).setZero();
    }
}

Eigen::VectorXd row_exp(const Grid& g, double c) {
    Eigen::VectorXd w(g.Nt);
    for (int i = 0; i < g.Nt; ++i) w(i) = std::exp(c * g.t(i));
    return w;
}

}  // namespace

LinearizedOperator::LinearizedOperator(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                                       bool scale_r2, double boundary_weight)
    : f_(f), spec_(spec), metric_(metric), scale_r2_(scale_r2), bw_(boundary_weight),
      fd_(f.grid.Nt, f.grid.ht()) {
    if (!f.temporal()) throw NotTemporal("linearization requires a temporal field");
    for (int j = 0; j < f.n; ++j) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
        for (int a = 0; a < f.d; ++a)
            if (spec.W(a, j) != 0) c += double(spec.W(a, j)) * f.eta[a];
        c_.push_back(std::move(c));
    }
    w1_ = row_exp(f.grid, scale_r2 ? metric.b : 2.0 * metric.b);
    w2_ = scale_r2 ? row_exp(f.grid, -metric.b) : Eigen::VectorXd::Ones(f.grid.Nt);
}

ResidualVector LinearizedOperator::apply(const FieldDirection& d) const {
    const int n = f_.n, dd = f_.d, last = f_.grid.Nt - 1;
    ResidualVector r;
    for (int j = 0; j < n; ++j) {
        Eigen::MatrixXcd x = fd_.apply(d.v[j]) + kI * dtheta(d.v[j]);
        x -= (c_[j].cast<cplx>().array() * d.v[j].array()).matrix();
        for (int a = 0; a < dd; ++a)
            if (spec_.W(a, j) != 0)
                x -= double(spec_.W(a, j)) * (d.xi[a].cast<cplx>().array() * f_.u[j].array()).matrix();
        r.r1.push_back(std::move(x));
    }
    for (int a = 0; a < dd; ++a) {
        Eigen::MatrixXd s = fd_.apply(d.xi[a]);
        s = w2_.asDiagonal() * s;
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(f_.grid.Nt, f_.grid.Ntheta);
        for (int j = 0; j < n; ++j)
            if (spec_.W(a, j) != 0)
                m += double(spec_.W(a, j)) * (f_.u[j].conjugate().array() * d.v[j].array()).real().matrix();
        s -= w1_.asDiagonal() * m;
        r.r2.push_back(std::move(s));
    }
    if (bw_ > 0.0) {
        const double sw = std::sqrt(bw_);
        r.b1.resize(f_.grid.Ntheta, n);
        r.b2 = Eigen::MatrixXd::Zero(f_.grid.Ntheta, dd);
        for (int j = 0; j < n; ++j) {
            const Eigen::RowVectorXcd vT = d.v[j].row(last);
            Eigen::RowVectorXcd b = dtheta(Eigen::MatrixXcd(vT)).row(0);
            b += kI * (c_[j].row(last).cast<cplx>().array() * vT.array()).matrix();
            for (int a = 0; a < dd; ++a)
                if (spec_.W(a, j) != 0)
                    b += kI * double(spec_.W(a, j)) *
                         (d.xi[a].row(last).cast<cplx>().array() * f_.u[j].row(last).array()).matrix();
            r.b1.col(j) = sw * b.transpose();
            for (int a = 0; a < dd; ++a)
                if (spec_.W(a, j) != 0)
                    r.b2.col(a) -= sw * double(spec_.W(a, j)) *
                                   (f_.u[j].row(last).conjugate().array() * vT.array()).real().matrix().transpose();
        }
    }
    return r;
}

FieldDirection LinearizedOperator::apply_transpose(const ResidualVector& r) const {
    const int n = f_.n, dd = f_.d, last = f_.grid.Nt - 1;
    FieldDirection d;
    std::vector<Eigen::MatrixXd> wr2;
    for (int a = 0; a < dd; ++a) wr2.push_back(w1_.asDiagonal() * r.r2[a]);
    for (int j = 0; j < n; ++j) {
        Eigen::MatrixXcd v = fd_.apply_transpose(r.r1[j]) + kI * dtheta(r.r1[j]);
        v -= (c_[j].cast<cplx>().array() * r.r1[j].array()).matrix();
        for (int a = 0; a < dd; ++a)
            if (spec_.W(a, j) != 0)
                v -= double(spec_.W(a, j)) * (wr2[a].cast<cplx>().array() * f_.u[j].array()).matrix();
        d.v.push_back(std::move(v));
    }
    for (int a = 0; a < dd; ++a) {
        Eigen::MatrixXd x = fd_.apply_transpose(Eigen::MatrixXd(w2_.asDiagonal() * r.r2[a]));
        for (int j = 0; j < n; ++j)
            if (spec_.W(a, j) != 0)
                x -= double(spec_.W(a, j)) * (f_.u[j].conjugate().array() * r.r1[j].array()).real().matrix();
        d.xi.push_back(std::move(x));
    }
    if (bw_ > 0.0 && r.b1.size() > 0) {
        const double sw = std::sqrt(bw_);
        for (int j = 0; j < n; ++j) {
            const Eigen::RowVectorXcd b = r.b1.col(j).transpose();
            Eigen::RowVectorXcd v = -dtheta(Eigen::MatrixXcd(b)).row(0);
            v -= kI * (c_[j].row(last).cast<cplx>().array() * b.array()).matrix();
            for (int a = 0; a < dd; ++a)
                if (spec_.W(a, j) != 0) {
                    v -= double(spec_.W(a, j)) *
                         (r.b2.col(a).transpose().cast<cplx>().array() * f_.u[j].row(last).array()).matrix();
                    d.xi[a].row(last) += sw * double(spec_.W(a, j)) *
                                         (b.conjugate().array() * kI * f_.u[j].row(last).array()).real().matrix();
                }
            d.v[j].row(last) += sw * v;
        }
    }
    return d;
}

LinearizedOperator linearized_operator(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric) {
    return LinearizedOperator(f, spec, metric, false, 0.0);
}

namespace {

struct Objective {
    ResidualVector R;
    double value = 0.0;  ///< 1/2 |R|^2
};

Objective evaluate(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric, double bw) {
    Objective o;
    VortexResidual vr = vortex_residual(f, spec, metric);
    o.R.r1 = std::move(vr.r1);
    const Eigen::VectorXd w = row_exp(f.grid, -metric.b);
    for (auto& r2 : vr.r2) o.R.r2.push_back(w.asDiagonal() * r2);
    if (bw > 0.0) {
        const LoopResidual lr = loop_residual(f.row(f.grid.Nt - 1), spec);
        o.R.b1 = std::sqrt(bw) * lr.upsilon;
        o.R.b2 = std::sqrt(bw) * lr.mu;
    }
    o.value = 0.5 * o.R.dot(o.R);
    return o;
}

/// Approximate diagonal of J^T J used as the CG preconditioner.
FieldDirection jacobi_diagonal(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric) {
    const Grid& g = f.grid;
    const FiniteDifference4 fd(g.Nt, g.ht());
    const double s = 1.0 / (12.0 * g.ht());
    const Eigen::VectorXd w2 = row_exp(g, -metric.b), w1 = row_exp(g, metric.b);
    Eigen::VectorXd col = Eigen::VectorXd::Zero(g.Nt), colw = col;
    for (int r = 0; r < g.Nt; ++r) {
        const int st = fd.start(r);
        const double* wt = fd.weights(r);
        for (int k = 0; k < 5; ++k) {
            const double c = wt[k] * s;
            col(st + k) += c * c;
            colw(st + k) += c * c * w2(r) * w2(r);
        }
    }
    const double dsq = spectral_diff_matrix(g.Ntheta).col(0).squaredNorm();
    FieldDirection d = FieldDirection::zeros(g, f.n, f.d);
    for (int j = 0; j < f.n; ++j) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(g.Nt, g.Ntheta);
        for (int a = 0; a < f.d; ++a)
            if (spec.W(a, j) != 0) c += double(spec.W(a, j)) * f.eta[a];
        Eigen::MatrixXd dj = c.cwiseAbs2();
        dj.colwise() += col;
        dj.array() += dsq;
        for (int a = 0; a < f.d; ++a)
            dj += double(spec.W(a, j) * spec.W(a, j)) * (w1.cwiseAbs2().asDiagonal() * f.u[j].cwiseAbs2());
        d.v[j] = dj.cast<cplx>();
    }
    for (int a = 0; a < f.d; ++a) {
        Eigen::MatrixXd da = Eigen::MatrixXd::Zero(g.Nt, g.Ntheta);
        da.colwise() += colw;
        for (int j = 0; j < f.n; ++j) da += double(spec.W(a, j) * spec.W(a, j)) * f.u[j].cwiseAbs2();
        d.xi[a] = da;
    }
    return d;
}

FieldDirection precondition(const FieldDirection& diag, const FieldDirection& r) {
    FieldDirection z = r;
    for (size_t j = 0; j < r.v.size(); ++j) {
        z.v[j].real() = r.v[j].real().cwiseQuotient(diag.v[j].real());
        z.v[j].imag() = r.v[j].imag().cwiseQuotient(diag.v[j].real());
    }
    for (size_t a = 0; a < r.xi.size(); ++a) z.xi[a] = r.xi[a].cwiseQuotient(diag.xi[a]);
    return z;
}

/// Preconditioned CG on J^T J x = rhs restricted to unmasked rows.
FieldDirection normal_cg(const LinearizedOperator& J, const FieldDirection& rhs, const FieldDirection& diag,
                         bool mask_last, double rel_tol, int max_iter, int& iters) {
    FieldDirection x = rhs;
    for (auto& m : x.v) m.setZero();
    for (auto& m : x.xi) m.setZero();
    FieldDirection r = rhs;
    mask_rows(r, mask_last);
    FieldDirection z = precondition(diag, r);
    FieldDirection p = z;
    double rz = r.dot(z);
    const double stop = rel_tol * std::sqrt(r.dot(r));
    iters = 0;
    for (; iters < max_iter; ++iters) {
        if (std::sqrt(r.dot(r)) <= stop) break;
        FieldDirection Ap = J.apply_transpose(J.apply(p));
        mask_rows(Ap, mask_last);
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) break;
        const double alpha = rz / pAp;
        x = axpy(alpha, p, x);
        r = axpy(-alpha, Ap, r);
        z = precondition(diag, r);
        const double rz_new = r.dot(z);
        const double beta = rz_new / rz;
        rz = rz_new;
        p = axpy(beta, p, z);
    }
    return x;
}

CylinderField add_step(const CylinderField& f, const FieldDirection& d, double a) {
    CylinderField g = f;
    for (int j = 0; j < f.n; ++j) g.u[j] += a * d.v[j];
    for (int k = 0; k < f.d; ++k) g.eta[k] += a * d.xi[k];
    return g;
}

void project_last_row(CylinderField& f, const ModelSpec& spec) {
    const int last = f.grid.Nt - 1;
    const GaugedLoop y = f.row(last);
    const NearestCritical nc = nearest_critical(y, spec);
    const Eigen::VectorXd shift = nc.straightened.eta.row(0).transpose();
    for (int k = 0; k < f.grid.Ntheta; ++k) {
        const TargetPoint x = act_point(spec, nc.gauge.phi.row(k).transpose(), nc.critical.z0);
        for (int j = 0; j < f.n; ++j) f.u[j](last, k) = x(j);
        for (int a = 0; a < f.d; ++a) f.eta[a](last, k) = y.eta(k, a) - shift(a);
    }
}

std::vector<double> band_sups(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric) {
    const VortexResidual vr = vortex_residual(f, spec, metric);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(f.grid.Nt, f.grid.Ntheta);
    for (const auto& r : vr.r1) sq += r.cwiseAbs2();
    for (const auto& r : vr.r2) sq += r.cwiseAbs2();
    std::vector<double> out;
    for (int b = 0; b < 4; ++b) {
        const int i1 = b * f.grid.Nt / 4, i2 = (b + 1) * f.grid.Nt / 4;
        out.push_back(std::sqrt(sq.middleRows(i1, i2 - i1).maxCoeff()));
    }
    return out;
}

}  // namespace

SolveResult relax(const CylinderField& initial, const ModelSpec& spec, const MetricSpec& metric,
                  const SolveConfig& config) {
    config.validate();
    if (!initial.temporal()) throw NotTemporal("relaxation requires a temporal field");
    const Grid& g = initial.grid;
    const bool project = config.boundary == BoundaryMode::Project;
    double bw = 0.0;
    if (!project) bw = config.penalty_weight > 0.0 ? config.penalty_weight : std::exp(2.0 * metric.b * g.T);

    SolveResult out;
    out.field = initial;
    SolveCertificate& cert = out.certificate;
    cert.boundary_mode = config.boundary;
    cert.boundary_weight = bw;
    if (project) project_last_row(out.field, spec);

    Objective obj = evaluate(out.field, spec, metric, bw);
    double step = config.damping;
    int stalled = 0;
    for (int it = 0;; ++it) {
        const VortexResidual vr = vortex_residual(out.field, spec, metric);
        cert.residual_history.push_back(vr.sup);
        if (vr.sup <= config.tol_residual) {
            cert.iterations = it;
            cert.final_residual_sup = vr.sup;
            cert.final_residual_l2 = vr.l2;
            cert.band_residual_sup = band_sups(out.field, spec, metric);
            return out;
        }
        if (it >= config.max_iter)
            throw NonConvergence("residual " + std::to_string(vr.sup) + " above tolerance after " +
                                     std::to_string(it) + " iterations",
                                 cert.residual_history);

        const LinearizedOperator J(out.field, spec, metric, true, bw);
        FieldDirection rhs = J.apply_transpose(obj.R);
        for (auto& m : rhs.v) m = -m;
        for (auto& m : rhs.xi) m = -m;
        const FieldDirection diag = jacobi_diagonal(out.field, spec, metric);
        int cg_it = 0;
        FieldDirection delta = normal_cg(J, rhs, diag, project, config.cg_relative_tol, config.max_cg_iter, cg_it);
        mask_rows(delta, project);
        cert.cg_iterations.push_back(cg_it);

        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            CylinderField trial = add_step(out.field, delta, step);
            if (project) project_last_row(trial, spec);
            Objective o = evaluate(trial, spec, metric, bw);
            if (o.value < obj.value) {
                stalled = (o.value > (1.0 - 1e-4) * obj.value) ? stalled + 1 : 0;
                out.field = std::move(trial);
                obj = std::move(o);
                accepted = true;
                step = std::min(1.0, 2.0 * step);
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            throw NonConvergence("no decrease along the Gauss-Newton direction", cert.residual_history);
        if (stalled >= 3 && !project && bw / 10.0 >= config.min_penalty_weight) {
            bw /= 10.0;
            cert.boundary_weight = bw;
            obj = evaluate(out.field, spec, metric, bw);
            stalled = 0;
            continue;
        }
        if (stalled >= 3) {
            cert.residual_history.push_back(vortex_residual(out.field, spec, metric).sup);
            throw NonConvergence("objective stagnated above tolerance", cert.residual_history);
        }
    }
}

CylinderField perturb(const CylinderField& f, double amplitude, std::uint64_t seed, int max_mode) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Grid& g = f.grid;
    auto bump = [&]() {
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(g.Nt, g.Ntheta);
        const double norm = 1.0 / (2.0 * (max_mode + 1));
        for (int q = 0; q <= max_mode; ++q) {
            const double a = U(rng) * norm, b = U(rng) * norm;
            for (int i = 0; i < g.Nt; ++i) {
                const double s = std::sin(kPi * (g.t(i) - g.t0) / (g.T - g.t0));
                for (int k = 0; k < g.Ntheta; ++k)
                    p(i, k) += s * (a * std::cos(q * g.theta(k)) + b * std::sin(q * g.theta(k)));
            }
        }
        return p;
    };
    CylinderField out = f;
    for (int j = 0; j < f.n; ++j) {
        const Eigen::MatrixXd re = bump();
        const Eigen::MatrixXd im = bump();
        out.u[j] += amplitude * (re.cast<cplx>() + cplx(0, 1) * im.cast<cplx>());
    }
    for (int a = 0; a < f.d; ++a) out.eta[a] += amplitude * bump();
    return out;
}

}  // namespace vortexlab
