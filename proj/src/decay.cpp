#include "vortexlab/decay.hpp"

#include "vortexlab/errors.hpp"

#include <cmath>
#include <limits>

namespace vortexlab {

std::vector<const Series*> ObservableSet::all() const {
    return {&du, &mu, &F, &tail_energy, &action, &dist_eta, &dist_u, &du_l2sq, &mu_l2sq};
}

ObservableSet observables(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                          const GaugedLoop* limit) {
    const Grid& g = f.grid;
    const CovariantDerivative D = covariant_d(f, spec);
    const auto F = curvature(f);
    const auto mu = moment_field(f, spec);

    Eigen::MatrixXd dt2 = Eigen::MatrixXd::Zero(g.Nt, g.Ntheta), dth2 = dt2, mu2 = dt2, F2 = dt2;
    for (int j = 0; j < f.n; ++j) {
        dt2 += D.Dt[j].cwiseAbs2();
        dth2 += D.Dtheta[j].cwiseAbs2();
    }
    for (int a = 0; a < f.d; ++a) {
        mu2 += mu[a].cwiseAbs2();
        F2 += F[a].cwiseAbs2();
    }
    const Eigen::MatrixXd dsum = dt2.cwiseSqrt() + dth2.cwiseSqrt();
    const Eigen::VectorXd du_circ = integrate_circles(dt2 + dth2, g);
    const Eigen::VectorXd mu_circ = integrate_circles(mu2, g);

    const Eigen::VectorXd energy_circ = integrate_circles(energy_density(f, spec, metric), g);

    ObservableSet o;
    o.du.name = "du";
    o.mu.name = "mu";
    o.F.name = "F";
    o.tail_energy.name = "tail_energy";
    o.action.name = "action";
    o.dist_eta.name = "dist_eta";
    o.dist_u.name = "dist_u";
    o.du_l2sq.name = "du_l2sq";
    o.mu_l2sq.name = "mu_l2sq";
    for (int i = 0; i < g.Nt; ++i) {
        const double t = g.t(i);
        for (Series* s : {&o.du, &o.mu, &o.F, &o.tail_energy, &o.action, &o.du_l2sq, &o.mu_l2sq}) s->t.push_back(t);
        o.du.value.push_back(dsum.row(i).maxCoeff());
        o.mu.value.push_back(std::sqrt(mu2.row(i).maxCoeff()));
        o.F.value.push_back(std::sqrt(F2.row(i).maxCoeff()));
        o.du_l2sq.value.push_back(du_circ(i));
        o.mu_l2sq.value.push_back(mu_circ(i));
        const int n_band = g.Nt - i;
        double tail = 0.0;
        if (n_band >= 2) {
            const Eigen::VectorXd w = quadrature_weights4(n_band, g.ht());
            KahanSum s;
            for (int r = i; r < g.Nt; ++r) s.add(w(r - i) * energy_circ(r));
            tail = s.value();
        }
        o.tail_energy.value.push_back(tail);
        double action = std::numeric_limits<double>::quiet_NaN();
        try {
            action = local_action(f.row(i), spec);
        } catch (const Error&) {
        }
        o.action.value.push_back(action);
        if (limit) {
            const GaugedLoop y = f.row(i);
            Eigen::VectorXd de(g.Ntheta), dx(g.Ntheta);
            for (int k = 0; k < g.Ntheta; ++k) {
                de(k) = (y.eta.row(k) - limit->eta.row(k)).squaredNorm();
                dx(k) = (y.x.row(k) - limit->x.row(k)).squaredNorm();
            }
            Eigen::MatrixXd de_m = de.transpose(), dx_m = dx.transpose();
            o.dist_eta.t.push_back(t);
            o.dist_u.t.push_back(t);
            o.dist_eta.value.push_back(std::sqrt(integrate_circles(de_m, g)(0)));
            o.dist_u.value.push_back(std::sqrt(integrate_circles(dx_m, g)(0)));
        }
    }
    return o;
}

RateFit fit_window(const std::vector<double>& t, const std::vector<double>& y, int first, int last) {
    if (first < 0 || last >= int(t.size()) || last <= first) throw RangeMismatch("fit window outside the series");
    const int n = last - first + 1;
    double mt = 0.0, my = 0.0;
    for (int i = first; i <= last; ++i) {
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) throw NoWindow("nonpositive value inside the fit window");
        mt += t[i];
        my += std::log(y[i]);
    }
    mt /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = first; i <= last; ++i) {
        const double dt = t[i] - mt, dy = std::log(y[i]) - my;
        sxx += dt * dt;
        sxy += dt * dy;
        syy += dy * dy;
    }
    RateFit r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mt;
    r.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 0.0;
    r.first = first;
    r.last = last;
    r.t_start = t[first];
    r.t_end = t[last];
    return r;
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, const FitPolicy& policy) {
    if (t.size() != y.size() || t.size() < 2) throw NoWindow("series too short");
    const double cutoff = t.front() + policy.end_fraction * (t.back() - t.front());
    int end = -1;
    for (int i = 0; i < int(t.size()); ++i)
        if (t[i] <= cutoff + 1e-12) end = i;
    std::optional<RateFit> best;
    for (int s = end - policy.min_samples + 1; s >= 0; --s) {
        if (!(y[s] > 0.0) || !std::isfinite(y[s])) break;
        bool positive = true;
        if (s == end - policy.min_samples + 1)
            for (int i = s; i <= end; ++i) positive = positive && y[i] > 0.0 && std::isfinite(y[i]);
        if (!positive) break;
        const RateFit r = fit_window(t, y, s, end);
        if (r.slope < 0.0 && r.r2 >= policy.min_r2) best = r;
    }
    if (!best) throw NoWindow("no trailing window with the required fit quality");
    return *best;
}

LimitExtraction extract_limit(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                              double tail_threshold) {
    const Grid& g = f.grid;
    const int last = g.Nt - 1;
    const int start = std::min(g.index_of(g.t0 + 0.95 * (g.T - g.t0)), last - 1);
    LimitExtraction r;
    r.tail_energy = total_energy(f, spec, metric, start, last);
    if (r.tail_energy > tail_threshold)
        throw PreconditionFailed("tail energy " + std::to_string(r.tail_energy) + " exceeds " +
                                 std::to_string(tail_threshold));
    const GaugedLoop y = f.row(last);
    const NearestCritical nc = nearest_critical(y, spec);
    r.critical = nc.critical;
    r.limit.x.resize(g.Ntheta, f.n);
    r.limit.eta.resize(g.Ntheta, f.d);
    const Eigen::VectorXd shift = nc.straightened.eta.row(0).transpose();
    for (int k = 0; k < g.Ntheta; ++k) {
        r.limit.x.row(k) = act_point(spec, nc.gauge.phi.row(k).transpose(), nc.critical.z0).transpose();
        r.limit.eta.row(k) = y.eta.row(k) - shift.transpose();
    }
    r.gauge = canonical_based_gauge(r.limit.eta).h;
    const GaugedLoop gy = act_on_loop(r.gauge, y, spec);
    for (int k = 0; k < g.Ntheta; ++k)
        r.connection_constancy =
            std::max(r.connection_constancy, (gy.eta.row(k).transpose() - r.critical.eta0).cwiseAbs().maxCoeff());
    r.final_loop_residual = loop_residual(y, spec).sup;
    return r;
}

double isoperimetric_constant(const ObservableSet& obs, double c1) {
    const size_t n = obs.action.value.size();
    std::vector<double> den(n);
    double den_max = 0.0;
    for (size_t i = 0; i < n; ++i) {
        den[i] = obs.du_l2sq.value[i] + c1 * obs.mu_l2sq.value[i];
        den_max = std::max(den_max, den[i]);
    }
    double c0 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double L = obs.action.value[i];
        if (!std::isfinite(L) || !(den[i] > kResolvedFraction * den_max)) continue;
        c0 = std::max(c0, L / den[i]);
    }
    return c0;
}

bool DecayReport::all_passed() const {
    if (!applicable) return false;
    for (const auto& c : checks)
        if (!c.informational && !c.passed) return false;
    return true;
}

namespace {

CheckResult equality(const std::string& name, double value, double target, double tol) {
    CheckResult c;
    c.name = name;
    c.value = value;
    c.target = target;
    c.margin = tol - std::abs(value - target);
    c.passed = c.margin >= 0.0;
    return c;
}

CheckResult upper_bound(const std::string& name, double value, double bound) {
    CheckResult c;
    c.name = name;
    c.value = value;
    c.target = bound;
    c.margin = bound - value;
    c.passed = c.margin >= 0.0;
    return c;
}

}  // namespace

DecayReport verify_theorem(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                           const TheoremOptions& options) {
    DecayReport rep;
    rep.b = metric.b;
    rep.c1 = options.c1;
    rep.residual_sup = vortex_residual(f, spec, metric).sup;
    if (!options.certified || rep.residual_sup > options.onshell_tol) {
        rep.note = "not applicable: field is not certified on-shell";
        return rep;
    }
    LimitExtraction lim;
    try {
        lim = extract_limit(f, spec, metric, options.tail_threshold);
    } catch (const Error& e) {
        rep.note = std::string("not applicable: ") + e.what();
        return rep;
    }
    rep.applicable = true;
    rep.holonomy_order = lim.critical.order;
    rep.floor = 1.0 / lim.critical.order;

    const ObservableSet obs = observables(f, spec, metric, &lim.limit);
    RateFit du;
    try {
        du = fit_rate(obs.du.t, obs.du.value, options.policy);
    } catch (const NoWindow& e) {
        rep.note = e.what();
        rep.checks.push_back(upper_bound("du_decays", 0.0, -options.delta_min));
        return rep;
    }
    rep.fits["du"] = du;
    rep.delta = -du.slope;
    for (const Series* s : {&obs.mu, &obs.F, &obs.tail_energy, &obs.dist_eta, &obs.dist_u}) {
        try {
            rep.fits[s->name] = fit_window(s->t, s->value, du.first, du.last);
        } catch (const Error&) {
        }
        try {
            rep.own_fits[s->name] = fit_rate(s->t, s->value, options.policy);
        } catch (const Error&) {
        }
    }
    rep.own_fits["du"] = du;
    auto slope = [&rep](const std::string& k) {
        auto it = rep.fits.find(k);
        return it == rep.fits.end() ? std::numeric_limits<double>::quiet_NaN() : it->second.slope;
    };
    const double b = metric.b;
    rep.checks.push_back(upper_bound("du_decays", du.slope, -options.delta_min));
    rep.checks.push_back(equality("mu_minus_du", slope("mu") - du.slope, -b, options.tol_rel));
    rep.checks.push_back(equality("F_minus_du", slope("F") - du.slope, b, options.tol_rel));
    rep.checks.push_back(equality("energy_vs_du", slope("tail_energy") - 2.0 * du.slope, 0.0, options.tol_rel));
    rep.checks.push_back(upper_bound("dist_eta_rate", slope("dist_eta"), -rep.delta + options.tol_rel));
    rep.checks.push_back(upper_bound("dist_u_rate", slope("dist_u"), -rep.delta + options.tol_rel));
    const double action_T = obs.action.value.back();
    rep.checks.push_back(upper_bound("action_at_end", std::isfinite(action_T) ? std::abs(action_T) : 1e300,
                                     options.action_threshold));
    rep.checks.push_back(equality("F_minus_mu", slope("F") - slope("mu"), 2.0 * b, options.tol_two_b));
    const double max_slope = std::max({slope("mu"), slope("F"), slope("tail_energy")});
    rep.checks.push_back(upper_bound("slopes_negative", std::isfinite(max_slope) ? max_slope : 1e300, 0.0));
    CheckResult ceiling = upper_bound("delta_below_floor", rep.delta, rep.floor);
    ceiling.informational = true;
    rep.checks.push_back(ceiling);
    for (auto& c : rep.checks)
        if (!std::isfinite(c.value)) c.passed = false;

    rep.isoperimetric_c0 = isoperimetric_constant(obs, options.c1);
    rep.isoperimetric_floor =
        rep.isoperimetric_c0 > 0.0 ? 1.0 / (2.0 * rep.isoperimetric_c0 * std::max(1.0, options.c1)) : 0.0;
    return rep;
}

}  // namespace vortexlab
