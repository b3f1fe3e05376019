#include "vortexlab/decay.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/oracles.hpp"
#include "vortexlab/solver.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace vortexlab;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
    return t;
}

DecayReport solved_report(int k, int m, double T, int Nt) {
    const SeparableSolution sol = separable_vortex(k, 0.5 * k, 0.0, m, 0.0, T);
    const CylinderField f = to_field(sol, Grid{0.0, T, Nt, 16});
    const SolveResult r = relax(perturb(f, 1e-3, 11), sol.spec(), MetricSpec{0.0}, SolveConfig{});
    TheoremOptions o;
    o.certified = true;
    return verify_theorem(r.field, sol.spec(), MetricSpec{0.0}, o);
}

const CheckResult& check_named(const DecayReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c;
    FAIL("missing check " << name);
    return r.checks.front();
}

}  // namespace

TEST_CASE("fit of a synthetic exponential") {
    const std::vector<double> t = linspace(0.0, 10.0, 201);
    std::vector<double> y(t.size());
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1e-3, 1e-3);
    for (size_t i = 0; i < t.size(); ++i) y[i] = 3.0 * std::exp(-0.7 * t[i]) * (1.0 + U(rng));
    const RateFit f = fit_rate(t, y);
    CHECK(f.slope == doctest::Approx(-0.7).epsilon(1e-3));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-2));
    CHECK(f.r2 > 0.999);
    CHECK(f.t_end <= 9.5 + 1e-12);

    const RateFit w = fit_window(t, y, 10, 100);
    CHECK(w.first == 10);
    CHECK(w.last == 100);
    CHECK(w.slope == doctest::Approx(-0.7).epsilon(1e-3));
}

TEST_CASE("fit window excludes a leading transient") {
    const std::vector<double> t = linspace(0.0, 10.0, 201);
    std::vector<double> y(t.size());
    for (size_t i = 0; i < t.size(); ++i) y[i] = t[i] < 3.0 ? 1.0 : std::exp(-1.5 * (t[i] - 3.0));
    FitPolicy strict;
    strict.min_r2 = 1.0 - 1e-9;
    const RateFit f = fit_rate(t, y, strict);
    CHECK(f.t_start >= 3.0 - 1e-12);
    CHECK(fit_rate(t, y).t_start < 3.0);
    CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-9));
}

TEST_CASE("series without a decaying window") {
    const std::vector<double> t = linspace(0.0, 10.0, 201);
    std::vector<double> grow(t.size()), flat(t.size(), 1.0), bad(t.size(), 1.0);
    for (size_t i = 0; i < t.size(); ++i) grow[i] = std::exp(0.3 * t[i]);
    CHECK_THROWS_AS(fit_rate(t, grow), NoWindow);
    CHECK_THROWS_AS(fit_rate(t, flat), NoWindow);
    bad[50] = 0.0;
    CHECK_THROWS_AS(fit_window(t, bad, 40, 60), NoWindow);
    CHECK_THROWS_AS(fit_window(t, bad, 60, 40), RangeMismatch);
    CHECK_THROWS_AS(fit_rate({0.0}, {1.0}), NoWindow);
}

TEST_CASE("isoperimetric constant skips unresolved rows") {
    ObservableSet obs;
    obs.action = {"action", {0.0, 1.0, 2.0}, {0.5, 0.2, 1.0}};
    obs.du_l2sq = {"du_l2sq", {0.0, 1.0, 2.0}, {1.0, 1.0, 1e-20}};
    obs.mu_l2sq = {"mu_l2sq", {0.0, 1.0, 2.0}, {0.0, 0.1, 0.0}};
    CHECK(isoperimetric_constant(obs, 10.0) == doctest::Approx(0.5));
}

TEST_CASE("uncertified and off-shell fields are not applicable") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 14.0);
    const CylinderField f = to_field(sol, Grid{0.0, 14.0, 257, 16});
    const DecayReport r = verify_theorem(f, sol.spec(), MetricSpec{0.0});
    CHECK_FALSE(r.applicable);
    CHECK_FALSE(r.all_passed());

    TheoremOptions o;
    o.certified = true;
    const DecayReport off = verify_theorem(perturb(f, 1e-2, 3), sol.spec(), MetricSpec{0.0}, o);
    CHECK_FALSE(off.applicable);
    CHECK(off.note.find("on-shell") != std::string::npos);
}

TEST_CASE("truncated runs fail the tail-energy precondition") {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 3.0);
    const CylinderField f = to_field(sol, Grid{0.0, 3.0, 257, 16});
    CHECK_THROWS_AS(extract_limit(f, sol.spec(), MetricSpec{0.0}), PreconditionFailed);
    TheoremOptions o;
    o.certified = true;
    o.onshell_tol = 1e-4;
    const DecayReport r = verify_theorem(f, sol.spec(), MetricSpec{0.0}, o);
    CHECK_FALSE(r.applicable);
    CHECK(r.note.find("tail energy") != std::string::npos);
}

TEST_CASE("decay rate of the trivial-holonomy oracle") {
    const DecayReport r = solved_report(1, 0, 14.0, 513);
    REQUIRE(r.applicable);
    CHECK(r.holonomy_order == 1);
    CHECK(r.delta == doctest::Approx(1.0).epsilon(0.02));
    CHECK(r.all_passed());
    CHECK(check_named(r, "mu_minus_du").passed);
    CHECK(check_named(r, "delta_below_floor").informational);
    CHECK(r.isoperimetric_c0 > 0.0);
}

TEST_CASE("decay rate of the order-three oracle") {
    const DecayReport r = solved_report(3, 1, 14.0 / 3.0, 513);
    REQUIRE(r.applicable);
    CHECK(r.holonomy_order == 3);
    CHECK(r.floor == doctest::Approx(1.0 / 3.0));
    CHECK(r.delta == doctest::Approx(3.0).epsilon(0.02));
    CHECK(r.all_passed());
}
