#pragma once

#include "vortexlab/loops.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vortexlab {

/// Time series of one observable at the grid rows.
struct Series {
    std::string name;
    std::vector<double> t;
    std::vector<double> value;
};

/// Observable series of a temporal field; distance series are empty unless a limit is supplied.
struct ObservableSet {
    Series du;           ///< sup_theta (|D_t u| + |D_theta u|)
    Series mu;           ///< sup_theta |mu(u)|
    Series F;            ///< sup_theta |F|
    Series tail_energy;  ///< E(w; [t, T])
    Series action;       ///< local action of the loop at t
    Series dist_eta;     ///< L2(S^1) distance of eta(t) to the limit connection
    Series dist_u;       ///< L2(S^1) distance of u(t) to the limit loop
    Series du_l2sq;      ///< |d_eta u(t)|^2 in L2(S^1)
    Series mu_l2sq;      ///< |mu(u(t))|^2 in L2(S^1)
    std::vector<const Series*> all() const;
};

ObservableSet observables(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                          const GaugedLoop* limit = nullptr);

struct FitPolicy {
    double min_r2 = 0.99;
    int min_samples = 20;
    double end_fraction = 0.95;  ///< fits ignore samples beyond t0 + end_fraction (T - t0)
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;  ///< log C
    double r2 = 0.0;
    int first = 0;  ///< first sample index of the window
    int last = 0;   ///< last sample index of the window
    double t_start = 0.0;
    double t_end = 0.0;
};

/// Largest trailing window with R^2 >= min_r2, enough samples, positive values and negative slope.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, const FitPolicy& policy = {});
/// Least-squares line through (t, log y) on the sample range [first, last].
RateFit fit_window(const std::vector<double>& t, const std::vector<double>& y, int first, int last);

struct LimitExtraction {
    GaugedLoop limit;         ///< critical representative of the last loop in the field's gauge
    CriticalLoop critical;
    LoopGauge gauge;          ///< canonical based gauge of the limit connection
    double connection_constancy = 0.0;  ///< sup |gauge . eta(T) - eta0|
    double final_loop_residual = 0.0;   ///< sup of the loop residual of the last loop
    double tail_energy = 0.0;           ///< energy of the last 5% of the t-range
};

/// Throws PreconditionFailed when the tail energy exceeds tail_threshold.
LimitExtraction extract_limit(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                              double tail_threshold = 1e-8);

struct TheoremOptions {
    bool certified = false;
    double onshell_tol = 1e-6;
    double tol_rel = 0.1;
    double tol_two_b = 0.05;
    double delta_min = 0.05;
    double action_threshold = 1e-6;
    double tail_threshold = 1e-8;
    double c1 = 10.0;
    FitPolicy policy;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;   ///< measured quantity
    double target = 0.0;  ///< expected value or bound
    double margin = 0.0;  ///< signed distance to failure (positive passes)
    bool informational = false;
};

struct DecayReport {
    bool applicable = false;
    std::string note;
    double b = 0.0;
    int holonomy_order = 1;
    double floor = 1.0;  ///< 1 / holonomy order
    double delta = 0.0;  ///< -slope of |d_eta u|
    std::map<std::string, RateFit> fits;  ///< on the common window
    std::map<std::string, RateFit> own_fits;  ///< each with its own window
    std::vector<CheckResult> checks;
    double isoperimetric_c0 = 0.0;  ///< max over t of L / (|d u|^2 + c1 |mu|^2)
    double isoperimetric_floor = 0.0;  ///< 1 / (2 c0 max(1, c1))
    double c1 = 10.0;
    double residual_sup = 0.0;
    bool all_passed() const;
};

DecayReport verify_theorem(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                           const TheoremOptions& options = {});

/// Rows whose denominator falls below this fraction of its maximum are dominated by rounding and skipped.
inline constexpr double kResolvedFraction = 1e-10;

/// Largest ratio L(t) / (|d_eta u(t)|^2 + c1 |mu(t)|^2) over rows with a defined action and resolved denominator.
double isoperimetric_constant(const ObservableSet& obs, double c1);

}  // namespace vortexlab
