#include "vortexlab/runner.hpp"

#include "vortexlab/diagnostics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/io.hpp"

#include <spdlog/spdlog.h>

#include <Eigen/Eigenvalues>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace vortexlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Strict view of a JSON object: typed getters plus rejection of unread keys.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw InvalidConfig(where() + ": expected an object");
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void get(const std::string& key, double& out) {
        if (const json* v = child(key)) {
            if (!v->is_number()) throw InvalidConfig(key_path(key) + ": expected a number");
            out = v->get<double>();
            if (!std::isfinite(out)) throw InvalidConfig(key_path(key) + ": must be finite");
        }
    }
    void get(const std::string& key, int& out) {
        if (const json* v = child(key)) {
            if (!v->is_number_integer()) throw InvalidConfig(key_path(key) + ": expected an integer");
            out = v->get<int>();
        }
    }
    void get(const std::string& key, std::uint64_t& out) {
        if (const json* v = child(key)) {
            if (!v->is_number_unsigned()) throw InvalidConfig(key_path(key) + ": expected a nonnegative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void get(const std::string& key, bool& out) {
        if (const json* v = child(key)) {
            if (!v->is_boolean()) throw InvalidConfig(key_path(key) + ": expected a boolean");
            out = v->get<bool>();
        }
    }
    void get(const std::string& key, std::string& out) {
        if (const json* v = child(key)) {
            if (!v->is_string()) throw InvalidConfig(key_path(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }
    void get(const std::string& key, std::vector<double>& out) {
        if (const json* v = child(key)) {
            if (!v->is_array()) throw InvalidConfig(key_path(key) + ": expected an array of numbers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) throw InvalidConfig(key_path(key) + ": expected an array of numbers");
                out.push_back(e.get<double>());
            }
        }
    }
    void get(const std::string& key, std::vector<int>& out) {
        if (const json* v = child(key)) {
            if (!v->is_array()) throw InvalidConfig(key_path(key) + ": expected an array of integers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number_integer()) throw InvalidConfig(key_path(key) + ": expected an array of integers");
                out.push_back(e.get<int>());
            }
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw InvalidConfig(key_path(it.key()) + ": unknown key");
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void parse_model(const json& j, ModelSpec& m) {
    Section s(j, "model");
    s.get("n", m.n);
    s.get("d", m.d);
    if (const json* w = s.child("weights")) {
        const std::string p = s.key_path("weights");
        if (!w->is_array() || w->empty()) throw InvalidConfig(p + ": expected a nonempty d x n integer array");
        const int rows = int(w->size());
        const int cols = (*w)[0].is_array() ? int((*w)[0].size()) : 0;
        m.W.resize(rows, cols);
        for (int a = 0; a < rows; ++a) {
            const json& row = (*w)[a];
            if (!row.is_array() || int(row.size()) != cols) throw InvalidConfig(p + ": rows must have equal length");
            for (int j2 = 0; j2 < cols; ++j2) {
                if (!row[j2].is_number_integer()) throw InvalidConfig(p + ": entries must be integers");
                m.W(a, j2) = row[j2].get<int>();
            }
        }
    }
    std::vector<double> tau(m.tau.data(), m.tau.data() + m.tau.size());
    s.get("tau", tau);
    m.tau = Eigen::Map<Eigen::VectorXd>(tau.data(), Eigen::Index(tau.size()));
    s.get("eps", m.eps);
    s.finish();
}

void parse_solve(const json& j, SolveConfig& c) {
    Section s(j, "solve");
    s.get("tol_residual", c.tol_residual);
    s.get("max_iter", c.max_iter);
    std::string mode = to_string(c.boundary);
    s.get("boundary", mode);
    c.boundary = boundary_mode_from_string(mode);
    s.get("penalty_weight", c.penalty_weight);
    s.get("min_penalty_weight", c.min_penalty_weight);
    s.get("damping", c.damping);
    s.get("max_cg_iter", c.max_cg_iter);
    s.get("cg_relative_tol", c.cg_relative_tol);
    s.finish();
}

void parse_analysis(const json& j, TheoremOptions& o) {
    Section s(j, "analysis");
    s.get("onshell_tol", o.onshell_tol);
    s.get("tol_rel", o.tol_rel);
    s.get("tol_two_b", o.tol_two_b);
    s.get("delta_min", o.delta_min);
    s.get("action_threshold", o.action_threshold);
    s.get("tail_threshold", o.tail_threshold);
    s.get("c1", o.c1);
    s.get("min_r2", o.policy.min_r2);
    s.get("min_samples", o.policy.min_samples);
    s.get("end_fraction", o.policy.end_fraction);
    s.finish();
}

void parse_sweep(const json& j, SweepParams& p) {
    Section s(j, "sweep");
    s.get("b", p.b);
    s.get("k", p.k);
    s.get("m", p.m);
    s.get("tau_per_weight", p.tau_per_weight);
    s.get("horizon", p.horizon);
    if (const json* cells = s.child("cells")) {
        if (!cells->is_array()) throw InvalidConfig("sweep.cells: expected an array of objects");
        p.cells.clear();
        for (size_t i = 0; i < cells->size(); ++i) {
            Section c((*cells)[i], "sweep.cells[" + std::to_string(i) + "]");
            SweepCell cell;
            c.get("b", cell.b);
            c.get("k", cell.k);
            c.get("m", cell.m);
            if ((*cells)[i].contains("max_iter")) {
                int mi = 0;
                c.get("max_iter", mi);
                cell.max_iter = mi;
            }
            c.finish();
            p.cells.push_back(cell);
        }
    }
    s.finish();
}

json weights_json(const Eigen::MatrixXi& W) {
    json w = json::array();
    for (int a = 0; a < W.rows(); ++a) {
        json row = json::array();
        for (int j = 0; j < W.cols(); ++j) row.push_back(W(a, j));
        w.push_back(row);
    }
    return w;
}

}  // namespace

void RunConfig::validate() const {
    static const std::set<std::string> scenarios{"oracle", "solve", "analyze", "hessian", "check", "sweep"};
    if (!scenarios.count(scenario))
        throw InvalidConfig("scenario: expected one of oracle, solve, analyze, hessian, check, sweep");
    model.validate();
    if (!(metric.b >= 0.0)) throw InvalidConfig("metric.b: must be nonnegative");
    grid.validate();
    if (!(oracle.tol > 0.0)) throw InvalidConfig("oracle.tol: must be positive");
    if (!(oracle.offset >= 0.0)) throw InvalidConfig("oracle.offset: must be nonnegative");
    if (!(perturbation.amplitude >= 0.0)) throw InvalidConfig("perturbation.amplitude: must be nonnegative");
    if (perturbation.max_mode < 0) throw InvalidConfig("perturbation.max_mode: must be nonnegative");
    solve.validate();
    if (!(analysis.onshell_tol > 0.0)) throw InvalidConfig("analysis.onshell_tol: must be positive");
    if (!(analysis.tail_threshold > 0.0)) throw InvalidConfig("analysis.tail_threshold: must be positive");
    if (!(analysis.c1 > 0.0)) throw InvalidConfig("analysis.c1: must be positive");
    if (!(analysis.policy.min_r2 > 0.0 && analysis.policy.min_r2 <= 1.0))
        throw InvalidConfig("analysis.min_r2: must lie in (0, 1]");
    if (analysis.policy.min_samples < 2) throw InvalidConfig("analysis.min_samples: at least 2 required");
    if (!(analysis.policy.end_fraction > 0.0 && analysis.policy.end_fraction <= 1.0))
        throw InvalidConfig("analysis.end_fraction: must lie in (0, 1]");
    if (!hessian.eta0.empty() && int(hessian.eta0.size()) != model.d)
        throw InvalidConfig("hessian.eta0: expected d entries");
    if (!(hessian.null_tol > 0.0)) throw InvalidConfig("hessian.null_tol: must be positive");
    if (hessian.max_mode < 0) throw InvalidConfig("hessian.max_mode: must be nonnegative");
    if (!(sweep.tau_per_weight > 0.0)) throw InvalidConfig("sweep.tau_per_weight: must be positive");
    if (!(sweep.horizon > 0.0)) throw InvalidConfig("sweep.horizon: must be positive");
    for (double b : sweep.b)
        if (!(b >= 0.0)) throw InvalidConfig("sweep.b: entries must be nonnegative");
    for (int k : sweep.k)
        if (k < 1) throw InvalidConfig("sweep.k: entries must be positive");
    if (workers < 1) throw InvalidConfig("workers: must be positive");
    if (output.empty()) throw InvalidConfig("output: must be a nonempty path");
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    Section s(j, "");
    s.get("scenario", c.scenario);
    if (const json* m = s.child("model")) parse_model(*m, c.model);
    if (const json* m = s.child("metric")) {
        Section ms(*m, "metric");
        ms.get("b", c.metric.b);
        ms.finish();
    }
    if (const json* g = s.child("grid")) {
        Section gs(*g, "grid");
        gs.get("t0", c.grid.t0);
        gs.get("T", c.grid.T);
        gs.get("Nt", c.grid.Nt);
        gs.get("Ntheta", c.grid.Ntheta);
        gs.finish();
    }
    if (const json* o = s.child("oracle")) {
        Section os(*o, "oracle");
        os.get("m", c.oracle.m);
        os.get("tol", c.oracle.tol);
        os.get("offset", c.oracle.offset);
        os.finish();
    }
    if (const json* p = s.child("perturbation")) {
        Section ps(*p, "perturbation");
        ps.get("amplitude", c.perturbation.amplitude);
        ps.get("max_mode", c.perturbation.max_mode);
        ps.finish();
    }
    if (const json* v = s.child("solve")) parse_solve(*v, c.solve);
    if (const json* v = s.child("analysis")) parse_analysis(*v, c.analysis);
    if (const json* h = s.child("hessian")) {
        Section hs(*h, "hessian");
        hs.get("eta0", c.hessian.eta0);
        hs.get("null_tol", c.hessian.null_tol);
        hs.get("max_mode", c.hessian.max_mode);
        hs.finish();
    }
    if (const json* v = s.child("sweep")) parse_sweep(*v, c.sweep);
    s.get("input_field", c.input_field);
    s.get("seed", c.seed);
    s.get("output", c.output);
    s.get("workers", c.workers);
    s.finish();
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidConfig("config: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw InvalidConfig(std::string("config: malformed JSON (") + e.what() + ")");
    }
    return parse_config(j);
}

json semantic_json(const RunConfig& c) {
    json j;
    j["scenario"] = c.scenario;
    j["model"] = {{"n", c.model.n},
                  {"d", c.model.d},
                  {"weights", weights_json(c.model.W)},
                  {"tau", std::vector<double>(c.model.tau.data(), c.model.tau.data() + c.model.tau.size())},
                  {"eps", c.model.eps}};
    j["metric"] = {{"b", c.metric.b}};
    j["grid"] = {{"t0", c.grid.t0}, {"T", c.grid.T}, {"Nt", c.grid.Nt}, {"Ntheta", c.grid.Ntheta}};
    j["oracle"] = {{"m", c.oracle.m}, {"tol", c.oracle.tol}, {"offset", c.oracle.offset}};
    j["perturbation"] = {{"amplitude", c.perturbation.amplitude}, {"max_mode", c.perturbation.max_mode}};
    j["solve"] = {{"tol_residual", c.solve.tol_residual},
                  {"max_iter", c.solve.max_iter},
                  {"boundary", to_string(c.solve.boundary)},
                  {"penalty_weight", c.solve.penalty_weight},
                  {"min_penalty_weight", c.solve.min_penalty_weight},
                  {"damping", c.solve.damping},
                  {"max_cg_iter", c.solve.max_cg_iter},
                  {"cg_relative_tol", c.solve.cg_relative_tol}};
    const TheoremOptions& o = c.analysis;
    j["analysis"] = {{"onshell_tol", o.onshell_tol},       {"tol_rel", o.tol_rel},
                     {"tol_two_b", o.tol_two_b},           {"delta_min", o.delta_min},
                     {"action_threshold", o.action_threshold}, {"tail_threshold", o.tail_threshold},
                     {"c1", o.c1},                         {"min_r2", o.policy.min_r2},
                     {"min_samples", o.policy.min_samples}, {"end_fraction", o.policy.end_fraction}};
    j["hessian"] = {{"eta0", c.hessian.eta0}, {"null_tol", c.hessian.null_tol}, {"max_mode", c.hessian.max_mode}};
    json cells = json::array();
    for (const auto& cell : c.sweep.cells) {
        json cj = {{"b", cell.b}, {"k", cell.k}, {"m", cell.m}};
        if (cell.max_iter) cj["max_iter"] = *cell.max_iter;
        cells.push_back(cj);
    }
    j["sweep"] = {{"b", c.sweep.b},
                  {"k", c.sweep.k},
                  {"m", c.sweep.m},
                  {"tau_per_weight", c.sweep.tau_per_weight},
                  {"horizon", c.sweep.horizon},
                  {"cells", cells}};
    j["input_field"] = c.input_field;
    j["seed"] = c.seed;
    return j;
}

std::string config_hash(const RunConfig& c) { return hex64(fnv1a64(semantic_json(c).dump())); }

std::vector<SweepCell> sweep_cells(const SweepParams& s) {
    if (!s.cells.empty()) return s.cells;
    std::vector<SweepCell> out;
    for (double b : s.b)
        for (int k : s.k)
            for (int m : s.m)
                if (std::abs(m) < k) out.push_back(SweepCell{b, k, m, std::nullopt});
    return out;
}

double sweep_horizon_T(double t0, double b, double rate, double horizon) {
    if (b == 0.0) return t0 + horizon / rate;
    return std::log(std::exp(b * t0) + b * horizon / rate) / b;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const NonConvergence*>(&e) || dynamic_cast<const ShootingFailed*>(&e) ||
        dynamic_cast<const StiffnessAbort*>(&e) || dynamic_cast<const NewtonDiverged*>(&e))
        return kExitNonConvergence;
    if (dynamic_cast<const InvalidConfig*>(&e)) return kExitInvalidConfig;
    return kExitPrecondition;
}

namespace {

struct Circle {
    int k;
    double tau;
};

Circle circle_of(const ModelSpec& spec) {
    if (spec.n != 1 || spec.d != 1)
        throw PreconditionFailed("scenario requires the circle model (n = d = 1)");
    return Circle{spec.W(0, 0), spec.tau(0)};
}

SeparableSolution oracle_of(const RunConfig& c) {
    const Circle cm = circle_of(c.model);
    return separable_vortex(cm.k, cm.tau, c.metric.b, c.oracle.m, c.grid.t0, c.grid.T, c.oracle.tol, c.oracle.offset);
}

std::string path_in(const RunConfig& c, const std::string& name) { return (fs::path(c.output) / name).string(); }

void write_json(const RunConfig& c, const std::string& name, const json& j) {
    write_text(path_in(c, name), j.dump(2) + "\n");
}

json run_oracle(const RunConfig& c) {
    const SeparableSolution sol = oracle_of(c);
    const CylinderField f = to_field(sol, c.grid);
    write_field_csv(path_in(c, "field.csv"), f);
    const ModelSpec spec = sol.spec();
    json r;
    r["k"] = sol.k;
    r["tau"] = sol.tau;
    r["b"] = sol.b;
    r["m"] = sol.m;
    r["rho0"] = sol.rho0;
    r["eta_start"] = sol.eta_start;
    r["shooting_residual"] = sol.shooting_residual;
    r["bisection_steps"] = sol.bisection_steps;
    r["residual_sup"] = vortex_residual(f, spec, c.metric).sup;
    r["linearized_rate"] = linearized_rate(sol.k, sol.tau);
    const NearestCritical nc = nearest_critical(f.row(c.grid.Nt - 1), spec);
    r["limit_eta0"] = nc.critical.eta0(0);
    r["holonomy_order"] = nc.critical.order;
    r["holonomy_angle"] = nc.critical.hol.angles(0);
    return r;
}

SolveResult solve_field(const RunConfig& c, const ModelSpec& spec) {
    CylinderField initial;
    if (!c.input_field.empty()) {
        initial = read_field_csv(c.input_field);
    } else {
        initial = perturb(to_field(oracle_of(c), c.grid), c.perturbation.amplitude, c.seed, c.perturbation.max_mode);
    }
    spdlog::info("relaxing on a {} x {} grid", initial.grid.Nt, initial.grid.Ntheta);
    SolveResult res = relax(initial, spec, c.metric, c.solve);
    spdlog::info("converged in {} iterations, residual {:.3e}", res.certificate.iterations,
                 res.certificate.final_residual_sup);
    return res;
}

json run_solve(const RunConfig& c) {
    const SolveResult res = solve_field(c, c.model);
    write_field_csv(path_in(c, "field.csv"), res.field);
    write_json(c, "certificate.json", to_json(res.certificate));
    return {{"iterations", res.certificate.iterations}, {"final_residual_sup", res.certificate.final_residual_sup}};
}

json run_analyze(const RunConfig& c) {
    CylinderField f;
    TheoremOptions opt = c.analysis;
    if (!c.input_field.empty()) {
        f = read_field_csv(c.input_field);
        opt.certified = vortex_residual(f, c.model, c.metric).sup <= opt.onshell_tol;
    } else {
        const SolveResult res = solve_field(c, c.model);
        f = res.field;
        opt.certified = true;
        write_field_csv(path_in(c, "field.csv"), f);
        write_json(c, "certificate.json", to_json(res.certificate));
    }
    const DecayReport rep = verify_theorem(f, c.model, c.metric, opt);
    ObservableSet obs;
    if (rep.applicable) {
        const LimitExtraction lim = extract_limit(f, c.model, c.metric, opt.tail_threshold);
        obs = observables(f, c.model, c.metric, &lim.limit);
    } else {
        obs = observables(f, c.model, c.metric);
    }
    std::ostringstream series;
    write_series_csv(series, obs);
    write_text(path_in(c, "series.csv"), series.str());
    json r = to_json(rep);
    r["config_hash"] = config_hash(c);
    return r;
}

json run_hessian(const RunConfig& c) {
    const ModelSpec& spec = c.model;
    Eigen::VectorXd eta0 = Eigen::VectorXd::Zero(spec.d);
    for (size_t a = 0; a < c.hessian.eta0.size(); ++a) eta0(Eigen::Index(a)) = c.hessian.eta0[a];
    const CriticalLoop crit = make_critical(spec, level_point(spec), eta0);
    const int N = c.grid.Ntheta;
    const HessianPackage P = hessian_assemble(crit, spec, N, c.hessian.null_tol);

    const Eigen::MatrixXd A = P.Q.transpose() * P.H * P.Q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    std::ostringstream csv;
    csv << "index,eigenvalue,residual\n";
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const Eigen::VectorXd v = es.eigenvectors().col(i);
        const double res = (A * v - es.eigenvalues()(i) * v).norm();
        csv << i << ',' << format_double(es.eigenvalues()(i)) << ',' << format_double(res) << '\n';
    }
    write_text(path_in(c, "spectrum.csv"), csv.str());

    json r;
    r["kernel_dim"] = P.kernel_dim;
    r["symmetry_defect"] = P.symmetry_defect;
    r["holonomy_order"] = crit.order;
    r["isotropy_order"] = isotropy_order(crit, spec);
    r["eta0"] = std::vector<double>(eta0.data(), eta0.data() + eta0.size());
    r["dimension"] = int(P.eigenvalues.size());
    if (spec.n == 1 && spec.d == 1) {
        const int modes = c.hessian.max_mode > 0 ? c.hessian.max_mode : N / 2 - 1;
        const std::vector<double> fourier = fourier_hessian_blocks(crit, spec, modes);
        const double bound = N / 4.0;
        std::vector<double> g, o;
        for (Eigen::Index i = 0; i < P.eigenvalues.size(); ++i)
            if (std::abs(P.eigenvalues(i)) <= bound) g.push_back(P.eigenvalues(i));
        for (double x : fourier)
            if (std::abs(x) <= bound) o.push_back(x);
        double diff = g.size() == o.size() ? 0.0 : std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < std::min(g.size(), o.size()); ++i) diff = std::max(diff, std::abs(g[i] - o[i]));
        r["fourier_agreement"] = {{"bound", bound},
                                  {"count_grid", g.size()},
                                  {"count_fourier", o.size()},
                                  {"max_difference", std::isfinite(diff) ? json(diff) : json(nullptr)}};
    }
    return r;
}

struct Invariant {
    std::string name;
    double value;
    double bound;
};

json run_check(const RunConfig& c) {
    std::vector<Invariant> inv;
    const ModelSpec& spec = c.model;
    inv.push_back({"hamiltonian_identity", hamiltonian_identity_defect(spec, 100, c.seed), 1e-10});
    {
        const double e1 = action_difference_defect(spec, 1e-4, 20, c.seed);
        const double e2 = action_difference_defect(spec, 5e-5, 20, c.seed);
        inv.push_back({"infinitesimal_action_first_order", std::abs(e1 / e2 - 2.0), 0.1});
    }
    inv.push_back({"torus_holonomy_exactness", torus_holonomy_error(Eigen::VectorXd::Constant(spec.d, 0.3), 256), 1e-10});
    inv.push_back({"matrix_holonomy_product", matrix_holonomy_error(3, 4, 64, c.seed), 1e-8});
    {
        const TargetPoint z = level_point(spec);
        inv.push_back({"level_point_on_level_set", moment_map(spec, z).cwiseAbs().maxCoeff(), 1e-12});
    }

    const Circle cm = (spec.n == 1 && spec.d == 1) ? circle_of(spec) : Circle{1, 0.5};
    const ModelSpec circle = ModelSpec::circle(cm.k, cm.tau);
    const double rate = linearized_rate(cm.k, cm.tau);
    const SeparableSolution sol = separable_vortex(cm.k, cm.tau, 0.0, 0, 0.0, 8.0 / rate);
    {
        const double r1 = oracle_residual(sol, 129, 16), r2 = oracle_residual(sol, 257, 16);
        inv.push_back({"oracle_residual_order", std::abs(std::log2(r1 / r2) - 4.0), 0.5});
    }
    const Grid g{sol.t0, sol.T, 257, 16};
    const CylinderField f = to_field(sol, g);
    const MetricSpec flat{0.0};
    {
        const EnergyIdentity ei = energy_identity_defect(f, circle, flat, 0, g.Nt - 1);
        inv.push_back({"energy_identity", std::abs(ei.energy - ei.topological_term) / ei.energy, 1e-4});
    }
    {
        const int i1 = g.Nt / 8, i2 = g.Nt / 4;
        const double E = total_energy(f, circle, flat, i1, i2);
        const double dL = local_action(f.row(i1), circle) - local_action(f.row(i2), circle);
        inv.push_back({"action_identity", std::abs(E - dL) / E, 1e-4});
    }
    {
        const Grid fine{sol.t0, sol.T, 257, 64};
        const LoopGauge gauge = random_based_gauge(fine.Ntheta, 1, c.seed, 2, 0.5, 1);
        const GaugeInvarianceDefect d = gauge_invariance_defect(to_field(sol, fine), circle, flat, gauge);
        inv.push_back({"gauge_invariance_energy", d.energy, 1e-8});
        inv.push_back({"gauge_invariance_residual", d.residual, 1e-6});
    }
    {
        const CriticalLoop crit = make_critical(circle, level_point(circle), Eigen::VectorXd::Zero(1));
        const HessianPackage P = hessian_assemble(crit, circle, 32);
        inv.push_back({"hessian_symmetry", P.symmetry_defect, 1e-10});
        inv.push_back({"critical_loop_action", std::abs(local_action(crit.sample(circle, 32), circle)), 1e-10});
    }
    {
        std::stringstream ss;
        write_field_csv(ss, f);
        const CylinderField back = read_field_csv(ss);
        inv.push_back({"field_csv_roundtrip", back.max_difference(f) == 0.0 && back.grid.Nt == g.Nt ? 0.0 : 1.0, 0.0});
    }
    {
        RunConfig other = c;
        other.metric.b += 1.0;
        RunConfig same = c;
        same.output += "_elsewhere";
        same.workers += 1;
        const bool ok = config_hash(other) != config_hash(c) && config_hash(same) == config_hash(c);
        inv.push_back({"config_hash_semantic", ok ? 0.0 : 1.0, 0.0});
    }

    json list = json::array();
    bool all = true;
    for (const auto& i : inv) {
        const bool pass = std::isfinite(i.value) && i.value <= i.bound;
        all = all && pass;
        list.push_back({{"name", i.name}, {"passed", pass}, {"value", std::isfinite(i.value) ? json(i.value) : json(nullptr)},
                        {"bound", i.bound}});
        spdlog::info("{:<34} {} value={:.3e}", i.name, pass ? "pass" : "FAIL", i.value);
    }
    return {{"invariants", list}, {"all_passed", all}};
}

std::string opt_num(double x) { return std::isfinite(x) ? format_double(x) : "nan"; }

json run_sweep(const RunConfig& c) {
    const std::vector<SweepCell> cells = sweep_cells(c.sweep);
    std::vector<RunConfig> subs(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
        const SweepCell& cell = cells[i];
        RunConfig s = c;
        s.scenario = "analyze";
        s.input_field.clear();
        s.sweep = SweepParams{};
        s.hessian = HessianParams{};
        s.model = ModelSpec::circle(cell.k, c.sweep.tau_per_weight * cell.k);
        s.metric.b = cell.b;
        s.oracle.m = cell.m;
        s.grid.T = sweep_horizon_T(c.grid.t0, cell.b, linearized_rate(cell.k, s.model.tau(0)), c.sweep.horizon);
        if (cell.max_iter) s.solve.max_iter = *cell.max_iter;
        s.workers = 1;
        s.output = (fs::path(c.output) / ("cell_b" + format_double(cell.b) + "_k" + std::to_string(cell.k) + "_m" +
                                          std::to_string(cell.m)))
                       .string();
        subs[i] = s;
    }

    std::vector<RunOutcome> outcomes(cells.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next++; i < cells.size(); i = next++) {
            spdlog::info("sweep cell {} of {}", i + 1, cells.size());
            outcomes[i] = run(subs[i]);
        }
    };
    const int nthreads = std::max(1, std::min<int>(c.workers, int(cells.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << "b,k,m,T,status,delta,slope_du,slope_mu,slope_F,slope_tail_energy,mu_minus_du,F_minus_mu,"
           "energy_vs_du,holonomy_order,isoperimetric_c0,all_passed\n";
    int succeeded = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
        const json& r = outcomes[i].report;
        const bool ok = outcomes[i].exit_code == kExitOk;
        succeeded += ok;
        auto num = [&](const json& v) { return v.is_number() ? opt_num(v.get<double>()) : std::string("nan"); };
        auto slope = [&](const char* name) {
            if (!ok || !r.contains("fits") || !r["fits"].contains(name)) return std::string("nan");
            return num(r["fits"][name]["slope"]);
        };
        auto check = [&](const char* name) {
            if (ok && r.contains("checks"))
                for (const auto& ch : r["checks"])
                    if (ch["name"] == name) return num(ch["value"]);
            return std::string("nan");
        };
        csv << format_double(cells[i].b) << ',' << cells[i].k << ',' << cells[i].m << ',' << format_double(subs[i].grid.T)
            << ',' << outcomes[i].exit_code << ',' << (ok ? num(r["delta"]) : "nan") << ',' << slope("du") << ','
            << slope("mu") << ',' << slope("F") << ',' << slope("tail_energy") << ',' << check("mu_minus_du") << ','
            << check("F_minus_mu") << ',' << check("energy_vs_du") << ','
            << (ok ? std::to_string(r["holonomy_order"].get<int>()) : "nan") << ','
            << (ok ? num(r["isoperimetric_c0"]) : "nan") << ',' << (ok && r["all_passed"].get<bool>() ? 1 : 0) << '\n';
    }
    write_text(path_in(c, "sweep.csv"), csv.str());
    if (succeeded == 0) throw NonConvergence("no sweep cell succeeded", {});
    return {{"cells", cells.size()}, {"succeeded", succeeded}};
}

}  // namespace

RunOutcome run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out;
    try {
        config.validate();
        fs::create_directories(config.output);
        spdlog::info("scenario {} -> {}", config.scenario, config.output);
        if (config.scenario == "oracle") out.report = run_oracle(config);
        else if (config.scenario == "solve") out.report = run_solve(config);
        else if (config.scenario == "analyze") out.report = run_analyze(config);
        else if (config.scenario == "hessian") out.report = run_hessian(config);
        else if (config.scenario == "check") out.report = run_check(config);
        else out.report = run_sweep(config);
        out.report["scenario"] = config.scenario;
        write_json(config, "report.json", out.report);
    } catch (const std::exception& e) {
        out.exit_code = exit_code_for(e);
        out.error = e.what();
        spdlog::error("{}", out.error);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        json rj;
        rj["config"] = semantic_json(config);
        rj["config"]["output"] = config.output;
        rj["config"]["workers"] = config.workers;
        rj["config_hash"] = config_hash(config);
        rj["tool_version"] = kToolVersion;
        rj["wall_time_s"] = wall;
        rj["exit_status"] = out.exit_code;
        if (!out.error.empty()) rj["error"] = out.error;
        fs::create_directories(config.output);
        write_json(config, "run.json", rj);
    } catch (const std::exception& e) {
        spdlog::error("cannot write run.json: {}", e.what());
        if (out.exit_code == kExitOk) out.exit_code = kExitPrecondition;
    }
    return out;
}

}  // namespace vortexlab
