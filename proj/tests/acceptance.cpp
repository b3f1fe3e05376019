// Acceptance checks: one line per criterion, nonzero exit if any fails.
#include "vortexlab/decay.hpp"
#include "vortexlab/diagnostics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/oracles.hpp"
#include "vortexlab/runner.hpp"
#include "vortexlab/solver.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace vortexlab;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d  %-32s %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Scenario {
    int k;
    double b;
    int m;
    std::string label() const {
        return "(k=" + std::to_string(k) + ",b=" + fmt("%g", b) + ",m=" + std::to_string(m) + ")";
    }
    double tau() const { return 0.5 * k; }
    double T() const { return sweep_horizon_T(0.0, b, linearized_rate(k, tau()), 14.0); }
};

const std::vector<Scenario> kScenarios{{1, 0.0, 0}, {1, 1.0, 0}, {3, 0.0, 1}};

struct CertifiedRun {
    Scenario sc;
    SeparableSolution sol;
    CylinderField field;
    double residual = 0.0;
    bool certified = false;
    std::string error;
};

CertifiedRun certified_run(const Scenario& sc, int Nt) {
    CertifiedRun r{sc, separable_vortex(sc.k, sc.tau(), sc.b, sc.m, 0.0, sc.T()), {}, 0.0, false, {}};
    const Grid g{0.0, sc.T(), Nt, 16};
    const MetricSpec metric{sc.b};
    try {
        const SolveResult s = relax(perturb(to_field(r.sol, g), 1e-3, 11), r.sol.spec(), metric, SolveConfig{});
        r.field = s.field;
        r.residual = s.certificate.final_residual_sup;
        r.certified = r.residual <= TheoremOptions{}.onshell_tol;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

TheoremOptions certified_options() {
    TheoremOptions o;
    o.certified = true;
    return o;
}

void criterion_holonomy() {
    double torus = 0.0;
    for (const Eigen::VectorXd& eta :
         {Eigen::VectorXd(Eigen::VectorXd::Constant(1, 0.3)), Eigen::VectorXd(Eigen::Vector2d(-0.45, 1.7)),
          Eigen::VectorXd(Eigen::Vector3d(2.2, -1.0 / 3.0, 0.05))})
        torus = std::max(torus, torus_holonomy_error(eta, 256));
    double matrix = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) matrix = std::max(matrix, matrix_holonomy_error(3, 4, 64, seed));
    report(1, "holonomy exactness", torus <= 1e-10 && matrix <= 1e-8,
           "torus " + fmt("%.2e", torus) + " (<= 1e-10), matrix " + fmt("%.2e", matrix) + " (<= 1e-8)");
}

void criterion_hamiltonian() {
    std::vector<ModelSpec> models{ModelSpec::circle(1, 0.5), ModelSpec::circle(3, 1.5)};
    ModelSpec w23;
    w23.n = 2;
    w23.d = 1;
    w23.W.resize(1, 2);
    w23.W << 2, 3;
    w23.tau = Eigen::VectorXd::Constant(1, 1.0);
    models.push_back(w23);
    ModelSpec id;
    id.n = 2;
    id.d = 2;
    id.W = Eigen::MatrixXi::Identity(2, 2);
    id.tau = Eigen::VectorXd::Constant(2, 0.5);
    models.push_back(id);
    double worst = 0.0;
    std::uint64_t seed = 100;
    for (const auto& s : models) worst = std::max(worst, hamiltonian_identity_defect(s, 100, seed++));
    report(2, "Hamiltonian identity", worst <= 1e-10, "max defect " + fmt("%.2e", worst) + " over 4 models (<= 1e-10)");
}

void criterion_oracle_order() {
    bool pass = true;
    std::string detail;
    for (const auto& sc : kScenarios) {
        const SeparableSolution sol = separable_vortex(sc.k, sc.tau(), sc.b, sc.m, 0.0, sc.T());
        const double r1 = oracle_residual(sol, 129, 16), r2 = oracle_residual(sol, 257, 16),
                     r3 = oracle_residual(sol, 513, 16);
        const double q1 = r1 / r2, q2 = r2 / r3;
        pass = pass && q1 >= 11.0 && q1 <= 21.0 && q2 >= 11.0 && q2 <= 21.0;
        detail += sc.label() + " " + fmt("%.1f", q1) + "," + fmt("%.1f", q2) + " ";
    }
    report(3, "oracle fourth-order residual", pass, detail + "(ratios in [11, 21])");
}

void criterion_energy_identity(const std::vector<CertifiedRun>& runs) {
    bool pass = true;
    std::string detail;
    for (const auto& r : runs) {
        if (!r.certified) {
            pass = false;
            detail += r.sc.label() + " uncertified ";
            continue;
        }
        const EnergyIdentity ei =
            energy_identity_defect(r.field, r.sol.spec(), MetricSpec{r.sc.b}, 0, r.field.grid.Nt - 1);
        const double rel = std::abs(ei.energy - ei.topological_term) / std::max(ei.energy, 1e-8);
        pass = pass && rel <= 1e-4;
        detail += r.sc.label() + " " + fmt("%.1e", rel) + " ";
    }
    report(4, "energy identity", pass, detail + "(<= 1e-4)");
}

void criterion_action_identity(const std::vector<CertifiedRun>& runs) {
    bool pass = true;
    double worst = 0.0;
    std::string detail;
    for (const auto& r : runs) {
        if (!r.certified) {
            pass = false;
            detail += r.sc.label() + " uncertified ";
            continue;
        }
        const int Nt = r.field.grid.Nt;
        const MetricSpec metric{r.sc.b};
        for (auto [a, b] : {std::pair{Nt / 8, Nt / 4}, std::pair{Nt / 4, Nt / 2}, std::pair{Nt / 2, 3 * Nt / 4}}) {
            try {
                const double E = total_energy(r.field, r.sol.spec(), metric, a, b);
                const double dL = local_action(r.field.row(a), r.sol.spec()) - local_action(r.field.row(b), r.sol.spec());
                worst = std::max(worst, std::abs(E - dL) / std::max(E, 1e-8));
            } catch (const std::exception& e) {
                pass = false;
                detail += r.sc.label() + " " + e.what() + " ";
            }
        }
    }
    const ModelSpec s3 = ModelSpec::circle(3, 1.5);
    double crit = 0.0;
    for (double e : {0.0, -1.0 / 3.0, -2.0 / 3.0}) {
        const CriticalLoop c = make_critical(s3, TargetPoint::Ones(1), Eigen::VectorXd::Constant(1, e));
        crit = std::max(crit, std::abs(local_action(c.sample(s3, 128), s3)));
    }
    pass = pass && worst <= 1e-4 && crit <= 1e-10;
    report(5, "action identity", pass,
           detail + "band defect " + fmt("%.1e", worst) + " (<= 1e-4), critical action " + fmt("%.1e", crit) +
               " (<= 1e-10)");
}

void criterion_decay_relations(const std::vector<CertifiedRun>& runs) {
    bool pass = true;
    std::string detail;
    for (const auto& r : runs) {
        if (!r.certified) {
            pass = false;
            detail += r.sc.label() + " uncertified ";
            continue;
        }
        const DecayReport rep = verify_theorem(r.field, r.sol.spec(), MetricSpec{r.sc.b}, certified_options());
        if (!rep.applicable) {
            pass = false;
            detail += r.sc.label() + " " + rep.note + " ";
            continue;
        }
        std::string part = r.sc.label();
        for (const auto& c : rep.checks) {
            if (c.name != "mu_minus_du" && c.name != "F_minus_mu" && c.name != "energy_vs_du" &&
                c.name != "slopes_negative")
                continue;
            if (!c.passed) {
                pass = false;
                part += " " + c.name + "=" + fmt("%.3f", c.value) + "!";
            }
        }
        detail += part + (part == r.sc.label() ? " ok " : " ");
    }
    report(6, "decay-rate relations", pass, detail);
}

void criterion_rate(const CertifiedRun& r) {
    if (!r.certified) {
        report(7, "rate benchmark", false, "run not certified");
        return;
    }
    const DecayReport rep = verify_theorem(r.field, r.sol.spec(), MetricSpec{0.0}, certified_options());
    const double expected = linearized_rate(1, 0.5);
    report(7, "rate benchmark", rep.applicable && rep.delta >= 0.95 && rep.delta <= 1.05,
           "delta " + fmt("%.4f", rep.delta) + " (in [0.95, 1.05], linearized rate " + fmt("%.4f", expected) + ")");
}

void criterion_hessian() {
    const ModelSpec s = ModelSpec::circle(3, 1.5);
    const CriticalLoop c = make_critical(s, TargetPoint::Ones(1), Eigen::VectorXd::Constant(1, -1.0 / 3.0));
    const int N = 256;
    const HessianPackage hp = hessian_assemble(c, s, N);
    double lattice = 0.0;
    int low = 0;
    for (Eigen::Index i = 0; i < hp.eigenvalues.size(); ++i) {
        const double l = hp.eigenvalues(i);
        if (std::abs(l) > 10.0) continue;
        ++low;
        lattice = std::max(lattice, std::abs(3.0 * l - std::round(3.0 * l)));
    }
    std::vector<double> four = fourier_hessian_blocks(c, s, N / 2 - 1);
    std::vector<double> grid(hp.eigenvalues.data(), hp.eigenvalues.data() + hp.eigenvalues.size());
    auto resolved = [&](std::vector<double> v) {
        v.erase(std::remove_if(v.begin(), v.end(), [&](double x) { return std::abs(x) > N / 4.0; }), v.end());
        return v;
    };
    const auto a = resolved(four), b = resolved(grid);
    double agree = a.size() == b.size() ? 0.0 : 1e300;
    for (size_t i = 0; agree < 1e300 && i < a.size(); ++i) agree = std::max(agree, std::abs(a[i] - b[i]));
    const bool pass = lattice <= 1e-6 && agree <= 1e-8 && hp.symmetry_defect <= 1e-10;
    report(8, "Hessian spectrum", pass,
           "max dist(3 lambda, Z) " + fmt("%.3f", lattice) + " over " + std::to_string(low) +
               " eigenvalues (<= 1e-6), Fourier agreement " + fmt("%.1e", agree) + " (<= 1e-8), symmetry " +
               fmt("%.1e", hp.symmetry_defect) + " (<= 1e-10)");
}

void criterion_limit(const std::vector<CertifiedRun>& runs) {
    bool pass = true;
    std::string detail;
    for (const auto& r : runs) {
        if (!r.certified) {
            pass = false;
            detail += r.sc.label() + " uncertified ";
            continue;
        }
        try {
            const LimitExtraction lim = extract_limit(r.field, r.sol.spec(), MetricSpec{r.sc.b});
            pass = pass && lim.final_loop_residual <= 1e-6 && lim.connection_constancy <= 1e-6;
            detail += r.sc.label() + " " + fmt("%.1e", lim.final_loop_residual) + "/" +
                      fmt("%.1e", lim.connection_constancy) + " ";
        } catch (const std::exception& e) {
            pass = false;
            detail += r.sc.label() + " " + e.what() + " ";
        }
    }
    report(9, "limit criticality", pass, detail + "(loop residual/constancy <= 1e-6)");
}

void criterion_gauge() {
    const SeparableSolution sol = separable_vortex(1, 0.5, 0.0, 0, 0.0, 8.0);
    std::vector<double> energy, residual;
    for (int Nth : {16, 32, 64}) {
        const CylinderField f = to_field(sol, Grid{0.0, 8.0, 257, Nth});
        const GaugeInvarianceDefect d =
            gauge_invariance_defect(f, sol.spec(), MetricSpec{0.0}, random_based_gauge(Nth, 1, 3, 2, 0.5, 1));
        energy.push_back(d.energy);
        residual.push_back(d.residual);
    }
    bool pass = true;
    std::string detail = "energy defects";
    for (double e : energy) detail += " " + fmt("%.1e", e);
    detail += ", residual defects";
    for (double e : residual) detail += " " + fmt("%.1e", e);
    detail += ", energy ratios";
    for (size_t i = 0; i + 1 < energy.size(); ++i) {
        const double q = energy[i] / energy[i + 1];
        pass = pass && q >= 3.0 && q <= 5.0;
        detail += " " + fmt("%.3g", q);
    }
    report(10, "gauge invariance", pass, detail + " (in [3, 5])");
}

void criterion_isoperimetric(const std::vector<CertifiedRun>& coarse, const std::vector<CertifiedRun>& fine) {
    bool pass = true;
    std::string detail;
    for (size_t i = 0; i < fine.size(); ++i) {
        if (!coarse[i].certified || !fine[i].certified) {
            pass = false;
            detail += fine[i].sc.label() + " uncertified ";
            continue;
        }
        double c0[2];
        for (int j = 0; j < 2; ++j) {
            const CertifiedRun& r = j == 0 ? coarse[i] : fine[i];
            const MetricSpec metric{r.sc.b};
            const LimitExtraction lim = extract_limit(r.field, r.sol.spec(), metric);
            c0[j] = isoperimetric_constant(observables(r.field, r.sol.spec(), metric, &lim.limit), 10.0);
        }
        const double drift = std::abs(c0[1] - c0[0]) / c0[1];
        pass = pass && c0[0] <= 10.0 && c0[1] <= 10.0 && drift <= 0.2;
        detail += fine[i].sc.label() + " c0 " + fmt("%.4f", c0[0]) + "->" + fmt("%.4f", c0[1]) + " ";
    }
    report(11, "isoperimetric inequality", pass, detail + "(c0 <= 10, drift <= 20%)");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void criterion_determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "vortexlab_acceptance_sweep";
    fs::remove_all(root);
    RunConfig c = parse_config(nlohmann::json{{"scenario", "sweep"}});
    std::string csv[2];
    int codes[2];
    for (int i = 0; i < 2; ++i) {
        c.output = (root / ("run" + std::to_string(i))).string();
        c.workers = i == 0 ? 1 : 3;
        codes[i] = run(c).exit_code;
        csv[i] = slurp(fs::path(c.output) / "sweep.csv");
    }
    const bool pass = codes[0] == kExitOk && codes[1] == kExitOk && !csv[0].empty() && csv[0] == csv[1];
    report(12, "sweep determinism", pass,
           "sweep.csv " + std::to_string(csv[0].size()) + " bytes, " + (csv[0] == csv[1] ? "identical" : "differs") +
               " across repeated runs (1 and 3 workers)");
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    criterion_holonomy();
    criterion_hamiltonian();
    criterion_oracle_order();

    std::vector<CertifiedRun> coarse, fine;
    for (const auto& sc : kScenarios) {
        coarse.push_back(certified_run(sc, 513));
        fine.push_back(certified_run(sc, 1025));
    }
    criterion_energy_identity(coarse);
    criterion_action_identity(coarse);
    criterion_decay_relations(coarse);
    criterion_rate(coarse[0]);
    criterion_hessian();
    criterion_limit(coarse);
    criterion_gauge();
    criterion_isoperimetric(coarse, fine);
    criterion_determinism();

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
