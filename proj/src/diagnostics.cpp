#include "vortexlab/diagnostics.hpp"

#include <cmath>
#include <random>

namespace vortexlab {

namespace {

Eigen::VectorXcd random_complex(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (int j = 0; j < n; ++j) v(j) = cplx(N(rng), N(rng));
    return v;
}

Eigen::VectorXd random_real(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int j = 0; j < n; ++j) v(j) = N(rng);
    return v;
}

Eigen::MatrixXcd random_skew(int r, std::mt19937_64& rng) {
    Eigen::MatrixXcd A(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) A(i, j) = random_complex(1, rng)(0);
    return 0.5 * (A - A.adjoint());
}

}  // namespace

double hamiltonian_identity_defect(const ModelSpec& spec, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXcd z = random_complex(spec.n, rng);
        const Eigen::VectorXcd w = random_complex(spec.n, rng);
        const Eigen::VectorXd xi = random_real(spec.d, rng);
        const double lhs = omega(infinitesimal_action(spec, xi, z), w);
        const double rhs = moment_map_derivative(spec, z, w).dot(xi);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double action_difference_defect(const ModelSpec& spec, double s, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Eigen::VectorXcd z = random_complex(spec.n, rng);
        const Eigen::VectorXd xi = random_real(spec.d, rng);
        const Eigen::VectorXcd fd = (act_point(spec, s * xi, z) - z) / s;
        worst = std::max(worst, (fd - infinitesimal_action(spec, xi, z)).cwiseAbs().maxCoeff());
    }
    return worst;
}

double torus_holonomy_error(const Eigen::VectorXd& eta, int N) {
    Eigen::MatrixXd samples(N, eta.size());
    for (int j = 0; j < N; ++j) samples.row(j) = eta.transpose();
    const GroupElement hol = holonomy(samples);
    const GroupElement ref = exp_g(AlgebraElement::torus(-kTwoPi * eta));
    double worst = 0.0;
    for (Eigen::Index a = 0; a < eta.size(); ++a) {
        const double diff = std::remainder(hol.angles(a) - ref.angles(a), kTwoPi);
        worst = std::max(worst, std::abs(diff));
    }
    return worst;
}

double matrix_holonomy_error(int r, int pieces, int N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Eigen::MatrixXcd> A(pieces);
    for (auto& a : A) a = random_skew(r, rng);
    const double h = kTwoPi / pieces;
    auto eta = [&](double th) {
        const int p = std::min(pieces - 1, int(std::floor(th / h)));
        return A[p];
    };
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Identity(r, r);
    for (int p = 0; p < pieces; ++p) ref = exp_g(AlgebraElement::matrix(-h * A[p])).mat * ref;
    const HorizontalPath path = horizontal_path(eta, N);
    return (path.end().mat - ref).cwiseAbs().maxCoeff();
}

LoopGauge random_based_gauge(int N, int d, std::uint64_t seed, int max_mode, double amplitude, int winding) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(N, d);
    Eigen::VectorXd inc(d);
    for (int a = 0; a < d; ++a) {
        for (int q = 1; q <= max_mode; ++q) {
            const double c = amplitude * U(rng), s = amplitude * U(rng);
            for (int j = 0; j < N; ++j) {
                const double th = kTwoPi * j / N;
                phi(j, a) += c * (std::cos(q * th) - 1.0) + s * std::sin(q * th);
            }
        }
        for (int j = 0; j < N; ++j) phi(j, a) += winding * kTwoPi * j / N;
        inc(a) = kTwoPi * winding;
    }
    return LoopGauge::torus(phi, inc);
}

GaugeInvarianceDefect gauge_invariance_defect(const CylinderField& f, const ModelSpec& spec, const MetricSpec& metric,
                                              const LoopGauge& g) {
    const CylinderField h = act_on_field(PathGauge::constant_in_t(f.grid, g), f, spec);
    const int last = f.grid.Nt - 1;
    const double E0 = total_energy(f, spec, metric, 0, last);
    const double E1 = total_energy(h, spec, metric, 0, last);
    const double r0 = vortex_residual(f, spec, metric).l2;
    const double r1 = vortex_residual(h, spec, metric).l2;
    GaugeInvarianceDefect d;
    d.energy = std::abs(E1 - E0) / E0;
    d.residual = std::abs(r1 - r0);
    return d;
}

double oracle_residual(const SeparableSolution& sol, int Nt, int Ntheta) {
    const Grid g{sol.t0, sol.T, Nt, Ntheta};
    return vortex_residual(to_field(sol, g), sol.spec(), MetricSpec{sol.b}).sup;
}

}  // namespace vortexlab
