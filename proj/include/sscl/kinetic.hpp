// Kinetic-formulation diagnostics: the indicator transform rho = I(u > xi),
// the empirical parabolic kinetic measure eps |grad u|^2 delta_u, Young-measure
// moments, the weak-form residual of the parabolic kinetic identity, and the
// two-route contraction functional.
#pragma once

#include <cstdint>

#include "sscl/solver.hpp"

namespace sscl::kinetic {

using geom::Manifold;
using geom::ScalarField;

// Uniform xi bins over a working range; deposits beyond it land in an
// overflow bucket (which the "vanishes for large xi" checks require empty).
struct XiGrid {
    double lo = -1.0;
    double hi = 1.0;
    int bins = 64;

    static XiGrid make(double lo, double hi, int bins);
    double dxi() const { return (hi - lo) / bins; }
    double center(int b) const { return lo + (b + 0.5) * dxi(); }
    // Bin containing xi, or -1 when outside [lo, hi).
    int bin(double xi) const {
        if (xi < lo || xi >= hi) return -1;
        int b = static_cast<int>((xi - lo) / dxi());
        return b >= bins ? bins - 1 : b;
    }
};

// rho(x_i, xi_b) = I(u_i > xi_b) at bin centers; row-major [node][bin].
std::vector<std::uint8_t> kinetic_function(const ScalarField& u, const XiGrid& xi);

// Binned empirical kinetic measure over (time-bin, x-cell, xi-bin).
struct KineticMeasure {
    XiGrid xi;
    int t_bins = 1;
    int x_cells = 1;
    std::vector<double> mass;  // [t][cell][bin]
    double overflow_mass = 0.0;
    double total_mass = 0.0;
    double moment_2p = 0.0;  // int |xi|^{2p} dm (xi snapped to bin centers)

    double& at(int t, int cell, int bin) { return mass[(t * x_cells + cell) * xi.bins + bin]; }
    double at(int t, int cell, int bin) const {
        return mass[(t * x_cells + cell) * xi.bins + bin];
    }
    void merge(const KineticMeasure& other);
};

struct KineticOptions {
    XiGrid xi;
    int t_bins = 16;
    int x_cells_target = 64;  // histogram cells; deposits are conserved exactly
    double moment_p = 1.0;    // records int |xi|^{2p} dm alongside the histogram
};

// Step observer that deposits eps |grad u|^2 dV dt into the xi-bin holding
// the pre-step value u(t_n, x). Total mass matches the dissipation ledger
// exactly because both sum the same nodal terms.
class KineticMeasureAccumulator : public solver::StepObserver {
public:
    explicit KineticMeasureAccumulator(KineticOptions opt) : opt_(opt) {}
    void on_begin(const solver::SimConfig& cfg, std::uint64_t path_id, int steps,
                  double dt) override;
    void on_step(const solver::StepContext& ctx) override;
    const KineticMeasure& measure() const { return m_; }
    KineticMeasure take() { return std::move(m_); }

private:
    KineticOptions opt_;
    KineticMeasure m_;
    double t_final_ = 1.0;
    int cx_ = 1, cy_ = 1;  // x-coarsening factors
    const Manifold* man_ = nullptr;
};

// int |u|^p dV (exact Dirac evaluation of the Young-measure moment).
double young_moment(const Manifold& man, const ScalarField& u, double p);

// Same moment through the binned kinetic function (testing the binning error).
double young_moment_binned(const Manifold& man, const ScalarField& u, double p,
                           const XiGrid& xi);

// Smooth compactly supported bump: value and derivative.
struct Bump {
    double center = 0.0;
    double halfwidth = 1.0;
    double amp = 1.0;
    double value(double x) const;
    double deriv(double x) const;
};

// Separable test function psi = phi_t(t) phi_x(x) phi_xi(xi) with phi_t(T)=0.
// phi_x is a product of per-axis periodic bumps (or constant 1).
struct TestFunction {
    Bump phi_t;                 // support must lie inside [0, T)
    bool phi_x_constant = true;
    Bump phi_x1, phi_x2;        // used when not constant (periodic evaluation)
    Bump phi_xi;
};

// Accumulates every term of the parabolic kinetic identity along a path:
//   T1 rho dtpsi + T2 rho0 psi(0) + T3 rho (f', grad psi)_h + T4 eps rho lap psi
//     - m(dxi psi) + sum_k int g_k psi(.,u) dB_k + 1/2 int dxi psi G^2(.,u) dt
// Deterministic time terms use midpoint quadrature of the test factor with
// the state frozen at the left endpoint; the stochastic term uses the
// Ito (left-endpoint) rule with the recorded increments; the measure term
// snaps deposits to xi-bin centers.
class WeakResidualAccumulator : public solver::StepObserver {
public:
    WeakResidualAccumulator(TestFunction psi, XiGrid xi);
    void on_begin(const solver::SimConfig& cfg, std::uint64_t path_id, int steps,
                  double dt) override;
    void on_step(const solver::StepContext& ctx) override;
    double residual() const;

    // Individual terms, mainly for the support tests.
    struct Terms {
        double t1 = 0, t2 = 0, t3 = 0, t4 = 0;
        double m_term = 0, stoch = 0, g2 = 0;
    };
    Terms terms() const { return terms_; }

private:
    double xi_prefix(double u, const std::vector<double>& table) const;

    TestFunction psi_;
    XiGrid xi_;
    Terms terms_;
    const Manifold* man_ = nullptr;
    const solver::SimConfig* cfg_ = nullptr;
    double t_final_ = 1.0;
    // Cached spatial factors.
    ScalarField phix_;          // phi_x at nodes
    ScalarField lap_phix_;      // discrete laplace_beltrami of phi_x
    geom::NodeVectorField grad_phix_;  // analytic d_i phi_x (covariant components)
    // Prefix tables over xi bins: cum[b] = sum_{b' <= b} w(xi_{b'}) dxi.
    std::vector<double> cum_phixi_;
    std::vector<std::vector<double>> cum_ap_phixi_;  // per flux mode
};

// Both evaluations of int |u1 - u2| dV: direct, and 4 int (rbar - rbar^2) dxi dV
// with rbar = (rho1 + rho2)/2 sampled at bin centers.
struct ContractionValues {
    double direct = 0.0;
    double kinetic = 0.0;
};
ContractionValues contraction_functional(const Manifold& man, const ScalarField& u1,
                                         const ScalarField& u2, const XiGrid& xi);

}  // namespace sscl::kinetic
