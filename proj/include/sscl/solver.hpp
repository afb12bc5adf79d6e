// Pathwise Euler-Maruyama integration of
//   du + div_h f_x(u) dt = eps * laplace_h u dt + sum_k g_k(x,u) dB_k
// on a chart grid, with Rusanov face fluxes on the conservative metric form,
// per-step functional ledgers, and parallel ensemble orchestration.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>

#include "sscl/flux.hpp"
#include "sscl/noise.hpp"

namespace sscl::solver {

using geom::Manifold;
using geom::ScalarField;

struct InitialSpec {
    std::string kind = "sine";  // constant | sine | bump
    double amp = 1.0;
    double offset = 0.0;
    int k1 = 1;
    int k2 = 0;
    double phase = 0.0;
};

ScalarField sample_initial(const Manifold& man, const InitialSpec& spec);

struct SimConfig {
    std::shared_ptr<const Manifold> man;
    flux::FluxModel flux;
    noise::NoiseModel noise;
    double eps = 0.0;
    double t_final = 1.0;
    double theta = 0.4;        // CFL safety factor in (0,1]
    double dt_explicit = 0.0;  // if > 0, overrides the CFL choice (validated)
    InitialSpec u0;
    int paths = 1;
    int snapshot_count = 2;          // includes t=0 and t=T
    std::vector<int> p_norms = {2};  // ||u||_p^p tracked at snapshots; p-dissipation ledgers
    double cfl_xi_factor = 4.0;      // wave-speed bound sampled on |xi| <= factor*(1+sup|u0|)
    double guard_factor = 1e3;       // blow-up guard: max|u| <= factor*(1+sup|u0|)

    double u0_sup(const ScalarField& field) const;
};

struct StateField {
    ScalarField u;
    double t = 0.0;
};

struct PathResult {
    std::uint64_t path_id = 0;
    int steps = 0;
    double dt = 0.0;

    std::vector<StateField> snapshots;
    std::vector<int> snapshot_steps;

    // Per-snapshot functionals.
    std::vector<double> snap_mean;                  // integral of u dV
    std::map<int, std::vector<double>> snap_lp;     // p -> ||u||_p^p

    // Per-step ledgers (index n covers the step t_n -> t_{n+1}).
    std::vector<double> led_time;             // t_{n+1}
    std::vector<double> led_dissipation;      // eps * grad_energy(u_n) * dt
    std::map<int, std::vector<double>> led_p_dissipation;  // eps*int |u|^{p-2}|grad u|^2 dt
    std::vector<double> led_energy_residual;  // Ito L2-identity residual
    std::vector<double> led_ito_correction;   // sum_k ||g_k(.,u_n)||^2 dt
    std::vector<double> led_hyp_pairing;      // <u_n, hyperbolic_rhs(u_n)> dt
    std::vector<double> led_mean;             // integral of u_{n+1} dV
    // Martingale part of the L2 identity and its predictable bracket,
    // the pair the Burkholder-Davis-Gundy diagnostic compares.
    std::vector<double> led_mart_increment;   // sum_k <u_n, g_k(.,u_n)> dB_k
    std::vector<double> led_mart_bracket;     // sum_k <u_n, g_k(.,u_n)>^2 dt

    bool aborted = false;
    int abort_step = -1;
    std::string abort_msg;
};

// Observer hook: kinetic accumulators attach here so per-step, per-node data
// never has to be retained in memory.
struct StepContext {
    int step;
    double t_pre;
    double dt;
    const ScalarField& u_pre;
    const ScalarField& u_post;
    const noise::NoiseIncrementBlock* block;     // null when noise is off
    const ScalarField* grad_energy_nodal;        // dV-weighted split of int |grad u_n|^2
    const SimConfig* cfg;
};

class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_begin(const SimConfig&, std::uint64_t /*path_id*/, int /*steps*/,
                          double /*dt*/) {}
    virtual void on_step(const StepContext&) {}
    virtual void on_end(const PathResult&) {}
};

// Stable timestep: theta * min(dx/lambda_max, dx^2/(2 eps Lambda)), where
// lambda_max bounds the coordinate wave speed |f'| including metric face
// factors over the sampled xi range and Lambda bounds the Laplacian stencil
// coefficient sum.
double cfl_dt(const SimConfig& cfg);

// The lambda_max used by cfl_dt; also sets the numerical-diffusion floor.
double cfl_wave_speed(const SimConfig& cfg);

// -div_h f_x(u) with Rusanov face fluxes; exact zero on constants.
ScalarField hyperbolic_rhs(const Manifold& man, const flux::FluxModel& fm,
                           const ScalarField& u);

// eps * laplace_beltrami(u).
ScalarField viscous_rhs(const Manifold& man, double eps, const ScalarField& u);

// One Euler-Maruyama step; noise is evaluated at the pre-step state.
ScalarField em_step(const Manifold& man, const flux::FluxModel& fm,
                    const noise::NoiseModel& nm, const ScalarField& u, double dt,
                    double eps, const noise::NoiseIncrementBlock& block);

struct StepPlan {
    int steps = 0;
    double dt = 0.0;
};
StepPlan plan_steps(const SimConfig& cfg);

PathResult run_path(const SimConfig& cfg, std::uint64_t path_id,
                    std::span<StepObserver* const> observers = {});

// Lockstep integration of several variants sharing grid, noise and dt;
// consumes one increment block per step for all variants (common noise).
// pair_l1[v][n] = int |u_v - u_{v+1}| dV after n steps (entry 0 = initial).
struct CoupledResult {
    std::vector<PathResult> variants;
    std::vector<std::vector<double>> pair_l1;
};
CoupledResult run_coupled_path(std::span<const SimConfig* const> variants,
                               std::uint64_t path_id);

// Runs fn(path_id) for path_id in [0, paths) on a small worker pool.
// Worker count is capped by the SSCL_THREADS environment variable.
void parallel_paths(int paths, const std::function<void(std::uint64_t)>& fn);

struct SeriesStats {
    std::vector<double> mean;
    std::vector<double> stderr_;
};

struct EnsembleStats {
    int paths = 0;
    bool partial = false;  // some path aborted
    SeriesStats snap_mean;                    // spatial mean per snapshot
    std::map<int, SeriesStats> snap_lp;       // p -> ||u||_p^p per snapshot
    double dissipation_mean = 0.0, dissipation_stderr = 0.0;
    double residual_mean = 0.0, residual_stderr = 0.0;
};

// Runs the configured ensemble, returning all path results plus summary
// statistics (order-insensitive compensated reductions).
EnsembleStats run_ensemble(const SimConfig& cfg, std::vector<PathResult>* out_paths = nullptr);

}  // namespace sscl::solver
