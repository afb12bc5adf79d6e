#include "sscl/solver.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sscl/util.hpp"

namespace sscl::solver {

namespace {

bool noise_is_zero(const noise::NoiseModel& nm) {
    for (const auto& m : nm.modes)
        if (m.c != 0.0) return false;
    return true;
}

}  // namespace

ScalarField sample_initial(const Manifold& man, const InitialSpec& spec) {
    const geom::ChartGrid& g = man.grid;
    ScalarField u(g.node_count());
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            const double x1 = g.x1(i), x2 = g.x2(j);
            if (spec.kind == "constant") {
                u[c] = spec.amp;
            } else if (spec.kind == "sine") {
                double v = std::sin(spec.k1 * x1 + spec.phase);
                if (g.dim == 2 && spec.k2 != 0) v *= std::cos(spec.k2 * x2);
                u[c] = spec.offset + spec.amp * v;
            } else if (spec.kind == "bump") {
                // C^inf bump centered mid-domain, half-width a quarter period.
                auto b = [](double s) {
                    return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
                };
                double v = b((x1 - 0.5 * g.period1) / (0.25 * g.period1));
                if (g.dim == 2) v *= b((x2 - 0.5 * g.period2) / (0.25 * g.period2));
                u[c] = spec.offset + spec.amp * v;
            } else {
                throw std::invalid_argument("solver: unknown initial data kind '" +
                                            spec.kind + "'");
            }
        }
    }
    return u;
}

double SimConfig::u0_sup(const ScalarField& field) const {
    double s = 0.0;
    for (double v : field) s = std::max(s, std::abs(v));
    return s;
}

namespace {

// Per-step scratch shared by the public entry points and the path engine.
struct Workspace {
    std::vector<std::vector<double>> a_tab, ap_tab;  // [mode][node]
    std::vector<double> phi1, phi2;                  // face flux densities
    ScalarField hyp;
    ScalarField lap;
    ScalarField ge_nodal;  // dV-weighted nodal split of int |grad u|^2

    void size_for(const Manifold& man, size_t modes) {
        const int n = man.grid.node_count();
        a_tab.assign(modes, std::vector<double>(n));
        ap_tab.assign(modes, std::vector<double>(n));
        phi1.resize(n);
        if (man.grid.dim == 2) phi2.resize(n);
        hyp.resize(n);
        lap.resize(n);
        ge_nodal.resize(n);
    }
};

void fill_profile_tables(const flux::FluxModel& fm, const ScalarField& u, Workspace& ws) {
    for (size_t m = 0; m < fm.modes.size(); ++m) {
        const auto& prof = fm.modes[m].profile;
        auto& a = ws.a_tab[m];
        auto& ap = ws.ap_tab[m];
        for (size_t i = 0; i < u.size(); ++i) {
            a[i] = prof.a(u[i]);
            ap[i] = prof.aprime(u[i]);
        }
    }
}

// Rusanov face fluxes on the conservative metric form; fills ws.hyp.
// The dissipation coefficient takes the endpoint wave speeds, which bounds
// the interval maximum for every built-in profile (|a'| monotone in |xi|).
void hyperbolic_core(const Manifold& man, const flux::FluxModel& fm, const ScalarField& u,
                     Workspace& ws) {
    const geom::ChartGrid& g = man.grid;
    const geom::MetricField& met = man.metric;
    fill_profile_tables(fm, u, ws);
    const size_t modes = fm.modes.size();

    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            const int e = g.idx(i + 1, j);
            double ql = 0.0, qr = 0.0, sl = 0.0, sr = 0.0;
            for (size_t m = 0; m < modes; ++m) {
                const double w = fm.modes[m].w.f1[c];
                ql += ws.a_tab[m][c] * w;
                qr += ws.a_tab[m][e] * w;
                sl += ws.ap_tab[m][c] * w;
                sr += ws.ap_tab[m][e] * w;
            }
            const double alpha = std::max(std::abs(sl), std::abs(sr));
            ws.phi1[c] = 0.5 * (ql + qr) - 0.5 * alpha * (u[e] - u[c]);

            if (g.dim == 2) {
                const int nn = g.idx(i, j + 1);
                double ql2 = 0.0, qr2 = 0.0, sl2 = 0.0, sr2 = 0.0;
                for (size_t m = 0; m < modes; ++m) {
                    const double w = fm.modes[m].w.f2[c];
                    ql2 += ws.a_tab[m][c] * w;
                    qr2 += ws.a_tab[m][nn] * w;
                    sl2 += ws.ap_tab[m][c] * w;
                    sr2 += ws.ap_tab[m][nn] * w;
                }
                const double alpha2 = std::max(std::abs(sl2), std::abs(sr2));
                ws.phi2[c] = 0.5 * (ql2 + qr2) - 0.5 * alpha2 * (u[nn] - u[c]);
            }
        }
    }

    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            double acc = (ws.phi1[c] - ws.phi1[g.idx(i - 1, j)]) / g.d1;
            if (g.dim == 2) acc += (ws.phi2[c] - ws.phi2[g.idx(i, j - 1)]) / g.d2;
            ws.hyp[c] = -acc / met.sqrt_det[c];
        }
    }
}

// Laplacian and the matching nodal gradient-energy split from one shared
// metric gradient flux evaluation.
void viscous_core(const Manifold& man, const ScalarField& u, Workspace& ws) {
    const geom::ChartGrid& g = man.grid;
    const geom::FaceField f = geom::metric_gradient_flux(man, u);
    ws.lap = geom::div_weighted(man, f);
    ws.ge_nodal.assign(g.node_count(), 0.0);
    const double a = g.cell_area();
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            const int e = g.idx(i + 1, j);
            const double tx = 0.5 * f.f1[c] * (u[e] - u[c]) / g.d1 * a;
            ws.ge_nodal[c] += tx;
            ws.ge_nodal[e] += tx;
            if (g.dim == 2) {
                const int nn = g.idx(i, j + 1);
                const double ty = 0.5 * f.f2[c] * (u[nn] - u[c]) / g.d2 * a;
                ws.ge_nodal[c] += ty;
                ws.ge_nodal[nn] += ty;
            }
        }
    }
}

}  // namespace

ScalarField hyperbolic_rhs(const Manifold& man, const flux::FluxModel& fm,
                           const ScalarField& u) {
    Workspace ws;
    ws.size_for(man, fm.modes.size());
    hyperbolic_core(man, fm, u, ws);
    return ws.hyp;
}

ScalarField viscous_rhs(const Manifold& man, double eps, const ScalarField& u) {
    if (eps == 0.0) return ScalarField(u.size(), 0.0);
    ScalarField out = geom::laplace_beltrami(man, u);
    for (double& v : out) v *= eps;
    return out;
}

ScalarField em_step(const Manifold& man, const flux::FluxModel& fm,
                    const noise::NoiseModel& nm, const ScalarField& u, double dt,
                    double eps, const noise::NoiseIncrementBlock& block) {
    Workspace ws;
    ws.size_for(man, fm.modes.size());
    hyperbolic_core(man, fm, u, ws);
    if (eps > 0.0) viscous_core(man, u, ws);

    ScalarField next(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
        double v = u[i] + dt * (ws.hyp[i] + (eps > 0.0 ? eps * ws.lap[i] : 0.0));
        for (int k = 1; k <= nm.k_count(); ++k)
            v += noise::g_eval(nm, k, static_cast<int>(i), u[i]) * block.db[k - 1];
        next[i] = v;
    }
    return next;
}

double cfl_wave_speed(const SimConfig& cfg) {
    const Manifold& man = *cfg.man;
    const geom::ChartGrid& g = man.grid;
    const geom::MetricField& met = man.metric;

    const ScalarField u0 = sample_initial(man, cfg.u0);
    const double range = cfg.cfl_xi_factor * (1.0 + cfg.u0_sup(u0));
    const int samples = 65;
    const double dmin = g.min_spacing();

    // Coordinate wave speed including the |h|^{1/2} face/node ratio.
    double lam = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double xi = -range + 2.0 * range * s / (samples - 1);
        for (int j = 0; j < g.n2; ++j) {
            for (int i = 0; i < g.n1; ++i) {
                const int c = g.idx(i, j);
                double qp1 = 0.0, qp2 = 0.0;
                for (const auto& mo : cfg.flux.modes) {
                    const double ap = mo.profile.aprime(xi);
                    qp1 += ap * mo.w.f1[c];
                    if (g.dim == 2) qp2 += ap * mo.w.f2[c];
                }
                const double s_this = met.sqrt_det[c];
                const double s_e = met.sqrt_det[g.idx(i + 1, j)];
                lam = std::max(lam, std::abs(qp1) / std::min(s_this, s_e) * (dmin / g.d1));
                if (g.dim == 2) {
                    const double s_n = met.sqrt_det[g.idx(i, j + 1)];
                    lam = std::max(lam,
                                   std::abs(qp2) / std::min(s_this, s_n) * (dmin / g.d2));
                }
            }
        }
    }
    return lam;
}

double cfl_dt(const SimConfig& cfg) {
    const Manifold& man = *cfg.man;
    const geom::ChartGrid& g = man.grid;
    const geom::MetricField& met = man.metric;
    for (double sd : met.sqrt_det)
        if (!(sd > 0.0)) throw std::runtime_error("solver: degenerate metric entry");

    const double dmin = g.min_spacing();
    const double lam = cfl_wave_speed(cfg);

    // Laplacian stencil coefficient sum.
    double wmax = 0.0;
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            const int w1 = g.idx(i - 1, j);
            double sum = (met.f1_sqrt_det[c] * met.f1_inv11[c] +
                          met.f1_sqrt_det[w1] * met.f1_inv11[w1]) /
                         (g.d1 * g.d1);
            if (g.dim == 2) {
                const int s2 = g.idx(i, j - 1);
                sum += (met.f2_sqrt_det[c] * met.f2_inv22[c] +
                        met.f2_sqrt_det[s2] * met.f2_inv22[s2]) /
                       (g.d2 * g.d2);
            }
            wmax = std::max(wmax, sum / met.sqrt_det[c]);
        }
    }
    const double lambda_stencil = 0.5 * dmin * dmin * wmax;

    const double dt_hyp = lam > 0.0 ? dmin / lam : INFINITY;
    const double dt_diff = (cfg.eps > 0.0 && lambda_stencil > 0.0)
                               ? dmin * dmin / (2.0 * cfg.eps * lambda_stencil)
                               : INFINITY;
    return cfg.theta * std::min(dt_hyp, dt_diff);
}

StepPlan plan_steps(const SimConfig& cfg) {
    if (!(cfg.t_final > 0.0)) throw std::invalid_argument("solver: t_final must be > 0");
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0))
        throw std::invalid_argument("solver: theta must be in (0,1]");
    const double bound = cfl_dt(cfg);
    double dt = cfg.dt_explicit > 0.0 ? cfg.dt_explicit : bound;
    if (cfg.dt_explicit > 0.0 && cfg.dt_explicit > bound * (1.0 + 1e-9))
        throw std::invalid_argument("solver: explicit dt exceeds the CFL bound");
    dt = std::min(dt, cfg.t_final);
    StepPlan plan;
    plan.steps = static_cast<int>(std::ceil(cfg.t_final / dt - 1e-12));
    plan.dt = cfg.t_final / plan.steps;
    return plan;
}

namespace {

std::vector<int> snapshot_steps(int steps, int count) {
    std::vector<int> out;
    count = std::max(count, 2);
    for (int s = 0; s < count; ++s) {
        const int n = static_cast<int>(std::llround(static_cast<double>(s) * steps /
                                                    (count - 1)));
        if (out.empty() || out.back() != n) out.push_back(n);
    }
    return out;
}

// One path's integration state plus ledger accumulation. Noise blocks are
// supplied from outside so coupled runs can share them.
class PathEngine {
public:
    PathEngine(const SimConfig& cfg, std::uint64_t path_id, const StepPlan& plan)
        : cfg_(cfg), man_(*cfg.man), plan_(plan) {
        ws_.size_for(man_, cfg.flux.modes.size());
        u_ = sample_initial(man_, cfg.u0);
        guard_ = cfg.guard_factor * (1.0 + cfg.u0_sup(u_));
        res_.path_id = path_id;
        res_.steps = plan.steps;
        res_.dt = plan.dt;
        res_.snapshot_steps = snapshot_steps(plan.steps, cfg.snapshot_count);
        for (int p : cfg.p_norms) {
            res_.snap_lp[p] = {};
            res_.led_p_dissipation[p] = {};
        }
        record_snapshot(0.0);
    }

    const ScalarField& state() const { return u_; }
    const ScalarField& prev_state() const { return u_prev_; }
    const ScalarField& ge_nodal() const { return ws_.ge_nodal; }
    bool aborted() const { return res_.aborted; }
    const PathResult& result() const { return res_; }
    PathResult take_result() { return std::move(res_); }

    // Advances u_ from t_n to t_{n+1}. block may be null for zero noise.
    void step(int n, const noise::NoiseIncrementBlock* block) {
        const double dt = plan_.dt;
        hyperbolic_core(man_, cfg_.flux, u_, ws_);
        const bool visc = cfg_.eps > 0.0;
        if (visc || want_ge_)
            viscous_core(man_, u_, ws_);

        const int nn = man_.grid.node_count();
        const double area = man_.grid.cell_area();
        const auto& sd = man_.metric.sqrt_det;
        const auto& nm = cfg_.noise;
        const int kk = block ? nm.k_count() : 0;

        u_prev_ = u_;
        KahanSum hyp_pair, ito_sum, u_gk_db, ge_total;
        std::vector<double> gk_pair(kk, 0.0);
        for (int i = 0; i < nn; ++i) {
            const double dv = sd[i] * area;
            hyp_pair.add(u_[i] * ws_.hyp[i] * dv);
            if (visc || want_ge_) ge_total.add(ws_.ge_nodal[i]);
            double v = u_[i] + dt * (ws_.hyp[i] + (visc ? cfg_.eps * ws_.lap[i] : 0.0));
            for (int k = 1; k <= kk; ++k) {
                const double gk = noise::g_eval(nm, k, i, u_[i]);
                v += gk * block->db[k - 1];
                ito_sum.add(gk * gk * dv);
                gk_pair[k - 1] += u_[i] * gk * dv;
            }
            u_[i] = v;
        }
        KahanSum bracket;
        for (int k = 0; k < kk; ++k) {
            u_gk_db.add(gk_pair[k] * block->db[k]);
            bracket.add(gk_pair[k] * gk_pair[k] * dt);
        }

        const double t_next = (n + 1) * dt;
        res_.led_time.push_back(t_next);
        res_.led_mart_increment.push_back(u_gk_db.value());
        res_.led_mart_bracket.push_back(bracket.value());
        res_.led_hyp_pairing.push_back(hyp_pair.value() * dt);
        res_.led_dissipation.push_back(visc ? cfg_.eps * ge_total.value() * dt : 0.0);
        res_.led_ito_correction.push_back(ito_sum.value() * dt);
        for (int p : cfg_.p_norms) {
            double pd = 0.0;
            if (visc && p > 2) {
                KahanSum s;
                for (int i = 0; i < nn; ++i)
                    s.add(std::pow(std::abs(u_prev_[i]), p - 2) * ws_.ge_nodal[i]);
                pd = cfg_.eps * s.value() * dt;
            } else if (visc && p == 2) {
                pd = cfg_.eps * ge_total.value() * dt;
            }
            res_.led_p_dissipation[p].push_back(pd);
        }

        // Ito identity residual for the squared L2 norm.
        const double l2_new = geom::inner(man_, u_, u_);
        const double l2_old = geom::inner(man_, u_prev_, u_prev_);
        const double drift_pair =
            2.0 * (hyp_pair.value() - (visc ? cfg_.eps * ge_total.value() : 0.0)) * dt;
        const double residual = (l2_new - l2_old) - drift_pair -
                                ito_sum.value() * dt - 2.0 * u_gk_db.value();
        res_.led_energy_residual.push_back(residual);
        res_.led_mean.push_back(geom::integrate(man_, u_));

        for (int i = 0; i < nn; ++i) {
            if (!std::isfinite(u_[i]) || std::abs(u_[i]) > guard_) {
                res_.aborted = true;
                res_.abort_step = n;
                res_.abort_msg = "solver: blow-up guard exceeded at step " +
                                 std::to_string(n);
                return;
            }
        }

        for (int s : res_.snapshot_steps)
            if (s == n + 1) record_snapshot(t_next);
    }

    void set_want_grad_energy(bool b) { want_ge_ = b; }

private:
    void record_snapshot(double t) {
        res_.snapshots.push_back({u_, t});
        res_.snap_mean.push_back(geom::integrate(man_, u_));
        for (int p : cfg_.p_norms) {
            KahanSum s;
            const double area = man_.grid.cell_area();
            for (size_t i = 0; i < u_.size(); ++i)
                s.add(std::pow(std::abs(u_[i]), p) * man_.metric.sqrt_det[i] * area);
            res_.snap_lp[p].push_back(s.value());
        }
    }

    const SimConfig& cfg_;
    const Manifold& man_;
    StepPlan plan_;
    Workspace ws_;
    ScalarField u_, u_prev_;
    double guard_ = 0.0;
    bool want_ge_ = false;
    PathResult res_;
};

}  // namespace

PathResult run_path(const SimConfig& cfg, std::uint64_t path_id,
                    std::span<StepObserver* const> observers) {
    const StepPlan plan = plan_steps(cfg);
    PathEngine eng(cfg, path_id, plan);
    eng.set_want_grad_energy(!observers.empty());
    const bool zero_noise = noise_is_zero(cfg.noise);
    for (auto* o : observers) o->on_begin(cfg, path_id, plan.steps, plan.dt);

    for (int n = 0; n < plan.steps && !eng.aborted(); ++n) {
        noise::NoiseIncrementBlock block;
        const noise::NoiseIncrementBlock* bp = nullptr;
        if (!zero_noise) {
            block = noise::sample_increments(cfg.noise, path_id, n, plan.dt);
            bp = &block;
        }
        eng.step(n, bp);
        if (!observers.empty() && !eng.aborted()) {
            StepContext ctx{n,
                            n * plan.dt,
                            plan.dt,
                            eng.prev_state(),
                            eng.state(),
                            bp,
                            &eng.ge_nodal(),
                            &cfg};
            for (auto* o : observers) o->on_step(ctx);
        }
    }
    PathResult res = eng.take_result();
    for (auto* o : observers) o->on_end(res);
    return res;
}

CoupledResult run_coupled_path(std::span<const SimConfig* const> variants,
                               std::uint64_t path_id) {
    if (variants.size() < 2)
        throw std::invalid_argument("solver: coupled run needs >= 2 variants");
    const SimConfig& base = *variants[0];
    for (const SimConfig* v : variants) {
        if (v->man.get() != base.man.get())
            throw std::invalid_argument("solver: coupled variants must share the manifold");
        if (v->noise.seed != base.noise.seed)
            throw std::invalid_argument("solver: coupled variants must share the noise seed");
        if (v->noise.k_count() != base.noise.k_count())
            throw std::invalid_argument("solver: coupled variants must share the mode count");
        if (v->t_final != base.t_final)
            throw std::invalid_argument("solver: coupled variants must share t_final");
    }

    // Shared timestep: the tightest of the per-variant plans.
    double dt_bound = INFINITY;
    for (const SimConfig* v : variants) dt_bound = std::min(dt_bound, plan_steps(*v).dt);
    StepPlan plan;
    plan.steps = static_cast<int>(std::ceil(base.t_final / dt_bound - 1e-12));
    plan.dt = base.t_final / plan.steps;

    std::vector<PathEngine> engines;
    engines.reserve(variants.size());
    for (const SimConfig* v : variants) engines.emplace_back(*v, path_id, plan);

    CoupledResult out;
    out.pair_l1.assign(variants.size() - 1, {});
    const Manifold& man = *base.man;
    auto record_l1 = [&]() {
        for (size_t v = 0; v + 1 < engines.size(); ++v) {
            KahanSum s;
            const auto& a = engines[v].state();
            const auto& b = engines[v + 1].state();
            const double area = man.grid.cell_area();
            for (size_t i = 0; i < a.size(); ++i)
                s.add(std::abs(a[i] - b[i]) * man.metric.sqrt_det[i] * area);
            out.pair_l1[v].push_back(s.value());
        }
    };
    record_l1();

    const bool zero_noise = noise_is_zero(base.noise);
    for (int n = 0; n < plan.steps; ++n) {
        noise::NoiseIncrementBlock block;
        const noise::NoiseIncrementBlock* bp = nullptr;
        if (!zero_noise) {
            block = noise::sample_increments(base.noise, path_id, n, plan.dt);
            bp = &block;
        }
        bool any_abort = false;
        for (auto& e : engines) {
            if (!e.aborted()) e.step(n, bp);
            any_abort = any_abort || e.aborted();
        }
        if (any_abort) break;
        record_l1();
    }

    for (auto& e : engines) out.variants.push_back(e.take_result());
    return out;
}

void parallel_paths(int paths, const std::function<void(std::uint64_t)>& fn) {
    int cap = 0;
    if (const char* env = std::getenv("SSCL_THREADS")) cap = std::atoi(env);
    unsigned hw = std::thread::hardware_concurrency();
    int workers = cap > 0 ? cap : (hw > 0 ? static_cast<int>(hw) : 1);
    workers = std::min(workers, paths);

    if (workers <= 1) {
        for (int p = 0; p < paths; ++p) fn(p);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int p = next.fetch_add(1);
                if (p >= paths) return;
                try {
                    fn(p);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

EnsembleStats run_ensemble(const SimConfig& cfg, std::vector<PathResult>* out_paths) {
    if (cfg.paths < 2) throw std::invalid_argument("solver: ensemble needs >= 2 paths");
    std::vector<PathResult> results(cfg.paths);
    parallel_paths(cfg.paths, [&](std::uint64_t p) { results[p] = run_path(cfg, p); });

    EnsembleStats st;
    st.paths = cfg.paths;
    // Statistics cover completed paths only; aborted ones mark the ensemble
    // partial and are reported through the PathResult list.
    std::vector<const PathResult*> done;
    for (const auto& r : results) {
        if (r.aborted)
            st.partial = true;
        else
            done.push_back(&r);
    }
    if (!done.empty()) {
        const size_t snaps = done[0]->snap_mean.size();
        auto series = [&](auto&& extract) {
            SeriesStats s;
            std::vector<double> vals(done.size());
            for (size_t j = 0; j < snaps; ++j) {
                for (size_t p = 0; p < done.size(); ++p) vals[p] = extract(*done[p], j);
                const MeanStderr ms = mean_stderr(vals);
                s.mean.push_back(ms.mean);
                s.stderr_.push_back(ms.stderr_);
            }
            return s;
        };
        st.snap_mean = series([](const PathResult& r, size_t j) { return r.snap_mean[j]; });
        for (int p : cfg.p_norms)
            st.snap_lp[p] =
                series([p](const PathResult& r, size_t j) { return r.snap_lp.at(p)[j]; });

        std::vector<double> totals(done.size());
        for (size_t p = 0; p < done.size(); ++p) totals[p] = ksum(done[p]->led_dissipation);
        MeanStderr md = mean_stderr(totals);
        st.dissipation_mean = md.mean;
        st.dissipation_stderr = md.stderr_;
        for (size_t p = 0; p < done.size(); ++p)
            totals[p] = ksum(done[p]->led_energy_residual);
        md = mean_stderr(totals);
        st.residual_mean = md.mean;
        st.residual_stderr = md.stderr_;
    }

    if (out_paths) *out_paths = std::move(results);
    return st;
}

}  // namespace sscl::solver
