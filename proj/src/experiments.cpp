#include "sscl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>

#include "sscl/util.hpp"

namespace sscl::xp {

using solver::SimConfig;

namespace {

class Timer {
public:
    double sec() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

double l1_distance(const geom::Manifold& man, const geom::ScalarField& a,
                   const geom::ScalarField& b) {
    KahanSum s;
    const double area = man.grid.cell_area();
    for (size_t i = 0; i < a.size(); ++i)
        s.add(std::abs(a[i] - b[i]) * man.metric.sqrt_det[i] * area);
    return s.value();
}

CheckRecord check(std::string name, double measured, double threshold, bool pass,
                  double stderr_ = -1.0, std::string note = "") {
    CheckRecord c;
    c.name = std::move(name);
    c.measured = measured;
    c.threshold = threshold;
    c.stderr_ = stderr_;
    c.pass = pass;
    c.note = std::move(note);
    return c;
}

CheckRecord control(std::string name, double measured, double threshold, bool broken_failed,
                    std::string note = "") {
    CheckRecord c = check(std::move(name), measured, threshold, broken_failed, -1.0,
                          std::move(note));
    c.negative_control = true;
    return c;
}

}  // namespace

bool SuiteReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string SuiteReport::to_text() const {
    // Wall-clock runtime is deliberately not serialized: report text must be
    // byte-reproducible from (config, seed).
    std::ostringstream os;
    os << "suite = " << suite << "\n";
    os << "seed = " << seed << "\n";
    os << "paths = " << paths << "\n";
    os << "pass = " << (pass() ? "true" : "false") << "\n";
    for (const auto& c : checks) {
        os << "\n[check]\n";
        os << "name = " << c.name << "\n";
        os << "measured = " << fmt_g17(c.measured) << "\n";
        os << "threshold = " << fmt_g17(c.threshold) << "\n";
        if (c.stderr_ >= 0.0) os << "stderr = " << fmt_g17(c.stderr_) << "\n";
        os << "negative_control = " << (c.negative_control ? "true" : "false") << "\n";
        os << "pass = " << (c.pass ? "true" : "false") << "\n";
        if (!c.note.empty()) os << "note = " << c.note << "\n";
    }
    return os.str();
}

SuiteReport contraction_suite(const SimConfig& cfg, const solver::InitialSpec& u0a,
                              const solver::InitialSpec& u0b) {
    Timer timer;
    SuiteReport rep;
    rep.suite = "contraction";
    rep.seed = cfg.noise.seed;
    rep.paths = cfg.paths;

    SimConfig a = cfg;
    a.u0 = u0a;
    SimConfig b = cfg;
    b.u0 = u0b;
    const SimConfig* pair[2] = {&a, &b};

    // Common-noise coupled ensemble; L1 distance at snapshot steps.
    std::vector<std::vector<double>> l1;  // [path][snap]
    std::vector<int> snap_steps;
    std::vector<double> snap_times;
    l1.resize(cfg.paths);
    std::mutex meta_mutex;
    solver::parallel_paths(cfg.paths, [&](std::uint64_t p) {
        solver::CoupledResult cr = solver::run_coupled_path(pair, p);
        std::vector<double> row;
        for (int s : cr.variants[0].snapshot_steps) row.push_back(cr.pair_l1[0][s]);
        {
            std::lock_guard<std::mutex> lock(meta_mutex);
            if (snap_steps.empty()) {
                snap_steps = cr.variants[0].snapshot_steps;
                for (int s : snap_steps) snap_times.push_back(s * cr.variants[0].dt);
            }
        }
        l1[p] = std::move(row);
    });

    const size_t snaps = snap_steps.size();
    std::vector<double> mean(snaps), se(snaps);
    {
        std::vector<double> col(cfg.paths);
        for (size_t j = 0; j < snaps; ++j) {
            for (int p = 0; p < cfg.paths; ++p) col[p] = l1[p][j];
            const MeanStderr ms = mean_stderr(col);
            mean[j] = ms.mean;
            se[j] = ms.stderr_;
        }
    }

    double worst_bound = -INFINITY, worst_trend = -INFINITY;
    for (size_t j = 1; j < snaps; ++j) {
        worst_bound = std::max(worst_bound, mean[j] - (mean[0] + 3.0 * se[j]));
        worst_trend = std::max(worst_trend, mean[j] - mean[j - 1] - 3.0 * se[j]);
    }
    rep.checks.push_back(check("l1_below_initial", worst_bound, 0.0, worst_bound <= 0.0,
                               se.back(),
                               "max over snapshots of mean - (initial + 3 stderr)"));
    rep.checks.push_back(check("l1_nonincreasing_trend", worst_trend, 0.0,
                               worst_trend <= 0.0, se.back(),
                               "max snapshot-to-snapshot increase beyond 3 stderr"));

    SeriesBlock sb;
    sb.name = "contraction_l1";
    sb.header = "snap,t,mean,stderr";
    for (size_t j = 0; j < snaps; ++j)
        sb.rows.push_back({static_cast<double>(j), snap_times[j], mean[j], se[j]});
    rep.series.push_back(std::move(sb));

    // Deterministic variant: the monotone scheme contracts pathwise, step by step.
    {
        SimConfig a0 = a, b0 = b;
        a0.noise = noise::make_noise_none(*cfg.man, cfg.noise.seed);
        b0.noise = a0.noise;
        const SimConfig* pair0[2] = {&a0, &b0};
        solver::CoupledResult cr = solver::run_coupled_path(pair0, 0);
        const std::vector<double>& d = cr.pair_l1[0];
        double worst_step = -INFINITY;
        for (size_t n = 1; n < d.size(); ++n)
            worst_step = std::max(worst_step, d[n] - d[n - 1]);
        rep.checks.push_back(check("deterministic_pathwise_contraction", worst_step, 1e-12,
                                   worst_step <= 1e-12, -1.0,
                                   "max per-step increase of int |u1-u2| dV with B = 0"));
        SeriesBlock det;
        det.name = "contraction_l1_deterministic";
        det.header = "step,t,l1";
        for (size_t n = 0; n < d.size(); ++n)
            det.rows.push_back({static_cast<double>(n), n * cr.variants[0].dt, d[n]});
        rep.series.push_back(std::move(det));
    }

    // Negative control: identical initial data, decoupled Brownian paths.
    {
        SimConfig na = a, nb = a;
        nb.noise.seed = cfg.noise.seed + 1;
        const int m = std::min(cfg.paths, 16);
        std::vector<double> dist(m);
        solver::parallel_paths(m, [&](std::uint64_t p) {
            const solver::PathResult ra = solver::run_path(na, p);
            const solver::PathResult rb = solver::run_path(nb, p);
            dist[p] = l1_distance(*cfg.man, ra.snapshots.back().u, rb.snapshots.back().u);
        });
        const MeanStderr ms = mean_stderr(dist);
        rep.checks.push_back(control("control_decoupled_noise_separates", ms.mean,
                                     3.0 * ms.stderr_, ms.mean > 3.0 * ms.stderr_,
                                     "same u0, independent noise: distance must leave 0"));
    }

    rep.runtime_sec = timer.sec();
    return rep;
}

SuiteReport lp_bound_suite(const SimConfig& cfg, std::span<const int> p_list,
                           std::span<const double> eps_list, double ceiling) {
    Timer timer;
    SuiteReport rep;
    rep.suite = "lp_bounds";
    rep.seed = cfg.noise.seed;
    rep.paths = cfg.paths;

    const geom::ScalarField u0 = solver::sample_initial(*cfg.man, cfg.u0);
    SeriesBlock sb;
    sb.name = "lp_khat";
    sb.header = "eps,p,khat,stderr";

    // One dt for the whole sweep so every eps consumes identical increments.
    double dt_shared = INFINITY;
    for (double eps : eps_list) {
        SimConfig c = cfg;
        c.eps = eps;
        dt_shared = std::min(dt_shared, solver::plan_steps(c).dt);
    }

    std::map<int, std::vector<double>> khat;  // p -> per-eps values
    std::map<int, std::vector<double>> khat_se;
    for (double eps : eps_list) {
        SimConfig c = cfg;
        c.eps = eps;
        c.dt_explicit = dt_shared;
        c.p_norms.assign(p_list.begin(), p_list.end());
        std::vector<solver::PathResult> results(c.paths);
        solver::parallel_paths(c.paths,
                               [&](std::uint64_t p) { results[p] = solver::run_path(c, p); });
        for (int p : p_list) {
            const double denom = 1.0 + kinetic::young_moment(*cfg.man, u0, p);
            std::vector<double> vals(results.size());
            for (size_t i = 0; i < results.size(); ++i) {
                double maxlp = 0.0;
                for (double v : results[i].snap_lp.at(p)) maxlp = std::max(maxlp, v);
                vals[i] = maxlp + ksum(results[i].led_p_dissipation.at(p));
            }
            const MeanStderr ms = mean_stderr(vals);
            khat[p].push_back(ms.mean / denom);
            khat_se[p].push_back(ms.stderr_ / denom);
            sb.rows.push_back({eps, static_cast<double>(p), ms.mean / denom,
                               ms.stderr_ / denom});
        }
    }
    rep.series.push_back(std::move(sb));

    for (int p : p_list) {
        double lo = INFINITY, hi = -INFINITY, semax = 0.0;
        for (size_t j = 0; j < khat[p].size(); ++j) {
            lo = std::min(lo, khat[p][j]);
            hi = std::max(hi, khat[p][j]);
            semax = std::max(semax, khat_se[p][j]);
        }
        const double variation = (hi - lo) / lo;
        rep.checks.push_back(check("k" + std::to_string(p) + "_eps_uniform", variation, 0.25,
                                   variation < 0.25, semax,
                                   "relative spread of K_p across the eps sweep"));
        rep.checks.push_back(check("k" + std::to_string(p) + "_ceiling", hi, ceiling,
                                   hi < ceiling, semax));
    }

    // Negative control: noise with superlinear growth (violates the G^2
    // condition); the a priori bound genuinely fails, so the run must
    // blow past the ceiling or trip the guard.
    {
        SimConfig c = cfg;
        c.eps = eps_list[0];
        c.paths = std::min(cfg.paths, 8);
        c.p_norms.assign(p_list.begin(), p_list.end());
        noise::NoiseModel bad = noise::make_noise_none(*cfg.man, cfg.noise.seed);
        bad.modes[0].c = 5.0;
        bad.modes[0].phi = [](double xi) { return 1.0 + xi * xi; };
        bad.modes[0].desc = "superlinear (broken)";
        bad.d1 = 25.0;  // declared, but false: G^2 grows like xi^4
        bad.d2 = 25.0;
        c.noise = bad;
        bool partial = false;
        double worst = 0.0;
        std::vector<solver::PathResult> results(c.paths);
        solver::parallel_paths(c.paths,
                               [&](std::uint64_t p) { results[p] = solver::run_path(c, p); });
        for (const auto& r : results) {
            partial = partial || r.aborted;
            for (int p : p_list) {
                const double denom = 1.0 + kinetic::young_moment(*cfg.man, u0, p);
                for (double v : r.snap_lp.at(p)) worst = std::max(worst, v / denom);
            }
        }
        rep.checks.push_back(control("control_superlinear_noise_blows_up",
                                     partial ? INFINITY : worst, ceiling,
                                     partial || worst > ceiling,
                                     "g ~ 1+xi^2 must escape the K_p ceiling or abort"));
    }

    rep.runtime_sec = timer.sec();
    return rep;
}

SuiteReport kinetic_mass_suite(const SimConfig& cfg, std::span<const double> eps_list,
                               const kinetic::KineticOptions& kin) {
    Timer timer;
    SuiteReport rep;
    rep.suite = "kinetic_mass";
    rep.seed = cfg.noise.seed;
    rep.paths = cfg.paths;

    // Sweep eps in decreasing order, sharing one dt (common increments).
    std::vector<double> eps_sorted(eps_list.begin(), eps_list.end());
    std::sort(eps_sorted.rbegin(), eps_sorted.rend());
    double dt_shared = INFINITY;
    for (double eps : eps_sorted) {
        SimConfig c = cfg;
        c.eps = eps;
        dt_shared = std::min(dt_shared, solver::plan_steps(c).dt);
    }

    double worst_mass_err = 0.0, worst_overflow = 0.0;
    std::vector<double> moment_sq_mean, moment_sq_se;
    SeriesBlock sb;
    sb.name = "kinetic_mass";
    sb.header = "eps,mass_mean,moment_sq_mean,moment_sq_stderr";
    for (double eps : eps_sorted) {
        SimConfig c = cfg;
        c.eps = eps;
        c.dt_explicit = dt_shared;
        std::vector<double> mass(c.paths), momsq(c.paths), over(c.paths), err(c.paths);
        solver::parallel_paths(c.paths, [&](std::uint64_t p) {
            kinetic::KineticMeasureAccumulator acc(kin);
            solver::StepObserver* obs[1] = {&acc};
            const solver::PathResult r = solver::run_path(c, p, obs);
            const kinetic::KineticMeasure& m = acc.measure();
            const double led = ksum(r.led_dissipation);
            mass[p] = m.total_mass;
            momsq[p] = m.moment_2p * m.moment_2p;
            over[p] = m.overflow_mass;
            err[p] = std::abs(m.total_mass - led) / std::max(led, 1e-300);
        });
        for (int p = 0; p < c.paths; ++p) {
            worst_mass_err = std::max(worst_mass_err, err[p]);
            worst_overflow = std::max(worst_overflow, over[p]);
        }
        const MeanStderr mm = mean_stderr(mass);
        const MeanStderr ms = mean_stderr(momsq);
        moment_sq_mean.push_back(ms.mean);
        moment_sq_se.push_back(ms.stderr_);
        sb.rows.push_back({eps, mm.mean, ms.mean, ms.stderr_});
    }
    rep.series.push_back(std::move(sb));

    rep.checks.push_back(check("mass_matches_dissipation_ledger", worst_mass_err, 1e-12,
                               worst_mass_err <= 1e-12));
    rep.checks.push_back(check("overflow_bin_empty", worst_overflow, 0.0,
                               worst_overflow == 0.0));
    double growth = 0.0;
    for (double v : moment_sq_mean)
        growth = std::max(growth, v / std::max(moment_sq_mean.front(), 1e-300));
    rep.checks.push_back(check("second_moment_no_growth", growth, 4.0, growth <= 4.0,
                               moment_sq_se.empty() ? -1.0 : moment_sq_se.back(),
                               "E[(int |xi|^{2p} dm)^2] relative to the largest eps"));

    // Negative control: a xi grid far narrower than the data range must leak
    // mass into the overflow bucket and be flagged.
    {
        SimConfig c = cfg;
        c.eps = eps_sorted.front();
        kinetic::KineticOptions narrow = kin;
        const geom::ScalarField u0 = solver::sample_initial(*cfg.man, cfg.u0);
        const double sup = cfg.u0_sup(u0);
        narrow.xi = kinetic::XiGrid::make(-0.05 * (1.0 + sup), 0.05 * (1.0 + sup),
                                          kin.xi.bins);
        kinetic::KineticMeasureAccumulator acc(narrow);
        solver::StepObserver* obs[1] = {&acc};
        solver::run_path(c, 0, obs);
        rep.checks.push_back(control("control_narrow_grid_overflows",
                                     acc.measure().overflow_mass, 0.0,
                                     acc.measure().overflow_mass > 0.0,
                                     "deposits outside the grid must be flagged"));
    }

    rep.runtime_sec = timer.sec();
    return rep;
}

SuiteReport vanishing_viscosity_suite(const SimConfig& cfg, double eps0, int levels,
                                      double floor_coeff) {
    Timer timer;
    SuiteReport rep;
    rep.suite = "vanishing_viscosity";
    rep.seed = cfg.noise.seed;
    rep.paths = cfg.paths;
    if (levels < 3) throw std::invalid_argument("experiments: need >= 3 viscosity levels");

    std::vector<SimConfig> variants(levels, cfg);
    std::vector<const SimConfig*> ptrs;
    for (int j = 0; j < levels; ++j) {
        variants[j].eps = eps0 * std::pow(2.0, -j);
        ptrs.push_back(&variants[j]);
    }

    const double lam = solver::cfl_wave_speed(cfg);
    const double floor = floor_coeff * lam * cfg.man->grid.min_spacing();

    std::vector<std::vector<double>> d(levels - 1, std::vector<double>(cfg.paths));
    solver::parallel_paths(cfg.paths, [&](std::uint64_t p) {
        solver::CoupledResult cr = solver::run_coupled_path(ptrs, p);
        for (int j = 0; j + 1 < levels; ++j) d[j][p] = cr.pair_l1[j].back();
    });

    SeriesBlock sb;
    sb.name = "viscosity_cauchy";
    sb.header = "j,eps_j,eps_j1,d_mean,d_stderr,resolved";
    std::vector<double> dm(levels - 1), dse(levels - 1);
    std::vector<bool> resolved(levels - 1);
    for (int j = 0; j + 1 < levels; ++j) {
        const MeanStderr ms = mean_stderr(d[j]);
        dm[j] = ms.mean;
        dse[j] = ms.stderr_;
        resolved[j] = variants[j + 1].eps >= floor;
        sb.rows.push_back({static_cast<double>(j), variants[j].eps, variants[j + 1].eps,
                           dm[j], dse[j], resolved[j] ? 1.0 : 0.0});
    }
    rep.series.push_back(std::move(sb));

    double worst_ratio = 0.0;
    int tested = 0;
    for (int j = 0; j + 2 < levels; ++j) {
        if (!resolved[j] || !resolved[j + 1]) continue;
        worst_ratio = std::max(worst_ratio, dm[j + 1] / dm[j]);
        ++tested;
    }
    rep.checks.push_back(check("cauchy_ratio", worst_ratio, 0.9,
                               tested > 0 && worst_ratio <= 0.9, dse.back(),
                               "max d_{j+1}/d_j over resolved levels (floor = " +
                                   fmt_g17(floor) + ")"));

    // Negative control: independent noise per level destroys the trend.
    {
        const int m = std::min(cfg.paths, 8);
        std::vector<std::vector<double>> nd(levels - 1, std::vector<double>(m));
        std::vector<SimConfig> dec(variants);
        for (int j = 0; j < levels; ++j) dec[j].noise.seed = cfg.noise.seed + 1 + j;
        solver::parallel_paths(m, [&](std::uint64_t p) {
            std::vector<geom::ScalarField> finals(levels);
            for (int j = 0; j < levels; ++j)
                finals[j] = solver::run_path(dec[j], p).snapshots.back().u;
            for (int j = 0; j + 1 < levels; ++j)
                nd[j][p] = l1_distance(*cfg.man, finals[j], finals[j + 1]);
        });
        double worst = 0.0;
        for (int j = 0; j + 2 < levels; ++j)
            worst = std::max(worst,
                             mean_stderr(nd[j + 1]).mean / mean_stderr(nd[j]).mean);
        rep.checks.push_back(control("control_decoupled_noise_breaks_trend", worst, 0.9,
                                     worst > 0.9,
                                     "independent increments per level: ratio stays O(1)"));
    }

    rep.runtime_sec = timer.sec();
    return rep;
}

SuiteReport energy_identity_suite(const SimConfig& cfg, double c_band) {
    Timer timer;
    SuiteReport rep;
    rep.suite = "energy_identity";
    rep.seed = cfg.noise.seed;
    rep.paths = cfg.paths;

    auto residual_stats = [&](const SimConfig& c, bool drop_ito) {
        std::vector<double> totals(c.paths);
        solver::parallel_paths(c.paths, [&](std::uint64_t p) {
            const solver::PathResult r = solver::run_path(c, p);
            double v = ksum(r.led_energy_residual);
            if (drop_ito) v += ksum(r.led_ito_correction);
            totals[p] = v;
        });
        return mean_stderr(totals);
    };

    const solver::StepPlan plan = solver::plan_steps(cfg);
    const MeanStderr m1 = residual_stats(cfg, false);
    SimConfig half = cfg;
    half.dt_explicit = plan.dt / 2.0;
    const solver::StepPlan plan2 = solver::plan_steps(half);
    const MeanStderr m2 = residual_stats(half, false);

    const double band1 = 3.0 * m1.stderr_ + c_band * plan.dt;
    rep.checks.push_back(check("residual_within_band", std::abs(m1.mean), band1,
                               std::abs(m1.mean) <= band1, m1.stderr_,
                               "|mean residual| vs 3 stderr + C dt"));
    const double ratio = std::abs(m2.mean) > 0.0 ? std::abs(m1.mean) / std::abs(m2.mean)
                                                 : INFINITY;
    rep.checks.push_back(check("residual_halving", ratio, 1.5, ratio >= 1.5, m2.stderr_,
                               "|mean(dt)| / |mean(dt/2)|"));

    const MeanStderr mno = residual_stats(cfg, true);
    const double band_no = 3.0 * mno.stderr_ + c_band * plan.dt;
    rep.checks.push_back(control("control_missing_ito_term_fails", std::abs(mno.mean),
                                 band_no, std::abs(mno.mean) > band_no,
                                 "dropping sum ||g_k||^2 dt must leave the band"));

    // Burkholder-Davis-Gundy diagnostic at p = 2 (Doob): the running maximum
    // of the L2-identity martingale against four times its bracket.
    {
        std::vector<double> sup_sq(cfg.paths), brackets(cfg.paths);
        solver::parallel_paths(cfg.paths, [&](std::uint64_t p) {
            const solver::PathResult r = solver::run_path(cfg, p);
            double m = 0.0, sup = 0.0;
            for (double inc : r.led_mart_increment) {
                m += inc;
                sup = std::max(sup, m * m);
            }
            sup_sq[p] = sup;
            brackets[p] = ksum(r.led_mart_bracket);
        });
        const MeanStderr ms = mean_stderr(sup_sq);
        const MeanStderr mb = mean_stderr(brackets);
        const double bound = 4.0 * mb.mean + 3.0 * (ms.stderr_ + 4.0 * mb.stderr_);
        rep.checks.push_back(check("bdg_doob_l2", ms.mean, bound, ms.mean <= bound,
                                   ms.stderr_,
                                   "E sup_n |M_n|^2 vs 4 E <M>_T + 3 stderr"));
    }

    SeriesBlock sb;
    sb.name = "energy_residual";
    sb.header = "dt,mean,stderr";
    sb.rows.push_back({plan.dt, m1.mean, m1.stderr_});
    sb.rows.push_back({plan2.dt, m2.mean, m2.stderr_});
    rep.series.push_back(std::move(sb));

    rep.runtime_sec = timer.sec();
    return rep;
}

SuiteReport conditions_suite(const SimConfig& cfg) {
    Timer timer;
    SuiteReport rep;
    rep.suite = "conditions";
    rep.seed = cfg.noise.seed;
    rep.paths = 0;

    const geom::ScalarField u0 = solver::sample_initial(*cfg.man, cfg.u0);
    const double range = cfg.cfl_xi_factor * (1.0 + cfg.u0_sup(u0));

    const flux::GrowthReport gr = flux::check_growth(cfg.flux, *cfg.man, -range, range, 257);
    rep.checks.push_back(check("flux_growth_poly", gr.c0_hat, cfg.flux.cert.c0,
                               gr.pass_poly));
    rep.checks.push_back(
        check("flux_growth_tail", gr.tail_hat, cfg.flux.cert.c0, gr.pass_tail));
    rep.checks.push_back(
        check("flux_lipschitz", gr.c1_hat, cfg.flux.cert.c1, gr.pass_lipschitz));

    const double div = flux::max_relative_divergence(cfg.flux, *cfg.man, -range, range, 32);
    rep.checks.push_back(check("flux_divergence_free", div, 1e-12, div <= 1e-12));

    const noise::NoiseReport nr =
        noise::verify_conditions(cfg.noise, *cfg.man, -range, range, 65);
    rep.checks.push_back(check("noise_d1", nr.d1_hat, cfg.noise.d1, nr.pass_d1));
    rep.checks.push_back(check("noise_d2", nr.d2_hat, cfg.noise.d2, nr.pass_d2));
    rep.checks.push_back(check("noise_g2_lemma", nr.lemma_ratio, 1.0, nr.pass_lemma));

    // Negative control 1: raw Burgers profile violates the linear tail bound.
    {
        flux::FluxModel raw = cfg.flux;
        const double l_ctrl = std::max(cfg.flux.cert.L, 1.0);
        raw.modes[0].profile = flux::make_profile_burgers_raw(1.0);
        raw.cert.L = l_ctrl;
        const flux::GrowthReport bad =
            flux::check_growth(raw, *cfg.man, -3.0 * l_ctrl, 3.0 * l_ctrl, 257);
        rep.checks.push_back(control("control_raw_burgers_tail_fails", bad.tail_hat,
                                     raw.cert.c0, !bad.pass_tail,
                                     "|xi^2/2| > c0 |xi| beyond the threshold"));
    }

    // Negative control 2: superlinear noise violates the declared d1.
    {
        noise::NoiseModel bad = noise::make_noise_none(*cfg.man, cfg.noise.seed);
        bad.modes[0].c = 1.0;
        bad.modes[0].phi = [](double xi) { return xi * xi; };
        bad.d1 = 1.0;
        bad.d2 = 1.0;
        const noise::NoiseReport nb =
            noise::verify_conditions(bad, *cfg.man, -range, range, 65);
        rep.checks.push_back(control("control_superlinear_noise_fails_d1", nb.d1_hat,
                                     bad.d1, !nb.pass_d1));
    }

    // Negative control 3: a hand-built face field with nonzero divergence.
    {
        flux::FluxModel broken = cfg.flux;
        geom::FaceField v;
        const geom::ChartGrid& g = cfg.man->grid;
        v.f1.resize(g.node_count());
        if (g.dim == 2) v.f2.assign(g.node_count(), 0.0);
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                v.f1[g.idx(i, j)] = std::sin(g.x1(i) + 0.5 * g.d1);
        broken.modes[0].v = v;
        broken.modes[0].v_node = geom::face_to_node(*cfg.man, v);
        for (int c = 0; c < g.node_count(); ++c) {
            broken.modes[0].w.f1[c] = cfg.man->metric.f1_sqrt_det[c] * v.f1[c];
            if (g.dim == 2) broken.modes[0].w.f2[c] = 0.0;
        }
        const double bad_div =
            flux::max_relative_divergence(broken, *cfg.man, -range, range, 8);
        rep.checks.push_back(control("control_non_divfree_field_flagged", bad_div, 1e-12,
                                     bad_div > 1e-12));
    }

    rep.runtime_sec = timer.sec();
    return rep;
}

SuiteReport run_suite(const std::string& name, const config::RunConfig& rc) {
    if (name == "contraction") {
        solver::InitialSpec b = rc.sim.u0;
        b.phase += rc.xp.u0_b_phase;
        return contraction_suite(rc.sim, rc.sim.u0, b);
    }
    if (name == "lp_bounds")
        return lp_bound_suite(rc.sim, rc.xp.p_list, rc.xp.eps_list, rc.xp.ceiling);
    if (name == "kinetic_mass") return kinetic_mass_suite(rc.sim, rc.xp.eps_list, rc.kin);
    if (name == "vanishing_viscosity")
        return vanishing_viscosity_suite(rc.sim, rc.xp.eps0, rc.xp.levels, rc.xp.floor_coeff);
    if (name == "energy_identity") return energy_identity_suite(rc.sim, rc.xp.energy_c);
    if (name == "conditions") return conditions_suite(rc.sim);
    throw std::invalid_argument("experiments: unknown suite '" + name + "'");
}

}  // namespace sscl::xp
