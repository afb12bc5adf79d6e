#include <doctest.h>

#include <cmath>

#include "sscl/experiments.hpp"

using namespace sscl;
using solver::SimConfig;

namespace {

std::shared_ptr<const geom::Manifold> circle(int n) {
    geom::ManifoldParams p;
    p.kind = geom::ManifoldKind::circle;
    p.n1 = n;
    return std::make_shared<const geom::Manifold>(geom::build_manifold(p));
}

SimConfig small_cfg(int n, double noise_amp, std::uint64_t seed) {
    SimConfig cfg;
    cfg.man = circle(n);
    flux::StreamSpec s;
    s.amp = cfg.man->metric.sqrt_det[0];  // unit coordinate speed
    cfg.flux.modes.push_back(
        flux::make_mode(*cfg.man, flux::make_profile_burgers_linearized(1.0, 6.0), s));
    cfg.noise = noise_amp > 0.0 ? noise::make_noise_linear(*cfg.man, 4, noise_amp, seed)
                                : noise::make_noise_none(*cfg.man, seed);
    cfg.eps = 2e-3;
    cfg.theta = 0.4;
    cfg.t_final = 0.15;
    cfg.u0 = {"sine", 0.8, 0.0, 1, 0, 0.0};
    cfg.paths = 16;
    cfg.snapshot_count = 5;
    return cfg;
}

const xp::CheckRecord& find_check(const xp::SuiteReport& rep, const std::string& name) {
    for (const auto& c : rep.checks)
        if (c.name == name) return c;
    FAIL("missing check: ", name);
    static xp::CheckRecord dummy;
    return dummy;
}

}  // namespace

TEST_CASE("contraction_suite: identical initial data stay at zero distance") {
    SimConfig cfg = small_cfg(64, 0.4, 99);
    const xp::SuiteReport rep = xp::contraction_suite(cfg, cfg.u0, cfg.u0);
    CHECK(rep.pass());
    for (const auto& s : rep.series)
        if (s.name == "contraction_l1")
            for (const auto& row : s.rows) CHECK(row[2] == 0.0);  // mean column
}

TEST_CASE("contraction_suite: shifted data contract and the report reproduces") {
    SimConfig cfg = small_cfg(64, 0.4, 7);
    solver::InitialSpec b = cfg.u0;
    b.phase = 0.6;
    const xp::SuiteReport rep1 = xp::contraction_suite(cfg, cfg.u0, b);
    CHECK(rep1.pass());
    CHECK(find_check(rep1, "deterministic_pathwise_contraction").measured <= 1e-12);
    CHECK(find_check(rep1, "control_decoupled_noise_separates").negative_control);

    const xp::SuiteReport rep2 = xp::contraction_suite(cfg, cfg.u0, b);
    CHECK(rep1.to_text() == rep2.to_text());  // byte-reproducible report
}

TEST_CASE("lp_bound_suite: small sweep passes with the blow-up control flagged") {
    SimConfig cfg = small_cfg(64, 0.3, 11);
    cfg.u0.offset = 0.8;
    const std::vector<int> p_list = {2, 4};
    const std::vector<double> eps_list = {5e-3, 2e-3};
    const xp::SuiteReport rep = xp::lp_bound_suite(cfg, p_list, eps_list, 10.0);
    CHECK(rep.pass());
    CHECK(find_check(rep, "control_superlinear_noise_blows_up").pass);
}

TEST_CASE("kinetic_mass_suite: accounting holds and the narrow grid overflows") {
    SimConfig cfg = small_cfg(64, 0.3, 13);
    kinetic::KineticOptions kin;
    kin.xi = kinetic::XiGrid::make(-4.0, 4.0, 32);
    kin.t_bins = 4;
    kin.x_cells_target = 16;
    const std::vector<double> eps_list = {5e-3, 2e-3};
    const xp::SuiteReport rep = xp::kinetic_mass_suite(cfg, eps_list, kin);
    CHECK(rep.pass());
    CHECK(find_check(rep, "mass_matches_dissipation_ledger").measured <= 1e-12);
    CHECK(find_check(rep, "control_narrow_grid_overflows").pass);
}

TEST_CASE("vanishing_viscosity_suite: Cauchy ratios shrink under common noise") {
    SimConfig cfg = small_cfg(128, 0.2, 17);
    cfg.paths = 8;
    // Tight linearization keeps the guarded wave speed (and hence the
    // numerical-diffusion floor) low enough to resolve several levels.
    flux::StreamSpec s;
    s.amp = cfg.man->metric.sqrt_det[0];
    cfg.flux.modes[0] =
        flux::make_mode(*cfg.man, flux::make_profile_burgers_linearized(1.0, 2.0), s);
    const xp::SuiteReport rep = xp::vanishing_viscosity_suite(cfg, 1e-2, 4, 0.02);
    CHECK(rep.pass());
    CHECK(find_check(rep, "cauchy_ratio").measured <= 0.9);
    CHECK(find_check(rep, "control_decoupled_noise_breaks_trend").pass);
}

TEST_CASE("energy_identity_suite: band, halving, and the missing-Ito control") {
    SimConfig cfg = small_cfg(128, 0.05, 23);
    cfg.noise = noise::make_noise_mixed(*cfg.man, 4, 0.05, 23);
    cfg.t_final = 0.25;
    cfg.paths = 64;
    cfg.u0.amp = 1.0;
    const xp::SuiteReport rep = xp::energy_identity_suite(cfg, 0.05);
    CHECK(rep.pass());
    CHECK(find_check(rep, "residual_halving").measured >= 1.5);
    CHECK(find_check(rep, "control_missing_ito_term_fails").pass);
    // Doob/BDG at p = 2: the martingale's running max stays under 4x bracket.
    const auto& bdg = find_check(rep, "bdg_doob_l2");
    CHECK(bdg.pass);
    CHECK(bdg.measured <= bdg.threshold);
}

TEST_CASE("conditions_suite: certified config passes, all controls flagged") {
    SimConfig cfg = small_cfg(64, 0.3, 29);
    double vmax = 0.0;
    for (int c = 0; c < cfg.man->grid.node_count(); ++c)
        vmax = std::max(vmax, geom::node_norm_h(*cfg.man, cfg.flux.modes[0].v_node, c));
    cfg.flux.cert = {6.0 * vmax * (1 + 1e-9), 2.0, 6.0, 6.0 * vmax * (1 + 1e-9)};
    const xp::SuiteReport rep = xp::conditions_suite(cfg);
    CHECK(rep.pass());
    int controls = 0;
    for (const auto& c : rep.checks)
        if (c.negative_control) {
            CHECK(c.pass);
            ++controls;
        }
    CHECK(controls == 3);
}

TEST_CASE("run_suite rejects unknown names") {
    SimConfig cfg = small_cfg(64, 0.3, 1);
    config::RunConfig rc;
    rc.sim = cfg;
    CHECK_THROWS_AS(xp::run_suite("bogus", rc), std::invalid_argument);
}
