// Theorem-facing verification suites. Each suite composes solver and kinetic
// operations into pass/fail checks with Monte Carlo confidence bands and
// carries one deliberately broken configuration that must fail.
#pragma once

#include <string>

#include "sscl/config.hpp"

namespace sscl::xp {

struct CheckRecord {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    double stderr_ = -1.0;          // < 0 when not a stochastic check
    bool pass = false;
    bool negative_control = false;  // pass means "the broken setup failed as designed"
    std::string note;
};

struct SeriesBlock {
    std::string name;
    std::string header;                     // comma-separated column names
    std::vector<std::vector<double>> rows;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    int paths = 0;
    double runtime_sec = 0.0;
    std::vector<CheckRecord> checks;
    std::vector<SeriesBlock> series;

    bool pass() const;
    std::string to_text() const;  // key = value blocks
};

// E int |u1-u2| dV under common noise stays below its initial value and
// trends down; the B=0 variant is pathwise nonincreasing to 1e-12; identical
// data under decoupled noise must separate (negative control).
SuiteReport contraction_suite(const solver::SimConfig& cfg, const solver::InitialSpec& u0a,
                              const solver::InitialSpec& u0b);

// eps-uniformity of K_p = [E max_t ||u||_p^p + eps E int |u|^{p-2}|grad u|^2]
//                         / (1 + E ||u0||_p^p).
SuiteReport lp_bound_suite(const solver::SimConfig& cfg, std::span<const int> p_list,
                           std::span<const double> eps_list, double ceiling);

// Kinetic-measure accounting: mass == dissipation ledger, empty overflow,
// and E[(int |xi|^{2p} dm)^2] free of growth across decreasing eps.
SuiteReport kinetic_mass_suite(const solver::SimConfig& cfg,
                               std::span<const double> eps_list,
                               const kinetic::KineticOptions& kin);

// Cauchy trend of E ||u^{eps_j} - u^{eps_{j+1}}||_L1 under common noise for
// eps_j = eps0 2^{-j}; levels below the numerical-diffusion floor are
// reported but excluded from the trend test.
SuiteReport vanishing_viscosity_suite(const solver::SimConfig& cfg, double eps0, int levels,
                                      double floor_coeff);

// Ensemble mean of the Ito L2-identity residual: inside the 3 stderr + C dt
// band, halves (>= 1.5x) under dt halving, and blows past the band when the
// Ito correction term is removed (negative control).
SuiteReport energy_identity_suite(const solver::SimConfig& cfg, double c_band);

// Certificate checks for the flux growth conditions and the noise d1/d2
// conditions, plus three broken models that the checkers must flag.
SuiteReport conditions_suite(const solver::SimConfig& cfg);

// Dispatch by CLI suite name.
SuiteReport run_suite(const std::string& name, const config::RunConfig& rc);

}  // namespace sscl::xp
