// Run configuration: strict sectioned text files (unknown keys rejected,
// no silent defaults for physical constants) resolved into solver/kinetic
// configs plus experiment parameters.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "sscl/kinetic.hpp"
#include "sscl/solver.hpp"

namespace sscl::config {

// Minimal INI-style parser: "[section]" headers, "key = value" entries,
// '#' or ';' comments. Access marks keys consumed; leftovers are errors.
class IniFile {
public:
    static IniFile parse(const std::string& text);
    static IniFile parse_file(const std::string& path);

    bool has(const std::string& sec, const std::string& key) const;
    std::string get_str(const std::string& sec, const std::string& key) const;
    double get_double(const std::string& sec, const std::string& key) const;
    int get_int(const std::string& sec, const std::string& key) const;
    std::uint64_t get_u64(const std::string& sec, const std::string& key) const;

    std::string get_str_or(const std::string& sec, const std::string& key,
                           const std::string& def) const;
    double get_double_or(const std::string& sec, const std::string& key, double def) const;
    int get_int_or(const std::string& sec, const std::string& key, int def) const;

    void set(const std::string& sec, const std::string& key, const std::string& value);

    // Canonical form: sorted sections and keys, normalized spacing.
    std::string serialize() const;

    // Throws naming the first unconsumed [section].key.
    void ensure_all_consumed() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    mutable std::set<std::string> consumed_;
};

struct ExperimentParams {
    std::vector<double> eps_list{1e-2, 3e-3, 1e-3};
    std::vector<int> p_list{2, 4};
    int levels = 4;
    double eps0 = 1e-2;
    double ceiling = 10.0;
    double u0_b_phase = 0.5;          // phase offset of the paired initial datum
    double floor_coeff = 0.1;         // numerical-diffusion floor = coeff * lambda * dx
    double energy_c = 50.0;           // C in the |residual| <= 3 stderr + C dt band
};

struct RunConfig {
    solver::SimConfig sim;
    kinetic::KineticOptions kin;
    ExperimentParams xp;
    int snapshot_paths = 1;           // how many paths persist binary snapshots
    bool kin_measure = true;          // accumulate + export the kinetic measure
    bool weak_residual = false;       // evaluate the kinetic weak-form residual
    kinetic::TestFunction psi;        // bump test function for the residual
    std::string canonical_text;
    std::uint64_t config_hash = 0;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> paths;
};

RunConfig build_run_config(IniFile ini, const Overrides& ov = {});
RunConfig load_run_config(const std::string& path, const Overrides& ov = {});

}  // namespace sscl::config
