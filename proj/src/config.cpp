#include "sscl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sscl/util.hpp"

namespace sscl::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& sec, const std::string& key,
                       const std::string& what) {
    throw std::invalid_argument("config: [" + sec + "]." + key + " " + what);
}

}  // namespace

IniFile IniFile::parse(const std::string& text) {
    IniFile ini;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            ini.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || section.empty())
            throw std::invalid_argument("config: malformed entry at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
        if (ini.sections_[section].count(key))
            throw std::invalid_argument("config: duplicate key [" + section + "]." + key);
        ini.sections_[section][key] = val;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
}

bool IniFile::has(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniFile::get_str(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end() || !s->second.count(key)) fail(sec, key, "is required");
    consumed_.insert(sec + "." + key);
    return s->second.at(key);
}

double IniFile::get_double(const std::string& sec, const std::string& key) const {
    const std::string v = get_str(sec, key);
    try {
        size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        fail(sec, key, "must be a number (got '" + v + "')");
    }
}

int IniFile::get_int(const std::string& sec, const std::string& key) const {
    const std::string v = get_str(sec, key);
    try {
        size_t used = 0;
        const int d = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        fail(sec, key, "must be an integer (got '" + v + "')");
    }
}

std::uint64_t IniFile::get_u64(const std::string& sec, const std::string& key) const {
    const std::string v = get_str(sec, key);
    try {
        size_t used = 0;
        const std::uint64_t d = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        fail(sec, key, "must be a nonnegative integer (got '" + v + "')");
    }
}

std::string IniFile::get_str_or(const std::string& sec, const std::string& key,
                                const std::string& def) const {
    return has(sec, key) ? get_str(sec, key) : def;
}

double IniFile::get_double_or(const std::string& sec, const std::string& key,
                              double def) const {
    return has(sec, key) ? get_double(sec, key) : def;
}

int IniFile::get_int_or(const std::string& sec, const std::string& key, int def) const {
    return has(sec, key) ? get_int(sec, key) : def;
}

void IniFile::set(const std::string& sec, const std::string& key, const std::string& value) {
    sections_[sec][key] = value;
}

std::string IniFile::serialize() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [sec, entries] : sections_) {
        if (!first) os << "\n";
        first = false;
        os << "[" << sec << "]\n";
        for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
    }
    return os.str();
}

void IniFile::ensure_all_consumed() const {
    for (const auto& [sec, entries] : sections_)
        for (const auto& [k, v] : entries)
            if (!consumed_.count(sec + "." + k))
                throw std::invalid_argument("config: unknown key [" + sec + "]." + k);
}

namespace {

std::vector<double> parse_double_list(const std::string& s, const std::string& sec,
                                      const std::string& key) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            fail(sec, key, "has a malformed entry '" + tok + "'");
        }
    }
    if (out.empty()) fail(sec, key, "must be a nonempty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& sec,
                                const std::string& key) {
    std::vector<int> out;
    for (double d : parse_double_list(s, sec, key)) out.push_back(static_cast<int>(d));
    return out;
}

}  // namespace

RunConfig build_run_config(IniFile ini, const Overrides& ov) {
    if (ov.seed) ini.set("noise", "seed", std::to_string(*ov.seed));
    if (ov.paths) ini.set("solver", "paths", std::to_string(*ov.paths));

    RunConfig rc;
    solver::SimConfig& sim = rc.sim;

    // [manifold]
    geom::ManifoldParams mp;
    const std::string kind = ini.get_str("manifold", "kind");
    mp.kind = geom::manifold_kind_from_string(kind);
    mp.n1 = ini.get_int("manifold", "n1");
    if (mp.kind != geom::ManifoldKind::circle) mp.n2 = ini.get_int("manifold", "n2");
    if (mp.kind != geom::ManifoldKind::flat_torus) {
        mp.beta = ini.get_double("manifold", "beta");
        if (std::abs(mp.beta) >= 1.0)
            fail("manifold", "beta", "must satisfy |beta| < 1 (metric degenerates)");
    }
    sim.man = std::make_shared<geom::Manifold>(geom::build_manifold(mp));

    // [flux]
    const std::string prof = ini.get_str("flux", "profile");
    const double scale = ini.get_double("flux", "scale");
    flux::XiProfile profile;
    if (prof == "constant")
        profile = flux::make_profile_constant(scale);
    else if (prof == "linear")
        profile = flux::make_profile_linear(scale);
    else if (prof == "burgers")
        profile = flux::make_profile_burgers_linearized(scale,
                                                        ini.get_double("flux", "linearize_l"));
    else if (prof == "cubic")
        profile = flux::make_profile_cubic_linearized(scale,
                                                      ini.get_double("flux", "linearize_l"));
    else if (prof == "burgers_raw")
        profile = flux::make_profile_burgers_raw(scale);
    else
        fail("flux", "profile", "must be one of constant|linear|burgers|cubic|burgers_raw");

    flux::StreamSpec stream;
    stream.kind = ini.get_str("flux", "stream");
    stream.amp = ini.get_double("flux", "stream_amp");
    if (stream.kind != "constant") {
        stream.k1 = ini.get_int("flux", "stream_k1");
        stream.k2 = ini.get_int_or("flux", "stream_k2", 0);
        stream.phase = ini.get_double_or("flux", "stream_phase", 0.0);
    }
    sim.flux.modes.push_back(flux::make_mode(*sim.man, profile, stream));
    sim.flux.cert.c0 = ini.get_double("flux", "growth_c0");
    sim.flux.cert.r = ini.get_double("flux", "growth_r");
    sim.flux.cert.L = ini.get_double_or("flux", "linearize_l", 0.0);
    sim.flux.cert.c1 = ini.get_double("flux", "growth_c1");

    // [noise]
    const std::string nk = ini.get_str("noise", "kind");
    const std::uint64_t seed = ini.get_u64("noise", "seed");
    if (nk == "none") {
        sim.noise = noise::make_noise_none(*sim.man, seed);
    } else {
        const int k_modes = ini.get_int("noise", "modes");
        const double amp = ini.get_double("noise", "amp");
        sim.noise = noise::make_noise_by_name(*sim.man, nk, k_modes, amp, seed);
        // The declared certificate comes from the file; the conditions suite
        // checks it against the sampled behavior.
        sim.noise.d1 = ini.get_double("noise", "d1");
        sim.noise.d2 = ini.get_double("noise", "d2");
    }

    // [solver]
    sim.eps = ini.get_double("solver", "eps");
    if (sim.eps < 0.0) fail("solver", "eps", "must be >= 0");
    sim.t_final = ini.get_double("solver", "t_final");
    if (sim.t_final <= 0.0) fail("solver", "t_final", "must be > 0");
    sim.theta = ini.get_double_or("solver", "theta", 0.4);
    if (!(sim.theta > 0.0 && sim.theta <= 1.0)) fail("solver", "theta", "must be in (0,1]");
    sim.dt_explicit = ini.get_double_or("solver", "dt", 0.0);
    sim.paths = ini.get_int("solver", "paths");
    if (sim.paths < 1) fail("solver", "paths", "must be >= 1");
    sim.u0.kind = ini.get_str("solver", "u0");
    sim.u0.amp = ini.get_double("solver", "u0_amp");
    sim.u0.offset = ini.get_double_or("solver", "u0_offset", 0.0);
    sim.u0.k1 = ini.get_int_or("solver", "u0_k1", 1);
    sim.u0.k2 = ini.get_int_or("solver", "u0_k2", 0);
    sim.u0.phase = ini.get_double_or("solver", "u0_phase", 0.0);
    sim.snapshot_count = ini.get_int_or("solver", "snapshots", 9);
    if (ini.has("solver", "p_norms"))
        sim.p_norms = parse_int_list(ini.get_str("solver", "p_norms"), "solver", "p_norms");
    sim.cfl_xi_factor = ini.get_double_or("solver", "cfl_xi_factor", 4.0);
    sim.guard_factor = ini.get_double_or("solver", "guard_factor", 1e3);
    rc.snapshot_paths = ini.get_int_or("solver", "snapshot_paths", 1);

    // [kinetic]
    const double u0_sup =
        sim.u0_sup(solver::sample_initial(*sim.man, sim.u0));
    const double xi_default = 4.0 * (1.0 + u0_sup);
    const double xi_min = ini.get_double_or("kinetic", "xi_min", -xi_default);
    const double xi_max = ini.get_double_or("kinetic", "xi_max", xi_default);
    const int xi_bins = ini.get_int_or("kinetic", "xi_bins", 64);
    rc.kin.xi = kinetic::XiGrid::make(xi_min, xi_max, xi_bins);
    rc.kin.t_bins = ini.get_int_or("kinetic", "t_bins", 16);
    rc.kin.x_cells_target = ini.get_int_or("kinetic", "x_cells", 64);
    rc.kin.moment_p = ini.get_double_or("kinetic", "moment_p", 1.0);
    rc.kin_measure = ini.get_str_or("kinetic", "measure", "true") == "true";
    rc.weak_residual = ini.get_str_or("kinetic", "weak_residual", "false") == "true";
    // Smooth-bump test function menu; defaults sized from T and the data range.
    rc.psi.phi_t = {ini.get_double_or("kinetic", "psi_t_center", 0.3 * sim.t_final),
                    ini.get_double_or("kinetic", "psi_t_halfwidth", 0.4 * sim.t_final),
                    1.0};
    rc.psi.phi_xi = {ini.get_double_or("kinetic", "psi_xi_center", 0.0),
                     ini.get_double_or("kinetic", "psi_xi_halfwidth", 1.0 + u0_sup), 1.0};
    if (ini.has("kinetic", "psi_x1_halfwidth")) {
        rc.psi.phi_x_constant = false;
        rc.psi.phi_x1 = {ini.get_double_or("kinetic", "psi_x1_center", 0.5 * sim.man->grid.period1),
                         ini.get_double("kinetic", "psi_x1_halfwidth"), 1.0};
        rc.psi.phi_x2 = {ini.get_double_or("kinetic", "psi_x2_center", 0.5 * sim.man->grid.period2),
                         ini.get_double_or("kinetic", "psi_x2_halfwidth",
                                           0.25 * sim.man->grid.period2),
                         1.0};
    }

    // [experiment]
    if (ini.has("experiment", "eps_list"))
        rc.xp.eps_list =
            parse_double_list(ini.get_str("experiment", "eps_list"), "experiment", "eps_list");
    if (ini.has("experiment", "p_list"))
        rc.xp.p_list = parse_int_list(ini.get_str("experiment", "p_list"), "experiment",
                                      "p_list");
    rc.xp.levels = ini.get_int_or("experiment", "levels", 4);
    rc.xp.eps0 = ini.get_double_or("experiment", "eps0", 1e-2);
    rc.xp.ceiling = ini.get_double_or("experiment", "ceiling", 10.0);
    rc.xp.u0_b_phase = ini.get_double_or("experiment", "u0_b_phase", 0.5);
    rc.xp.floor_coeff = ini.get_double_or("experiment", "floor_coeff", 0.1);
    rc.xp.energy_c = ini.get_double_or("experiment", "energy_c", 50.0);

    ini.ensure_all_consumed();
    rc.canonical_text = ini.serialize();
    rc.config_hash = fnv1a(rc.canonical_text);
    return rc;
}

RunConfig load_run_config(const std::string& path, const Overrides& ov) {
    return build_run_config(IniFile::parse_file(path), ov);
}

}  // namespace sscl::config
