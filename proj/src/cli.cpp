#include "sscl/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "sscl/experiments.hpp"
#include "sscl/snapshot.hpp"
#include "sscl/util.hpp"

namespace sscl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::int64_t seed_override = -1;
    int paths_override = 0;
};

config::RunConfig load_with_overrides(const CommonFlags& f) {
    config::Overrides ov;
    if (f.seed_override >= 0) ov.seed = static_cast<std::uint64_t>(f.seed_override);
    if (f.paths_override > 0) ov.paths = f.paths_override;
    return config::load_run_config(f.config_path, ov);
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cli: cannot write '" + p.string() + "'");
    os << text;
}

std::string csv_of_ledger(const std::vector<double>& t, const std::vector<double>& v) {
    std::string out = "step,t,value\n";
    for (size_t n = 0; n < v.size(); ++n)
        out += std::to_string(n) + "," + fmt_g17(t[n]) + "," + fmt_g17(v[n]) + "\n";
    return out;
}

// Verifies the declared certificates before any run starts.
void certify_or_throw(const config::RunConfig& rc) {
    const auto u0 = solver::sample_initial(*rc.sim.man, rc.sim.u0);
    const double range = rc.sim.cfl_xi_factor * (1.0 + rc.sim.u0_sup(u0));
    const flux::GrowthReport gr =
        flux::check_growth(rc.sim.flux, *rc.sim.man, -range, range, 129);
    if (!gr.pass())
        throw std::invalid_argument(
            "flux: declared growth certificate fails on samples (observed c0 " +
            fmt_g17(gr.c0_hat) + ", tail " + fmt_g17(gr.tail_hat) + ", c1 " +
            fmt_g17(gr.c1_hat) + ")");
    const double div =
        flux::max_relative_divergence(rc.sim.flux, *rc.sim.man, -range, range, 8);
    if (div > 1e-12)
        throw std::invalid_argument("flux: field is not discretely divergence-free (" +
                                    fmt_g17(div) + ")");
    const noise::NoiseReport nr =
        noise::verify_conditions(rc.sim.noise, *rc.sim.man, -range, range, 33);
    if (!nr.pass())
        throw std::invalid_argument(
            "noise: declared d1/d2 certificate fails on samples (observed d1 " +
            fmt_g17(nr.d1_hat) + ", d2 " + fmt_g17(nr.d2_hat) + ")");
}

int cmd_simulate(const CommonFlags& flags) {
    const config::RunConfig rc = load_with_overrides(flags);
    certify_or_throw(rc);

    const fs::path out(flags.out_dir);
    fs::create_directories(out / "ledgers");
    fs::create_directories(out / "series");
    fs::create_directories(out / "snapshots");

    const bool measure_on = rc.kin_measure && rc.sim.eps > 0.0;
    std::vector<solver::PathResult> results(rc.sim.paths);
    std::vector<kinetic::KineticMeasure> measures(measure_on ? rc.sim.paths : 0);
    std::vector<kinetic::WeakResidualAccumulator::Terms> residual_terms(
        rc.weak_residual ? rc.sim.paths : 0);
    std::vector<double> residuals(rc.weak_residual ? rc.sim.paths : 0);
    solver::parallel_paths(rc.sim.paths, [&](std::uint64_t p) {
        std::vector<solver::StepObserver*> obs;
        std::optional<kinetic::KineticMeasureAccumulator> macc;
        std::optional<kinetic::WeakResidualAccumulator> wacc;
        if (measure_on) obs.push_back(&macc.emplace(rc.kin));
        if (rc.weak_residual) obs.push_back(&wacc.emplace(rc.psi, rc.kin.xi));
        results[p] = solver::run_path(rc.sim, p, obs);
        if (macc) measures[p] = macc->take();
        if (wacc) {
            residual_terms[p] = wacc->terms();
            residuals[p] = wacc->residual();
        }
    });

    bool any_abort = false;
    std::vector<int> aborted;
    char name[64];
    for (int p = 0; p < rc.sim.paths; ++p) {
        const solver::PathResult& r = results[p];
        if (r.aborted) {
            any_abort = true;
            aborted.push_back(p);
        }
        auto ledger_file = [&](const char* what, const std::vector<double>& v) {
            std::snprintf(name, sizeof(name), "p%04d_%s.csv", p, what);
            write_text(out / "ledgers" / name, csv_of_ledger(r.led_time, v));
        };
        ledger_file("dissipation", r.led_dissipation);
        ledger_file("energy_residual", r.led_energy_residual);
        ledger_file("ito_correction", r.led_ito_correction);
        ledger_file("hyp_pairing", r.led_hyp_pairing);
        ledger_file("spatial_mean", r.led_mean);
        ledger_file("mart_increment", r.led_mart_increment);
        ledger_file("mart_bracket", r.led_mart_bracket);
        for (const auto& [pn, v] : r.led_p_dissipation)
            ledger_file(("p_dissipation_" + std::to_string(pn)).c_str(), v);

        std::string snap_csv = "snap,t,spatial_mean";
        for (int pn : rc.sim.p_norms) snap_csv += ",lp" + std::to_string(pn);
        snap_csv += "\n";
        for (size_t s = 0; s < r.snapshots.size(); ++s) {
            snap_csv += std::to_string(s) + "," + fmt_g17(r.snapshots[s].t) + "," +
                        fmt_g17(r.snap_mean[s]);
            for (int pn : rc.sim.p_norms) snap_csv += "," + fmt_g17(r.snap_lp.at(pn)[s]);
            snap_csv += "\n";
        }
        std::snprintf(name, sizeof(name), "p%04d_snapshots.csv", p);
        write_text(out / "series" / name, snap_csv);

        if (p < rc.snapshot_paths) {
            for (size_t s = 0; s < r.snapshots.size(); ++s) {
                io::FieldSnapshot fsnap;
                fsnap.dim = static_cast<std::uint16_t>(rc.sim.man->grid.dim);
                fsnap.n1 = static_cast<std::uint32_t>(rc.sim.man->grid.n1);
                fsnap.n2 = static_cast<std::uint32_t>(rc.sim.man->grid.n2);
                fsnap.time = r.snapshots[s].t;
                fsnap.payload = r.snapshots[s].u;
                std::snprintf(name, sizeof(name), "p%04d_s%03zu.sscl", p, s);
                io::write_snapshot((out / "snapshots" / name).string(), fsnap);
            }
        }
    }

    // Metric snapshot (|h|^{1/2} per node) in the binary field format.
    {
        io::FieldSnapshot ms;
        ms.dim = static_cast<std::uint16_t>(rc.sim.man->grid.dim);
        ms.n1 = static_cast<std::uint32_t>(rc.sim.man->grid.n1);
        ms.n2 = static_cast<std::uint32_t>(rc.sim.man->grid.n2);
        ms.time = 0.0;
        ms.payload = rc.sim.man->metric.sqrt_det;
        io::write_snapshot((out / "metric_sqrt_det.sscl").string(), ms);
    }

    double measure_total = 0.0, measure_overflow = 0.0;
    if (measure_on) {
        // Merge in path order so reruns are byte-identical.
        kinetic::KineticMeasure merged = std::move(measures[0]);
        for (int p = 1; p < rc.sim.paths; ++p) merged.merge(measures[p]);
        measure_total = merged.total_mass;
        measure_overflow = merged.overflow_mass;
        std::string csv = "t_bin,x_cell,xi_bin,mass\n";
        for (int t = 0; t < merged.t_bins; ++t)
            for (int c = 0; c < merged.x_cells; ++c)
                for (int b = 0; b < merged.xi.bins; ++b)
                    if (merged.at(t, c, b) != 0.0)
                        csv += std::to_string(t) + "," + std::to_string(c) + "," +
                               std::to_string(b) + "," + fmt_g17(merged.at(t, c, b)) + "\n";
        write_text(out / "kinetic_measure.csv", csv);
    }
    if (rc.weak_residual) {
        std::string csv = "path,residual,t1,t2,t3,t4,m_term,stoch,g2\n";
        for (int p = 0; p < rc.sim.paths; ++p) {
            const auto& t = residual_terms[p];
            csv += std::to_string(p) + "," + fmt_g17(residuals[p]) + "," + fmt_g17(t.t1) +
                   "," + fmt_g17(t.t2) + "," + fmt_g17(t.t3) + "," + fmt_g17(t.t4) + "," +
                   fmt_g17(t.m_term) + "," + fmt_g17(t.stoch) + "," + fmt_g17(t.g2) + "\n";
        }
        write_text(out / "weak_residual.csv", csv);
    }

    write_text(out / "config.resolved.ini", rc.canonical_text);

    json manifest;
    manifest["tool"] = "sscl";
    manifest["version"] = kVersion;
    manifest["format"] = 1;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(rc.config_hash));
    manifest["config_hash"] = hash;
    manifest["seed"] = rc.sim.noise.seed;
    manifest["paths"] = rc.sim.paths;
    manifest["steps"] = results[0].steps;
    manifest["dt"] = results[0].dt;
    manifest["snapshot_paths"] = rc.snapshot_paths;
    manifest["p_norms"] = rc.sim.p_norms;
    manifest["aborted_paths"] = aborted;
    if (measure_on) {
        manifest["kinetic_measure_total"] = measure_total;
        manifest["kinetic_measure_overflow"] = measure_overflow;
    }
    write_text(out / "manifest.json", manifest.dump(2) + "\n");

    if (any_abort) {
        std::cerr << "sscl: " << aborted.size() << " path(s) aborted\n";
        return 2;
    }
    return 0;
}

int cmd_verify(const std::string& suite, const CommonFlags& flags) {
    const config::RunConfig rc = load_with_overrides(flags);
    const xp::SuiteReport rep = xp::run_suite(suite, rc);

    const fs::path out(flags.out_dir);
    fs::create_directories(out);
    write_text(out / ("report_" + suite + ".txt"), rep.to_text());
    for (const auto& s : rep.series) {
        std::string csv = s.header + "\n";
        for (const auto& row : s.rows) {
            for (size_t i = 0; i < row.size(); ++i)
                csv += (i ? "," : "") + fmt_g17(row[i]);
            csv += "\n";
        }
        write_text(out / ("report_" + suite + "_" + s.name + ".csv"), csv);
    }
    std::cout << rep.to_text();
    return rep.pass() ? 0 : 3;
}

int cmd_export_plotdata(const std::string& run_dir) {
    const fs::path run(run_dir);
    if (!fs::exists(run / "manifest.json"))
        throw std::invalid_argument("cli: no manifest.json in '" + run_dir + "'");
    json manifest;
    {
        std::ifstream is(run / "manifest.json");
        is >> manifest;
    }
    const int paths = manifest.at("paths").get<int>();

    fs::create_directories(run / "plot");

    // Aggregate each ledger observable across paths: step, t, mean, stderr.
    auto read_csv_column = [](const fs::path& p, std::vector<double>& t,
                              std::vector<double>& v) {
        std::ifstream is(p);
        if (!is) throw std::runtime_error("cli: missing ledger '" + p.string() + "'");
        std::string line;
        std::getline(is, line);  // header
        t.clear();
        v.clear();
        while (std::getline(is, line)) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            t.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
            v.push_back(std::stod(line.substr(c2 + 1)));
        }
    };

    std::vector<std::string> observables = {"dissipation",    "energy_residual",
                                            "ito_correction", "hyp_pairing",
                                            "spatial_mean",   "mart_increment",
                                            "mart_bracket"};
    for (int pn : manifest.at("p_norms").get<std::vector<int>>())
        observables.push_back("p_dissipation_" + std::to_string(pn));

    char name[64];
    for (const std::string& obs : observables) {
        std::vector<std::vector<double>> cols(paths);
        std::vector<double> t;
        for (int p = 0; p < paths; ++p) {
            std::snprintf(name, sizeof(name), "p%04d_%s.csv", p, obs.c_str());
            read_csv_column(run / "ledgers" / name, t, cols[p]);
        }
        std::string csv = "step,t,mean,stderr\n";
        std::vector<double> vals(paths);
        for (size_t n = 0; n < t.size(); ++n) {
            for (int p = 0; p < paths; ++p) vals[p] = cols[p][n];
            const MeanStderr ms = mean_stderr(vals);
            csv += std::to_string(n) + "," + fmt_g17(t[n]) + "," + fmt_g17(ms.mean) + "," +
                   fmt_g17(ms.stderr_) + "\n";
        }
        write_text(run / "plot" / (obs + ".csv"), csv);
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"stochastic scalar conservation laws on compact manifolds"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string suite, run_dir;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", flags.config_path, "run configuration file")
            ->required();
        cmd->add_option("--out", flags.out_dir, "output directory");
        cmd->add_option("--seed", flags.seed_override, "master seed override");
        cmd->add_option("--paths", flags.paths_override, "path count override");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run the configured ensemble");
    add_common(sim);
    CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("suite", suite,
                    "contraction|lp_bounds|kinetic_mass|vanishing_viscosity|"
                    "energy_identity|conditions")
        ->required();
    add_common(ver);
    CLI::App* exp = app.add_subcommand("export-plotdata", "emit tidy per-observable CSVs");
    exp->add_option("run_dir", run_dir, "directory written by simulate")->required();

    std::vector<const char*> argv;
    argv.push_back("sscl");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return cmd_simulate(flags);
        if (ver->parsed()) return cmd_verify(suite, flags);
        if (exp->parsed()) return cmd_export_plotdata(run_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "sscl: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "sscl: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace sscl::cli
