// Command-line driver: profile tables, single solves, simulation snapshots,
// full verification runs, and parameter sweeps, with machine-readable output.
//
// Exit codes: 0 pass, 1 verified-run failure, 2 usage/configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "multiblow/errors.hpp"
#include "multiblow/io.hpp"
#include "multiblow/profiles.hpp"
#include "multiblow/scenarios.hpp"
#include "multiblow/selfsim.hpp"

namespace fs = std::filesystem;
using namespace multiblow;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitConfig = 2;

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    KeyValueFile kv = KeyValueFile::parse_file(path);
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must be section.key=value: " + ov);
        std::string key = ov.substr(0, eq);
        const std::string val = ov.substr(eq + 1);
        const auto dot = key.find('.');
        std::string section = "scenario";
        if (dot != std::string::npos) {
            section = key.substr(0, dot);
            key = key.substr(dot + 1);
        }
        kv.set(section, key, val);
    }
    return scenario_from_kv(kv); // rejects unknown keys
}

fs::path run_dir(const std::string& out_dir, const Scenario& sc) {
    std::string stem = sc.name.empty() ? "run" : sc.name;
    for (char& c : stem)
        if (c == '/' || c == ' ') c = '_';
    return fs::path(out_dir) / (stem + "-" + scenario_hash(sc));
}

int cmd_profile(int i, double xmin, double xmax, int n, const std::string& out) {
    if (i < 1) throw ConfigError("profile index must be >= 1");
    if (n < 2) throw ConfigError("need at least 2 points");
    if (!(xmax > xmin)) throw ConfigError("bad range: xmax must exceed xmin");
    const Profile p{i};
    CsvWriter csv({"X", "Psi", "dPsi", "d2Psi", "asym_small", "asym_large"});
    for (int k = 0; k < n; ++k) {
        const double X = xmin + (xmax - xmin) * k / (n - 1.0);
        const auto [d1, d2] = profile_derivs(p, X);
        csv.add_row({X, profile_eval(p, X), d1, d2, profile_asymptotic_small(p, X),
                     profile_asymptotic_large(p, X)});
    }
    if (out.empty())
        std::cout << csv.str();
    else
        atomic_write(out, csv.str());
    return kExitPass;
}

int cmd_solve(const Scenario& sc_in, double t_rel, int n, const std::string& out_dir) {
    Scenario sc = sc_in;
    if (sc.perturbation_enabled && sc.perturbation.amplitude == 0.0 && sc.theta > 0.0)
        sc.perturbation = calibrate_perturbation(sc, sc.theta);
    InitialData d = build_initial_data(sc);
    BlowupOptions bopt;
    bopt.scan_points = sc.grids.blowup_scan_points;
    bopt.participation_rtol = sc.tols.participation_rtol;
    bopt.cluster_tol = sc.tols.cluster_frac * std::pow(sc.delta, sc.alpha1());
    const BlowupReport rep = blowup_detect(d, bopt);
    d.blowup_time = rep.t_star;

    // t_rel in (0,1]: fraction of the distance from t0 to t_star (guarded)
    const double t_end = std::isfinite(rep.t_star) ? rep.t_star : sc.T;
    const double t = d.t0 + t_rel * (t_end - d.t0) * (1.0 - 1e-6);
    CsvWriter csv({"x", "u"});
    for (int k = 0; k < n; ++k) {
        const double x = d.support_lo + (d.support_hi - d.support_lo) * k / (n - 1.0);
        csv.add_row({x, solve_pointwise(d, t, x, sc.tols.blowup_guard_frac)});
    }
    const fs::path dir = run_dir(out_dir, sc);
    atomic_write(dir / "snapshot.csv", csv.str());
    atomic_write(dir / "blowup.json", blowup_to_json(rep));
    std::cout << dir.string() << "\n";
    return kExitPass;
}

int cmd_simulate(const Scenario& sc, const std::string& out_dir) {
    DiagnosticsReport rep = run_verification(sc);
    const fs::path dir = run_dir(out_dir, rep.scenario);
    atomic_write(dir / "ledger.csv", ledger_to_csv(rep.ledger));
    atomic_write(dir / "blowup.json", blowup_to_json(rep.blowup));

    // snapshots at the monitored s values
    InitialData d = build_initial_data(rep.scenario);
    d.blowup_time = rep.blowup.t_star;
    SelfSimFrame frame(rep.scenario, d);
    for (const auto& row : rep.ledger) {
        if (!(row.supp_hi > row.supp_lo)) continue;
        const double t = rep.scenario.T - std::exp(-row.s);
        const auto snap = to_selfsimilar(frame, t, rep.scenario.grids.snapshot_points,
                                         row.supp_lo, row.supp_hi);
        CsvWriter csv({"X", "eps", "deps"});
        for (std::size_t k = 0; k < snap.X_grid.size(); ++k)
            csv.add_row({snap.X_grid[k], snap.epsilon[k], snap.depsilon[k]});
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_s%+.4f.csv", row.s - rep.scenario.s0());
        atomic_write(dir / name, csv.str());
    }
    std::cout << dir.string() << "\n";
    return kExitPass;
}

int cmd_verify(const Scenario& sc, const std::string& out_dir) {
    const DiagnosticsReport rep = run_verification(sc);
    const fs::path dir = run_dir(out_dir, rep.scenario);
    atomic_write(dir / "verdict.json", report_to_json(rep));
    atomic_write(dir / "ledger.csv", ledger_to_csv(rep.ledger));
    std::cout << dir.string() << "\n";
    if (!rep.pass) {
        std::cerr << "verification failed:\n";
        for (const auto& tag : rep.failing_tags()) std::cerr << "  " << tag << "\n";
        return kExitRunFailure;
    }
    return kExitPass;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<std::vector<int>> parse_ilists(const std::string& spec) {
    // "1,1;1,2,1" -> {{1,1},{1,2,1}}
    std::vector<std::vector<int>> out;
    std::stringstream ss(spec);
    std::string group;
    while (std::getline(ss, group, ';')) {
        if (group.empty()) continue;
        std::vector<int> il;
        std::stringstream gs(group);
        std::string tok;
        while (std::getline(gs, tok, ',')) il.push_back(std::stoi(tok));
        out.push_back(il);
    }
    return out;
}

int cmd_sweep(const std::string& scenario_path, const std::vector<std::string>& overrides,
              const std::string& deltas_arg, const std::string& ilists_arg, bool full,
              const std::string& out_dir) {
    const Scenario base = load_scenario(scenario_path, overrides);
    KeyValueFile kv = KeyValueFile::parse_file(scenario_path);

    std::vector<double> deltas;
    if (!deltas_arg.empty())
        deltas = parse_doubles(deltas_arg);
    else if (kv.has("sweep", "deltas"))
        deltas = parse_doubles(kv.get("sweep", "deltas"));
    std::vector<std::vector<int>> ilists;
    if (!ilists_arg.empty())
        ilists = parse_ilists(ilists_arg);
    else if (kv.has("sweep", "i_lists"))
        ilists = parse_ilists(kv.get("sweep", "i_lists"));
    if (!full && kv.has("sweep", "full")) full = kv.get("sweep", "full") == "true";

    const SweepReport rep = sweep(base, deltas, ilists, full);
    const fs::path dir = run_dir(out_dir, base);
    atomic_write(dir / "sweep.json", sweep_to_json(rep));
    atomic_write(dir / "sweep_table.csv", sweep_table_csv(rep));
    std::cout << dir.string() << "\n";
    return rep.pass ? kExitPass : kExitRunFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-point self-similar blowup toolkit for the inviscid Burgers equation"};
    app.require_subcommand(1);

    // profile
    auto* prof = app.add_subcommand("profile", "tabulate a blowup profile as CSV");
    int pi = 1, pn = 101;
    double pxmin = -10.0, pxmax = 10.0;
    std::string pout;
    prof->add_option("-i,--index", pi, "profile index i >= 1");
    prof->add_option("--xmin", pxmin, "range start");
    prof->add_option("--xmax", pxmax, "range end");
    prof->add_option("-n,--points", pn, "number of samples");
    prof->add_option("-o,--out", pout, "output CSV path (stdout when omitted)");

    std::string scenario_path, out_dir = "out";
    std::vector<std::string> overrides;
    double t_rel = 0.5;
    int sn = 2001;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path, "scenario file")->required();
        cmd->add_option("--override", overrides, "section.key=value override (repeatable)");
        cmd->add_option("--out-dir", out_dir, "output directory");
    };
    auto* solve = app.add_subcommand("solve", "sample u(t,x) at one time + blowup report");
    add_common(solve);
    solve->add_option("--t-rel", t_rel, "time as a fraction of (t_star - t0)");
    solve->add_option("-n,--points", sn, "x samples");
    auto* simulate = app.add_subcommand("simulate", "run the s-loop and export snapshots");
    add_common(simulate);
    auto* verify = app.add_subcommand("verify", "full verification run with verdict");
    add_common(verify);
    auto* sw = app.add_subcommand("sweep", "run a parameter sweep and fit scaling laws");
    add_common(sw);
    std::string deltas_arg, ilists_arg;
    bool sweep_full = false;
    sw->add_option("--deltas", deltas_arg, "comma-separated delta axis");
    sw->add_option("--i-lists", ilists_arg, "semicolon-separated i-lists, e.g. '1,1;1,2,1'");
    sw->add_flag("--full", sweep_full, "full verification per sweep point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (prof->parsed()) return cmd_profile(pi, pxmin, pxmax, pn, pout);
        if (solve->parsed())
            return cmd_solve(load_scenario(scenario_path, overrides), t_rel, sn, out_dir);
        if (simulate->parsed())
            return cmd_simulate(load_scenario(scenario_path, overrides), out_dir);
        if (verify->parsed())
            return cmd_verify(load_scenario(scenario_path, overrides), out_dir);
        if (sw->parsed())
            return cmd_sweep(scenario_path, overrides, deltas_arg, ilists_arg, sweep_full,
                             out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRunFailure;
    }
    return kExitConfig;
}
