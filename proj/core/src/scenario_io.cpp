#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>

#include "multiblow/errors.hpp"
#include "multiblow/scenarios.hpp"

namespace multiblow {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "scenario.name", "scenario.i_list", "scenario.delta", "scenario.T",
        "scenario.kappa", "scenario.q", "scenario.theta", "scenario.s_span",
        "scenario.monitor_points", "scenario.frame", "scenario.seed",
        "perturbation.enabled", "perturbation.shape", "perturbation.amplitude",
        "perturbation.center_frac", "perturbation.width_frac",
        "grids.blowup_scan_points", "grids.norm_panels_init", "grids.norm_panels_max",
        "grids.flow_samples", "grids.snapshot_points",
        "tolerances.quadrature_rtol", "tolerances.flow_rtol",
        "tolerances.blowup_guard_frac", "tolerances.participation_rtol",
        "tolerances.simultaneity_frac", "tolerances.cluster_frac", "tolerances.leak_rtol",
        "tolerances.energy_c_max", "tolerances.tstar_rtol", "tolerances.calibration_rtol",
        "tolerances.evo_ds", "tolerances.location_tol_frac",
        "sweep.full", "sweep.deltas", "sweep.i_lists",
    };
    return keys;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError("bad numeric value for " + key + ": '" + s + "'");
    }
}

long to_long(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError("bad integer value for " + key + ": '" + s + "'");
    }
}

bool to_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + s + "'");
}

std::vector<int> parse_ilist(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(static_cast<int>(to_long(tok, "i_list")));
    }
    if (out.empty()) throw ConfigError("i_list must contain at least one index");
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Scenario scenario_from_kv(const KeyValueFile& kv) {
    for (const auto& [key, value] : kv.entries()) {
        (void)value;
        if (!known_keys().count(key)) throw ConfigError("unknown scenario key: " + key);
    }
    Scenario sc;
    auto dbl = [&](const char* s, const char* k, double& dst) {
        if (kv.has(s, k)) dst = to_double(kv.get(s, k), std::string(s) + "." + k);
    };
    auto num = [&](const char* s, const char* k, int& dst) {
        if (kv.has(s, k)) dst = static_cast<int>(to_long(kv.get(s, k), std::string(s) + "." + k));
    };

    if (kv.has("scenario", "name")) sc.name = kv.get("scenario", "name");
    if (kv.has("scenario", "i_list")) sc.i_list = parse_ilist(kv.get("scenario", "i_list"));
    dbl("scenario", "delta", sc.delta);
    dbl("scenario", "T", sc.T);
    dbl("scenario", "kappa", sc.kappa);
    num("scenario", "q", sc.q);
    dbl("scenario", "theta", sc.theta);
    dbl("scenario", "s_span", sc.s_span);
    num("scenario", "monitor_points", sc.monitor_points);
    if (kv.has("scenario", "frame")) {
        const std::string f = kv.get("scenario", "frame");
        if (f == "comoving")
            sc.frame = FrameMode::comoving;
        else if (f == "pinned")
            sc.frame = FrameMode::pinned;
        else
            throw ConfigError("scenario.frame must be 'comoving' or 'pinned'");
    }
    if (kv.has("scenario", "seed"))
        sc.seed = static_cast<std::uint64_t>(to_long(kv.get("scenario", "seed"), "seed"));

    if (kv.has("perturbation", "enabled"))
        sc.perturbation_enabled = to_bool(kv.get("perturbation", "enabled"), "enabled");
    if (kv.has("perturbation", "shape")) {
        sc.perturbation.shape = kv.get("perturbation", "shape");
        if (sc.perturbation.shape != "smooth_bump")
            throw ConfigError("unsupported perturbation shape: " + sc.perturbation.shape);
    }
    dbl("perturbation", "amplitude", sc.perturbation.amplitude);
    {
        double cf = 1.5, wf = 1.0 / 6.0;
        dbl("perturbation", "center_frac", cf);
        dbl("perturbation", "width_frac", wf);
        sc.perturbation.center = cf * sc.inner_scale();
        sc.perturbation.width = wf * sc.inner_scale();
    }

    num("grids", "blowup_scan_points", sc.grids.blowup_scan_points);
    num("grids", "norm_panels_init", sc.grids.norm_panels_init);
    num("grids", "norm_panels_max", sc.grids.norm_panels_max);
    num("grids", "flow_samples", sc.grids.flow_samples);
    num("grids", "snapshot_points", sc.grids.snapshot_points);

    dbl("tolerances", "quadrature_rtol", sc.tols.quadrature_rtol);
    dbl("tolerances", "flow_rtol", sc.tols.flow_rtol);
    dbl("tolerances", "blowup_guard_frac", sc.tols.blowup_guard_frac);
    dbl("tolerances", "participation_rtol", sc.tols.participation_rtol);
    dbl("tolerances", "simultaneity_frac", sc.tols.simultaneity_frac);
    dbl("tolerances", "cluster_frac", sc.tols.cluster_frac);
    dbl("tolerances", "leak_rtol", sc.tols.leak_rtol);
    dbl("tolerances", "energy_c_max", sc.tols.energy_c_max);
    dbl("tolerances", "tstar_rtol", sc.tols.tstar_rtol);
    dbl("tolerances", "calibration_rtol", sc.tols.calibration_rtol);
    dbl("tolerances", "evo_ds", sc.tols.evo_ds);
    dbl("tolerances", "location_tol_frac", sc.tols.location_tol_frac);
    return sc;
}

KeyValueFile scenario_to_kv(const Scenario& sc) {
    KeyValueFile kv;
    kv.set("scenario", "name", sc.name);
    {
        std::string il;
        for (std::size_t k = 0; k < sc.i_list.size(); ++k) {
            il += std::to_string(sc.i_list[k]);
            if (k + 1 < sc.i_list.size()) il += ',';
        }
        kv.set("scenario", "i_list", il);
    }
    kv.set("scenario", "delta", fmt(sc.delta));
    kv.set("scenario", "T", fmt(sc.T));
    kv.set("scenario", "kappa", fmt(sc.kappa));
    kv.set("scenario", "q", std::to_string(sc.q));
    kv.set("scenario", "theta", fmt(sc.theta));
    kv.set("scenario", "s_span", fmt(sc.s_span));
    kv.set("scenario", "monitor_points", std::to_string(sc.monitor_points));
    kv.set("scenario", "frame", sc.frame == FrameMode::comoving ? "comoving" : "pinned");
    kv.set("scenario", "seed", std::to_string(sc.seed));
    kv.set("perturbation", "enabled", sc.perturbation_enabled ? "true" : "false");
    kv.set("perturbation", "shape", sc.perturbation.shape);
    kv.set("perturbation", "amplitude", fmt(sc.perturbation.amplitude));
    kv.set("perturbation", "center_frac",
           fmt(sc.perturbation.width > 0.0 ? sc.perturbation.center / sc.inner_scale() : 1.5));
    kv.set("perturbation", "width_frac",
           fmt(sc.perturbation.width > 0.0 ? sc.perturbation.width / sc.inner_scale()
                                           : 1.0 / 6.0));
    kv.set("grids", "blowup_scan_points", std::to_string(sc.grids.blowup_scan_points));
    kv.set("grids", "norm_panels_init", std::to_string(sc.grids.norm_panels_init));
    kv.set("grids", "norm_panels_max", std::to_string(sc.grids.norm_panels_max));
    kv.set("grids", "flow_samples", std::to_string(sc.grids.flow_samples));
    kv.set("grids", "snapshot_points", std::to_string(sc.grids.snapshot_points));
    kv.set("tolerances", "quadrature_rtol", fmt(sc.tols.quadrature_rtol));
    kv.set("tolerances", "flow_rtol", fmt(sc.tols.flow_rtol));
    kv.set("tolerances", "blowup_guard_frac", fmt(sc.tols.blowup_guard_frac));
    kv.set("tolerances", "participation_rtol", fmt(sc.tols.participation_rtol));
    kv.set("tolerances", "simultaneity_frac", fmt(sc.tols.simultaneity_frac));
    kv.set("tolerances", "cluster_frac", fmt(sc.tols.cluster_frac));
    kv.set("tolerances", "leak_rtol", fmt(sc.tols.leak_rtol));
    kv.set("tolerances", "energy_c_max", fmt(sc.tols.energy_c_max));
    kv.set("tolerances", "tstar_rtol", fmt(sc.tols.tstar_rtol));
    kv.set("tolerances", "calibration_rtol", fmt(sc.tols.calibration_rtol));
    kv.set("tolerances", "evo_ds", fmt(sc.tols.evo_ds));
    kv.set("tolerances", "location_tol_frac", fmt(sc.tols.location_tol_frac));
    return kv;
}

std::string scenario_hash(const Scenario& sc) {
    return fnv1a_hex(scenario_to_kv(sc).canonical());
}

} // namespace multiblow
