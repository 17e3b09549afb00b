#include <json.hpp>

#include "multiblow/scenarios.hpp"

namespace multiblow {

namespace {

using nlohmann::json;

json constants_json(const BootstrapConstants& K) {
    return json{{"K0", K.K0}, {"K1", K.K1}, {"Ke", K.Ke}, {"Kd", K.Kd}};
}

json blowup_json(const BlowupReport& b) {
    return json{{"t_star", b.t_star},       {"points", b.points},
                {"slopes", b.slopes},       {"seeds", b.seeds},
                {"times", b.times},         {"time_spread", b.time_spread},
                {"basins_scanned", b.basins_scanned}};
}

} // namespace

std::string blowup_to_json(const BlowupReport& rep) {
    return blowup_json(rep).dump(2) + "\n";
}

std::string report_to_json(const DiagnosticsReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back(json{{"tag", c.tag},
                              {"value", c.value},
                              {"bound", c.bound},
                              {"margin", c.margin},
                              {"pass", c.pass}});
    json j{{"scenario", rep.scenario.name},
           {"hash", rep.scenario_hash},
           {"frame", rep.scenario.frame == FrameMode::comoving ? "comoving" : "pinned"},
           {"verdict", rep.pass ? "pass" : "fail"},
           {"failures", rep.failing_tags()},
           {"h", rep.h},
           {"calibrated_amplitude", rep.calibrated_amplitude},
           {"constants_fitted", constants_json(rep.fitted)},
           {"constants_were_frozen", rep.constants_were_frozen},
           {"energy_C_fit", rep.energy_C_fit},
           {"residual_order_ratio", rep.residual_order_ratio},
           {"blowup", blowup_json(rep.blowup)},
           {"checks", checks}};
    return j.dump(2) + "\n";
}

std::string ledger_to_csv(const std::vector<LedgerRow>& rows) {
    CsvWriter csv({"s", "norm_eps", "norm_Aeps", "supp_lo", "supp_hi", "margin_supp_lo",
                   "margin_supp_hi", "sup_eps_over_X", "sup_deps", "margin_norm_eps",
                   "margin_norm_Aeps", "margin_sup_eps", "margin_sup_deps", "leak_rel",
                   "transport_margin", "residual_evo", "energy_C"});
    for (const auto& r : rows)
        csv.add_row({r.s, r.norm_eps, r.norm_Aeps, r.supp_lo, r.supp_hi, r.margin_supp_lo,
                     r.margin_supp_hi, r.sup_eps_over_X, r.sup_deps, r.margin_norm_eps,
                     r.margin_norm_Aeps, r.margin_sup_eps, r.margin_sup_deps, r.leak_rel,
                     r.transport_margin, r.residual_evo, r.energy_C});
    return csv.str();
}

std::string sweep_to_json(const SweepReport& rep) {
    json points = json::array();
    for (const auto& pt : rep.points) {
        json p{{"delta", pt.scenario.delta},
               {"i_list", pt.scenario.i_list},
               {"errored", pt.errored},
               {"h", pt.h}};
        if (pt.errored) p["error"] = pt.error;
        if (!pt.report.checks.empty()) {
            p["verdict"] = pt.full_pass ? "pass" : "fail";
            p["failures"] = pt.report.failing_tags();
        }
        points.push_back(p);
    }
    json j{{"verdict", rep.pass ? "pass" : "fail"},
           {"h2_slope", rep.h2_slope},
           {"h2_slope_expected", rep.h2_slope_expected},
           {"h2_slope_rel_err", rep.h2_slope_rel_err},
           {"smallness_const_ratio", rep.smallness_const_ratio},
           {"signs_ok", rep.signs_ok},
           {"points", points}};
    return j.dump(2) + "\n";
}

std::string sweep_table_csv(const SweepReport& rep) {
    CsvWriter csv({"delta", "h2", "abs_h2", "expected_scale", "const_fit"});
    for (const auto& pt : rep.points) {
        if (pt.errored || pt.h.size() < 2) continue;
        const double expscale = std::pow(pt.scenario.delta, rep.h2_slope_expected);
        csv.add_row({pt.scenario.delta, pt.h[1], std::abs(pt.h[1]), expscale,
                     std::abs(pt.h[1]) / expscale});
    }
    return csv.str();
}

} // namespace multiblow
