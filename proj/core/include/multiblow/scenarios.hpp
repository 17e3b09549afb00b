#pragma once

#include <optional>
#include <string>
#include <vector>

#include "multiblow/characteristics.hpp"
#include "multiblow/io.hpp"
#include "multiblow/scenario.hpp"
#include "multiblow/selfsim.hpp"

namespace multiblow {

/// One verified claim: margin = bound - value (>= 0 passes) except where the
/// tag documents otherwise. Tags name the claim being checked, e.g.
/// "Prop4.2-support-lower".
struct CheckResult {
    std::string tag;
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct DiagnosticsReport {
    Scenario scenario;
    std::string scenario_hash;
    BlowupReport blowup;
    std::vector<double> h;
    std::vector<LedgerRow> ledger;
    BootstrapConstants fitted;        ///< 2x observed suprema on this run
    bool constants_were_frozen = false;
    double energy_C_fit = 0.0;
    double residual_order_ratio = 0.0; ///< residual(ds/2)/residual(ds)
    double calibrated_amplitude = 0.0;
    std::vector<CheckResult> checks;
    bool pass = false;

    std::vector<std::string> failing_tags() const;
};

/// Assembles u0 = sum of profile bumps + perturbation, with analytic
/// derivative and a support hint covering all structure. Throws ConfigError
/// when the perturbation support violates the admissible window.
InitialData build_initial_data(const Scenario& sc);

/// Bisection on the amplitude until ||eps_0||_B = theta * delta^{1/2-kappa}
/// within the calibration tolerance (the homogeneity of the norm provides
/// the bracket). Returns the calibrated spec.
PerturbationSpec calibrate_perturbation(const Scenario& sc, double theta);

/// Full pipeline: build data -> blowup detection -> snapshot loop over the
/// s grid -> all monitors -> verdict. If frozen constants are supplied the
/// decay margins use them; otherwise constants are fitted from this run.
DiagnosticsReport run_verification(const Scenario& sc,
                                   const std::optional<BootstrapConstants>& frozen = {});

struct SweepPointResult {
    Scenario scenario;
    bool errored = false;
    std::string error;
    std::vector<double> h;
    bool full_pass = true;              ///< verdict when full verification ran
    DiagnosticsReport report;           ///< populated when full verification ran
};

struct SweepReport {
    std::vector<SweepPointResult> points;
    double h2_slope = 0.0;              ///< fitted d log|h2| / d log delta
    double h2_slope_expected = 0.0;     ///< 1 / (2 i_m (2 i_m + 1))
    double h2_slope_rel_err = 0.0;
    double smallness_const_ratio = 0.0; ///< max/min of |h2|/delta^expected
    bool signs_ok = true;               ///< 0 > h_2 > ... > h_L at every point
    bool pass = false;
};

/// Runs the template scenario across the delta axis (and optional i-list
/// axis); point failures are recorded and the sweep continues. full=false
/// restricts each point to the h-level checks.
SweepReport sweep(const Scenario& base, const std::vector<double>& delta_axis,
                  const std::vector<std::vector<int>>& ilist_axis = {}, bool full = false);

/// Scenario <-> key=value file binding. Unknown keys are rejected.
Scenario scenario_from_kv(const KeyValueFile& kv);
KeyValueFile scenario_to_kv(const Scenario& sc);
std::string scenario_hash(const Scenario& sc);

/// JSON/CSV report rendering.
std::string report_to_json(const DiagnosticsReport& rep);
std::string ledger_to_csv(const std::vector<LedgerRow>& rows);
std::string blowup_to_json(const BlowupReport& rep);
std::string sweep_to_json(const SweepReport& rep);
std::string sweep_table_csv(const SweepReport& rep);

} // namespace multiblow
