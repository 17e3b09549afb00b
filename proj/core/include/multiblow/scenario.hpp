#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "multiblow/profiles.hpp"

namespace multiblow {

/// Extraction frame for the perturbation decomposition.
///   pinned:   first center fixed at x = 0 for all t.
///   comoving: all centers carry the common drift u0(0) of the first
///             characteristic, so center l moves at u0(y_{l,0}).
/// Relative center spacings are identical in both frames.
enum class FrameMode { pinned, comoving };

/// Smooth compactly supported bump  amp * exp(-1/(1-z^2)), z = (x-center)/width.
struct PerturbationSpec {
    std::string shape = "smooth_bump";
    double amplitude = 0.0; ///< calibrated unless set explicitly
    double center = 0.0;    ///< x units
    double width = 0.0;     ///< half-width, x units

    double eval(double x) const {
        const double z = (x - center) / width;
        if (!(std::abs(z) < 1.0) || amplitude == 0.0) return 0.0;
        return amplitude * std::exp(-1.0 / (1.0 - z * z));
    }
    double deriv(double x) const {
        const double z = (x - center) / width;
        if (!(std::abs(z) < 1.0) || amplitude == 0.0) return 0.0;
        const double om = 1.0 - z * z;
        return amplitude * std::exp(-1.0 / om) * (-2.0 * z / (om * om)) / width;
    }
};

struct GridSettings {
    int blowup_scan_points = 65536;
    int norm_panels_init = 64;
    int norm_panels_max = 4096;
    int flow_samples = 33;       ///< Lagrangian X0 samples across the initial support
    int snapshot_points = 400;   ///< X samples per exported snapshot
};

struct ToleranceSettings {
    double quadrature_rtol = 1e-8;
    double flow_rtol = 1e-9;
    double blowup_guard_frac = 1e-9;     ///< of (t_star - t0)
    double participation_rtol = 1e-2;    ///< basin joins the blowup report
    double simultaneity_frac = 1e-10;    ///< of delta; asserted spread bound
    double cluster_frac = 0.1;           ///< of delta^{alpha_1}
    double leak_rtol = 0.05;             ///< |eps| outside recorded support, relative
    double energy_c_max = 10.0;
    double tstar_rtol = 1e-2;            ///< |T - t_star| <= tstar_rtol * delta
    double calibration_rtol = 0.01;
    double evo_ds = 1e-4;                ///< forward-difference step for d_s eps
    double location_tol_frac = 1.0;      ///< of delta^{alpha_1}; blowup point placement
};

/// Full experiment description. y_{l,0} and the perturbation support window
/// are derived, never stored.
struct Scenario {
    std::vector<int> i_list{1, 1};
    double delta = 1e-4;
    double T = 1.0;
    double kappa = 0.05;
    int q = 10;
    double theta = 0.5;          ///< target fraction of delta^{1/2-kappa} for ||eps_0||
    double s_span = 3.0;         ///< e-folds simulated past s0
    int monitor_points = 13;     ///< s samples including both ends
    FrameMode frame = FrameMode::comoving;
    std::uint64_t seed = 12345;
    PerturbationSpec perturbation; ///< amplitude 0 => calibrate from theta (if theta>0)
    bool perturbation_enabled = true;
    GridSettings grids;
    ToleranceSettings tols;
    std::string name = "scenario";

    int L() const { return static_cast<int>(i_list.size()); }
    int i1() const { return i_list.front(); }
    int i_max() const {
        int m = 1;
        for (int v : i_list) m = std::max(m, v);
        return m;
    }
    double alpha1() const { return 1.0 + 1.0 / (2.0 * i1()); }
    double alpha(int l) const { return 1.0 + 1.0 / (2.0 * i_list[l]); } ///< l is 0-based
    double t0() const { return T - delta; }
    double s0() const { return -std::log(delta); }
    double inner_scale() const { return std::pow(delta, 1.0 / (2.0 * i1())); } ///< delta^{1/(2 i1)}
    double y0(int l) const { return 3.0 * l * inner_scale(); } ///< l is 0-based
    /// Admissible perturbation support window [4/3, 5/3] * delta^{1/(2 i1)}.
    double pert_window_lo() const { return (4.0 / 3.0) * inner_scale(); }
    double pert_window_hi() const { return (5.0 / 3.0) * inner_scale(); }
    double decay_rate() const { return 0.5 - kappa; }

    /// Fills center/width with the default placement (centered in the window).
    void place_default_perturbation() {
        perturbation.center = 1.5 * inner_scale();
        perturbation.width = inner_scale() / 6.0;
    }
};

/// Bootstrap constants; fitted on a calibration run, then frozen.
struct BootstrapConstants {
    double K0 = 0.0; ///< B-norm of eps
    double K1 = 0.0; ///< B-norm of A eps
    double Ke = 0.0; ///< sup |eps| / |X|
    double Kd = 0.0; ///< sup |dX eps|
};

} // namespace multiblow
