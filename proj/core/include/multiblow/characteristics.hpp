#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "multiblow/profiles.hpp"

namespace multiblow {

/// Initial data u(t0, x) = u0(x) with analytic derivative and a hint interval
/// containing all non-quiescent structure. blowup_time is filled in once
/// blowup_detect has run; solve_pointwise uses it to enforce the caustic guard.
struct InitialData {
    double t0 = 0.0;
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    double support_lo = -1.0;
    double support_hi = 1.0;
    double blowup_time = std::numeric_limits<double>::infinity();
};

/// First-crossing report. times[k] is the k-th basin's own crossing time
/// t0 + 1/(-m_k); points holds only the basins participating in the first
/// blowup (within the participation tolerance of t_star).
struct BlowupReport {
    double t_star = std::numeric_limits<double>::infinity();
    std::vector<double> points;
    std::vector<double> slopes;      ///< u0' at each participating basin minimum
    std::vector<double> seeds;       ///< Lagrangian labels xi* of the points
    std::vector<double> times;       ///< per participating basin crossing time
    double time_spread = 0.0;        ///< max - min over participating basin times
    int basins_scanned = 0;
};

struct BlowupOptions {
    int scan_points = 65536;
    /// basin joins the report when (t_basin - t_first) <= participation_rtol * (t_first - t0)
    double participation_rtol = 1e-2;
    /// reported points closer than this are merged
    double cluster_tol = 0.0;
};

/// Constant-drift center trajectory y_l(t) = y0 + (delta - (T - t)) h.
struct CenterTrajectory {
    int l = 1;
    double y0 = 0.0;
    double h = 0.0;
    double T = 1.0;
    double delta = 1e-4;

    /// Throws DomainError for t >= T.
    double at(double t) const;
};

/// u(t,x): inverts x = xi + (t-t0) u0(xi) (unique root before blowup) and
/// returns u0(xi). guard_frac refuses t past blowup_time - guard_frac*(t*-t0).
double solve_pointwise(const InitialData& d, double t, double x, double guard_frac = 1e-9);

/// Same inversion, returning the Lagrangian label xi.
double characteristic_label(const InitialData& d, double t, double x, double guard_frac = 1e-9);

/// dx u(t,x) = u0'(xi) / (1 + (t-t0) u0'(xi)).
double solve_slope(const InitialData& d, double t, double x, double guard_frac = 1e-9);

/// Finds the negative-slope basins of u0' on a scan grid over the support
/// hint, refines each minimum, and reports the first crossing. Nondecreasing
/// u0 yields t_star = +inf and no points.
BlowupReport blowup_detect(const InitialData& d, const BlowupOptions& opt = {});

/// Theorem-style shift constants:
///   h_l = sum_{l'} delta^{1/(2 i_{l'})} [ Psi_{i_{l'}}((y_{l,0}-y_{l',0}) delta^{-a_{l'}})
///                                        - Psi_{i_{l'}}((-y_{l',0}) delta^{-a_{l'}}) ],
/// with y_{l,0} = 3(l-1) delta^{1/(2 i_1)} and h_1 = 0 exactly.
std::vector<double> h_compute(const std::vector<int>& i_list, double delta);

/// Closed-form self-similar center trajectory
///   Y_l(s) = e^{a1 s} delta^{a1} Y_{l,0} + e^{a1 s} (delta - e^{-s}) h,
/// with Y_{l,0} = 3(l-1)/delta.
double Y_selfsim(int l, double s, double delta, double h, int i1);

/// Samples of the Lagrangian flow dPhi/ds = speed(s, Phi), Phi(s_grid[0]) = X0,
/// on the given s grid (adaptive Dormand-Prince underneath, rtol as given).
std::vector<double> lagrangian_flow(const std::function<double(double, double)>& speed,
                                    double X0, const std::vector<double>& s_grid,
                                    double rtol = 1e-9);

} // namespace multiblow
