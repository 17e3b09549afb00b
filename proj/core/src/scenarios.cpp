#include "multiblow/scenarios.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>
#include <sstream>

#include "multiblow/errors.hpp"
#include "multiblow/parallel.hpp"

namespace multiblow {

namespace {

void validate(const Scenario& sc) {
    if (sc.i_list.empty()) throw ConfigError("scenario: i_list is empty");
    for (int i : sc.i_list)
        if (i < 1) throw ConfigError("scenario: profile indices must be >= 1");
    if (!(sc.delta > 0.0 && sc.delta < sc.T))
        throw ConfigError("scenario: need 0 < delta < T");
    if (!(sc.kappa > 0.0 && sc.kappa < 0.5))
        throw ConfigError("scenario: kappa must lie in (0, 1/2)");
    if (sc.q < 1) throw ConfigError("scenario: q must be >= 1");
    if (sc.monitor_points < 2) throw ConfigError("scenario: monitor_points must be >= 2");
    if (!(sc.s_span > 0.0)) throw ConfigError("scenario: s_span must be positive");
    if (sc.perturbation_enabled) {
        const double lo = sc.perturbation.center - sc.perturbation.width;
        const double hi = sc.perturbation.center + sc.perturbation.width;
        if (!(sc.perturbation.width > 0.0))
            throw ConfigError("scenario: perturbation width must be positive");
        if (lo < sc.pert_window_lo() - 1e-15 * sc.inner_scale() ||
            hi > sc.pert_window_hi() + 1e-15 * sc.inner_scale())
            throw ConfigError("scenario: perturbation support violates the admissible "
                              "window [4/3, 5/3] * delta^{1/(2 i1)}");
    }
}

double envelope(const Scenario& sc, double s) { return std::exp(-sc.decay_rate() * s); }

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

std::vector<std::string> DiagnosticsReport::failing_tags() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.pass) out.push_back(c.tag);
    return out;
}

InitialData build_initial_data(const Scenario& sc) {
    validate(sc);
    InitialData d;
    d.t0 = sc.t0();

    const Scenario cp = sc; // captured by value: the data outlives the scenario
    d.eval = [cp](double x) {
        double u = 0.0;
        for (int l = 0; l < cp.L(); ++l) {
            const Profile p{cp.i_list[l]};
            u += std::pow(cp.delta, 1.0 / (2.0 * p.i)) *
                 profile_eval(p, (x - cp.y0(l)) * std::pow(cp.delta, -p.alpha()));
        }
        if (cp.perturbation_enabled) u += cp.perturbation.eval(x);
        return u;
    };
    d.deriv = [cp](double x) {
        double du = 0.0;
        for (int l = 0; l < cp.L(); ++l) {
            const Profile p{cp.i_list[l]};
            du += profile_derivs(p, (x - cp.y0(l)) * std::pow(cp.delta, -p.alpha())).first /
                  cp.delta;
        }
        if (cp.perturbation_enabled) du += cp.perturbation.deriv(x);
        return du;
    };

    const double spacing = 3.0 * sc.inner_scale();
    d.support_lo = std::min(0.0, sc.pert_window_lo()) - 0.3 * spacing;
    d.support_hi = std::max(sc.y0(sc.L() - 1), sc.pert_window_hi()) + 0.3 * spacing;
    return d;
}

PerturbationSpec calibrate_perturbation(const Scenario& sc, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw ConfigError("calibrate_perturbation: theta must lie in (0,1)");
    Scenario work = sc;
    if (work.perturbation.width <= 0.0) work.place_default_perturbation();
    const double target = theta * std::pow(sc.delta, 0.5 - sc.kappa);
    const NormConfig cfg = NormConfig::for_scenario(sc);

    const double a1 = sc.alpha1();
    const double s0 = sc.s0();
    const double Xlo = work.pert_window_lo() * std::pow(sc.delta, -a1);
    const double Xhi = work.pert_window_hi() * std::pow(sc.delta, -a1);
    auto norm_of = [&](double amp) {
        PerturbationSpec p = work.perturbation;
        p.amplitude = amp;
        auto eps0 = [&](double X) {
            return std::exp((a1 - 1.0) * s0) * p.eval(X * std::pow(sc.delta, a1));
        };
        return weighted_norm(eps0, cfg, Xlo, Xhi);
    };

    const double unit = norm_of(1.0);
    if (!(unit > 0.0)) throw NumericalError("calibrate_perturbation: zero unit norm");
    // homogeneity provides the bracket; bisection per the calibration contract
    double lo = 0.5 * target / unit, hi = 1.5 * target / unit;
    double flo = norm_of(lo) - target, fhi = norm_of(hi) - target;
    if (!(flo < 0.0 && fhi > 0.0))
        throw NumericalError("calibrate_perturbation: bracket failure (norm not monotone "
                             "in amplitude, which homogeneity forbids)");
    double amp = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        const double f = norm_of(amp) - target;
        if (std::abs(f) <= sc.tols.calibration_rtol * target) break;
        if (f < 0.0)
            lo = amp;
        else
            hi = amp;
        amp = 0.5 * (lo + hi);
    }
    PerturbationSpec out = work.perturbation;
    out.amplitude = amp;
    return out;
}

DiagnosticsReport run_verification(const Scenario& scenario,
                                   const std::optional<BootstrapConstants>& frozen) {
    DiagnosticsReport rep;
    Scenario sc = scenario;
    validate(sc);

    if (sc.perturbation_enabled && sc.perturbation.width <= 0.0)
        sc.place_default_perturbation();
    if (sc.perturbation_enabled && sc.perturbation.amplitude == 0.0 && sc.theta > 0.0)
        sc.perturbation = calibrate_perturbation(sc, sc.theta);
    rep.calibrated_amplitude = sc.perturbation.amplitude;
    rep.scenario = sc;
    rep.scenario_hash = scenario_hash(sc);
    rep.h = h_compute(sc.i_list, sc.delta);

    auto check = [&](const std::string& tag, double value, double bound, bool pass) {
        rep.checks.push_back({tag, value, bound, bound - value, pass});
    };

    // ---- h-level checks -------------------------------------------------
    InitialData data = build_initial_data(sc);
    {
        bool signs = true;
        for (int l = 1; l < sc.L(); ++l) {
            if (!(rep.h[l] < 0.0)) signs = false;
            if (l >= 2 && !(rep.h[l] < rep.h[l - 1])) signs = false;
        }
        check("Lem2.1-h-sign", signs ? 0.0 : 1.0, 0.0, signs);

        double consistency = 0.0;
        const double u00 = data.eval(0.0);
        for (int l = 1; l < sc.L(); ++l)
            consistency = std::max(
                consistency, std::abs(rep.h[l] - (data.eval(sc.y0(l)) - u00)));
        check("Lem2.1-h-consistency", consistency, 1e-12, consistency <= 1e-12);

        // absorption bound on the center shift, checked in magnitude
        double worst = 0.0;
        for (int k = 0; k <= 32; ++k) {
            const double s = sc.s0() + sc.s_span * k / 32.0;
            const double shift = (sc.delta - std::exp(-s));
            for (int l = 1; l < sc.L(); ++l)
                worst = std::max(worst, std::abs(shift * rep.h[l]));
        }
        const double absorb_bound = 0.5 * sc.inner_scale();
        check("Eq2.10-absorption", worst, absorb_bound, worst < absorb_bound);
    }

    // ---- blowup detection ------------------------------------------------
    BlowupOptions bopt;
    bopt.scan_points = sc.grids.blowup_scan_points;
    bopt.participation_rtol = sc.tols.participation_rtol;
    bopt.cluster_tol = sc.tols.cluster_frac * std::pow(sc.delta, sc.alpha1());
    rep.blowup = blowup_detect(data, bopt);
    data.blowup_time = rep.blowup.t_star;

    {
        const int npts = static_cast<int>(rep.blowup.points.size());
        check("Thm4.1-blowup-count", npts, sc.L(), npts == sc.L());
        const double sim_bound = sc.tols.simultaneity_frac * sc.delta;
        check("Thm4.1-simultaneity", rep.blowup.time_spread, sim_bound,
              rep.blowup.time_spread <= sim_bound);
        const double tstar_err = std::abs(sc.T - rep.blowup.t_star);
        check("Thm4.1-tstar", tstar_err, sc.tols.tstar_rtol * sc.delta,
              tstar_err <= sc.tols.tstar_rtol * sc.delta);

        // locations against the center trajectory, relative to the first point
        double worst = 0.0;
        bool loc_ok = npts == sc.L();
        if (loc_ok) {
            std::vector<double> pts = rep.blowup.points;
            std::sort(pts.begin(), pts.end());
            const double tau = rep.blowup.t_star - sc.t0();
            for (int l = 0; l < sc.L(); ++l) {
                const double yl = sc.y0(l) + (sc.delta - (sc.T - rep.blowup.t_star)) * rep.h[l];
                const double y1 = 0.0 + (sc.delta - (sc.T - rep.blowup.t_star)) * rep.h[0];
                const double expected = yl - y1;
                worst = std::max(worst, std::abs((pts[l] - pts[0]) - expected));
                (void)tau;
            }
            loc_ok = worst <= sc.tols.location_tol_frac * std::pow(sc.delta, sc.alpha1());
        }
        check("Thm4.1-locations", worst,
              sc.tols.location_tol_frac * std::pow(sc.delta, sc.alpha1()), loc_ok);
    }

    // ---- self-similar monitors -------------------------------------------
    SelfSimFrame frame(sc, data);
    const NormConfig cfg = NormConfig::for_scenario(sc);
    const double s0 = sc.s0();
    std::vector<double> s_grid(sc.monitor_points);
    for (int k = 0; k < sc.monitor_points; ++k)
        s_grid[k] = s0 + sc.s_span * k / (sc.monitor_points - 1.0);

    // transported support endpoints and the sampled Lagrangian bound check
    const double X0lo = sc.pert_window_lo() * std::pow(sc.delta, -sc.alpha1());
    const double X0hi = sc.pert_window_hi() * std::pow(sc.delta, -sc.alpha1());
    const int nflow = std::max(2, sc.grids.flow_samples);
    std::vector<std::vector<double>> trajs(nflow + 2);
    {
        std::vector<double> X0s(nflow + 2);
        X0s[0] = X0lo;
        X0s[nflow + 1] = X0hi;
        for (int k = 0; k < nflow; ++k)
            X0s[k + 1] = X0lo + (X0hi - X0lo) * (k + 0.5) / nflow;
        auto speed = [&frame](double s, double X) { return frame.flow_speed(s, X); };
        parallel_for(trajs.size(), [&](std::size_t k) {
            trajs[k] = lagrangian_flow(speed, X0s[k], s_grid, sc.tols.flow_rtol);
        });
    }
    {
        double lower = std::numeric_limits<double>::infinity();
        double upper = lower;
        for (std::size_t k = 0; k < trajs.size(); ++k) {
            for (std::size_t m = 0; m < s_grid.size(); ++m) {
                const double s = s_grid[m];
                lower = std::min(lower, trajs[k][m] - std::exp(s));
                upper = std::min(upper, 2.0 * sc.inner_scale() * std::exp(sc.alpha1() * s) -
                                            trajs[k][m]);
            }
        }
        check("Eq4.3-lagrangian-lower", -lower, 0.0, lower >= 0.0);
        check("Eq4.3-lagrangian-upper", -upper, 0.0, upper >= 0.0);
    }

    // monitor rows; margins are filled after constants are settled
    BootstrapConstants zero{};
    rep.ledger.resize(s_grid.size());
    for (std::size_t m = 0; m < s_grid.size(); ++m) {
        rep.ledger[m] = bootstrap_monitor(frame, s_grid[m], trajs.front()[m],
                                          trajs.back()[m], cfg, zero);
        const int ng = 50;
        std::vector<double> Xg(ng);
        const double xa = std::log(trajs.front()[m]), xb = std::log(trajs.back()[m]);
        for (int k = 0; k < ng; ++k) Xg[k] = std::exp(xa + (xb - xa) * k / (ng - 1.0));
        rep.ledger[m].residual_evo =
            evolution_residual(frame, s_grid[m], sc.tols.evo_ds, Xg).residual;
    }

    // fitted constants (2x suprema of the normalized observables)
    BootstrapConstants fit;
    for (const auto& row : rep.ledger) {
        const double env = envelope(sc, row.s);
        fit.K0 = std::max(fit.K0, 2.0 * row.norm_eps / env);
        fit.K1 = std::max(fit.K1, 2.0 * row.norm_Aeps / env);
        fit.Ke = std::max(fit.Ke, 2.0 * row.sup_eps_over_X / env);
        fit.Kd = std::max(fit.Kd, 2.0 * row.sup_deps / env);
    }
    rep.fitted = fit;
    rep.constants_were_frozen = frozen.has_value();
    const BootstrapConstants K = frozen.value_or(fit);
    for (auto& row : rep.ledger) {
        const double env = envelope(sc, row.s);
        row.margin_norm_eps = K.K0 * env - row.norm_eps;
        row.margin_norm_Aeps = K.K1 * env - row.norm_Aeps;
        row.margin_sup_eps = K.Ke * env - row.sup_eps_over_X;
        row.margin_sup_deps = K.Kd * env - row.sup_deps;
    }

    auto min_over_rows = [&](auto getter) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& row : rep.ledger) worst = std::min(worst, getter(row));
        return worst;
    };
    const bool empty_support = !sc.perturbation_enabled || sc.perturbation.amplitude == 0.0;
    if (empty_support) {
        check("Prop4.2-support-lower", 0.0, 0.0, true);
        check("Prop4.2-support-upper", 0.0, 0.0, true);
    } else {
        const double mlo = min_over_rows([](const LedgerRow& r) { return r.margin_supp_lo; });
        const double mhi = min_over_rows([](const LedgerRow& r) { return r.margin_supp_hi; });
        check("Prop4.2-support-lower", -mlo, 0.0, mlo >= 0.0);
        check("Prop4.2-support-upper", -mhi, 0.0, mhi >= 0.0);
    }
    check("Prop4.3-norm-eps",
          -min_over_rows([](const LedgerRow& r) { return r.margin_norm_eps; }), 0.0,
          min_over_rows([](const LedgerRow& r) { return r.margin_norm_eps; }) >= 0.0);
    check("Prop4.3-norm-Aeps",
          -min_over_rows([](const LedgerRow& r) { return r.margin_norm_Aeps; }), 0.0,
          min_over_rows([](const LedgerRow& r) { return r.margin_norm_Aeps; }) >= 0.0);
    check("Cor4.4-pointwise-eps",
          -min_over_rows([](const LedgerRow& r) { return r.margin_sup_eps; }), 0.0,
          min_over_rows([](const LedgerRow& r) { return r.margin_sup_eps; }) >= 0.0);
    check("Cor4.4-pointwise-deps",
          -min_over_rows([](const LedgerRow& r) { return r.margin_sup_deps; }), 0.0,
          min_over_rows([](const LedgerRow& r) { return r.margin_sup_deps; }) >= 0.0);
    {
        const double tmin =
            min_over_rows([](const LedgerRow& r) { return r.transport_margin; });
        check("Lem4.5-transport-lowbd", -tmin, 0.0, tmin >= 0.0);
        double leak = 0.0;
        for (const auto& row : rep.ledger) leak = std::max(leak, row.leak_rel);
        check("support-leak", leak, sc.tols.leak_rtol, leak <= sc.tols.leak_rtol);
    }

    // residual convergence order at mid-run
    {
        const double s_mid = s0 + 0.5 * sc.s_span;
        std::size_t m = rep.ledger.size() / 2;
        const int ng = 50;
        std::vector<double> Xg(ng);
        const double xa = std::log(trajs.front()[m]), xb = std::log(trajs.back()[m]);
        for (int k = 0; k < ng; ++k) Xg[k] = std::exp(xa + (xb - xa) * k / (ng - 1.0));
        const double r1 = evolution_residual(frame, s_mid, sc.tols.evo_ds, Xg).residual;
        const double r2 = evolution_residual(frame, s_mid, 0.5 * sc.tols.evo_ds, Xg).residual;
        rep.residual_order_ratio = (r1 > 0.0) ? r2 / r1 : 0.5;
        check("Eq2.6-residual-order", rep.residual_order_ratio, 0.6,
              rep.residual_order_ratio > 0.4 && rep.residual_order_ratio < 0.6);
    }

    // energy estimate fit on interior monitor points
    {
        std::vector<double> se, lo, hi;
        for (std::size_t m = 1; m + 1 < s_grid.size(); ++m) {
            se.push_back(s_grid[m]);
            lo.push_back(trajs.front()[m]);
            hi.push_back(trajs.back()[m]);
        }
        if (!se.empty() && !empty_support) {
            const auto energy = energy_inequality_check(frame, se, lo, hi, cfg);
            rep.energy_C_fit = energy.C_fit;
            for (std::size_t m = 1; m + 1 < s_grid.size(); ++m)
                rep.ledger[m].energy_C = energy.C_pointwise[m - 1];
        }
        check("Lem4.6-energy", rep.energy_C_fit, sc.tols.energy_c_max,
              rep.energy_C_fit <= sc.tols.energy_c_max);
    }

    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

SweepReport sweep(const Scenario& base, const std::vector<double>& delta_axis,
                  const std::vector<std::vector<int>>& ilist_axis, bool full) {
    SweepReport out;
    std::vector<std::vector<int>> ilists =
        ilist_axis.empty() ? std::vector<std::vector<int>>{base.i_list} : ilist_axis;
    std::vector<double> deltas = delta_axis.empty() ? std::vector<double>{base.delta}
                                                    : delta_axis;

    for (const auto& il : ilists) {
        for (double d : deltas) {
            SweepPointResult pt;
            pt.scenario = base;
            pt.scenario.i_list = il;
            pt.scenario.delta = d;
            try {
                pt.h = h_compute(il, d);
                for (std::size_t l = 1; l < pt.h.size(); ++l) {
                    if (!(pt.h[l] < 0.0)) out.signs_ok = false;
                    if (l >= 2 && !(pt.h[l] < pt.h[l - 1])) out.signs_ok = false;
                }
                if (full) {
                    pt.report = run_verification(pt.scenario);
                    pt.full_pass = pt.report.pass;
                }
            } catch (const std::exception& e) {
                pt.errored = true;
                pt.error = e.what();
            }
            out.points.push_back(std::move(pt));
        }
    }

    // |h_2| scaling against delta for the first i-list (needs L >= 2)
    if (deltas.size() >= 2 && ilists.front().size() >= 2) {
        int im = 1;
        for (int v : ilists.front()) im = std::max(im, v);
        out.h2_slope_expected = 1.0 / (2.0 * im * (2.0 * im + 1.0));
        std::vector<double> lx, ly, consts;
        for (const auto& pt : out.points) {
            if (pt.errored || pt.scenario.i_list != ilists.front()) continue;
            if (pt.h.size() < 2 || !(pt.h[1] < 0.0)) continue;
            lx.push_back(std::log(pt.scenario.delta));
            ly.push_back(std::log(-pt.h[1]));
            consts.push_back(-pt.h[1] / std::pow(pt.scenario.delta, out.h2_slope_expected));
        }
        if (lx.size() >= 2) {
            out.h2_slope = fit_slope(lx, ly);
            out.h2_slope_rel_err =
                std::abs(out.h2_slope - out.h2_slope_expected) / out.h2_slope_expected;
            const auto [mn, mx] = std::minmax_element(consts.begin(), consts.end());
            out.smallness_const_ratio = *mx / *mn;
        }
    }
    out.pass = out.signs_ok;
    if (out.h2_slope_expected > 0.0) out.pass = out.pass && out.h2_slope_rel_err <= 0.15;
    for (const auto& pt : out.points)
        out.pass = out.pass && !pt.errored && (!full || pt.full_pass);
    return out;
}

} // namespace multiblow
