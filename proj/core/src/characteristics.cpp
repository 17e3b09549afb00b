#include "multiblow/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "multiblow/errors.hpp"
#include "multiblow/ode.hpp"
#include "multiblow/parallel.hpp"

namespace multiblow {

namespace {

void check_guard(const InitialData& d, double t, double guard_frac) {
    if (t < d.t0)
        throw DomainError("solve_pointwise: t before initial time");
    if (std::isfinite(d.blowup_time)) {
        const double guard = guard_frac * (d.blowup_time - d.t0);
        if (t > d.blowup_time - guard)
            throw DomainError("solve_pointwise: t within blowup guard (t_star=" +
                              std::to_string(d.blowup_time) + ")");
    }
}

// Root of F(xi) = xi + tau u0(xi) - x. Before the caustic F is strictly
// increasing, so a bracket always exists; u0 is sublinear at infinity, so
// doubling expansion terminates.
double invert_characteristic(const InitialData& d, double tau, double x) {
    double a = std::max(1.0, 0.25 * std::abs(x));
    double lo = x - a, hi = x + a;
    auto F = [&](double xi) { return xi + tau * d.eval(xi) - x; };
    for (int k = 0; k < 200 && F(lo) > 0.0; ++k) lo -= (a *= 2.0);
    for (int k = 0; k < 200 && F(hi) < 0.0; ++k) hi += (a *= 2.0);
    if (F(lo) > 0.0 || F(hi) < 0.0)
        throw NumericalError("characteristic inversion: bracketing failed at x=" +
                             std::to_string(x));
    double xi = std::clamp(x, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double f = F(xi);
        if (f > 0.0)
            hi = std::min(hi, xi);
        else
            lo = std::max(lo, xi);
        const double df = 1.0 + tau * d.deriv(xi);
        double next = (df > 0.0) ? xi - f / df : 0.5 * (lo + hi);
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - xi) <= 1e-15 * (1.0 + std::abs(next))) return next;
        xi = next;
    }
    throw NumericalError("characteristic inversion: no convergence at x=" + std::to_string(x));
}

} // namespace

double CenterTrajectory::at(double t) const {
    if (t >= T) throw DomainError("CenterTrajectory: t >= T");
    return y0 + (delta - (T - t)) * h;
}

double solve_pointwise(const InitialData& d, double t, double x, double guard_frac) {
    check_guard(d, t, guard_frac);
    return d.eval(invert_characteristic(d, t - d.t0, x));
}

double characteristic_label(const InitialData& d, double t, double x, double guard_frac) {
    check_guard(d, t, guard_frac);
    return invert_characteristic(d, t - d.t0, x);
}

double solve_slope(const InitialData& d, double t, double x, double guard_frac) {
    check_guard(d, t, guard_frac);
    const double xi = invert_characteristic(d, t - d.t0, x);
    const double up = d.deriv(xi);
    return up / (1.0 + (t - d.t0) * up);
}

BlowupReport blowup_detect(const InitialData& d, const BlowupOptions& opt) {
    BlowupReport rep;
    const int n = std::max(16, opt.scan_points);
    const double lo = d.support_lo, hi = d.support_hi;
    const double h = (hi - lo) / (n - 1);
    std::vector<double> up(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
        up[k] = d.deriv(lo + h * static_cast<double>(k));
    });

    // strict grid-local minima with negative value, golden-section refined
    struct Basin {
        double xi, slope;
    };
    std::vector<Basin> basins;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 1; k + 1 < n; ++k) {
        if (!(up[k] < 0.0 && up[k] < up[k - 1] && up[k] < up[k + 1])) continue;
        double a = lo + h * (k - 1), b = lo + h * (k + 1);
        double c = b - gr * (b - a), e = a + gr * (b - a);
        double fc = d.deriv(c), fe = d.deriv(e);
        for (int it = 0; it < 120; ++it) {
            if (fc < fe) {
                b = e;
                e = c;
                fe = fc;
                c = b - gr * (b - a);
                fc = d.deriv(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + gr * (b - a);
                fe = d.deriv(e);
            }
            if (b - a <= 1e-15 * (1.0 + std::abs(a))) break;
        }
        const double xm = 0.5 * (a + b);
        basins.push_back({xm, d.deriv(xm)});
    }
    rep.basins_scanned = static_cast<int>(basins.size());
    std::erase_if(basins, [](const Basin& b) { return b.slope >= 0.0; });
    if (basins.empty()) return rep; // t_star = +inf, no points

    double m_global = 0.0;
    for (const auto& b : basins) m_global = std::min(m_global, b.slope);
    const double t_first = d.t0 + 1.0 / (-m_global);
    rep.t_star = t_first;

    std::vector<double> pts, slopes, seeds, times;
    for (const auto& b : basins) {
        const double tb = d.t0 + 1.0 / (-b.slope);
        if (tb - t_first <= opt.participation_rtol * (t_first - d.t0)) {
            seeds.push_back(b.xi);
            slopes.push_back(b.slope);
            times.push_back(tb);
            pts.push_back(b.xi + (t_first - d.t0) * d.eval(b.xi));
        }
    }
    // merge clustered points (keep the earliest basin of each cluster)
    if (opt.cluster_tol > 0.0) {
        std::vector<std::size_t> order(pts.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
        std::vector<double> p2, s2, x2, t2;
        for (std::size_t idx : order) {
            if (!p2.empty() && pts[idx] - p2.back() < opt.cluster_tol) {
                if (times[idx] < t2.back()) {
                    p2.back() = pts[idx];
                    s2.back() = slopes[idx];
                    x2.back() = seeds[idx];
                    t2.back() = times[idx];
                }
            } else {
                p2.push_back(pts[idx]);
                s2.push_back(slopes[idx]);
                x2.push_back(seeds[idx]);
                t2.push_back(times[idx]);
            }
        }
        pts = p2;
        slopes = s2;
        seeds = x2;
        times = t2;
    }
    rep.points = pts;
    rep.slopes = slopes;
    rep.seeds = seeds;
    rep.times = times;
    if (!times.empty()) {
        const auto [mn, mx] = std::minmax_element(times.begin(), times.end());
        rep.time_spread = *mx - *mn;
    }
    return rep;
}

std::vector<double> h_compute(const std::vector<int>& i_list, double delta) {
    const std::size_t L = i_list.size();
    const int i1 = i_list.front();
    const double y_unit = 3.0 * std::pow(delta, 1.0 / (2.0 * i1));
    std::vector<double> h(L, 0.0);
    for (std::size_t l = 1; l < L; ++l) {
        const double yl0 = y_unit * static_cast<double>(l);
        double sum = 0.0;
        for (std::size_t lp = 0; lp < L; ++lp) {
            const Profile prof{i_list[lp]};
            const double amp = std::pow(delta, 1.0 / (2.0 * prof.i));
            const double scale = std::pow(delta, -prof.alpha());
            const double ylp0 = y_unit * static_cast<double>(lp);
            sum += amp * (profile_eval(prof, (yl0 - ylp0) * scale) -
                          profile_eval(prof, -ylp0 * scale));
        }
        h[l] = sum;
    }
    return h;
}

double Y_selfsim(int l, double s, double delta, double h, int i1) {
    const double a1 = 1.0 + 1.0 / (2.0 * i1);
    const double Yl0 = 3.0 * (l - 1) / delta;
    return std::exp(a1 * s) * (std::pow(delta, a1) * Yl0 + (delta - std::exp(-s)) * h);
}

std::vector<double> lagrangian_flow(const std::function<double(double, double)>& speed,
                                    double X0, const std::vector<double>& s_grid, double rtol) {
    std::vector<double> out;
    out.reserve(s_grid.size());
    out.push_back(X0);
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * std::max(1.0, std::abs(X0));
    std::vector<double> y{X0};
    auto rhs = [&](double s, const std::vector<double>& v) {
        return std::vector<double>{speed(s, v[0])};
    };
    for (std::size_t k = 1; k < s_grid.size(); ++k) {
        y = integrate_dopri5(rhs, y, s_grid[k - 1], s_grid[k], opt);
        out.push_back(y[0]);
    }
    return out;
}

} // namespace multiblow
