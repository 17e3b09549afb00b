#include "multiblow/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "multiblow/errors.hpp"

namespace multiblow {

namespace {

// integer power by repeated multiplication; exact for the small exponents
// used here and cheaper than std::pow
double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

// Root of  g(y) = -y - y^p - A = 0  for A = |X| >= 0; the map y -> -y - y^p
// is strictly decreasing, so the root is unique and lies in
// [-max(A, A^(1/p)), 0]. Safeguarded Newton with monotone bracketing.
double root_for_abs(double A, int i, double X_for_msg) {
    if (A == 0.0) return 0.0;
    const int p = 2 * i + 1;
    double lo = -std::max(A, std::pow(A, 1.0 / p)); // g(lo) >= 0
    double hi = 0.0;                                // g(hi) = -A <= 0
    double y = (A <= 1.0) ? -A : -std::pow(A, 1.0 / p);

    for (int it = 0; it < 100; ++it) {
        const double y2i = ipow(y, 2 * i);
        const double g = -y - y * y2i - A;
        const double dg = -1.0 - p * y2i;
        if (g > 0.0)
            lo = std::max(lo, y);
        else
            hi = std::min(hi, y);
        double ynext = y - g / dg;
        if (!(ynext >= lo && ynext <= hi)) ynext = 0.5 * (lo + hi);
        if (std::abs(ynext - y) <= 1e-16 * (1.0 + std::abs(ynext))) return ynext;
        y = ynext;
    }
    // Newton is quadratic and the bracket is monotone; reaching here means
    // the inputs are pathological (NaN/Inf)
    throw NumericalError("profile_eval: no convergence for i=" + std::to_string(i) +
                         " X=" + std::to_string(X_for_msg));
}

} // namespace

double profile_eval(const Profile& p, double X) {
    if (!std::isfinite(X))
        throw DomainError("profile_eval: non-finite X");
    const double y = root_for_abs(std::abs(X), p.i, X);
    return (X >= 0.0) ? y : -y; // odd extension, bit-exact
}

std::pair<double, double> profile_derivs(const Profile& p, double X) {
    const double psi = profile_eval(p, X);
    const int twoi = 2 * p.i;
    const double y2i = ipow(psi, twoi);
    const double D = 1.0 + p.power() * y2i;
    const double d1 = -1.0 / D;
    const double d2 = -static_cast<double>(twoi) * p.power() * ipow(psi, twoi - 1) / (D * D * D);
    return {d1, d2};
}

double phi_eval(const EigenfunctionSpec& e, double X) {
    const Profile base{e.i1};
    const double psi = profile_eval(base, X);
    const double dpsi = profile_derivs(base, X).first;
    return ipow(psi, e.j) * dpsi;
}

double hx_apply(double f, double df, double X, int i1) {
    const Profile base{i1};
    const double a1 = base.alpha();
    const double psi = profile_eval(base, X);
    const double dpsi = profile_derivs(base, X).first;
    return -f / (2.0 * i1) + a1 * X * df + f * dpsi + psi * df;
}

double a_field_speed(const OperatorContext& ctx, double X) {
    const double a1 = ctx.profiles.front().alpha();
    double speed = a1 * X;
    for (std::size_t l = 0; l < ctx.size(); ++l) {
        const double al = ctx.profiles[l].alpha();
        const double stretch = std::exp((al - a1) * ctx.s);
        speed += std::exp((a1 - al) * ctx.s) *
                 profile_eval(ctx.profiles[l], stretch * (X - ctx.centers[l]));
    }
    return speed;
}

double residual_selfsimilar(const Profile& p, const std::vector<double>& X_grid) {
    double worst = 0.0;
    const double a = p.alpha();
    for (double X : X_grid) {
        const double psi = profile_eval(p, X);
        const double dpsi = profile_derivs(p, X).first;
        const double r = -psi / (2.0 * p.i) + a * X * dpsi + psi * dpsi;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

std::vector<double> profile_taylor(const Profile& p, int order) {
    // Fixed-point iteration Psi <- -X - Psi^(2i+1) on truncated power series;
    // each pass fixes 2i further orders.
    const int n = order + 1;
    std::vector<double> c(n, 0.0), tmp(n, 0.0), pw(n, 0.0);
    c[std::min(1, order)] = (order >= 1) ? -1.0 : 0.0;
    const int passes = order / (2 * p.i) + 2;
    for (int pass = 0; pass < passes; ++pass) {
        // pw = c^(2i+1), truncated
        std::fill(pw.begin(), pw.end(), 0.0);
        pw[0] = 1.0;
        for (int rep = 0; rep < p.power(); ++rep) {
            std::fill(tmp.begin(), tmp.end(), 0.0);
            for (int a = 0; a < n; ++a) {
                if (pw[a] == 0.0) continue;
                for (int b = 0; a + b < n; ++b) {
                    if (c[b] != 0.0) tmp[a + b] += pw[a] * c[b];
                }
            }
            pw = tmp;
        }
        std::fill(c.begin(), c.end(), 0.0);
        if (order >= 1) c[1] = -1.0;
        for (int k = 0; k < n; ++k) c[k] -= pw[k];
    }
    return c;
}

double profile_asymptotic_large(const Profile& p, double X) {
    const double A = std::abs(X);
    const int q = p.power();
    const double lead = std::pow(A, 1.0 / q);
    const double corr = std::pow(A, (1.0 - 2.0 * p.i) / q) / q;
    const double val = -(lead - corr);
    return (X >= 0.0) ? val : -val;
}

double profile_asymptotic_small(const Profile& p, double X) {
    double xp = X;
    for (int k = 0; k < 2 * p.i; ++k) xp *= X;
    return -X + xp;
}

} // namespace multiblow
