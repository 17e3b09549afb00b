#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "multiblow/errors.hpp"

namespace multiblow {

/// Right-hand side of dy/ds = f(s, y) for a small vector state.
using OdeRhs = std::function<std::vector<double>(double, const std::vector<double>&)>;

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-14;
    std::size_t max_steps = 2'000'000;
};

/// Dormand-Prince 5(4) with PI step control. Integrates from s0 to s1 and
/// invokes observe(s, y) at every accepted step (including both endpoints).
/// Throws NumericalError on step-size collapse.
inline std::vector<double> integrate_dopri5(
    const OdeRhs& rhs, std::vector<double> y, double s0, double s1,
    const OdeOptions& opt = {},
    const std::function<void(double, const std::vector<double>&)>& observe = nullptr) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // embedded 4th-order weights
    static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                        e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    const std::size_t n = y.size();
    const double dir = (s1 >= s0) ? 1.0 : -1.0;
    double s = s0;
    double h = dir * std::min(std::abs(opt.h_init), std::abs(s1 - s0));
    if (observe) observe(s, y);
    if (s0 == s1) return y;

    std::vector<double> k1 = rhs(s, y), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n);
    double err_prev = 1.0;
    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (dir * (s + h - s1) > 0.0) h = s1 - s;
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(s + c2 * h, ytmp);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(s + c3 * h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(s + c4 * h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(s + c5 * h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(s + h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(s + h, y5);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y4i = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                           e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double d = (y5[i] - y4i) / sc;
            err += d * d;
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0) {
            s += h;
            y = y5;
            k1 = k7; // FSAL
            if (observe) observe(s, y);
            if (dir * (s - s1) >= 0.0) return y;
            const double fac = 0.9 * std::pow(err > 0 ? err : 1e-10, -0.7 / 5.0) *
                               std::pow(err_prev, 0.4 / 5.0);
            h *= std::clamp(fac, 0.2, 5.0);
            err_prev = std::max(err, 1e-10);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
        }
        if (std::abs(h) < opt.h_min)
            throw NumericalError("integrate_dopri5: step size collapsed at s=" + std::to_string(s));
    }
    throw NumericalError("integrate_dopri5: max step count exceeded");
}

} // namespace multiblow
