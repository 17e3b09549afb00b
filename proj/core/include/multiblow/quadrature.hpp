#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "multiblow/errors.hpp"
#include "multiblow/parallel.hpp"

namespace multiblow {

/// Gauss-Legendre rule on [-1,1]. Nodes are computed once per order by
/// Newton iteration on P_n, accurate to machine precision.
class GaussLegendre {
public:
    explicit GaussLegendre(int order) : nodes_(order), weights_(order) {
        const int n = order;
        for (int k = 0; k < (n + 1) / 2; ++k) {
            // Chebyshev-based initial guess for the k-th positive root
            double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-16 * (1.0 + std::abs(x))) break;
            }
            double w = 2.0 / ((1.0 - x * x) * pp * pp);
            nodes_[k] = -x;
            nodes_[n - 1 - k] = x;
            weights_[k] = w;
            weights_[n - 1 - k] = w;
        }
        if (n % 2 == 1) nodes_[n / 2] = 0.0;
    }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    int order() const { return static_cast<int>(nodes_.size()); }

private:
    std::vector<double> nodes_, weights_;
};

inline const GaussLegendre& gauss16() {
    static const GaussLegendre rule(16);
    return rule;
}

/// Composite Gauss integral of f over [a,b] with npanels uniform panels.
/// Panels are evaluated in parallel and combined in index order.
inline double panel_integrate(const std::function<double(double)>& f, double a, double b,
                              std::size_t npanels, const GaussLegendre& rule = gauss16()) {
    const double h = (b - a) / static_cast<double>(npanels);
    std::vector<double> partial(npanels, 0.0);
    parallel_for(npanels, [&](std::size_t p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h;
        double acc = 0.0, comp = 0.0;
        for (int k = 0; k < rule.order(); ++k) {
            const double v = rule.weights()[k] * f(mid + 0.5 * h * rule.nodes()[k]);
            double t = acc + v;
            if (std::abs(acc) >= std::abs(v))
                comp += (acc - t) + v;
            else
                comp += (v - t) + acc;
            acc = t;
        }
        partial[p] = (acc + comp) * 0.5 * h;
    });
    return compensated_sum(partial);
}

/// Panel-doubling refinement until the integral changes by less than
/// rtol relative (or atol absolute for near-zero integrals).
inline double refine_integrate(const std::function<double(double)>& f, double a, double b,
                               double rtol, std::size_t panels_init = 64,
                               std::size_t panels_max = 4096, double atol = 0.0) {
    if (!(b > a)) return 0.0;
    double prev = panel_integrate(f, a, b, panels_init);
    for (std::size_t n = panels_init * 2; n <= panels_max; n *= 2) {
        double cur = panel_integrate(f, a, b, n);
        if (std::abs(cur - prev) <= rtol * std::abs(cur) + atol) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace multiblow
