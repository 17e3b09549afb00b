#include "multiblow/selfsim.hpp"

#include <algorithm>
#include <cmath>

#include "multiblow/errors.hpp"
#include "multiblow/parallel.hpp"
#include "multiblow/quadrature.hpp"

namespace multiblow {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

double phi_weight(const NormConfig& cfg, double X) {
    const Profile p{cfg.i1};
    const double psi = profile_eval(p, X);
    const double dpsi = profile_derivs(p, X).first;
    return ipow(psi, cfg.j) * dpsi;
}

// sup of |f|/|phi_j| over a log grid, used as the conditioning scale for the
// 2q-th powers (any positive scale leaves the result algebraically unchanged)
double ratio_scale(const std::function<double(double)>& f, const NormConfig& cfg, double xa,
                   double xb) {
    double M = 0.0;
    const int n = 257;
    for (int k = 0; k < n; ++k) {
        const double X = std::exp(xa + (xb - xa) * k / (n - 1.0));
        M = std::max(M, std::abs(f(X)) / std::abs(phi_weight(cfg, X)));
    }
    return M;
}

// int_A^B (|f|/|phi_j| / M)^{2q} dxi  with X = e^xi
double scaled_power_integral(const std::function<double(double)>& f, const NormConfig& cfg,
                             double A, double B, double M) {
    auto integrand = [&](double xi) {
        const double X = std::exp(xi);
        const double r = std::abs(f(X)) / (std::abs(phi_weight(cfg, X)) * M);
        return ipow(r, 2 * cfg.q);
    };
    return refine_integrate(integrand, std::log(A), std::log(B), cfg.quadrature_rtol,
                            static_cast<std::size_t>(cfg.panels_init),
                            static_cast<std::size_t>(cfg.panels_max));
}

} // namespace

SelfSimFrame::SelfSimFrame(Scenario scenario, InitialData data)
    : sc_(std::move(scenario)), data_(std::move(data)) {
    h_ = h_compute(sc_.i_list, sc_.delta);
    drift_ = (sc_.frame == FrameMode::comoving) ? data_.eval(0.0) : 0.0;
    hh_ = h_;
    for (double& v : hh_) v += drift_;
}

double SelfSimFrame::center_x(int l, double t) const {
    return sc_.y0(l) + (sc_.delta - (sc_.T - t)) * hh_[l];
}

double SelfSimFrame::Y(int l, double s) const {
    const double Tt = std::exp(-s);
    const double tau = sc_.delta - Tt; // t - t0, exact in the small scales
    return (sc_.y0(l) + tau * hh_[l]) * std::pow(Tt, -sc_.alpha1());
}

OperatorContext SelfSimFrame::context(double s) const {
    OperatorContext ctx;
    ctx.s = s;
    ctx.centers.resize(sc_.L());
    ctx.profiles.resize(sc_.L());
    for (int l = 0; l < sc_.L(); ++l) {
        ctx.centers[l] = Y(l, s);
        ctx.profiles[l] = Profile{sc_.i_list[l]};
    }
    return ctx;
}

SelfSimFrame::Value SelfSimFrame::extract(double s, double X) const {
    const double Tt = std::exp(-s);
    const double t = sc_.T - Tt;
    const double a1 = sc_.alpha1();
    const double tau = sc_.delta - Tt;
    const double x = X * std::pow(Tt, a1);
    const double xi = characteristic_label(data_, t, x, sc_.tols.blowup_guard_frac);
    const double u = data_.eval(xi);
    const double u0p = data_.deriv(xi);
    const double ux = u0p / (1.0 + (t - data_.t0) * u0p);

    double psum = 0.0, dsum = 0.0;
    for (int l = 0; l < sc_.L(); ++l) {
        const Profile p{sc_.i_list[l]};
        const double z = (x - (sc_.y0(l) + tau * hh_[l])) * std::pow(Tt, -p.alpha());
        psum += std::pow(Tt, 1.0 / (2.0 * p.i)) * profile_eval(p, z);
        dsum += profile_derivs(p, z).first / Tt;
    }
    const double fac = std::exp((a1 - 1.0) * s);
    return {fac * (u - psum), (ux - dsum) / std::exp(s)};
}

double SelfSimFrame::a_speed(double s, double X) const {
    return a_field_speed(context(s), X);
}

double SelfSimFrame::flow_speed(double s, double X) const {
    return a_speed(s, X) + extract(s, X).eps;
}

SelfSimFrame::EvoTerms SelfSimFrame::evolution_terms(double s, double X) const {
    const double a1 = sc_.alpha1();
    const Value v = extract(s, X);
    const int L = sc_.L();
    std::vector<double> P(L), dP(L);
    for (int l = 0; l < L; ++l) {
        const Profile p{sc_.i_list[l]};
        const double al = p.alpha();
        const double arg = std::exp((al - a1) * s) * (X - Y(l, s));
        P[l] = std::exp((a1 - al) * s) * profile_eval(p, arg);
        dP[l] = profile_derivs(p, arg).first;
    }
    double psum = 0.0, dsum = 0.0;
    for (int l = 0; l < L; ++l) {
        psum += P[l];
        dsum += dP[l];
    }
    double inter = 0.0;
    for (int l1 = 0; l1 < L; ++l1)
        for (int l2 = 0; l2 < L; ++l2)
            if (l1 != l2) inter += P[l1] * dP[l2];
    double center = 0.0;
    const double efac = std::exp(s / (2.0 * sc_.i1()));
    for (int l = 0; l < L; ++l) center += efac * hh_[l] * dP[l];

    const double lin = -v.eps / (2.0 * sc_.i1()) + a1 * X * v.deps + v.deps * psum + v.eps * dsum;
    EvoTerms out;
    out.eps = v.eps;
    out.deps = v.deps;
    out.non_ds = lin + v.eps * v.deps + inter - center;
    out.theta = -(v.eps * v.deps + inter - center);
    out.scale = std::abs(a1 * X * v.deps);
    return out;
}

double SelfSimFrame::reconstruct(double s, double X, double eps) const {
    const double Tt = std::exp(-s);
    const double tau = sc_.delta - Tt;
    const double x = X * std::pow(Tt, sc_.alpha1());
    double psum = 0.0;
    for (int l = 0; l < sc_.L(); ++l) {
        const Profile p{sc_.i_list[l]};
        const double z = (x - (sc_.y0(l) + tau * hh_[l])) * std::pow(Tt, -p.alpha());
        psum += std::pow(Tt, 1.0 / (2.0 * p.i)) * profile_eval(p, z);
    }
    return psum + eps * std::exp(-(sc_.alpha1() - 1.0) * s);
}

double weighted_norm(const std::function<double(double)>& f, const NormConfig& cfg,
                     double A, double B) {
    if (!(B > A)) return 0.0;
    if (A <= 0.0)
        throw DomainError("weighted_norm: support touches X <= 0 (singular weight)");
    const double M = ratio_scale(f, cfg, std::log(A), std::log(B));
    if (M == 0.0) return 0.0;
    const double I = scaled_power_integral(f, cfg, A, B, M);
    return M * std::pow(I, 1.0 / (2.0 * cfg.q));
}

double weighted_norm(const SelfSimFrame& frame, double s, const NormConfig& cfg,
                     double A, double B, NormField which) {
    auto f = [&](double X) {
        const auto v = frame.extract(s, X);
        return which == NormField::eps ? v.eps : frame.a_speed(s, X) * v.deps;
    };
    return weighted_norm(f, cfg, A, B);
}

EmbeddingResult embedding_check(const std::function<double(double)>& f,
                                const std::function<double(double)>& df,
                                const NormConfig& cfg, double A, double B) {
    EmbeddingResult out;
    if (!(B > A)) return out;
    if (A <= 0.0)
        throw DomainError("embedding_check: support touches X <= 0");
    const double xa = std::log(A), xb = std::log(B);
    double M = 0.0;
    const int n = 2049;
    for (int k = 0; k < n; ++k) {
        const double X = std::exp(xa + (xb - xa) * k / (n - 1.0));
        M = std::max(M, std::abs(f(X)) / std::abs(phi_weight(cfg, X)));
    }
    if (M == 0.0) return out;
    const double I1 = scaled_power_integral(f, cfg, A, B, M);
    auto xdf = [&](double X) { return X * df(X); };
    const double I2 = scaled_power_integral(xdf, cfg, A, B, M);
    out.lhs = 1.0; // sup^{2q} in units of M^{2q}
    out.rhs = I1 + I2;
    out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
    // restore absolute units
    const double M2q = std::pow(M, 2.0 * cfg.q);
    out.lhs *= M2q;
    out.rhs *= M2q;
    return out;
}

std::pair<double, double> support_bounds_check(const SelfSimilarSnapshot& snap,
                                               const Scenario& sc) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!(snap.support_hi > snap.support_lo)) return {inf, inf};
    const double lower = snap.support_lo - std::exp(snap.s);
    const double upper =
        2.0 * sc.inner_scale() * std::exp(sc.alpha1() * snap.s) - snap.support_hi;
    return {lower, upper};
}

LedgerRow bootstrap_monitor(const SelfSimFrame& frame, double s, double supp_lo,
                            double supp_hi, const NormConfig& cfg,
                            const BootstrapConstants& K) {
    const Scenario& sc = frame.scenario();
    LedgerRow row;
    row.s = s;
    row.supp_lo = supp_lo;
    row.supp_hi = supp_hi;
    row.norm_eps = weighted_norm(frame, s, cfg, supp_lo, supp_hi, NormField::eps);
    row.norm_Aeps = weighted_norm(frame, s, cfg, supp_lo, supp_hi, NormField::Aeps);
    row.margin_supp_lo = supp_lo - std::exp(s);
    row.margin_supp_hi = 2.0 * sc.inner_scale() * std::exp(sc.alpha1() * s) - supp_hi;

    const int n = 400;
    std::vector<double> sup_e(n, 0.0), sup_d(n, 0.0);
    const double xa = std::log(supp_lo), xb = std::log(supp_hi);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
        const double X = std::exp(xa + (xb - xa) * static_cast<double>(k) / (n - 1.0));
        const auto v = frame.extract(s, X);
        sup_e[k] = std::abs(v.eps) / X;
        sup_d[k] = std::abs(v.deps);
    });
    row.sup_eps_over_X = *std::max_element(sup_e.begin(), sup_e.end());
    row.sup_deps = *std::max_element(sup_d.begin(), sup_d.end());

    const double envelope = std::exp(-sc.decay_rate() * s);
    row.margin_norm_eps = K.K0 * envelope - row.norm_eps;
    row.margin_norm_Aeps = K.K1 * envelope - row.norm_Aeps;
    row.margin_sup_eps = K.Ke * envelope - row.sup_eps_over_X;
    row.margin_sup_deps = K.Kd * envelope - row.sup_deps;

    // transport lower bound on the paper's window [e^s, 2 d^{1/(2i1)} e^{a1 s}]
    const double wa = s, wb = std::log(2.0 * sc.inner_scale()) + sc.alpha1() * s;
    std::vector<double> tm(128, 0.0);
    parallel_for(tm.size(), [&](std::size_t k) {
        const double X = std::exp(wa + (wb - wa) * static_cast<double>(k) / (tm.size() - 1.0));
        tm[k] = frame.a_speed(s, X) - X;
    });
    row.transport_margin = *std::min_element(tm.begin(), tm.end());
    row.leak_rel = support_leak(frame, s, supp_lo, supp_hi);
    return row;
}

ResidualResult evolution_residual(const SelfSimFrame& frame, double s, double ds,
                                  const std::vector<double>& X_grid) {
    ResidualResult out;
    out.ds_warning = ds < 1e-7;
    std::vector<double> r(X_grid.size(), 0.0), sc(X_grid.size(), 0.0);
    parallel_for(X_grid.size(), [&](std::size_t k) {
        const double X = X_grid[k];
        const auto terms = frame.evolution_terms(s, X);
        const double eps2 = frame.extract(s + ds, X).eps;
        r[k] = std::abs((eps2 - terms.eps) / ds + terms.non_ds);
        sc[k] = terms.scale;
    });
    if (!r.empty()) {
        out.residual = *std::max_element(r.begin(), r.end());
        out.scale = *std::max_element(sc.begin(), sc.end());
    }
    return out;
}

EnergyCheck energy_inequality_check(const SelfSimFrame& frame,
                                    const std::vector<double>& s_values,
                                    const std::vector<double>& supp_lo,
                                    const std::vector<double>& supp_hi,
                                    const NormConfig& cfg, double ds) {
    EnergyCheck out;
    out.s_values = s_values;
    out.C_pointwise.resize(s_values.size(), 0.0);
    const double q = cfg.q;

    // I and the forcing integral share the quadrature grid; the supports at
    // s +/- ds are taken at the monitored support (the endpoints move by
    // O(ds) which is absorbed because eps vanishes there)
    auto I_of = [&](double s, double A, double B) {
        auto f = [&](double X) { return frame.extract(s, X).eps; };
        const NormConfig c = cfg;
        const double nrm = weighted_norm(f, c, A, B);
        return std::pow(nrm, 2.0 * q);
    };
    for (std::size_t k = 0; k < s_values.size(); ++k) {
        const double s = s_values[k];
        const double A = supp_lo[k], B = supp_hi[k];
        const double Ip = I_of(s + ds, A, B);
        const double Im = I_of(s - ds, A, B);
        const double I = I_of(s, A, B);
        if (I <= 0.0) {
            out.C_pointwise[k] = 0.0;
            continue;
        }
        const double dI = (Ip - Im) / (2.0 * ds);
        // forcing integral int eps^{2q-1} Theta w dX in the same scaled units
        const double xa = std::log(A), xb = std::log(B);
        double M = 0.0;
        {
            const int n = 257;
            for (int j = 0; j < n; ++j) {
                const double X = std::exp(xa + (xb - xa) * j / (n - 1.0));
                M = std::max(M,
                             std::abs(frame.extract(s, X).eps) / std::abs(phi_weight(cfg, X)));
            }
        }
        double F = 0.0;
        if (M > 0.0) {
            auto integrand = [&](double xi) {
                const double X = std::exp(xi);
                const auto t = frame.evolution_terms(s, X);
                const double w = phi_weight(cfg, X);
                const double r = t.eps / (w * M);
                double p = 1.0;
                for (int rep = 0; rep < 2 * cfg.q - 1; ++rep) p *= r;
                return p * (t.theta / w);
            };
            F = refine_integrate(integrand, xa, xb, cfg.quadrature_rtol,
                                 static_cast<std::size_t>(cfg.panels_init),
                                 static_cast<std::size_t>(cfg.panels_max)) *
                std::pow(M, 2.0 * q - 1.0);
        }
        out.C_pointwise[k] = q * ((dI / (2.0 * q) - F) / I + 0.5);
    }
    out.C_fit = 0.0;
    for (double c : out.C_pointwise) out.C_fit = std::max(out.C_fit, c);
    return out;
}

SelfSimilarSnapshot to_selfsimilar(const SelfSimFrame& frame, double t, int n_points,
                                   double supp_lo, double supp_hi) {
    const Scenario& sc = frame.scenario();
    if (!(t >= sc.t0() && t < sc.T))
        throw DomainError("to_selfsimilar: t outside [T - delta, T)");
    SelfSimilarSnapshot snap;
    snap.s = -std::log(sc.T - t);
    snap.scenario_ref = sc.name;
    snap.support_lo = supp_lo;
    snap.support_hi = supp_hi;
    snap.centers.resize(sc.L());
    for (int l = 0; l < sc.L(); ++l) snap.centers[l] = frame.Y(l, snap.s);
    snap.X_grid.resize(n_points);
    snap.epsilon.resize(n_points);
    snap.depsilon.resize(n_points);
    const double xa = std::log(supp_lo), xb = std::log(supp_hi);
    parallel_for(static_cast<std::size_t>(n_points), [&](std::size_t k) {
        const double X = std::exp(xa + (xb - xa) * static_cast<double>(k) / (n_points - 1.0));
        const auto v = frame.extract(snap.s, X);
        snap.X_grid[k] = X;
        snap.epsilon[k] = v.eps;
        snap.depsilon[k] = v.deps;
    });
    return snap;
}

double support_leak(const SelfSimFrame& frame, double s, double supp_lo, double supp_hi,
                    int n_points) {
    // inside max
    double in_max = 0.0;
    {
        std::vector<double> vals(n_points, 0.0);
        const double xa = std::log(supp_lo), xb = std::log(supp_hi);
        parallel_for(static_cast<std::size_t>(n_points), [&](std::size_t k) {
            const double X =
                std::exp(xa + (xb - xa) * static_cast<double>(k) / (n_points - 1.0));
            vals[k] = std::abs(frame.extract(s, X).eps);
        });
        in_max = *std::max_element(vals.begin(), vals.end());
    }
    if (in_max == 0.0) return 0.0;
    // outside: from well below e^s up to the support, and above it to the
    // paper window's upper edge with margin
    const Scenario& sc = frame.scenario();
    double out_max = 0.0;
    auto scan = [&](double A, double B, int n) {
        if (!(B > A)) return;
        std::vector<double> vals(n, 0.0);
        const double xa = std::log(A), xb = std::log(B);
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
            const double X = std::exp(xa + (xb - xa) * static_cast<double>(k) / (n - 1.0));
            vals[k] = std::abs(frame.extract(s, X).eps);
        });
        out_max = std::max(out_max, *std::max_element(vals.begin(), vals.end()));
    };
    scan(std::exp(s) / 50.0, supp_lo * 0.999, n_points);
    scan(supp_hi * 1.001, 1.4 * 2.0 * sc.inner_scale() * std::exp(sc.alpha1() * s),
         n_points / 2);
    return out_max / in_max;
}

} // namespace multiblow
