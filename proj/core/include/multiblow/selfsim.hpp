#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "multiblow/characteristics.hpp"
#include "multiblow/scenario.hpp"

namespace multiblow {

/// Perturbation field sampled in the self-similar frame at one instant.
struct SelfSimilarSnapshot {
    double s = 0.0;
    std::vector<double> X_grid;
    std::vector<double> epsilon;
    std::vector<double> depsilon; ///< dX eps
    std::vector<double> centers;  ///< Y_l(s), frame-dependent
    double support_lo = 0.0;      ///< recorded (Lagrangian-transported) support
    double support_hi = 0.0;
    std::string scenario_ref;
};

/// Weighted-space configuration: weight phi_j^{-2q} |X|^{-1}, j = 2 i1 + 2
/// in the main pipeline.
struct NormConfig {
    int j = 4;
    int q = 10;
    int i1 = 1; ///< profile index of the weight eigenfunction phi_j
    double quadrature_rtol = 1e-8;
    int panels_init = 64;
    int panels_max = 4096;

    static NormConfig for_scenario(const Scenario& sc) {
        NormConfig c;
        c.j = 2 * sc.i1() + 2;
        c.q = sc.q;
        c.i1 = sc.i1();
        c.quadrature_rtol = sc.tols.quadrature_rtol;
        c.panels_init = sc.grids.norm_panels_init;
        c.panels_max = sc.grids.norm_panels_max;
        return c;
    }
};

/// Self-similar decomposition of an exact Burgers solution:
///   u(t,x) = sum_l (T-t)^{1/(2 i_l)} Psi_{i_l}((x - c_l(t)) (T-t)^{-a_l}) + eps~,
///   eps(s,X) = e^{(a1-1)s} eps~,    X = x (T-t)^{-a1},   s = -log(T-t),
/// with centers c_l(t) = y_{l,0} + (delta - (T-t)) (h_l + drift); the drift is
/// u0(0) in the comoving frame and 0 in the pinned frame. The e^{(a1-1)s}
/// scaling is the one under which the evolution equation for eps closes with
/// unit coefficients (verified by the first-order residual test).
class SelfSimFrame {
public:
    SelfSimFrame(Scenario scenario, InitialData data);

    const Scenario& scenario() const { return sc_; }
    const InitialData& data() const { return data_; }
    const std::vector<double>& h() const { return h_; }
    double drift() const { return drift_; }

    double center_x(int l, double t) const; ///< l 0-based, physical units
    double Y(int l, double s) const;        ///< rescaled center in X units
    OperatorContext context(double s) const;

    /// eps and dX eps at (s, X), evaluated pointwise through the exact solver.
    struct Value {
        double eps;
        double deps;
    };
    Value extract(double s, double X) const;

    double a_speed(double s, double X) const;

    /// Flow speed of the support transport: a_speed + eps.
    double flow_speed(double s, double X) const;

    /// Sum of the non-d_s terms of the evolution equation at (s, X) and the
    /// forcing Theta of the energy lemma (eps_s + H~_X eps = Theta).
    struct EvoTerms {
        double non_ds;   ///< everything except d_s eps
        double eps;
        double deps;
        double theta;
        double scale;    ///< magnitude of the dominant transport term
    };
    EvoTerms evolution_terms(double s, double X) const;

    /// Physical solution value u(t,x); inverse of the extraction map.
    double reconstruct(double s, double X, double eps) const;

private:
    Scenario sc_;
    InitialData data_;
    std::vector<double> h_;
    std::vector<double> hh_; ///< h + drift
    double drift_ = 0.0;
};

/// (int_A^B f^{2q} / (phi_j^{2q} |X|) dX)^{1/(2q)} with the substitution
/// X = e^xi (which absorbs the |X|^{-1} factor). Panel-doubling refinement
/// to the configured relative tolerance; overflow-safe for large q.
/// Throws DomainError when the support touches X <= 0.
double weighted_norm(const std::function<double(double)>& f, const NormConfig& cfg,
                     double A, double B);

/// Norm of eps or A eps on [A,B] via pointwise extraction.
enum class NormField { eps, Aeps };
double weighted_norm(const SelfSimFrame& frame, double s, const NormConfig& cfg,
                     double A, double B, NormField which);

struct EmbeddingResult {
    double lhs = 0.0;   ///< sup |f/phi_j|^{2q}
    double rhs = 0.0;   ///< int (f/phi)^{2q} dxi + int (X f' / phi)^{2q} dxi
    double ratio = 0.0; ///< lhs/rhs, 0 when both vanish
};

/// Embedding inequality data for a field with derivative on [A,B].
EmbeddingResult embedding_check(const std::function<double(double)>& f,
                                const std::function<double(double)>& df,
                                const NormConfig& cfg, double A, double B);

/// (min supp - e^s, 2 delta^{1/(2 i1)} e^{a1 s} - max supp); +inf margins for
/// an empty support.
std::pair<double, double> support_bounds_check(const SelfSimilarSnapshot& snap,
                                               const Scenario& sc);

/// Per-s monitor record. Margins are bound - observed; negative marks a
/// violated bound.
struct LedgerRow {
    double s = 0.0;
    double norm_eps = 0.0;
    double norm_Aeps = 0.0;
    double supp_lo = 0.0;
    double supp_hi = 0.0;
    double margin_supp_lo = 0.0;
    double margin_supp_hi = 0.0;
    double sup_eps_over_X = 0.0;
    double sup_deps = 0.0;
    double margin_norm_eps = 0.0;
    double margin_norm_Aeps = 0.0;
    double margin_sup_eps = 0.0;
    double margin_sup_deps = 0.0;
    double leak_rel = 0.0;
    double transport_margin = 0.0;
    double residual_evo = 0.0;
    double energy_C = 0.0;
};

/// Norms, pointwise sups, support margins, and decay-bound margins at one s.
/// Support endpoints must already be transported to this s.
LedgerRow bootstrap_monitor(const SelfSimFrame& frame, double s, double supp_lo,
                            double supp_hi, const NormConfig& cfg,
                            const BootstrapConstants& K);

struct ResidualResult {
    double residual = 0.0; ///< max |FD(d_s eps) + non-ds terms| over the grid
    double scale = 0.0;    ///< max transport-term magnitude, for context
    bool ds_warning = false;
};

/// Evolution-equation residual with d_s eps by forward differencing
/// snapshots at s and s+ds; first-order accurate in ds.
ResidualResult evolution_residual(const SelfSimFrame& frame, double s, double ds,
                                  const std::vector<double>& X_grid);

struct EnergyCheck {
    std::vector<double> s_values;
    std::vector<double> C_pointwise; ///< C(s) making the estimate an equality
    double C_fit = 0.0;              ///< max over s, clamped at 0
};

/// Fits the constant in the weighted energy estimate
///   (1/2q) dI/ds <= -(1/2 - C/q) I + int eps^{2q-1} Theta w dX,
/// I = int eps^{2q} w dX, with dI/ds by centered differences (step ds).
EnergyCheck energy_inequality_check(const SelfSimFrame& frame,
                                    const std::vector<double>& s_values,
                                    const std::vector<double>& supp_lo,
                                    const std::vector<double>& supp_hi,
                                    const NormConfig& cfg, double ds = 1e-3);

/// Snapshot sampled on a log grid over [supp_lo, supp_hi].
SelfSimilarSnapshot to_selfsimilar(const SelfSimFrame& frame, double t, int n_points,
                                   double supp_lo, double supp_hi);

/// Largest |eps| on a log grid strictly outside [supp_lo, supp_hi], relative
/// to the largest |eps| inside. Quantifies violation of support containment.
double support_leak(const SelfSimFrame& frame, double s, double supp_lo, double supp_hi,
                    int n_points = 200);

} // namespace multiblow
