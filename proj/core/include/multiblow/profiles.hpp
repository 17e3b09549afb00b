#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace multiblow {

/// Self-similar blowup profile of order 2i+1. Psi_i is the odd, strictly
/// decreasing solution of the profile ODE
///     -Psi/(2i) + alpha X dPsi + Psi dPsi = 0,   alpha = (2i+1)/(2i),
/// realized as the unique real root of the implicit relation
///     X = -Psi - Psi^(2i+1).
/// The implicit relation is certified against the ODE by residual_selfsimilar.
struct Profile {
    int i = 1;

    double alpha() const { return 1.0 + 1.0 / (2.0 * i); }
    int power() const { return 2 * i + 1; }
};

/// Eigenfunction phi_j = Psi_{i1}^j * dPsi_{i1} of the linearized operator H_X,
/// with eigenvalue lambda_j = (j - 2*i1 - 1) / (2*i1).
struct EigenfunctionSpec {
    int j = 0;
    int i1 = 1;

    double lambda() const { return (j - 2.0 * i1 - 1.0) / (2.0 * i1); }
};

/// Frozen-time context for the multi-profile transport field A.
/// centers are the rescaled profile centers Y_l in X units; in the pinned
/// frame centers[0] == 0 exactly, in the drift-corrected frame all centers
/// share a common offset (relative spacings always match the Y_l trajectory).
struct OperatorContext {
    double s = 0.0;
    std::vector<double> centers;
    std::vector<Profile> profiles;

    std::size_t size() const { return profiles.size(); }
};

/// Psi_i(X). Relative accuracy <= 1e-13; odd in X by construction.
/// Throws NumericalError if the safeguarded Newton iteration fails.
double profile_eval(const Profile& p, double X);

/// (dPsi, d2Psi) at X by implicit differentiation of X = -Psi - Psi^(2i+1):
///   dPsi  = -1 / D,                D = 1 + (2i+1) Psi^(2i)
///   d2Psi = -2i (2i+1) Psi^(2i-1) / D^3.
std::pair<double, double> profile_derivs(const Profile& p, double X);

/// phi_j(X) = Psi_{i1}(X)^j * dPsi_{i1}(X).
double phi_eval(const EigenfunctionSpec& e, double X);

/// H_X f = -f/(2 i1) + alpha_1 X df + f dPsi_{i1}(X) + Psi_{i1}(X) df,
/// for a function with value f and derivative df at X.
double hx_apply(double f, double df, double X, int i1);

/// Transport speed of the multi-profile field:
///   alpha_1 X + sum_l e^{(a1-al)s} Psi_{il}( e^{(al-a1)s} (X - Y_l) ).
double a_field_speed(const OperatorContext& ctx, double X);

/// Max over the grid of the profile ODE residual
///   | -Psi/(2i) + alpha X dPsi + Psi dPsi |
/// using the analytic derivatives. Empty grid -> 0. This is the oracle that
/// certifies the implicit-relation implementation.
double residual_selfsimilar(const Profile& p, const std::vector<double>& X_grid);

/// Taylor coefficients of Psi_i(X) = sum_k c_k X^k up to the given order,
/// produced by series inversion of the implicit relation (never hard-coded).
/// c[0]=0, c[1]=-1, c[2i+1]=+1, next nonzero at X^{4i+1}.
std::vector<double> profile_taylor(const Profile& p, int order);

/// Two-term large-|X| asymptotic:
///   -sgn(X) ( |X|^{1/(2i+1)} - |X|^{(1-2i)/(2i+1)} / (2i+1) ).
double profile_asymptotic_large(const Profile& p, double X);

/// Leading small-X form -X + X^(2i+1).
double profile_asymptotic_small(const Profile& p, double X);

} // namespace multiblow
