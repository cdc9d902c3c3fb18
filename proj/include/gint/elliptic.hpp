#pragma once

#include "gint/systems.hpp"
#include "gint/types.hpp"

namespace gint {

/// Carlson symmetric integral R_F(x, y, z) via the duplication theorem,
/// accurate to ~1e-14. Arguments nonnegative, at most one zero.
double carlson_rf(double x, double y, double z);

/// Complete elliptic integral K(m) = R_F(0, 1-m, 1), parameter m = k^2.
double elliptic_k(double m);

/// Incomplete integral F(phi | m) for |phi| <= pi/2, via Carlson R_F.
double elliptic_f(double phi, double m);

/// Jacobi sn(u | m) for parameter 0 <= m <= 1, computed by the descending
/// Landen (arithmetic-geometric mean) transformation; sn(u,0) = sin u,
/// sn(u,1) = tanh u.
double jacobi_sn(double u, double m);

/// Motion constants of the top reduced to u = cos(theta):
/// udot^2 = f(u) = (2c/I - 2 m u)(1 - u^2) - (b - a u)^2.
struct TopMotionConstants {
    double c = 0.0;      ///< energy above the constant spin part [J]
    double p_phi = 0.0;
    double p_psi = 0.0;
    double m = 0.0;      ///< torque frequency squared [1/s^2]
    double a = 0.0;      ///< p_psi / I [1/s]
    double b = 0.0;      ///< p_phi / I [1/s]
};

/// The cubic f(u) = a3 u^3 + a2 u^2 + a1 u + a0 governing nutation, with its
/// three real roots u1 <= u2 <= u3. Physical motion oscillates over
/// [u1, u2] (a subset of [-1, 1]); u3 >= 1 is spurious.
struct NutationCubic {
    std::array<double, 4> coeffs{};  ///< {a3, a2, a1, a0}
    double u1 = 0.0, u2 = 0.0, u3 = 0.0;
    double u0 = 0.0;          ///< cos(theta_0), where the motion starts
    double udot0 = 0.0;       ///< d(cos theta)/dt at t = 0
    TopMotionConstants constants;

    double eval(double u) const {
        return ((coeffs[0] * u + coeffs[1]) * u + coeffs[2]) * u + coeffs[3];
    }
    bool degenerate_band(double tol = 1e-12) const { return u2 - u1 <= tol; }
};

/// Builds the nutation cubic from the top parameters and initial state
/// (q0 = (phi, theta, psi), qdot0). Requires sin(theta_0) != 0. Throws
/// DomainError if the root configuration is unphysical (complex roots or
/// oscillation band outside [-1, 1]).
NutationCubic nutation_cubic(const LagrangeTopParams& params, const Vec& q0,
                             const Vec& qdot0);

/// Exact nutation angle theta(t). cos(theta) sweeps the band [u1, u2] as
/// u(t) = u1 + (u2 - u1) sn^2(kappa t + delta | k^2) with
/// k^2 = (u2 - u1)/(u3 - u1), kappa = sqrt(a3 (u3 - u1) / 2) and the phase
/// delta fixed by (u0, sign of udot0). A degenerate band returns constant
/// theta (steady precession / sleeping top).
double exact_nutation(const NutationCubic& cubic, double t);

/// Nutation period T = 2 K(k^2) / kappa, equal to twice the time u needs to
/// travel the band (the complete elliptic integral of ds/sqrt(f)).
/// Throws DomainError for a degenerate or improper band.
double nutation_period(const NutationCubic& cubic);

}  // namespace gint
