#pragma once

#include "gint/model.hpp"
#include "gint/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gint {

/// Explicit first-order system dy/dt = eval(t, y).
struct FirstOrderField {
    int dimension = 0;
    std::string name;
    std::function<Vec(double, const Vec&)> eval;
};

/// Canonical equations of H(p,q) = 1/2 p' M(q)^{-1} p + V(q) with
/// y = [q; p]:  qdot = M^{-1} p,
/// pdot_g = 1/2 p' M^{-1} (d_g M) M^{-1} p - d_g V.
FirstOrderField hamiltonian_field(const LagrangianModel& model);

/// Axisymmetric-top first-order system in y = (phi, theta, xi) obtained by
/// substituting the two conserved momenta into the nutation equation:
///   phidot = (p_phi - p_psi cos θ) / (I sin^2 θ)
///   thetadot = xi
///   xidot = (A + phidot^2 cos θ - (p_psi / I) phidot) sin θ
struct ReducedTopParams {
    double I = 1.0;
    double p_phi = 0.0;
    double p_psi = 0.0;
    double A = 0.0;           ///< squared frequency of the gravitational torque
    double sin_guard = 1e-10; ///< |sin θ| below this raises DomainError
};

/// The cusp-motion configuration: I = 1, p_phi = 2 pi sqrt(3), p_psi = 4 pi,
/// A = 4 pi^2.
ReducedTopParams reduced_top_default();

FirstOrderField reduced_top_field(const ReducedTopParams& params = reduced_top_default());

/// Classical four-stage fourth-order Runge-Kutta update.
Vec rk4_step(const FirstOrderField& field, double t, const Vec& y, double h);

/// Fixed-step RK4 integration; returns states at t0, t0+h, ..., t0+N h.
std::vector<Vec> rk4_integrate(const FirstOrderField& field, double t0,
                               const Vec& y0, double h, long steps);

/// RK4 on the canonical equations of `model`, packaged as a Trajectory so the
/// analysis tools treat it like the implicit integrators (no midpoints).
Trajectory rk4_integrate_canonical(const LagrangianModel& model,
                                   const PhasePoint& initial, double h,
                                   double t_end);

}  // namespace gint
