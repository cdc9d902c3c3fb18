#pragma once

#include "gint/model.hpp"
#include "gint/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gint {

struct DoublePendulumParams {
    double m1 = 1.0;  ///< [kg]
    double m2 = 1.0;  ///< [kg]
    double l1 = 1.0;  ///< [m]
    double l2 = 1.0;  ///< [m]
    double g = 9.81;  ///< [m/s^2]
};

/// Planar double pendulum of two point masses on massless rods, n = 2,
/// coordinates measured from the downward vertical. Mass matrix couples the
/// joints through cos(q1 - q2); all derivative tensors are closed-form.
LagrangianModel double_pendulum(const DoublePendulumParams& params);

struct LagrangeTopParams {
    double m_top = 1.0;  ///< [kg]
    double I = 1.0;      ///< transverse moment of inertia I1 = I2 [kg m^2]
    double I3 = 1.0;     ///< axial moment of inertia [kg m^2]
    double l = 1.0;      ///< pivot-to-center-of-mass distance [m]
    double g = 9.81;     ///< [m/s^2]

    /// Squared frequency of the gravitational torque, V = I m cos(theta).
    double m() const { return m_top * g * l / I; }
};

/// Axisymmetric heavy top with a fixed contact point, n = 3, ZXZ Euler
/// angles q = (phi, theta, psi). M(q) is singular only at sin(theta) = 0;
/// the model carries no guard there (integrators check admissibility).
LagrangianModel lagrange_top(const LagrangeTopParams& params);

/// Conserved momenta of the top:
///   p_phi = I3 (psidot + phidot cos θ) cos θ + I phidot sin^2 θ
///   p_psi = I3 (psidot + phidot cos θ)
/// Agrees with rows 1 and 3 of M(q) qdot.
std::pair<double, double> top_conserved_momenta(const LagrangeTopParams& params,
                                                const Vec& q, const Vec& qdot);

/// A registered system with its initial conditions.
struct Preset {
    std::string name;
    std::string description;
    LagrangianModel model;
    PhasePoint initial;  ///< t = 0, momenta from the velocity initial data
    Vec qdot0;
    bool is_top = false;
    LagrangeTopParams top_params;  ///< valid when is_top
};

const std::vector<std::string>& preset_names();

/// Builds a preset by name; throws ContractViolation for unknown names
/// (the message lists the registered ones).
Preset make_preset(const std::string& name);

}  // namespace gint
