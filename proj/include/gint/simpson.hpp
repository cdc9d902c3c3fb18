#pragma once

#include "gint/model.hpp"
#include "gint/newton.hpp"
#include "gint/types.hpp"

#include <array>

namespace gint {

/// Quadratic Lagrange basis on [0,1] at the nodes {0, 1/2, 1}.
/// Throws DomainError outside [0,1].
std::array<double, 3> basis_p2(double theta);

/// Three-node quadrature h/6 * (f0 + 4 f_half + f1), exact for cubics.
inline double simpson_rule(double f0, double f_half, double f1, double h) {
    return h / 6.0 * (f0 + 4.0 * f_half + f1);
}

/// Discrete velocities induced by the quadratic interpolation of
/// (q_l, q_m, q) over one step; exact on quadratic trajectories.
struct GearVelocities {
    Vec g_l, g_m, g;
};

GearVelocities gear_velocities(const Vec& q_l, const Vec& q_m, const Vec& q, double h);

/// Quadrature approximation of the action over one step:
/// (h/2)[1/6 gl'M(ql)gl + 2/3 gm'M(qm)gm + 1/6 g'M(q)g]
///  - h[1/6 V(ql) + 2/3 V(qm) + 1/6 V(q)].
double discrete_lagrangian(const LagrangianModel& model, const Vec& q_l,
                           const Vec& q_m, const Vec& q, double h);

/// The triple solved implicitly each step: interval midpoint configuration,
/// right-endpoint momentum and right-endpoint configuration.
struct StepUnknowns {
    Vec q_m, p, q;
};

Vec pack(const StepUnknowns& u);
StepUnknowns unpack(const Vec& x, int n);

// One step advances (q_j, p_j) -> (p, q) through the stationarity of the
// discrete action. With L_d = discrete_lagrangian(q_l, q_m, q, h) and the
// convention q_l = q_j, the exact conditions are
//
//   dL_d/dq_m = 0                    (interior stationarity)
//   p   = + dL_d/dq   (q_l, q_m, q)  (right discrete momentum)
//   p_j = - dL_d/dq_l (q_l, q_m, q)  (left discrete momentum)
//
// which make consecutive steps share momenta and the composed map
// symplectic. The solver sees an equivalent triangular recombination:
// F_qm is -(3h/2) times the interior condition, F_p is h times the
// difference of the momentum maps with the interior condition substituted,
// and F_q is h/2 times their sum. Every row is O(h) times the continuous
// equations, so one absolute Newton tolerance covers all step sizes.

/// Stationarity system of the discrete action for one step, stacked as
/// [F_qm; F_p; F_q] (length 3n), given the previous phase point.
Vec residual(const LagrangianModel& model, const PhasePoint& prev,
             const StepUnknowns& u, double h);

/// Closed-form 3x3-block Jacobian of the step system in its textbook form.
/// Two blocks of this form are known not to be exact derivatives of
/// residual(); validate_jacobian_blocks() detects them per model and the
/// stepper swaps those for finite differences.
Mat jacobian_analytic(const LagrangianModel& model, const PhasePoint& prev,
                      const StepUnknowns& u, double h);

/// Which blocks of jacobian_analytic() agree with finite differences of
/// residual(). Row/column order: q_m, p, q.
struct JacobianMask {
    std::array<std::array<bool, 3>, 3> ok{};
    bool all_ok() const {
        for (const auto& row : ok)
            for (bool b : row)
                if (!b) return false;
        return true;
    }
};

/// Probes jacobian_analytic() against a finite-difference Jacobian at a few
/// synthetic states derived from `state` and returns the per-block verdicts.
JacobianMask validate_jacobian_blocks(const LagrangianModel& model,
                                      const PhasePoint& state, double h,
                                      double rel_tol = 1e-5,
                                      double fd_step = 1e-7);

/// Jacobian actually used by the Newton iteration: analytic blocks where the
/// mask passes, finite-difference columns elsewhere.
Mat newton_jacobian(const LagrangianModel& model, const PhasePoint& prev,
                    const StepUnknowns& u, double h, const JacobianMask& mask);

struct StepperConfig {
    NewtonConfig newton;
    /// Seed Newton with a constant-velocity prediction instead of the
    /// plain (q_j, p_j, q_j) guess.
    bool extrapolated_guess = false;
};

struct StepResult {
    PhasePoint next;
    Vec midpoint;
    StepStats stats;
};

/// One implicit step (p, q) -> (p', q'). Throws StepFailure on
/// non-convergence, SolverError on Jacobian breakdown, DomainError if
/// prev.q is outside the model's admissible domain.
StepResult step(const LagrangianModel& model, const PhasePoint& prev, double h,
                const StepperConfig& cfg = {});
StepResult step(const LagrangianModel& model, const PhasePoint& prev, double h,
                const StepperConfig& cfg, const JacobianMask& mask);

/// Fixed-step integration to t_end; (t_end - initial.t)/h must be a whole
/// number of steps to 1e-9. A failing step raises IntegrationAbort carrying
/// the partial trajectory.
Trajectory integrate(const LagrangianModel& model, const PhasePoint& initial,
                     double h, double t_end, const StepperConfig& cfg = {});

}  // namespace gint
