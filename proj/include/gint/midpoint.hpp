#pragma once

#include "gint/model.hpp"
#include "gint/newton.hpp"
#include "gint/simpson.hpp"
#include "gint/types.hpp"

namespace gint {
namespace midpoint {

/// Unknowns of the implicit midpoint step: right-endpoint momentum and
/// configuration. The interval midpoint is eliminated as (q_l + q)/2.
struct MidpointUnknowns {
    Vec p, q;
};

Vec pack(const MidpointUnknowns& u);
MidpointUnknowns unpack(const Vec& x, int n);

/// Residual [F_p; F_q] of the one-step midpoint system with
/// q_m = (q_l + q)/2 and g = (q - q_l)/h:
///   F_p = p - p_j - (h/2) [g' dM(q_m) g] + h grad V(q_m)
///   F_q = h [M(q_m) g - (p + p_j)/2]
Vec residual(const LagrangianModel& model, const PhasePoint& prev,
             const MidpointUnknowns& u, double h);

/// Closed-form 2x2-block Jacobian of the midpoint residual.
Mat jacobian_analytic(const LagrangianModel& model, const PhasePoint& prev,
                      const MidpointUnknowns& u, double h);

struct JacobianMask {
    std::array<std::array<bool, 2>, 2> ok{};
    bool all_ok() const {
        return ok[0][0] && ok[0][1] && ok[1][0] && ok[1][1];
    }
};

JacobianMask validate_jacobian_blocks(const LagrangianModel& model,
                                      const PhasePoint& state, double h,
                                      double rel_tol = 1e-5,
                                      double fd_step = 1e-7);

/// One implicit midpoint step; same contract as the Simpson step.
StepResult step(const LagrangianModel& model, const PhasePoint& prev, double h,
                const StepperConfig& cfg = {});
StepResult step(const LagrangianModel& model, const PhasePoint& prev, double h,
                const StepperConfig& cfg, const JacobianMask& mask);

Trajectory integrate(const LagrangianModel& model, const PhasePoint& initial,
                     double h, double t_end, const StepperConfig& cfg = {});

}  // namespace midpoint
}  // namespace gint
