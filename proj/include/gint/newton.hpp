#pragma once

#include "gint/types.hpp"

#include <functional>

namespace gint {

/// Settings for the damped Newton iteration.
struct NewtonConfig {
    /// Acceptance threshold on the residual infinity norm.
    double tolerance = 1e-12;
    int max_iterations = 50;
    /// Step fraction in (0, 1]; values < 1 engage the monotone safeguard
    /// (halve on residual increase, restore next iteration).
    double damping = 1.0;
    /// Retry once with a finite-difference Jacobian if the supplied one is
    /// singular.
    bool fd_fallback = true;
    double fd_step = 1e-7;
    /// After the tolerance is met, keep iterating while the residual still
    /// drops fast, so the accepted iterate sits at the round-off floor rather
    /// than just under the tolerance. Costs one or two extra iterations and
    /// is what allows conserved quantities to hold at ~1e-15 over long runs.
    bool polish = true;
};

struct NewtonOutcome {
    Vec solution;
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged = false;
};

using ResidualFn = std::function<Vec(const Vec&)>;
using JacobianFn = std::function<Mat(const Vec&)>;

/// Damped Newton iteration for square systems F(x) = 0.
/// Deterministic; exact on affine systems in one undamped iteration.
/// Throws SolverError if the Jacobian is singular and the finite-difference
/// fallback is disabled or also singular.
NewtonOutcome solve(const ResidualFn& residual, const JacobianFn& jacobian,
                    const Vec& x0, const NewtonConfig& cfg);

/// Central finite-difference Jacobian of `residual` at x.
Mat fd_jacobian(const ResidualFn& residual, const Vec& x, double fd_step);

}  // namespace gint
