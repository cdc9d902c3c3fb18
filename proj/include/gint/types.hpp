#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace gint {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Rank-3 derivative of the mass matrix: dM[gamma](alpha, beta) = d_gamma M_ab.
using MassGrad = std::vector<Mat>;
/// Rank-4 second derivative: d2M[gamma][delta](alpha, beta) = d_gamma d_delta M_ab.
using MassHess = std::vector<std::vector<Mat>>;

/// A point of the discrete flow: time, configuration and conjugate momentum.
struct PhasePoint {
    double t = 0.0;
    Vec q;
    Vec p;
};

/// Violated precondition (dimension mismatch, bad argument, unknown preset).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Mass matrix numerically singular at the requested configuration.
class SingularMassError : public std::runtime_error {
public:
    SingularMassError(const std::string& what, double condition)
        : std::runtime_error(what), condition(condition) {}
    double condition;  ///< estimate of cond(M) at the failure point
};

/// Linear or nonlinear solver breakdown (singular Jacobian and no fallback).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An implicit step did not converge within the iteration budget.
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, double residual_norm, int iterations)
        : std::runtime_error(what),
          residual_norm(residual_norm),
          iterations(iterations) {}
    double residual_norm;
    int iterations;
};

/// Which Jacobian fed the Newton iterations of a step.
enum class JacobianSource { analytic, finite_difference };

/// Per-step solver bookkeeping.
struct StepStats {
    int newton_iterations = 0;
    double final_residual_norm = 0.0;
    JacobianSource jacobian_source = JacobianSource::analytic;
};

/// Discrete trajectory at t = t0, t0+h, ..., with per-interval midpoint
/// configurations (implicit variational integrators only) and solver stats.
struct Trajectory {
    std::vector<PhasePoint> points;
    std::vector<Vec> midpoints;  ///< empty for single-stage methods (RK4)
    std::vector<StepStats> stats;
    double h = 0.0;
    std::string model_name;
};

/// Thrown by integrate() when a step fails; carries the partial trajectory.
class IntegrationAbort : public std::runtime_error {
public:
    IntegrationAbort(const std::string& what, Trajectory partial,
                     double residual_norm)
        : std::runtime_error(what),
          partial(std::move(partial)),
          residual_norm(residual_norm) {}
    Trajectory partial;
    double residual_norm;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

}  // namespace gint
