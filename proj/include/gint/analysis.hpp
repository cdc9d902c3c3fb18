#pragma once

#include "gint/model.hpp"
#include "gint/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gint {

/// Dimensionless error samples over time.
struct ErrorSeries {
    std::vector<double> times;
    std::vector<double> values;
    /// true when the reference value was zero and the series fell back to
    /// absolute errors
    bool absolute_fallback = false;
    /// indices excluded from the series (reference zero at that sample)
    std::vector<long> excluded;
};

/// Relative energy error e_H(t) = (H(t) - H0)/H0 along a trajectory, H0 from
/// the initial point. Falls back to absolute errors when H0 = 0.
ErrorSeries energy_error_series(const Trajectory& traj, const LagrangianModel& model);

/// Relative drift (p_k(t) - p_k(0))/p_k(0) of one momentum component.
ErrorSeries momentum_error_series(const Trajectory& traj,
                                  const LagrangianModel& model,
                                  int component_index);

/// Relative nutation error (theta - theta_ref)/theta_ref at interval
/// endpoints; theta is the configuration component `theta_index`.
ErrorSeries nutation_error_series(const Trajectory& traj,
                                  const std::function<double(double)>& reference,
                                  int theta_index = 1);

/// max |values|; throws ContractViolation on an empty series.
double sup_norm(const ErrorSeries& series);

struct ConvergenceReport {
    std::vector<double> step_sizes;  ///< halving sequence
    std::vector<double> norms;       ///< error norm per step size
    std::vector<double> orders;      ///< log2(norm_k / norm_{k+1}) per pair
    double slope = 0.0;              ///< least-squares slope of log norm vs log h
    std::vector<long> floored;       ///< rows below the round-off floor, excluded
    std::string method;
    std::string metric;
};

/// Pairwise orders and least-squares slope from norms at halved step sizes.
/// Rows with norms below `floor` are flagged and excluded from the fit.
ConvergenceReport convergence_order(const std::vector<double>& step_sizes,
                                    const std::vector<double>& norms,
                                    double floor = 1e-12);

/// sup over matching samples of |theta_a(t_k) - theta_b(t_k)|, with
/// trajectory a supplying component `theta_index` at interval endpoints.
/// Grids must align (same length; theta_b_samples[k] at traj.points[k].t).
double cross_method_difference(const Trajectory& traj_a,
                               const std::vector<double>& theta_b_samples,
                               int theta_index = 1);

}  // namespace gint
