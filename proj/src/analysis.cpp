#include "gint/analysis.hpp"

#include <cmath>

namespace gint {

ErrorSeries energy_error_series(const Trajectory& traj, const LagrangianModel& model) {
    require(!traj.points.empty(), "energy_error_series: empty trajectory");
    ErrorSeries out;
    const double H0 = energy(model, traj.points.front());
    out.absolute_fallback = (H0 == 0.0);
    const double denom = out.absolute_fallback ? 1.0 : H0;
    out.times.reserve(traj.points.size());
    out.values.reserve(traj.points.size());
    for (const auto& pt : traj.points) {
        out.times.push_back(pt.t);
        out.values.push_back((energy(model, pt) - H0) / denom);
    }
    return out;
}

ErrorSeries momentum_error_series(const Trajectory& traj,
                                  const LagrangianModel& model,
                                  int component_index) {
    require(!traj.points.empty(), "momentum_error_series: empty trajectory");
    require(component_index >= 0 && component_index < model.n,
            "momentum_error_series: component index out of range");
    ErrorSeries out;
    const double p0 = traj.points.front().p[component_index];
    out.absolute_fallback = (p0 == 0.0);
    const double denom = out.absolute_fallback ? 1.0 : p0;
    for (const auto& pt : traj.points) {
        out.times.push_back(pt.t);
        out.values.push_back((pt.p[component_index] - p0) / denom);
    }
    return out;
}

ErrorSeries nutation_error_series(const Trajectory& traj,
                                  const std::function<double(double)>& reference,
                                  int theta_index) {
    require(!traj.points.empty(), "nutation_error_series: empty trajectory");
    ErrorSeries out;
    long idx = 0;
    for (const auto& pt : traj.points) {
        const double ref = reference(pt.t);
        if (ref == 0.0) {
            out.excluded.push_back(idx++);
            continue;
        }
        out.times.push_back(pt.t);
        out.values.push_back((pt.q[theta_index] - ref) / ref);
        ++idx;
    }
    return out;
}

double sup_norm(const ErrorSeries& series) {
    require(!series.values.empty(), "sup_norm: empty series");
    double m = 0.0;
    for (double v : series.values) m = std::max(m, std::abs(v));
    return m;
}

ConvergenceReport convergence_order(const std::vector<double>& step_sizes,
                                    const std::vector<double>& norms,
                                    double floor) {
    require(step_sizes.size() == norms.size(), "convergence_order: size mismatch");
    require(norms.size() >= 2, "convergence_order: need at least two norms");
    for (size_t k = 0; k + 1 < step_sizes.size(); ++k)
        require(step_sizes[k] > step_sizes[k + 1],
                "convergence_order: step sizes must decrease");

    ConvergenceReport rep;
    rep.step_sizes = step_sizes;
    rep.norms = norms;
    for (size_t k = 0; k < norms.size(); ++k) {
        require(norms[k] >= 0.0, "convergence_order: negative norm");
        if (norms[k] < floor || norms[k] == 0.0) rep.floored.push_back(static_cast<long>(k));
    }
    for (size_t k = 0; k + 1 < norms.size(); ++k) {
        if (norms[k] <= 0.0 || norms[k + 1] <= 0.0) {
            rep.orders.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        rep.orders.push_back(std::log2(norms[k] / norms[k + 1]));
    }

    // least-squares slope of log(norm) against log(h), floored rows excluded
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long cnt = 0;
    for (size_t k = 0; k < norms.size(); ++k) {
        if (norms[k] < floor || norms[k] <= 0.0) continue;
        const double x = std::log(step_sizes[k]), y = std::log(norms[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) {
        const double det = cnt * sxx - sx * sx;
        rep.slope = (cnt * sxy - sx * sy) / det;
    } else {
        rep.slope = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

double cross_method_difference(const Trajectory& traj_a,
                               const std::vector<double>& theta_b_samples,
                               int theta_index) {
    require(traj_a.points.size() == theta_b_samples.size(),
            "cross_method_difference: sample grids do not align");
    require(!theta_b_samples.empty(), "cross_method_difference: empty grids");
    double m = 0.0;
    for (size_t k = 0; k < theta_b_samples.size(); ++k)
        m = std::max(m, std::abs(traj_a.points[k].q[theta_index] - theta_b_samples[k]));
    return m;
}

}  // namespace gint
