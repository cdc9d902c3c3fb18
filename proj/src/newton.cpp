#include "gint/newton.hpp"

#include <Eigen/LU>

#include <cmath>

namespace gint {

Mat fd_jacobian(const ResidualFn& residual, const Vec& x, double fd_step) {
    const int n = static_cast<int>(x.size());
    Mat J(n, n);
    for (int k = 0; k < n; ++k) {
        Vec xp = x, xm = x;
        xp[k] += fd_step;
        xm[k] -= fd_step;
        J.col(k) = (residual(xp) - residual(xm)) / (2.0 * fd_step);
    }
    return J;
}

namespace {

// Solve J d = -F with partial pivoting; returns false if J is singular.
bool newton_direction(const Mat& J, const Vec& F, Vec& d) {
    Eigen::PartialPivLU<Mat> lu(J);
    // PartialPivLU has no rank query; detect breakdown via the U diagonal.
    const Vec diag = lu.matrixLU().diagonal();
    const double dmax = diag.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0) || diag.cwiseAbs().minCoeff() < 1e-14 * dmax) return false;
    d = lu.solve(-F);
    return d.allFinite();
}

}  // namespace

NewtonOutcome solve(const ResidualFn& residual, const JacobianFn& jacobian,
                    const Vec& x0, const NewtonConfig& cfg) {
    require(cfg.tolerance > 0.0, "newton: tolerance must be positive");
    require(cfg.max_iterations > 0, "newton: max_iterations must be positive");
    require(cfg.damping > 0.0 && cfg.damping <= 1.0, "newton: damping in (0,1]");
    require(cfg.fd_step > 0.0, "newton: fd_step must be positive");

    Vec x = x0;
    Vec F = residual(x);
    double r = F.lpNorm<Eigen::Infinity>();

    Vec best_x = x;
    double best_r = r;
    int it = 0;
    double r_prev = std::numeric_limits<double>::infinity();

    while (it < cfg.max_iterations) {
        if (r <= cfg.tolerance) {
            // Converged. Polish only while the last update still gained a
            // solid factor (quadratic phase); stop once progress stalls.
            if (!cfg.polish || r == 0.0 || r > 0.25 * r_prev) break;
        }
        Vec d;
        if (!newton_direction(jacobian(x), F, d)) {
            if (!cfg.fd_fallback ||
                !newton_direction(fd_jacobian(residual, x, cfg.fd_step), F, d)) {
                throw SolverError("newton: singular Jacobian");
            }
        }

        double lambda = cfg.damping;
        Vec x_new = x + lambda * d;
        Vec F_new = residual(x_new);
        double r_new = F_new.lpNorm<Eigen::Infinity>();
        if (cfg.damping < 1.0) {
            // monotone safeguard: halve the step for this iteration only
            for (int back = 0; back < 30 && !(r_new <= r) ; ++back) {
                lambda *= 0.5;
                x_new = x + lambda * d;
                F_new = residual(x_new);
                r_new = F_new.lpNorm<Eigen::Infinity>();
            }
        }

        x = std::move(x_new);
        F = std::move(F_new);
        r_prev = r;
        r = r_new;
        ++it;
        if (x.allFinite() && r < best_r) {
            best_x = x;
            best_r = r;
        }
        if (!x.allFinite() || !std::isfinite(r)) break;
    }

    NewtonOutcome out;
    out.solution = best_x;
    out.iterations = it;
    out.residual_norm = best_r;
    out.converged = best_r <= cfg.tolerance;
    return out;
}

}  // namespace gint
