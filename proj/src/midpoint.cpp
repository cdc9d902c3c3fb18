#include "gint/midpoint.hpp"

#include <cmath>
#include <utility>

namespace gint {
namespace midpoint {

Vec pack(const MidpointUnknowns& u) {
    const int n = static_cast<int>(u.p.size());
    Vec x(2 * n);
    x << u.p, u.q;
    return x;
}

MidpointUnknowns unpack(const Vec& x, int n) {
    return {x.segment(0, n), x.segment(n, n)};
}

namespace {

Vec quad_form(const MassGrad& dM, const Vec& v) {
    const int n = static_cast<int>(dM.size());
    Vec out(n);
    for (int g = 0; g < n; ++g) out[g] = v.dot(dM[g] * v);
    return out;
}

Mat contract_left(const MassGrad& dM, const Vec& v) {
    const int n = static_cast<int>(dM.size());
    Mat T(n, n);
    for (int g = 0; g < n; ++g) T.row(g) = (dM[g].transpose() * v).transpose();
    return T;
}

Mat contract_right(const MassGrad& dM, const Vec& v) {
    const int n = static_cast<int>(dM.size());
    Mat T(n, n);
    for (int d = 0; d < n; ++d) T.col(d) = dM[d] * v;
    return T;
}

Mat quad_form2(const MassHess& d2M, const Vec& v) {
    const int n = static_cast<int>(d2M.size());
    Mat T(n, n);
    for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) T(g, d) = v.dot(d2M[g][d] * v);
    return T;
}

ResidualFn residual_closure(const LagrangianModel& model, const PhasePoint& prev,
                            double h) {
    const int n = model.n;
    return [&model, prev, h, n](const Vec& x) {
        return residual(model, prev, unpack(x, n), h);
    };
}

}  // namespace

Vec residual(const LagrangianModel& model, const PhasePoint& prev,
             const MidpointUnknowns& u, double h) {
    if (!(h > 0.0)) throw DomainError("midpoint residual: h must be positive");
    const int n = model.n;
    require(prev.q.size() == n && prev.p.size() == n && u.p.size() == n &&
                u.q.size() == n,
            "midpoint residual: dimension mismatch");

    const Vec q_m = 0.5 * (prev.q + u.q);
    const Vec g = (u.q - prev.q) / h;

    Vec F_p = u.p - prev.p - 0.5 * h * quad_form(model.dmass(q_m), g) +
              h * model.grad_potential(q_m);
    Vec F_q = h * (model.mass(q_m) * g - 0.5 * (u.p + prev.p));

    Vec F(2 * n);
    F << F_p, F_q;
    return F;
}

Mat jacobian_analytic(const LagrangianModel& model, const PhasePoint& prev,
                      const MidpointUnknowns& u, double h) {
    if (!(h > 0.0)) throw DomainError("midpoint jacobian: h must be positive");
    const int n = model.n;
    const Vec q_m = 0.5 * (prev.q + u.q);
    const Vec g = (u.q - prev.q) / h;

    const Mat I = Mat::Identity(n, n);
    const MassGrad dM = model.dmass(q_m);

    Mat J = Mat::Zero(2 * n, 2 * n);
    J.block(0, 0, n, n) = I;
    J.block(0, n, n, n) = 0.5 * h * model.hess_potential(q_m) -
                          0.25 * h * quad_form2(model.d2mass(q_m), g) -
                          contract_left(dM, g);
    J.block(n, 0, n, n) = -0.5 * h * I;
    J.block(n, n, n, n) = model.mass(q_m) + 0.5 * h * contract_right(dM, g);
    return J;
}

JacobianMask validate_jacobian_blocks(const LagrangianModel& model,
                                      const PhasePoint& state, double h,
                                      double rel_tol, double fd_step) {
    const int n = model.n;
    JacobianMask mask;
    for (auto& row : mask.ok) row.fill(true);

    const ResidualFn res = residual_closure(model, state, h);
    const double qs = std::max(1.0, state.q.lpNorm<Eigen::Infinity>());
    const double ps = std::max(1.0, state.p.lpNorm<Eigen::Infinity>());

    for (int probe = 0; probe < 3; ++probe) {
        MidpointUnknowns u{state.p, state.q};
        for (int k = 0; k < n; ++k) {
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            u.q[k] += qs * sgn * (0.025 + 0.012 * probe + 0.006 * k);
            u.p[k] -= ps * (0.2 + 0.09 * probe) * sgn;
        }
        const Mat Jfd = fd_jacobian(res, pack(u), fd_step);
        const Mat Jan = jacobian_analytic(model, state, u, h);
        for (int br = 0; br < 2; ++br) {
            for (int bc = 0; bc < 2; ++bc) {
                const Mat fd = Jfd.block(br * n, bc * n, n, n);
                const Mat an = Jan.block(br * n, bc * n, n, n);
                const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
                if ((an - fd).cwiseAbs().maxCoeff() / scale > rel_tol)
                    mask.ok[br][bc] = false;
            }
        }
    }
    return mask;
}

StepResult step(const LagrangianModel& model, const PhasePoint& prev, double h,
                const StepperConfig& cfg) {
    return midpoint::step(model, prev, h, cfg, midpoint::validate_jacobian_blocks(model, prev, h));
}

StepResult step(const LagrangianModel& model, const PhasePoint& prev, double h,
                const StepperConfig& cfg, const JacobianMask& mask) {
    if (!(h > 0.0)) throw DomainError("midpoint step: h must be positive");
    const int n = model.n;
    require(prev.q.size() == n && prev.p.size() == n,
            "midpoint step: dimension mismatch");
    if (!model.admissible(prev.q))
        throw DomainError("midpoint step: state outside admissible domain of model " +
                          model.name);

    MidpointUnknowns guess{prev.p, prev.q};
    if (cfg.extrapolated_guess)
        guess.q = prev.q + h * model.mass(prev.q).ldlt().solve(prev.p);

    const ResidualFn res = residual_closure(model, prev, h);
    const JacobianFn jac = [&model, &prev, h, n, &mask](const Vec& x) {
        Mat J = jacobian_analytic(model, prev, unpack(x, n), h);
        if (!mask.all_ok()) {
            const ResidualFn r2 = residual_closure(model, prev, h);
            const Mat Jfd = fd_jacobian(r2, x, 1e-7);
            for (int br = 0; br < 2; ++br)
                for (int bc = 0; bc < 2; ++bc)
                    if (!mask.ok[br][bc])
                        J.block(br * n, bc * n, n, n) = Jfd.block(br * n, bc * n, n, n);
        }
        return J;
    };

    const NewtonOutcome out = solve(res, jac, pack(guess), cfg.newton);
    if (!out.converged) {
        throw StepFailure("midpoint step: Newton did not converge (residual " +
                              std::to_string(out.residual_norm) + ")",
                          out.residual_norm, out.iterations);
    }

    const MidpointUnknowns u = unpack(out.solution, n);
    StepResult result;
    result.next = {prev.t + h, u.q, u.p};
    result.midpoint = 0.5 * (prev.q + u.q);
    result.stats = {out.iterations, out.residual_norm,
                    mask.all_ok() ? JacobianSource::analytic
                                  : JacobianSource::finite_difference};
    return result;
}

Trajectory integrate(const LagrangianModel& model, const PhasePoint& initial,
                     double h, double t_end, const StepperConfig& cfg) {
    if (!(h > 0.0)) throw DomainError("midpoint integrate: h must be positive");
    require(t_end >= initial.t, "midpoint integrate: t_end before initial time");
    const double steps_real = (t_end - initial.t) / h;
    const double rounded = std::round(steps_real);
    require(std::abs(steps_real - rounded) <= 1e-9 * std::max(1.0, std::abs(steps_real)),
            "midpoint integrate: (t_end - t0)/h is not a whole number of steps");
    const long N = static_cast<long>(rounded);

    Trajectory traj;
    traj.h = h;
    traj.model_name = model.name;
    traj.points.reserve(N + 1);
    traj.points.push_back(initial);
    if (N == 0) return traj;

    const JacobianMask mask = midpoint::validate_jacobian_blocks(model, initial, h);
    PhasePoint prev = initial;
    for (long k = 0; k < N; ++k) {
        StepResult r;
        try {
            r = midpoint::step(model, prev, h, cfg, mask);
        } catch (const StepFailure& e) {
            throw IntegrationAbort("midpoint integrate: step " + std::to_string(k + 1) +
                                       " failed: " + e.what(),
                                   std::move(traj), e.residual_norm);
        }
        r.next.t = initial.t + static_cast<double>(k + 1) * h;
        traj.points.push_back(r.next);
        traj.midpoints.push_back(std::move(r.midpoint));
        traj.stats.push_back(r.stats);
        prev = traj.points.back();
    }
    return traj;
}

}  // namespace midpoint
}  // namespace gint
