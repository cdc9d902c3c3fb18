#include "gint/simpson.hpp"

#include <cmath>
#include <utility>

namespace gint {

std::array<double, 3> basis_p2(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw DomainError("basis_p2: theta outside [0,1]");
    return {(1.0 - theta) * (1.0 - 2.0 * theta), 4.0 * theta * (1.0 - theta),
            theta * (2.0 * theta - 1.0)};
}

GearVelocities gear_velocities(const Vec& q_l, const Vec& q_m, const Vec& q, double h) {
    if (!(h > 0.0)) throw DomainError("gear_velocities: h must be positive");
    require(q_l.size() == q_m.size() && q_m.size() == q.size(),
            "gear_velocities: dimension mismatch");
    GearVelocities v;
    v.g_l = (-3.0 * q_l + 4.0 * q_m - q) / h;
    v.g_m = (q - q_l) / h;
    v.g = (q_l - 4.0 * q_m + 3.0 * q) / h;
    return v;
}

double discrete_lagrangian(const LagrangianModel& model, const Vec& q_l,
                           const Vec& q_m, const Vec& q, double h) {
    const GearVelocities v = gear_velocities(q_l, q_m, q, h);
    const double kin_l = 0.5 * v.g_l.dot(model.mass(q_l) * v.g_l);
    const double kin_m = 0.5 * v.g_m.dot(model.mass(q_m) * v.g_m);
    const double kin_r = 0.5 * v.g.dot(model.mass(q) * v.g);
    return simpson_rule(kin_l - model.potential(q_l), kin_m - model.potential(q_m),
                        kin_r - model.potential(q), h);
}

Vec pack(const StepUnknowns& u) {
    const int n = static_cast<int>(u.q_m.size());
    Vec x(3 * n);
    x << u.q_m, u.p, u.q;
    return x;
}

StepUnknowns unpack(const Vec& x, int n) {
    return {x.segment(0, n), x.segment(n, n), x.segment(2 * n, n)};
}

namespace {

// [v' dM[g] v]_g
Vec quad_form(const MassGrad& dM, const Vec& v) {
    const int n = static_cast<int>(dM.size());
    Vec out(n);
    for (int g = 0; g < n; ++g) out[g] = v.dot(dM[g] * v);
    return out;
}

// T(g,d) = sum_a dM[g](a,d) v(a); with dM[g] symmetric this is row g = dM[g] v.
Mat contract_left(const MassGrad& dM, const Vec& v) {
    const int n = static_cast<int>(dM.size());
    Mat T(n, n);
    for (int g = 0; g < n; ++g) T.row(g) = (dM[g].transpose() * v).transpose();
    return T;
}

// T(g,d) = sum_b dM[d](g,b) v(b), i.e. column d = dM[d] v.
Mat contract_right(const MassGrad& dM, const Vec& v) {
    const int n = static_cast<int>(dM.size());
    Mat T(n, n);
    for (int d = 0; d < n; ++d) T.col(d) = dM[d] * v;
    return T;
}

// T(g,d) = v' d2M[g][d] v
Mat quad_form2(const MassHess& d2M, const Vec& v) {
    const int n = static_cast<int>(d2M.size());
    Mat T(n, n);
    for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) T(g, d) = v.dot(d2M[g][d] * v);
    return T;
}

struct PointEval {
    Mat M;
    MassGrad dM;
    Vec dV;
};

PointEval eval_point(const LagrangianModel& model, const Vec& q, const char* where) {
    try {
        return {model.mass(q), model.dmass(q), model.grad_potential(q)};
    } catch (const std::exception& e) {
        throw ContractViolation(std::string("residual: model evaluation failed at ") +
                                where + " point: " + e.what());
    }
}

}  // namespace

Vec residual(const LagrangianModel& model, const PhasePoint& prev,
             const StepUnknowns& u, double h) {
    if (!(h > 0.0)) throw DomainError("residual: h must be positive");
    const int n = model.n;
    require(prev.q.size() == n && prev.p.size() == n && u.q_m.size() == n &&
                u.p.size() == n && u.q.size() == n,
            "residual: dimension mismatch");

    const Vec& q_l = prev.q;
    const GearVelocities v = gear_velocities(q_l, u.q_m, u.q, h);

    const PointEval L = eval_point(model, q_l, "left");
    const PointEval Mi = eval_point(model, u.q_m, "mid");
    const PointEval R = eval_point(model, u.q, "right");

    const Vec quad_l = quad_form(L.dM, v.g_l);
    const Vec quad_m = quad_form(Mi.dM, v.g_m);
    const Vec quad_r = quad_form(R.dM, v.g);

    const double h2 = h * h;

    // Stationarity of the discrete action in the interior configuration.
    Vec F_qm = h * (R.M * v.g - L.M * v.g_l) + h2 * Mi.dV - 0.5 * h2 * quad_m;

    // Momentum advance: h * (difference of the right and left discrete
    // momentum maps, reduced with the interior stationarity).
    Vec F_p = h * (u.p - prev.p) +
              h2 * (L.dV / 6.0 + 2.0 / 3.0 * Mi.dV + R.dV / 6.0) -
              0.5 * h2 * (quad_l / 6.0 + 2.0 / 3.0 * quad_m + quad_r / 6.0);

    // Configuration advance: (h/2) * (sum of the two momentum maps).
    Vec F_q = h * (L.M * v.g_l / 6.0 + 2.0 / 3.0 * (Mi.M * v.g_m) + R.M * v.g / 6.0) -
              0.5 * h * (u.p + prev.p) - h2 / 24.0 * quad_l + h2 / 24.0 * quad_r +
              h2 / 12.0 * L.dV - h2 / 12.0 * R.dV;

    Vec F(3 * n);
    F << F_qm, F_p, F_q;
    return F;
}

Mat jacobian_analytic(const LagrangianModel& model, const PhasePoint& prev,
                      const StepUnknowns& u, double h) {
    if (!(h > 0.0)) throw DomainError("jacobian_analytic: h must be positive");
    const int n = model.n;
    const Vec& q_l = prev.q;
    const GearVelocities v = gear_velocities(q_l, u.q_m, u.q, h);

    const Mat Ml = model.mass(q_l), Mm = model.mass(u.q_m), Mr = model.mass(u.q);
    const MassGrad dMl = model.dmass(q_l), dMm = model.dmass(u.q_m),
                   dMr = model.dmass(u.q);
    const MassHess d2Mm = model.d2mass(u.q_m), d2Mr = model.d2mass(u.q);
    const Mat Km = model.hess_potential(u.q_m), Kr = model.hess_potential(u.q);
    const Mat I = Mat::Identity(n, n);
    const double h2 = h * h;

    Mat J = Mat::Zero(3 * n, 3 * n);
    auto block = [&](int r, int c) { return J.block(r * n, c * n, n, n); };

    // row F_qm
    block(0, 0) = -4.0 * (Mr + Ml) + h2 * Km - 0.5 * h2 * quad_form2(d2Mm, v.g_m);
    // block(0,1) stays zero
    block(0, 2) = Ml + 3.0 * Mr - h * contract_left(dMm, v.g_m) +
                  h * contract_right(dMm, v.g_m);

    // row F_p
    block(1, 0) = -2.0 * h / 3.0 * contract_left(dMl, v.g_l) +
                  2.0 * h / 3.0 * contract_left(dMr, v.g) -
                  h2 / 3.0 * quad_form2(d2Mm, v.g_m) + 2.0 * h2 / 3.0 * Km.transpose();
    block(1, 1) = h * I;
    block(1, 2) = h / 6.0 * contract_left(dMl, v.g_l) -
                  2.0 * h / 3.0 * contract_left(dMm, v.g_m) -
                  h / 2.0 * contract_left(dMr, v.g) -
                  h2 / 12.0 * quad_form2(d2Mr, v.g) + h2 / 6.0 * Kr.transpose();

    // row F_q
    block(2, 0) = 2.0 / 3.0 * (Ml - Mr) + 2.0 * h / 3.0 * contract_right(dMm, v.g_m) -
                  h / 3.0 * contract_left(dMl, v.g_l) - h / 3.0 * contract_left(dMr, v.g);
    block(2, 1) = -0.5 * I;
    block(2, 2) = -Ml / 6.0 + 2.0 / 3.0 * Mm + 0.5 * Mr +
                  h2 / 24.0 * quad_form2(d2Mr, v.g) - h2 / 12.0 * Kr +
                  h / 6.0 * contract_right(dMr, v.g) +
                  h / 12.0 * contract_left(dMl, v.g_l) +
                  h / 4.0 * contract_left(dMr, v.g);

    return J;
}

namespace {

ResidualFn residual_closure(const LagrangianModel& model, const PhasePoint& prev,
                            double h) {
    const int n = model.n;
    return [&model, prev, h, n](const Vec& x) {
        return residual(model, prev, unpack(x, n), h);
    };
}

}  // namespace

JacobianMask validate_jacobian_blocks(const LagrangianModel& model,
                                      const PhasePoint& state, double h,
                                      double rel_tol, double fd_step) {
    const int n = model.n;
    JacobianMask mask;
    for (auto& row : mask.ok) row.fill(true);

    const ResidualFn res = residual_closure(model, state, h);
    const double qs = std::max(1.0, state.q.lpNorm<Eigen::Infinity>());
    const double ps = std::max(1.0, state.p.lpNorm<Eigen::Infinity>());

    // three deterministic probes with nonzero discrete velocities, so that
    // velocity-dependent Jacobian terms cannot cancel out
    for (int probe = 0; probe < 3; ++probe) {
        StepUnknowns u;
        u.q_m = state.q;
        u.q = state.q;
        u.p = state.p;
        for (int k = 0; k < n; ++k) {
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            u.q_m[k] += qs * sgn * (0.03 + 0.011 * probe + 0.007 * k);
            u.q[k] -= qs * sgn * (0.02 + 0.009 * probe + 0.005 * k);
            u.p[k] += ps * (0.25 + 0.1 * probe) * sgn;
        }
        const Mat Jfd = fd_jacobian(res, pack(u), fd_step);
        const Mat Jan = jacobian_analytic(model, state, u, h);
        for (int br = 0; br < 3; ++br) {
            for (int bc = 0; bc < 3; ++bc) {
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

Mat newton_jacobian(const LagrangianModel& model, const PhasePoint& prev,
                    const StepUnknowns& u, double h, const JacobianMask& mask) {
    const int n = model.n;
    Mat J = jacobian_analytic(model, prev, u, h);
    if (mask.all_ok()) return J;

    const ResidualFn res = residual_closure(model, prev, h);
    const Vec x = pack(u);
    const double fd_step = 1e-7;
    for (int bc = 0; bc < 3; ++bc) {
        bool need = false;
        for (int br = 0; br < 3; ++br) need = need || !mask.ok[br][bc];
        if (!need) continue;
        // finite-difference this column group, overwrite failing blocks only
        for (int k = 0; k < n; ++k) {
            Vec xp = x, xm = x;
            xp[bc * n + k] += fd_step;
            xm[bc * n + k] -= fd_step;
            const Vec col = (res(xp) - res(xm)) / (2.0 * fd_step);
            for (int br = 0; br < 3; ++br)
                if (!mask.ok[br][bc])
                    J.block(br * n, bc * n + k, n, 1) = col.segment(br * n, n);
        }
    }
    return J;
}

StepResult step(const LagrangianModel& model, const PhasePoint& prev, double h,
                const StepperConfig& cfg) {
    return step(model, prev, h, cfg, validate_jacobian_blocks(model, prev, h));
}

StepResult step(const LagrangianModel& model, const PhasePoint& prev, double h,
                const StepperConfig& cfg, const JacobianMask& mask) {
    if (!(h > 0.0)) throw DomainError("step: h must be positive");
    const int n = model.n;
    require(prev.q.size() == n && prev.p.size() == n, "step: dimension mismatch");
    if (!model.admissible(prev.q))
        throw DomainError("step: state outside admissible domain of model " + model.name);

    StepUnknowns guess{prev.q, prev.p, prev.q};
    if (cfg.extrapolated_guess) {
        const Vec v = model.mass(prev.q).ldlt().solve(prev.p);
        guess.q_m = prev.q + 0.5 * h * v;
        guess.q = prev.q + h * v;
    }

    const ResidualFn res = residual_closure(model, prev, h);
    const JacobianFn jac = [&model, &prev, h, n, &mask](const Vec& x) {
        return newton_jacobian(model, prev, unpack(x, n), h, mask);
    };

    const NewtonOutcome out = solve(res, jac, pack(guess), cfg.newton);
    if (!out.converged) {
        throw StepFailure("step: Newton did not converge (residual " +
                              std::to_string(out.residual_norm) + ")",
                          out.residual_norm, out.iterations);
    }

    const StepUnknowns u = unpack(out.solution, n);
    StepResult result;
    result.next = {prev.t + h, u.q, u.p};
    result.midpoint = u.q_m;
    result.stats = {out.iterations, out.residual_norm,
                    mask.all_ok() ? JacobianSource::analytic
                                  : JacobianSource::finite_difference};
    return result;
}

Trajectory integrate(const LagrangianModel& model, const PhasePoint& initial,
                     double h, double t_end, const StepperConfig& cfg) {
    if (!(h > 0.0)) throw DomainError("integrate: h must be positive");
    require(t_end >= initial.t, "integrate: t_end before initial time");
    const double steps_real = (t_end - initial.t) / h;
    const double rounded = std::round(steps_real);
    require(std::abs(steps_real - rounded) <= 1e-9 * std::max(1.0, std::abs(steps_real)),
            "integrate: (t_end - t0)/h is not a whole number of steps");
    const long N = static_cast<long>(rounded);

    Trajectory traj;
    traj.h = h;
    traj.model_name = model.name;
    traj.points.reserve(N + 1);
    traj.midpoints.reserve(N);
    traj.stats.reserve(N);
    traj.points.push_back(initial);

    if (N == 0) return traj;
    const JacobianMask mask = validate_jacobian_blocks(model, initial, h);

    PhasePoint prev = initial;
    for (long k = 0; k < N; ++k) {
        StepResult r;
        try {
            r = step(model, prev, h, cfg, mask);
        } catch (const StepFailure& e) {
            throw IntegrationAbort("integrate: step " + std::to_string(k + 1) +
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

}  // namespace gint
