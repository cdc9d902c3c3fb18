#include "gint/first_order.hpp"

#include <cmath>

namespace gint {

FirstOrderField hamiltonian_field(const LagrangianModel& model) {
    FirstOrderField field;
    field.dimension = 2 * model.n;
    field.name = model.name + "-canonical";
    const int n = model.n;
    field.eval = [&model, n](double, const Vec& y) {
        const Vec q = y.segment(0, n);
        const Vec p = y.segment(n, n);
        const Mat M = model.mass(q);
        Eigen::LDLT<Mat> ldlt(M);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw SingularMassError("hamiltonian_field: singular mass matrix", 0.0);
        const Vec v = ldlt.solve(p);  // qdot = M^{-1} p
        const MassGrad dM = model.dmass(q);
        const Vec dV = model.grad_potential(q);
        Vec ydot(2 * n);
        ydot.segment(0, n) = v;
        for (int g = 0; g < n; ++g)
            ydot[n + g] = 0.5 * v.dot(dM[g] * v) - dV[g];
        return ydot;
    };
    return field;
}

ReducedTopParams reduced_top_default() {
    ReducedTopParams p;
    p.I = 1.0;
    p.p_phi = 2.0 * M_PI * std::sqrt(3.0);
    p.p_psi = 4.0 * M_PI;
    p.A = 4.0 * M_PI * M_PI;
    return p;
}

FirstOrderField reduced_top_field(const ReducedTopParams& params) {
    FirstOrderField field;
    field.dimension = 3;
    field.name = "reduced-top";
    field.eval = [params](double, const Vec& y) {
        const double theta = y[1], xi = y[2];
        const double s = std::sin(theta), c = std::cos(theta);
        if (std::abs(s) < params.sin_guard)
            throw DomainError("reduced_top_field: sin(theta) below guard");
        const double phidot = (params.p_phi - params.p_psi * c) / (params.I * s * s);
        Vec ydot(3);
        ydot[0] = phidot;
        ydot[1] = xi;
        ydot[2] = (params.A + phidot * phidot * c - params.p_psi / params.I * phidot) * s;
        return ydot;
    };
    return field;
}

Vec rk4_step(const FirstOrderField& field, double t, const Vec& y, double h) {
    if (!(h > 0.0)) throw DomainError("rk4_step: h must be positive");
    require(y.size() == field.dimension, "rk4_step: dimension mismatch");
    const Vec k1 = field.eval(t, y);
    const Vec k2 = field.eval(t + 0.5 * h, y + 0.5 * h * k1);
    const Vec k3 = field.eval(t + 0.5 * h, y + 0.5 * h * k2);
    const Vec k4 = field.eval(t + h, y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<Vec> rk4_integrate(const FirstOrderField& field, double t0,
                               const Vec& y0, double h, long steps) {
    std::vector<Vec> out;
    out.reserve(steps + 1);
    out.push_back(y0);
    Vec y = y0;
    for (long k = 0; k < steps; ++k) {
        y = rk4_step(field, t0 + static_cast<double>(k) * h, y, h);
        out.push_back(y);
    }
    return out;
}

Trajectory rk4_integrate_canonical(const LagrangianModel& model,
                                   const PhasePoint& initial, double h,
                                   double t_end) {
    if (!(h > 0.0)) throw DomainError("rk4_integrate_canonical: h must be positive");
    require(t_end >= initial.t, "rk4_integrate_canonical: t_end before initial time");
    const double steps_real = (t_end - initial.t) / h;
    const double rounded = std::round(steps_real);
    require(std::abs(steps_real - rounded) <= 1e-9 * std::max(1.0, std::abs(steps_real)),
            "rk4_integrate_canonical: (t_end - t0)/h is not a whole number of steps");
    const long N = static_cast<long>(rounded);
    const int n = model.n;

    const FirstOrderField field = hamiltonian_field(model);
    Vec y(2 * n);
    y << initial.q, initial.p;

    Trajectory traj;
    traj.h = h;
    traj.model_name = model.name;
    traj.points.reserve(N + 1);
    traj.points.push_back(initial);
    for (long k = 0; k < N; ++k) {
        y = rk4_step(field, initial.t + static_cast<double>(k) * h, y, h);
        traj.points.push_back(
            {initial.t + static_cast<double>(k + 1) * h, y.segment(0, n), y.segment(n, n)});
    }
    return traj;
}

}  // namespace gint
