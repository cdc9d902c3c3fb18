#include "gint/systems.hpp"

#include <cmath>

namespace gint {

LagrangianModel double_pendulum(const DoublePendulumParams& params) {
    require(params.m1 > 0 && params.m2 > 0 && params.l1 > 0 && params.l2 > 0 &&
                params.g > 0,
            "double_pendulum: parameters must be positive");
    LagrangianModel md;
    md.n = 2;
    md.name = "double-pendulum";
    const double a = (params.m1 + params.m2) * params.l1 * params.l1;
    const double b = params.m2 * params.l2 * params.l2;
    const double K = params.m2 * params.l1 * params.l2;  // coupling strength
    const double w1 = (params.m1 + params.m2) * params.g * params.l1;
    const double w2 = params.m2 * params.g * params.l2;

    md.mass = [a, b, K](const Vec& q) {
        const double c = std::cos(q[0] - q[1]);
        Mat M(2, 2);
        M << a, K * c, K * c, b;
        return M;
    };
    md.dmass = [K](const Vec& q) {
        const double s = std::sin(q[0] - q[1]);
        MassGrad d(2, Mat::Zero(2, 2));
        d[0](0, 1) = d[0](1, 0) = -K * s;
        d[1](0, 1) = d[1](1, 0) = K * s;
        return d;
    };
    md.d2mass = [K](const Vec& q) {
        const double c = std::cos(q[0] - q[1]);
        MassHess d(2, MassGrad(2, Mat::Zero(2, 2)));
        d[0][0](0, 1) = d[0][0](1, 0) = -K * c;
        d[0][1](0, 1) = d[0][1](1, 0) = K * c;
        d[1][0](0, 1) = d[1][0](1, 0) = K * c;
        d[1][1](0, 1) = d[1][1](1, 0) = -K * c;
        return d;
    };
    md.potential = [w1, w2](const Vec& q) {
        return -w1 * std::cos(q[0]) - w2 * std::cos(q[1]);
    };
    md.grad_potential = [w1, w2](const Vec& q) {
        Vec g(2);
        g << w1 * std::sin(q[0]), w2 * std::sin(q[1]);
        return g;
    };
    md.hess_potential = [w1, w2](const Vec& q) {
        Mat H = Mat::Zero(2, 2);
        H(0, 0) = w1 * std::cos(q[0]);
        H(1, 1) = w2 * std::cos(q[1]);
        return H;
    };
    return md;
}

LagrangianModel lagrange_top(const LagrangeTopParams& params) {
    require(params.m_top > 0 && params.I > 0 && params.I3 > 0 && params.l > 0 &&
                params.g > 0,
            "lagrange_top: parameters must be positive");
    LagrangianModel md;
    md.n = 3;
    md.name = "lagrange-top";
    const double I = params.I, I3 = params.I3;
    const double Vm = params.I * params.m();  // = m_top g l

    // Only theta derivatives are nonzero; q = (phi, theta, psi).
    md.mass = [I, I3](const Vec& q) {
        const double s = std::sin(q[1]), c = std::cos(q[1]);
        Mat M(3, 3);
        M << I * s * s + I3 * c * c, 0.0, I3 * c,
             0.0, I, 0.0,
             I3 * c, 0.0, I3;
        return M;
    };
    md.dmass = [I, I3](const Vec& q) {
        const double s = std::sin(q[1]), c = std::cos(q[1]);
        MassGrad d(3, Mat::Zero(3, 3));
        d[1](0, 0) = 2.0 * (I - I3) * s * c;
        d[1](0, 2) = d[1](2, 0) = -I3 * s;
        return d;
    };
    md.d2mass = [I, I3](const Vec& q) {
        const double s = std::sin(q[1]), c = std::cos(q[1]);
        MassHess d(3, MassGrad(3, Mat::Zero(3, 3)));
        d[1][1](0, 0) = 2.0 * (I - I3) * (c * c - s * s);
        d[1][1](0, 2) = d[1][1](2, 0) = -I3 * c;
        return d;
    };
    md.potential = [Vm](const Vec& q) { return Vm * std::cos(q[1]); };
    md.grad_potential = [Vm](const Vec& q) {
        Vec g = Vec::Zero(3);
        g[1] = -Vm * std::sin(q[1]);
        return g;
    };
    md.hess_potential = [Vm](const Vec& q) {
        Mat H = Mat::Zero(3, 3);
        H(1, 1) = -Vm * std::cos(q[1]);
        return H;
    };
    md.conserved_indices = {0, 2};  // phi and psi are cyclic
    // M(q) loses rank exactly at sin(theta) = 0; declare the excluded
    // submanifold so steppers report instead of silently degrading.
    md.admissible = [](const Vec& q) { return std::abs(std::sin(q[1])) > 1e-12; };
    return md;
}

std::pair<double, double> top_conserved_momenta(const LagrangeTopParams& params,
                                                const Vec& q, const Vec& qdot) {
    require(q.size() == 3 && qdot.size() == 3, "top_conserved_momenta: need n = 3");
    const double s = std::sin(q[1]), c = std::cos(q[1]);
    const double spin = qdot[2] + qdot[0] * c;  // psidot + phidot cos(theta)
    const double p_phi = params.I3 * spin * c + params.I * qdot[0] * s * s;
    const double p_psi = params.I3 * spin;
    return {p_phi, p_psi};
}

namespace {

// Link length of the reference double pendulum, l = g / omega0 with
// omega0 = 2 pi / s (as printed in the source material for that setup).
constexpr double kDpGravity = 9.81;

Preset make_double_pendulum_table1() {
    Preset p;
    p.name = "double-pendulum-table1";
    p.description = "planar double pendulum, m1 = m2 = 1 kg, l = g/omega0, "
                    "q0 = (pi/4, pi/3), p0 = 0";
    const double ell = kDpGravity / (2.0 * M_PI);
    DoublePendulumParams dp{1.0, 1.0, ell, ell, kDpGravity};
    p.model = double_pendulum(dp);
    p.qdot0 = Vec::Zero(2);
    Vec q0(2);
    q0 << M_PI / 4.0, M_PI / 3.0;
    p.initial = {0.0, q0, Vec::Zero(2)};
    return p;
}

Preset make_top_table3() {
    Preset p;
    p.name = "lagrange-top-table3";
    p.description = "spinning-top toy showing near-vertical loops: "
                    "m = 0.1 kg, I = 2.33e-3, I3 = 1.25e-4 kg m^2, l = 0.15 m";
    p.is_top = true;
    p.top_params = {0.1, 2.33e-3, 1.25e-4, 0.15, 9.81};
    p.model = lagrange_top(p.top_params);
    Vec q0(3), qdot0(3);
    q0 << 0.0, M_PI / 3.0, 0.0;
    qdot0 << 9.2, 0.0, 252.0;
    p.qdot0 = qdot0;
    p.initial = {0.0, q0, initial_momentum(p.model, q0, qdot0)};
    return p;
}

Preset make_top_table4() {
    Preset p;
    p.name = "lagrange-top-table4";
    p.description = "unit top producing a cuspidal motion: I = 1, I3 = 2 kg m^2, "
                    "theta0 = pi/6, psidot0 = 2 pi; conserved momenta "
                    "p_phi = 2 pi sqrt(3), p_psi = 4 pi";
    p.is_top = true;
    // l chosen so the torque frequency m = m_top g l / I equals 4 pi^2
    // exactly; the gravity value cancels out of every quantity.
    const double g = 9.81;
    p.top_params = {1.0, 1.0, 2.0, 4.0 * M_PI * M_PI / g, g};
    p.model = lagrange_top(p.top_params);
    Vec q0(3), qdot0(3);
    q0 << 0.0, M_PI / 6.0, 0.0;
    qdot0 << 0.0, 0.0, 2.0 * M_PI;
    p.qdot0 = qdot0;
    p.initial = {0.0, q0, initial_momentum(p.model, q0, qdot0)};
    return p;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "double-pendulum-table1", "lagrange-top-table3", "lagrange-top-table4"};
    return names;
}

Preset make_preset(const std::string& name) {
    if (name == "double-pendulum-table1") return make_double_pendulum_table1();
    if (name == "lagrange-top-table3") return make_top_table3();
    if (name == "lagrange-top-table4") return make_top_table4();
    std::string msg = "unknown preset '" + name + "'; available:";
    for (const auto& n : preset_names()) msg += " " + n;
    throw ContractViolation(msg);
}

}  // namespace gint
