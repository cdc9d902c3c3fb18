#include "gint/elliptic.hpp"

#include <algorithm>
#include <cmath>

namespace gint {

double carlson_rf(double x, double y, double z) {
    if (x < 0.0 || y < 0.0 || z < 0.0 || (x + y) == 0.0 || (y + z) == 0.0 ||
        (z + x) == 0.0)
        throw DomainError("carlson_rf: arguments nonnegative, at most one zero");
    // duplication: halve the distance to the common mean each round
    for (int it = 0; it < 200; ++it) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        const double mu = (x + y + z) / 3.0;
        const double eps = std::max({std::abs(x - mu), std::abs(y - mu), std::abs(z - mu)});
        if (eps < 1e-10 * mu) break;
    }
    const double mu = (x + y + z) / 3.0;
    const double X = 1.0 - x / mu, Y = 1.0 - y / mu, Z = 1.0 - z / mu;
    const double E2 = X * Y + Y * Z + Z * X;
    const double E3 = X * Y * Z;
    // fifth-order tail of the series (Carlson's expansion)
    const double s = 1.0 - E2 / 10.0 + E3 / 14.0 + E2 * E2 / 24.0 - 3.0 * E2 * E3 / 44.0;
    return s / std::sqrt(mu);
}

double elliptic_k(double m) {
    if (!(m >= 0.0 && m < 1.0)) throw DomainError("elliptic_k: m in [0,1)");
    return carlson_rf(0.0, 1.0 - m, 1.0);
}

double elliptic_f(double phi, double m) {
    if (!(std::abs(phi) <= M_PI / 2.0 + 1e-12))
        throw DomainError("elliptic_f: |phi| <= pi/2");
    if (!(m >= 0.0 && m <= 1.0)) throw DomainError("elliptic_f: m in [0,1]");
    const double s = std::sin(phi), c = std::cos(phi);
    if (s == 0.0) return 0.0;
    return s * carlson_rf(c * c, 1.0 - m * s * s, 1.0);
}

double jacobi_sn(double u, double m) {
    if (!(m >= 0.0 && m <= 1.0)) throw DomainError("jacobi_sn: m in [0,1]");
    if (m == 0.0) return std::sin(u);
    if (m == 1.0) return std::tanh(u);

    // keep the amplitude recursion well conditioned on long arguments
    const double period = 4.0 * elliptic_k(m);
    if (std::abs(u) > period) u = std::fmod(u, period);

    // descending Landen scale: a_n = (a_{n-1}+b_{n-1})/2, b_n = sqrt(a b),
    // c_n = (a_{n-1}-b_{n-1})/2
    constexpr int kMax = 32;
    double a[kMax], c[kMax];
    a[0] = 1.0;
    double b = std::sqrt(1.0 - m);
    int N = 0;
    while (N < kMax - 1) {
        const double a_prev = a[N], b_prev = b;
        ++N;
        a[N] = 0.5 * (a_prev + b_prev);
        b = std::sqrt(a_prev * b_prev);
        c[N] = 0.5 * (a_prev - b_prev);
        if (std::abs(c[N]) <= 1e-17 * a[N]) break;
    }

    // backward Gauss transformation of the amplitude
    double phi = std::ldexp(a[N] * u, N);  // 2^N a_N u
    for (int n = N; n >= 1; --n)
        phi = 0.5 * (phi + std::asin(std::clamp(c[n] / a[n] * std::sin(phi), -1.0, 1.0)));
    return std::sin(phi);
}

NutationCubic nutation_cubic(const LagrangeTopParams& params, const Vec& q0,
                             const Vec& qdot0) {
    require(q0.size() == 3 && qdot0.size() == 3, "nutation_cubic: need n = 3");
    // The upper two roots sit close together for fast tops, so the chain
    // constants -> coefficients -> roots runs in extended precision; double
    // arithmetic here would cost ~5e-12 of the period's 1e-12 budget.
    using ld = long double;
    const ld theta0 = q0[1];
    const ld s0 = std::sin(theta0), c0 = std::cos(theta0);
    if (std::abs(static_cast<double>(s0)) < 1e-12)
        throw DomainError("nutation_cubic: sin(theta_0) = 0");

    NutationCubic cubic;
    const ld I = params.I, I3 = params.I3;
    const ld m = static_cast<ld>(params.m_top) * params.g * params.l / I;
    const ld phidot0 = qdot0[0], thetadot0 = qdot0[1], psidot0 = qdot0[2];
    const ld spin = psidot0 + phidot0 * c0;
    const ld p_phi = I3 * spin * c0 + I * phidot0 * s0 * s0;
    const ld p_psi = I3 * spin;
    // energy above the constant axial-spin part
    const ld c = 0.5L * I * thetadot0 * thetadot0 +
                 (p_phi - p_psi * c0) * (p_phi - p_psi * c0) / (2.0L * I * s0 * s0) +
                 I * m * c0;
    const ld a = p_psi / I, b = p_phi / I;
    const ld atil = 2.0L * c / I;
    cubic.constants = {static_cast<double>(c),    static_cast<double>(p_phi),
                       static_cast<double>(p_psi), static_cast<double>(m),
                       static_cast<double>(a),     static_cast<double>(b)};

    // f(u) = (atil - 2 m u)(1 - u^2) - (b - a u)^2
    const ld C3 = 2.0L * m, C2 = -(atil + a * a), C1 = 2.0L * (a * b - m),
             C0 = atil - b * b;
    cubic.coeffs = {static_cast<double>(C3), static_cast<double>(C2),
                    static_cast<double>(C1), static_cast<double>(C0)};
    cubic.u0 = static_cast<double>(c0);
    cubic.udot0 = static_cast<double>(-s0 * thetadot0);

    // three real roots via the trigonometric method on the depressed cubic
    if (!(C3 > 0.0L)) throw DomainError("nutation_cubic: degenerate leading coefficient");
    const ld p2 = C2 / C3, p1 = C1 / C3, p0 = C0 / C3;
    const ld shift = -p2 / 3.0L;
    const ld pp = p1 - p2 * p2 / 3.0L;
    const ld qq = 2.0L * p2 * p2 * p2 / 27.0L - p2 * p1 / 3.0L + p0;
    const ld disc = -4.0L * pp * pp * pp - 27.0L * qq * qq;
    if (disc < -1e-12L * std::max<ld>(1.0L, pp * pp * pp * pp))
        throw DomainError("nutation_cubic: complex root configuration (unphysical)");
    const ld r = 2.0L * std::sqrt(std::max<ld>(0.0L, -pp / 3.0L));
    ld arg = 0.0L;
    if (r > 0.0L) arg = std::clamp<ld>(3.0L * qq / (pp * r), -1.0L, 1.0L);
    const ld ang = std::acos(arg) / 3.0L;
    ld roots[3];
    for (int k = 0; k < 3; ++k)
        roots[k] = shift + r * std::cos(ang - 2.0L * static_cast<ld>(M_PI) * k / 3.0L);
    std::sort(roots, roots + 3);
    for (ld& u : roots) {  // Newton polish against the full cubic
        for (int it = 0; it < 6; ++it) {
            const ld f = ((C3 * u + C2) * u + C1) * u + C0;
            const ld df = (3.0L * C3 * u + 2.0L * C2) * u + C1;
            if (df == 0.0L) break;
            u -= f / df;
        }
    }
    cubic.u1 = static_cast<double>(roots[0]);
    cubic.u2 = static_cast<double>(roots[1]);
    cubic.u3 = static_cast<double>(roots[2]);

    if (cubic.u1 < -1.0 - 1e-9 || cubic.u2 > 1.0 + 1e-9)
        throw DomainError("nutation_cubic: oscillation band outside [-1, 1]");
    if (!cubic.degenerate_band() && cubic.eval(0.5 * (cubic.u1 + cubic.u2)) < 0.0)
        throw DomainError("nutation_cubic: f < 0 inside the oscillation band");
    return cubic;
}

namespace {

struct SnParams {
    double k2 = 0.0, kappa = 0.0, delta = 0.0;
};

SnParams sn_params(const NutationCubic& cubic) {
    SnParams sp;
    const double span = cubic.u3 - cubic.u1;
    sp.k2 = (cubic.u2 - cubic.u1) / span;
    sp.kappa = 0.5 * std::sqrt(cubic.coeffs[0] * span);

    // phase: u(0) = u1 + (u2-u1) sn^2(delta), direction from sign of udot(0)
    const double s = std::clamp((cubic.u0 - cubic.u1) / (cubic.u2 - cubic.u1), 0.0, 1.0);
    const double delta0 = elliptic_f(std::asin(std::sqrt(s)), sp.k2);
    if (cubic.udot0 > 0.0)
        sp.delta = delta0;
    else if (cubic.udot0 < 0.0)
        sp.delta = 2.0 * elliptic_k(sp.k2) - delta0;
    else
        // turning point: snap to the nearer band edge
        sp.delta = (s < 0.5) ? 0.0 : elliptic_k(sp.k2);
    return sp;
}

}  // namespace

double exact_nutation(const NutationCubic& cubic, double t) {
    if (!std::isfinite(t)) throw DomainError("exact_nutation: t must be finite");
    if (cubic.degenerate_band())
        return std::acos(std::clamp(cubic.u0, -1.0, 1.0));
    const SnParams sp = sn_params(cubic);
    const double sn = jacobi_sn(sp.kappa * t + sp.delta, sp.k2);
    const double u = cubic.u1 + (cubic.u2 - cubic.u1) * sn * sn;
    return std::acos(std::clamp(u, -1.0, 1.0));
}

double nutation_period(const NutationCubic& cubic) {
    if (cubic.degenerate_band())
        throw DomainError("nutation_period: degenerate oscillation band");
    if (!(cubic.coeffs[0] > 0.0) || cubic.u2 >= 1.0 - 1e-12 || cubic.u1 <= -1.0 + 1e-12)
        throw DomainError("nutation_period: improper band (touches the poles)");
    const double span = cubic.u3 - cubic.u1;
    const double k2 = (cubic.u2 - cubic.u1) / span;
    if (!(k2 < 1.0)) throw DomainError("nutation_period: coincident upper roots");
    const double kappa = 0.5 * std::sqrt(cubic.coeffs[0] * span);
    return 2.0 * elliptic_k(k2) / kappa;
}

}  // namespace gint
