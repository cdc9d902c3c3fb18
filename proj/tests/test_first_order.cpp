#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gint/analysis.hpp"
#include "gint/first_order.hpp"
#include "gint/systems.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace gint;
using namespace gint::testutil;

TEST_CASE("rk4_step: stationary, constant and exponential fields") {
    FirstOrderField zero{1, "zero", [](double, const Vec& y) { return Vec(Vec::Zero(y.size())); }};
    CHECK(rk4_step(zero, 0.0, Vec::Constant(1, 3.0), 0.5)[0] == 3.0);

    FirstOrderField one{1, "one", [](double, const Vec&) { return Vec(Vec::Ones(1)); }};
    CHECK(rk4_step(one, 0.0, Vec::Constant(1, 2.0), 0.5)[0] == doctest::Approx(2.5).epsilon(1e-15));

    FirstOrderField growth{1, "growth", [](double, const Vec& y) { return y; }};
    // four-stage hand value: 1 + h + h^2/2 + h^3/6 + h^4/24 at h = 0.1
    CHECK(rk4_step(growth, 0.0, Vec::Ones(1), 0.1)[0] ==
          doctest::Approx(1.1051708333333333).epsilon(1e-15));
}

TEST_CASE("hamiltonian_field: constant mass free particle") {
    Mat M(2, 2);
    M << 2, 0, 0, 0.5;
    auto md = free_particle(2, M);
    auto field = hamiltonian_field(md);
    Vec y(4);
    y << 0.3, -0.2, 1.0, 2.0;
    const Vec f = field.eval(0.0, y);
    CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-14));  // M^{-1} p
    CHECK(f[1] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(f[2] == 0.0);
    CHECK(f[3] == 0.0);
}

TEST_CASE("hamiltonian_field: unit oscillator is a rotation field") {
    auto md = oscillator(1.0);
    auto field = hamiltonian_field(md);
    Vec y(2);
    y << 0.7, -0.3;
    const Vec f = field.eval(0.0, y);
    CHECK(f[0] == doctest::Approx(-0.3).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(-0.7).epsilon(1e-14));
}

TEST_CASE("hamiltonian_field: symplectic pair against finite differences of H") {
    auto preset = make_preset("double-pendulum-table1");
    auto field = hamiltonian_field(preset.model);
    const double eps = 1e-6;
    for (int s = 0; s < 5; ++s) {
        const Vec q = random_vec(2, -1.5, 1.5);
        const Vec p = random_vec(2, -3, 3);
        Vec y(4);
        y << q, p;
        const Vec f = field.eval(0.0, y);
        for (int k = 0; k < 2; ++k) {
            // qdot_k = +dH/dp_k
            PhasePoint up{0.0, q, p}, dn{0.0, q, p};
            up.p[k] += eps;
            dn.p[k] -= eps;
            const double dHdp = (energy(preset.model, up) - energy(preset.model, dn)) / (2 * eps);
            CHECK(f[k] == doctest::Approx(dHdp).epsilon(1e-6));
            // pdot_k = -dH/dq_k
            up = {0.0, q, p};
            dn = {0.0, q, p};
            up.q[k] += eps;
            dn.q[k] -= eps;
            const double dHdq = (energy(preset.model, up) - energy(preset.model, dn)) / (2 * eps);
            CHECK(f[2 + k] == doctest::Approx(-dHdq).epsilon(1e-6));
        }
    }
}

TEST_CASE("reduced_top_field: reference values") {
    auto field = reduced_top_field();
    SUBCASE("initial point has zero precession rate") {
        Vec y(3);
        y << 0.0, M_PI / 6.0, 0.0;
        const Vec f = field.eval(0.0, y);
        CHECK(f[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(f[1] == 0.0);
        // xidot = 4 pi^2 sin(pi/6) = 2 pi^2
        CHECK(f[2] == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-12));
    }
    SUBCASE("horizontal axis") {
        Vec y(3);
        y << 0.0, M_PI / 2.0, 0.3;
        const Vec f = field.eval(0.0, y);
        CHECK(f[0] == doctest::Approx(2.0 * M_PI * std::sqrt(3.0)).epsilon(1e-12));
        CHECK(f[1] == doctest::Approx(0.3));
    }
    SUBCASE("singularity guard") {
        Vec y(3);
        y << 0.0, 1e-13, 0.0;
        CHECK_THROWS_AS(field.eval(0.0, y), DomainError);
    }
}

TEST_CASE("rk4 energy error grows on the double pendulum") {
    auto preset = make_preset("double-pendulum-table1");
    auto traj = rk4_integrate_canonical(preset.model, preset.initial, 0.1, 10.0);
    auto e = energy_error_series(traj, preset.model);
    double at1 = 0.0, at10 = 0.0;
    for (size_t k = 0; k < e.times.size(); ++k) {
        if (std::abs(e.times[k] - 1.0) < 1e-9) at1 = std::abs(e.values[k]);
        if (std::abs(e.times[k] - 10.0) < 1e-9) at10 = std::abs(e.values[k]);
    }
    CHECK(at10 > at1);
}

TEST_CASE("rk4_integrate: grid bookkeeping and reduced-system smoke run") {
    auto field = reduced_top_field();
    Vec y0(3);
    y0 << 0.0, M_PI / 6.0, 0.0;
    auto states = rk4_integrate(field, 0.0, y0, 0.01, 100);
    CHECK(states.size() == 101);
    // theta stays within the cusp-motion band [pi/6, theta_max]
    for (const auto& y : states) {
        CHECK(y[1] >= M_PI / 6.0 - 1e-9);
        CHECK(y[1] <= 1.08);
    }
}

TEST_CASE("rk4_integrate_canonical: rejects non-commensurate horizons") {
    auto preset = make_preset("double-pendulum-table1");
    CHECK_THROWS_AS(rk4_integrate_canonical(preset.model, preset.initial, 0.3, 1.0),
                    ContractViolation);
}
