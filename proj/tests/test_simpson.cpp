#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gint/analysis.hpp"
#include "gint/simpson.hpp"
#include "gint/systems.hpp"
#include "test_util.hpp"

#include <cmath>
#include <future>

using namespace gint;
using namespace gint::testutil;

TEST_CASE("basis_p2: nodal values and interior point") {
    auto at0 = basis_p2(0.0);
    CHECK(at0[0] == 1.0);
    CHECK(at0[1] == 0.0);
    CHECK(at0[2] == 0.0);
    auto half = basis_p2(0.5);
    CHECK(half[0] == 0.0);
    CHECK(half[1] == 1.0);
    CHECK(half[2] == 0.0);
    auto quarter = basis_p2(0.25);  // direct evaluation of the polynomials
    CHECK(quarter[0] == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(quarter[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(quarter[2] == doctest::Approx(-0.125).epsilon(1e-15));
    CHECK_THROWS_AS(basis_p2(-0.01), DomainError);
    CHECK_THROWS_AS(basis_p2(1.01), DomainError);
}

TEST_CASE("basis_p2: partition of unity") {
    for (int k = 0; k <= 50; ++k) {
        const double theta = k / 50.0;
        auto b = basis_p2(theta);
        CHECK(b[0] + b[1] + b[2] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("gear_velocities: exact on quadratics, constants and linears") {
    auto v1 = gear_velocities(Vec::Zero(1), Vec::Ones(1), Vec::Constant(1, 4.0), 2.0);
    CHECK(v1.g_l[0] == doctest::Approx(0.0));
    CHECK(v1.g_m[0] == doctest::Approx(2.0));
    CHECK(v1.g[0] == doctest::Approx(4.0));

    auto v2 = gear_velocities(Vec::Constant(1, 3.0), Vec::Constant(1, 3.0),
                              Vec::Constant(1, 3.0), 0.7);
    CHECK(v2.g_l[0] == 0.0);
    CHECK(v2.g_m[0] == 0.0);
    CHECK(v2.g[0] == 0.0);

    auto v3 = gear_velocities(Vec::Zero(1), Vec::Constant(1, 0.5), Vec::Ones(1), 1.0);
    CHECK(v3.g_l[0] == doctest::Approx(1.0));
    CHECK(v3.g_m[0] == doctest::Approx(1.0));
    CHECK(v3.g[0] == doctest::Approx(1.0));

    CHECK_THROWS_AS(gear_velocities(Vec::Zero(1), Vec::Zero(1), Vec::Zero(1), 0.0),
                    DomainError);
}

TEST_CASE("gear identity: g_m = (g_l + g)/2 exactly") {
    for (int k = 0; k < 50; ++k) {
        const Vec ql = random_vec(3, -5, 5), qm = random_vec(3, -5, 5),
                  q = random_vec(3, -5, 5);
        const double h = uniform(1e-3, 2.0);
        auto v = gear_velocities(ql, qm, q, h);
        const double scale = std::max({1.0, v.g_l.lpNorm<Eigen::Infinity>(),
                                       v.g.lpNorm<Eigen::Infinity>()});
        CHECK((v.g_m - 0.5 * (v.g_l + v.g)).lpNorm<Eigen::Infinity>() <= 1e-15 * scale);
    }
}

TEST_CASE("simpson_rule: exact on monomials up to degree three") {
    for (double h : {0.3, 1.0, 2.5}) {
        CHECK(simpson_rule(1, 1, 1, h) == doctest::Approx(h).epsilon(1e-15));
        CHECK(simpson_rule(0, h / 2, h, h) == doctest::Approx(h * h / 2).epsilon(1e-15));
        CHECK(simpson_rule(0, h * h / 4, h * h, h) ==
              doctest::Approx(h * h * h / 3).epsilon(1e-15));
        const double c = h * h * h;
        CHECK(simpson_rule(0, c / 8, c, h) ==
              doctest::Approx(h * h * h * h / 4).epsilon(1e-15));
    }
}

TEST_CASE("discrete_lagrangian: zero for a resting free particle") {
    auto md = free_particle(2, Mat::Identity(2, 2));
    const Vec c = Vec::Constant(2, 0.4);
    CHECK(std::abs(discrete_lagrangian(md, c, c, c, 0.5)) <= 1e-30);
}

TEST_CASE("discrete_lagrangian: quadratic free path integrates exactly") {
    // q(t) = t^2 gives action integral 2 h^3 / 3
    auto md = free_particle(1, Mat::Identity(1, 1));
    for (double h : {0.2, 1.0, 1.7}) {
        const Vec ql = Vec::Zero(1);
        const Vec qm = Vec::Constant(1, h * h / 4.0);
        const Vec q = Vec::Constant(1, h * h);
        CHECK(discrete_lagrangian(md, ql, qm, q, h) ==
              doctest::Approx(2.0 * h * h * h / 3.0).epsilon(1e-14));
    }
}

TEST_CASE("discrete_lagrangian: oscillator hand value 1/3") {
    auto md = oscillator(1.0);
    CHECK(discrete_lagrangian(md, Vec::Zero(1), Vec::Constant(1, 0.5), Vec::Ones(1),
                              1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("residual: exact free flight solves the step") {
    Mat M(2, 2);
    M << 2, 0.3, 0.3, 1;
    auto md = free_particle(2, M);
    const Vec v = (Vec(2) << 0.7, -0.4).finished();
    const double h = 0.05;
    PhasePoint prev{0.0, Vec::Zero(2), M * v};
    StepUnknowns u{0.5 * h * v, M * v, h * v};
    CHECK(residual(md, prev, u, h).lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("residual: zero-velocity guess on the oscillator (hand values)") {
    auto md = oscillator(1.0);
    PhasePoint prev{0.0, Vec::Ones(1), Vec::Zero(1)};
    StepUnknowns u{Vec::Ones(1), Vec::Zero(1), Vec::Ones(1)};
    const Vec F = residual(md, prev, u, 0.1);
    CHECK(F[0] == doctest::Approx(0.01).epsilon(1e-15));  // F_qm = h^2 V'(1)
    CHECK(F[1] == doctest::Approx(0.01).epsilon(1e-15));  // F_p  = h^2 V'(1)
    CHECK(F[2] == doctest::Approx(0.0));                  // F_q cancels exactly
}

TEST_CASE("residual: converged step output re-feeds below tolerance") {
    auto preset = make_preset("double-pendulum-table1");
    StepperConfig cfg;
    auto r = step(preset.model, preset.initial, 0.1, cfg);
    StepUnknowns u{r.midpoint, r.next.p, r.next.q};
    CHECK(residual(preset.model, preset.initial, u, 0.1).lpNorm<Eigen::Infinity>() <=
          cfg.newton.tolerance);
}

TEST_CASE("jacobian_analytic: momentum block is h times identity") {
    auto preset = make_preset("lagrange-top-table3");
    const double h = 0.03;
    StepUnknowns u{random_vec(3, 0.4, 1.2), random_vec(3, -1, 1), random_vec(3, 0.4, 1.2)};
    PhasePoint prev{0.0, random_vec(3, 0.4, 1.2), random_vec(3, -1, 1)};
    const Mat J = jacobian_analytic(preset.model, prev, u, h);
    const Mat block = J.block(3, 3, 3, 3);
    CHECK((block - h * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(J.block(0, 3, 3, 3).cwiseAbs().maxCoeff() == 0.0);  // dF_qm/dp = 0
}

TEST_CASE("jacobian_analytic: constant-mass blocks reduce to -8M and 4M") {
    Mat M(2, 2);
    M << 1.5, 0.2, 0.2, 0.9;
    auto md = free_particle(2, M);
    PhasePoint prev{0.0, random_vec(2, -1, 1), random_vec(2, -1, 1)};
    StepUnknowns u{random_vec(2, -1, 1), random_vec(2, -1, 1), random_vec(2, -1, 1)};
    const Mat J = jacobian_analytic(md, prev, u, 0.07);
    CHECK((J.block(0, 0, 2, 2) + 8.0 * M).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((J.block(0, 4, 2, 2) - 4.0 * M).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("jacobian validation: known-good blocks pass, known-bad fail") {
    // On q-dependent mass systems exactly two textbook blocks disagree with
    // the residual derivative: dF_qm/dq and dF_q/dp.
    for (const char* name : {"double-pendulum-table1", "lagrange-top-table3"}) {
        auto preset = make_preset(name);
        auto mask = validate_jacobian_blocks(preset.model, preset.initial, 0.02);
        CHECK(mask.ok[0][0]);
        CHECK(mask.ok[0][1]);
        CHECK_FALSE(mask.ok[0][2]);  // dF_qm/dq
        CHECK(mask.ok[1][0]);
        CHECK(mask.ok[1][1]);
        CHECK(mask.ok[1][2]);
        CHECK(mask.ok[2][0]);
        CHECK_FALSE(mask.ok[2][1]);  // dF_q/dp
        CHECK(mask.ok[2][2]);
    }
}

TEST_CASE("jacobian consistency: Newton Jacobian matches finite differences") {
    // the Jacobian actually used by the stepper vs an independent central
    // difference of residual(), 20 random samples per system
    for (const char* name : {"double-pendulum-table1", "lagrange-top-table3"}) {
        auto preset = make_preset(name);
        const int n = preset.model.n;
        auto mask = validate_jacobian_blocks(preset.model, preset.initial, 0.02);
        for (int s = 0; s < 20; ++s) {
            PhasePoint prev{0.0, preset.initial.q + 0.15 * random_vec(n, -1, 1),
                            preset.initial.p + 0.1 * random_vec(n, -1, 1)};
            StepUnknowns u{prev.q + 0.1 * random_vec(n, -1, 1),
                           prev.p + 0.1 * random_vec(n, -1, 1),
                           prev.q + 0.1 * random_vec(n, -1, 1)};
            const double h = uniform(0.005, 0.05);
            const Mat J = newton_jacobian(preset.model, prev, u, h, mask);
            const Mat Jfd = fd_jacobian(
                [&](const Vec& x) { return residual(preset.model, prev, unpack(x, n), h); },
                pack(u), 1e-7);
            const double scale = std::max(1.0, Jfd.cwiseAbs().maxCoeff());
            CHECK((J - Jfd).cwiseAbs().maxCoeff() / scale <= 1e-5);
        }
    }
}

TEST_CASE("step: free particle solves in one Newton iteration") {
    Mat M = Mat::Identity(2, 2);
    auto md = free_particle(2, M);
    const Vec v = (Vec(2) << 1.0, -2.0).finished();
    PhasePoint prev{0.0, Vec::Zero(2), v};
    StepperConfig cfg;
    cfg.newton.polish = false;
    auto r = step(md, prev, 0.25, cfg);
    CHECK(r.stats.newton_iterations == 1);
    CHECK((r.next.q - 0.25 * v).lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK((r.next.p - v).lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK((r.midpoint - 0.125 * v).lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK(r.next.t == doctest::Approx(0.25));
}

TEST_CASE("step: oscillator one-step error is O(h^5)") {
    auto md = oscillator(1.0);
    std::vector<double> hs{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> errs;
    for (double h : hs) {
        PhasePoint prev{0.0, Vec::Ones(1), Vec::Zero(1)};
        auto r = step(md, prev, h);
        const double eq = r.next.q[0] - std::cos(h);
        const double ep = r.next.p[0] + std::sin(h);
        errs.push_back(std::hypot(eq, ep));
    }
    auto rep = convergence_order(hs, errs, 1e-15);
    CHECK(rep.slope == doctest::Approx(5.0).epsilon(0.06));  // 5 +- 0.3
}

TEST_CASE("step: non-convergence carries the residual norm") {
    auto preset = make_preset("double-pendulum-table1");
    StepperConfig cfg;
    cfg.newton.max_iterations = 1;
    cfg.newton.tolerance = 1e-300;
    CHECK_THROWS_AS(step(preset.model, preset.initial, 0.1, cfg), StepFailure);
}

TEST_CASE("step: inadmissible state raises a domain error") {
    auto preset = make_preset("lagrange-top-table3");
    Vec q = preset.initial.q;
    q[1] = 0.0;  // sin(theta) = 0 is the declared excluded submanifold
    CHECK_THROWS_AS(step(preset.model, {0.0, q, preset.initial.p}, 0.01, {}),
                    DomainError);
}

TEST_CASE("integrate: zero steps returns the single initial point") {
    auto preset = make_preset("double-pendulum-table1");
    auto traj = integrate(preset.model, preset.initial, 0.1, 0.0);
    CHECK(traj.points.size() == 1);
    CHECK(traj.midpoints.empty());
}

TEST_CASE("integrate: rejects a non-integer number of steps") {
    auto preset = make_preset("double-pendulum-table1");
    CHECK_THROWS_AS(integrate(preset.model, preset.initial, 0.3, 1.0),
                    ContractViolation);
}

TEST_CASE("integrate: trajectory bookkeeping invariants") {
    auto preset = make_preset("double-pendulum-table1");
    auto traj = integrate(preset.model, preset.initial, 0.05, 1.0);
    REQUIRE(traj.points.size() == 21);
    CHECK(traj.midpoints.size() == 20);
    CHECK(traj.stats.size() == 20);
    for (size_t k = 0; k < traj.points.size(); ++k)
        CHECK(traj.points[k].t == doctest::Approx(0.05 * k).epsilon(1e-15));
    for (const auto& st : traj.stats) {
        CHECK(st.final_residual_norm <= 1e-12);
        CHECK(st.jacobian_source == JacobianSource::finite_difference);
    }
}

TEST_CASE("integrate: double pendulum energy stays bounded at h = 0.1") {
    auto preset = make_preset("double-pendulum-table1");
    auto traj = integrate(preset.model, preset.initial, 0.1, 10.0);
    auto e = energy_error_series(traj, preset.model);
    double first = 0.0, second = 0.0;
    for (size_t k = 0; k < e.values.size(); ++k) {
        const double a = std::abs(e.values[k]);
        if (e.times[k] <= 5.0)
            first = std::max(first, a);
        else
            second = std::max(second, a);
    }
    CHECK(second <= 2.0 * first);
}

TEST_CASE("integrate: Lagrange top conserves p_phi and p_psi to solver floor") {
    auto preset = make_preset("lagrange-top-table3");
    // ten nutation periods at a twentieth of a period per step
    const double T = 1.8467084770816382;
    auto traj = integrate(preset.model, preset.initial, 0.05 * T, 10.0 * T);
    for (int idx : preset.model.conserved_indices) {
        const double p0 = preset.initial.p[idx];
        double drift = 0.0;
        for (const auto& pt : traj.points) drift = std::max(drift, std::abs(pt.p[idx] - p0));
        CHECK(drift <= 10.0 * 1e-12);
    }
}

TEST_CASE("integrate: time-reversal symmetry of the discrete flow") {
    // forward N steps, then re-integrate from (q_N, -p_N): a symmetric
    // scheme returns to (q_0, -p_0)
    auto md = oscillator(1.0);
    PhasePoint start{0.0, Vec::Ones(1), Vec::Zero(1)};
    auto fwd = integrate(md, start, 0.01, 1.0);
    const PhasePoint& end = fwd.points.back();
    PhasePoint reversed{0.0, end.q, -end.p};
    auto back = integrate(md, reversed, 0.01, 1.0);
    CHECK((back.points.back().q - start.q).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK((back.points.back().p + start.p).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("integrate: concurrent sweeps on one shared model match serial runs") {
    auto preset = make_preset("lagrange-top-table3");
    const std::vector<double> hs{0.02, 0.01, 0.005, 0.0025};
    std::vector<Trajectory> serial;
    for (double h : hs) serial.push_back(integrate(preset.model, preset.initial, h, 0.5));

    std::vector<std::future<Trajectory>> jobs;
    for (double h : hs)
        jobs.push_back(std::async(std::launch::async, [&preset, h] {
            return integrate(preset.model, preset.initial, h, 0.5);
        }));
    for (size_t k = 0; k < hs.size(); ++k) {
        const Trajectory par = jobs[k].get();
        REQUIRE(par.points.size() == serial[k].points.size());
        // bit-identical: the model is pure and shared read-only
        for (size_t j = 0; j < par.points.size(); ++j) {
            CHECK((par.points[j].q - serial[k].points[j].q).lpNorm<Eigen::Infinity>() == 0.0);
            CHECK((par.points[j].p - serial[k].points[j].p).lpNorm<Eigen::Infinity>() == 0.0);
        }
    }
}

TEST_CASE("step: the one-step map is symplectic") {
    // D' Omega D = Omega for the differential D of (q,p) -> (q',p'),
    // measured by central differences through the implicit solve
    auto preset = make_preset("double-pendulum-table1");
    const auto& md = preset.model;
    const int n = md.n;
    const double h = 0.05, eps = 1e-6;
    const PhasePoint base{0.0, preset.initial.q, preset.initial.p};

    auto flow = [&](const Vec& z) {
        PhasePoint pt{0.0, z.segment(0, n), z.segment(n, n)};
        auto r = step(md, pt, h);
        Vec out(2 * n);
        out << r.next.q, r.next.p;
        return out;
    };

    Vec z0(2 * n);
    z0 << base.q, base.p;
    Mat D(2 * n, 2 * n);
    for (int k = 0; k < 2 * n; ++k) {
        Vec zp = z0, zm = z0;
        zp[k] += eps;
        zm[k] -= eps;
        D.col(k) = (flow(zp) - flow(zm)) / (2.0 * eps);
    }
    Mat Omega = Mat::Zero(2 * n, 2 * n);
    Omega.block(0, n, n, n) = Mat::Identity(n, n);
    Omega.block(n, 0, n, n) = -Mat::Identity(n, n);
    CHECK((D.transpose() * Omega * D - Omega).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("integrate: long-run energy boundedness on the top") {
    auto preset = make_preset("lagrange-top-table3");
    const double T = 1.8467084770816382;
    auto traj = integrate(preset.model, preset.initial, 0.05 * T, 100.0 * T);
    auto e = energy_error_series(traj, preset.model);
    const size_t half = e.values.size() / 2;
    double first = 0.0, second = 0.0;
    for (size_t k = 0; k < e.values.size(); ++k) {
        if (k <= half)
            first = std::max(first, std::abs(e.values[k]));
        else
            second = std::max(second, std::abs(e.values[k]));
    }
    CHECK(second <= 2.0 * first);
}
