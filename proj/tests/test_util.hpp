#pragma once

#include "gint/model.hpp"
#include "gint/types.hpp"

#include <cmath>
#include <random>

namespace gint::testutil {

/// n = 1 oscillator: M = [[mass]], V = 1/2 w^2 q^2.
inline LagrangianModel oscillator(double w = 1.0, double mass = 1.0) {
    LagrangianModel md;
    md.n = 1;
    md.name = "oscillator";
    md.mass = [mass](const Vec&) { return Mat::Constant(1, 1, mass); };
    md.dmass = [](const Vec&) { return MassGrad(1, Mat::Zero(1, 1)); };
    md.d2mass = [](const Vec&) { return MassHess(1, MassGrad(1, Mat::Zero(1, 1))); };
    md.potential = [w](const Vec& q) { return 0.5 * w * w * q[0] * q[0]; };
    md.grad_potential = [w](const Vec& q) { return Vec::Constant(1, w * w * q[0]); };
    md.hess_potential = [w](const Vec&) { return Mat::Constant(1, 1, w * w); };
    return md;
}

/// Constant-mass free particle in n dimensions: V = 0.
inline LagrangianModel free_particle(int n, const Mat& M) {
    LagrangianModel md;
    md.n = n;
    md.name = "free-particle";
    md.mass = [M](const Vec&) { return M; };
    md.dmass = [n](const Vec&) { return MassGrad(n, Mat::Zero(n, n)); };
    md.d2mass = [n](const Vec&) { return MassHess(n, MassGrad(n, Mat::Zero(n, n))); };
    md.potential = [](const Vec&) { return 0.0; };
    md.grad_potential = [n](const Vec&) { return Vec(Vec::Zero(n)); };
    md.hess_potential = [n](const Vec&) { return Mat(Mat::Zero(n, n)); };
    return md;
}

inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed);
    return gen;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

inline Vec random_vec(int n, double lo, double hi) {
    Vec v(n);
    for (int k = 0; k < n; ++k) v[k] = uniform(lo, hi);
    return v;
}

}  // namespace gint::testutil
