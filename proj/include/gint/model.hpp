#pragma once

#include "gint/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gint {

/// Mass matrix with its first and second configuration derivatives,
/// evaluated at one state.
struct MassTensorBundle {
    Mat M;         ///< n x n, symmetric positive-definite
    MassGrad dM;   ///< dM[g](a,b) = d_g M_ab, symmetric in (a,b)
    MassHess d2M;  ///< d2M[g][d](a,b), symmetric in (a,b) and (g,d)
};

/// Lagrangian system  L(q, qdot) = 1/2 qdot^T M(q) qdot - V(q)
/// described by callbacks. All callbacks must be pure; derivative tensors are
/// supplied analytically by each system and cross-checked by validate_model().
struct LagrangianModel {
    int n = 0;
    std::string name;

    std::function<Mat(const Vec&)> mass;
    std::function<MassGrad(const Vec&)> dmass;
    std::function<MassHess(const Vec&)> d2mass;
    std::function<double(const Vec&)> potential;
    std::function<Vec(const Vec&)> grad_potential;
    std::function<Mat(const Vec&)> hess_potential;

    /// Declares excluded submanifolds (e.g. mass-matrix singularities).
    /// Integrators check and report; the model itself does not guard.
    std::function<bool(const Vec&)> admissible = [](const Vec&) { return true; };

    /// Indices of cyclic coordinates whose momenta the dynamics conserves.
    std::vector<int> conserved_indices;

    MassTensorBundle tensors(const Vec& q) const {
        return {mass(q), dmass(q), d2mass(q)};
    }
};

/// L(q, qdot) = 1/2 qdot^T M(q) qdot - V(q).
double lagrangian(const LagrangianModel& model, const Vec& q, const Vec& qdot);

/// H(p, q) = 1/2 p^T M(q)^{-1} p + V(q).
/// Throws SingularMassError (with a condition estimate) if M(q) is
/// numerically singular.
double energy(const LagrangianModel& model, const PhasePoint& point);

/// Continuous Legendre transform p = M(q0) qdot0, used to seed integrations
/// from velocity initial conditions.
Vec initial_momentum(const LagrangianModel& model, const Vec& q0, const Vec& qdot0);

struct ValidationCheck {
    std::string name;
    double max_deviation = 0.0;  ///< max |analytic - reference| / max(1, scale)
    double tolerance = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    const ValidationCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// Self-check of a model at the given sample states:
///  - symmetry and positive-definiteness of M,
///  - dmass vs central differences of mass, d2mass vs differences of dmass,
///  - grad_potential vs differences of potential, hess vs differences of grad.
/// Deviations are normalized by max(1, tensor magnitude). Never throws;
/// failures are carried in the report.
ValidationReport validate_model(const LagrangianModel& model,
                                const std::vector<Vec>& samples,
                                double fd_step = 1e-6,
                                double tolerance = 1e-6);

}  // namespace gint
