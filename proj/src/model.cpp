#include "gint/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace gint {

double lagrangian(const LagrangianModel& model, const Vec& q, const Vec& qdot) {
    require(q.size() == model.n && qdot.size() == model.n,
            "lagrangian: dimension mismatch");
    const Mat M = model.mass(q);
    return 0.5 * qdot.dot(M * qdot) - model.potential(q);
}

double energy(const LagrangianModel& model, const PhasePoint& point) {
    require(point.q.size() == model.n && point.p.size() == model.n,
            "energy: dimension mismatch");
    const Mat M = model.mass(point.q);
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e14) {
        throw SingularMassError("energy: singular mass matrix at q, cond ~ " +
                                    std::to_string(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()),
                                lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    }
    const Vec v = M.ldlt().solve(point.p);
    return 0.5 * point.p.dot(v) + model.potential(point.q);
}

Vec initial_momentum(const LagrangianModel& model, const Vec& q0, const Vec& qdot0) {
    require(q0.size() == model.n && qdot0.size() == model.n,
            "initial_momentum: dimension mismatch");
    return model.mass(q0) * qdot0;
}

namespace {

double tensor_scale(const Mat& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

double scale_of(const MassGrad& t) {
    double s = 1.0;
    for (const auto& m : t) s = std::max(s, m.cwiseAbs().maxCoeff());
    return s;
}

}  // namespace

ValidationReport validate_model(const LagrangianModel& model,
                                const std::vector<Vec>& samples,
                                double fd_step, double tolerance) {
    require(fd_step > 0.0, "validate_model: fd_step must be positive");
    const int n = model.n;
    ValidationReport report;

    double sym_dev = 0.0;
    double min_eig_rel = std::numeric_limits<double>::infinity();
    double dM_dev = 0.0, d2M_dev = 0.0, gradV_dev = 0.0, hessV_dev = 0.0;
    double hess_sym_dev = 0.0;

    for (const Vec& q : samples) {
        const Mat M = model.mass(q);
        sym_dev = std::max(sym_dev, (M - M.transpose()).cwiseAbs().maxCoeff() / tensor_scale(M));
        Eigen::SelfAdjointEigenSolver<Mat> es(M);
        min_eig_rel = std::min(min_eig_rel,
                               es.eigenvalues().minCoeff() / M.cwiseAbs().maxCoeff());

        // dmass vs central differences of mass
        const MassGrad dM = model.dmass(q);
        double scale = scale_of(dM);
        for (int g = 0; g < n; ++g) {
            Vec qp = q, qm = q;
            qp[g] += fd_step;
            qm[g] -= fd_step;
            const Mat fd = (model.mass(qp) - model.mass(qm)) / (2.0 * fd_step);
            dM_dev = std::max(dM_dev, (dM[g] - fd).cwiseAbs().maxCoeff() / scale);
        }

        // d2mass vs central differences of dmass
        const MassHess d2M = model.d2mass(q);
        scale = 1.0;
        for (const auto& row : d2M)
            for (const auto& m : row) scale = std::max(scale, m.cwiseAbs().maxCoeff());
        for (int d = 0; d < n; ++d) {
            Vec qp = q, qm = q;
            qp[d] += fd_step;
            qm[d] -= fd_step;
            const MassGrad up = model.dmass(qp), dn = model.dmass(qm);
            for (int g = 0; g < n; ++g) {
                const Mat fd = (up[g] - dn[g]) / (2.0 * fd_step);
                d2M_dev = std::max(d2M_dev, (d2M[g][d] - fd).cwiseAbs().maxCoeff() / scale);
            }
        }

        // grad_potential vs central differences of potential
        const Vec gV = model.grad_potential(q);
        scale = std::max(1.0, gV.cwiseAbs().maxCoeff());
        for (int g = 0; g < n; ++g) {
            Vec qp = q, qm = q;
            qp[g] += fd_step;
            qm[g] -= fd_step;
            const double fd = (model.potential(qp) - model.potential(qm)) / (2.0 * fd_step);
            gradV_dev = std::max(gradV_dev, std::abs(gV[g] - fd) / scale);
        }

        // hess_potential vs central differences of grad_potential
        const Mat K = model.hess_potential(q);
        hess_sym_dev = std::max(hess_sym_dev,
                                (K - K.transpose()).cwiseAbs().maxCoeff() / tensor_scale(K));
        scale = tensor_scale(K);
        for (int d = 0; d < n; ++d) {
            Vec qp = q, qm = q;
            qp[d] += fd_step;
            qm[d] -= fd_step;
            const Vec fd = (model.grad_potential(qp) - model.grad_potential(qm)) / (2.0 * fd_step);
            hessV_dev = std::max(hessV_dev, (K.col(d) - fd).cwiseAbs().maxCoeff() / scale);
        }
    }

    auto add = [&](const std::string& name, double dev, double tol, bool pass) {
        report.checks.push_back({name, dev, tol, pass});
    };
    add("mass-symmetry", sym_dev, 1e-14, sym_dev <= 1e-14);
    // near-singular M is flagged through a scale-relative eigenvalue floor
    add("mass-positive-definite", -min_eig_rel, -1e-12, min_eig_rel > 1e-12);
    add("dmass-vs-fd", dM_dev, tolerance, dM_dev <= tolerance);
    add("d2mass-vs-fd", d2M_dev, tolerance, d2M_dev <= tolerance);
    add("grad-potential-vs-fd", gradV_dev, tolerance, gradV_dev <= tolerance);
    add("hess-potential-vs-fd", hessV_dev, tolerance, hessV_dev <= tolerance);
    add("hess-symmetry", hess_sym_dev, 1e-14, hess_sym_dev <= 1e-14);
    return report;
}

}  // namespace gint
