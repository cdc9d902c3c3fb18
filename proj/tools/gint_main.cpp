// gint: batch front-end for the variational-integrator library.
// Subcommands: simulate, converge, compare-reduced, validate, presets.
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include "gint/analysis.hpp"
#include "gint/elliptic.hpp"
#include "gint/first_order.hpp"
#include "gint/io.hpp"
#include "gint/midpoint.hpp"
#include "gint/simpson.hpp"
#include "gint/systems.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <random>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gint;

namespace {

struct ExperimentConfig {
    std::string preset;
    std::string integrator = "simpson";
    std::optional<double> h;
    std::optional<double> h_frac;   // top presets: fraction of the nutation period
    std::optional<double> t_end;
    std::optional<double> periods;  // top presets: horizon in nutation periods
    std::string out_dir = ".";
    StepperConfig stepper;
};

struct ResolvedRun {
    double h = 0.0;
    double t_end = 0.0;
    long steps = 0;
};

double preset_period(const Preset& preset) {
    const auto cubic = nutation_cubic(preset.top_params, preset.initial.q, preset.qdot0);
    return nutation_period(cubic);
}

// Resolve (h | h-frac) x (t-end | periods) into a whole number of steps.
ResolvedRun resolve_grid(const Preset& preset, const ExperimentConfig& cfg) {
    if (cfg.h.has_value() == cfg.h_frac.has_value())
        throw ContractViolation("exactly one of --h / --h-frac must be given");
    if (cfg.t_end.has_value() == cfg.periods.has_value())
        throw ContractViolation("exactly one of --t-end / --periods must be given");
    if ((cfg.h_frac || cfg.periods) && !preset.is_top)
        throw ContractViolation(
            "--h-frac and --periods are period-relative and need a top preset");

    ResolvedRun run;
    const double T = (cfg.h_frac || cfg.periods) ? preset_period(preset) : 0.0;
    run.h = cfg.h ? *cfg.h : *cfg.h_frac * T;
    if (!(run.h > 0.0)) throw ContractViolation("step size must be positive");
    const double horizon = cfg.t_end ? *cfg.t_end : *cfg.periods * T;
    if (!(horizon >= 0.0)) throw ContractViolation("horizon must be nonnegative");
    // whole steps only; round up when the horizon is not commensurate
    run.steps = static_cast<long>(std::ceil(horizon / run.h - 1e-9));
    run.t_end = static_cast<double>(run.steps) * run.h;
    return run;
}

Trajectory run_integrator(const std::string& integrator, const Preset& preset,
                          double h, double t_end, const StepperConfig& stepper) {
    if (integrator == "simpson")
        return integrate(preset.model, preset.initial, h, t_end, stepper);
    if (integrator == "midpoint")
        return midpoint::integrate(preset.model, preset.initial, h, t_end, stepper);
    if (integrator == "rk4")
        return rk4_integrate_canonical(preset.model, preset.initial, h, t_end);
    throw ContractViolation("unknown integrator '" + integrator +
                            "'; available: simpson midpoint rk4");
}

io::CsvTable trajectory_table(const Trajectory& traj, const Preset& preset) {
    const int n = preset.model.n;
    io::CsvTable t;
    t.header.push_back("t");
    for (int k = 1; k <= n; ++k) t.header.push_back("q" + std::to_string(k));
    for (int k = 1; k <= n; ++k) t.header.push_back("p" + std::to_string(k));
    t.header.push_back("H");
    if (preset.is_top) {
        t.header.push_back("p_phi");
        t.header.push_back("p_psi");
    }
    for (const auto& pt : traj.points) {
        std::vector<double> row;
        row.push_back(pt.t);
        for (int k = 0; k < n; ++k) row.push_back(pt.q[k]);
        for (int k = 0; k < n; ++k) row.push_back(pt.p[k]);
        row.push_back(energy(preset.model, pt));
        if (preset.is_top) {
            row.push_back(pt.p[0]);
            row.push_back(pt.p[2]);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_series_csv(const fs::path& path, const std::string& value_name,
                      const ErrorSeries& series) {
    io::CsvTable t;
    t.header = {"t", value_name};
    for (size_t k = 0; k < series.times.size(); ++k)
        t.rows.push_back({series.times[k], series.values[k]});
    io::write_csv(path, t);
}

// Tip trace on the unit sphere, with samples marked where the precession
// rate vanishes at a band edge (the cusp instants).
void write_tip_path(const fs::path& path, const Trajectory& traj, const Preset& preset) {
    const auto cubic = nutation_cubic(preset.top_params, preset.initial.q, preset.qdot0);
    std::vector<double> phidot(traj.points.size());
    double phidot_max = 0.0;
    for (size_t k = 0; k < traj.points.size(); ++k) {
        const auto& pt = traj.points[k];
        const Vec v = preset.model.mass(pt.q).ldlt().solve(pt.p);
        phidot[k] = v[0];
        phidot_max = std::max(phidot_max, std::abs(v[0]));
    }
    const double band = cubic.u2 - cubic.u1;
    io::CsvTable t;
    t.header = {"t", "x", "y", "z", "cusp"};
    for (size_t k = 0; k < traj.points.size(); ++k) {
        const auto& pt = traj.points[k];
        const double phi = pt.q[0], theta = pt.q[1];
        const double u = std::cos(theta);
        const bool at_edge =
            std::min(std::abs(u - cubic.u1), std::abs(u - cubic.u2)) <= 0.02 * band;
        const bool cusp =
            at_edge && std::abs(phidot[k]) <= 0.02 * std::max(1e-300, phidot_max);
        t.rows.push_back({pt.t, std::cos(phi) * std::sin(theta),
                          std::sin(phi) * std::sin(theta), u, cusp ? 1.0 : 0.0});
    }
    io::write_csv(path, t);
}

json newton_stats_json(const Trajectory& traj) {
    int max_it = 0;
    double max_res = 0.0;
    bool any_fd = false;
    for (const auto& st : traj.stats) {
        max_it = std::max(max_it, st.newton_iterations);
        max_res = std::max(max_res, st.final_residual_norm);
        any_fd = any_fd || st.jacobian_source == JacobianSource::finite_difference;
    }
    return {{"max_iterations", max_it},
            {"max_residual_norm", max_res},
            {"jacobian_source", traj.stats.empty() ? "none"
                                : any_fd           ? "finite-difference"
                                                   : "analytic"}};
}

int cmd_simulate(const ExperimentConfig& cfg) {
    const Preset preset = make_preset(cfg.preset);
    const ResolvedRun run = resolve_grid(preset, cfg);
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    Trajectory traj;
    try {
        traj = run_integrator(cfg.integrator, preset, run.h, run.t_end, cfg.stepper);
    } catch (const IntegrationAbort& abort) {
        io::write_csv(dir / "trajectory.csv.partial",
                      trajectory_table(abort.partial, preset));
        std::cerr << "simulate: " << abort.what() << "\npartial trajectory written to "
                  << (dir / "trajectory.csv.partial") << "\n";
        return 1;
    }

    io::write_csv(dir / "trajectory.csv", trajectory_table(traj, preset));

    const auto eH = energy_error_series(traj, preset.model);
    write_series_csv(dir / "energy_error.csv", "e_H", eH);

    json summary;
    summary["preset"] = preset.name;
    summary["integrator"] = cfg.integrator;
    summary["h"] = run.h;
    summary["t_end"] = run.t_end;
    summary["steps"] = run.steps;
    summary["H0"] = energy(preset.model, preset.initial);
    summary["max_energy_error"] = sup_norm(eH);
    if (preset.is_top) {
        json drift;
        drift["p_phi"] = sup_norm(momentum_error_series(traj, preset.model, 0));
        drift["p_psi"] = sup_norm(momentum_error_series(traj, preset.model, 2));
        summary["max_momentum_error"] = drift;

        io::CsvTable mom;
        mom.header = {"t", "e_p_phi", "e_p_psi"};
        const auto ephi = momentum_error_series(traj, preset.model, 0);
        const auto epsi = momentum_error_series(traj, preset.model, 2);
        for (size_t k = 0; k < ephi.times.size(); ++k)
            mom.rows.push_back({ephi.times[k], ephi.values[k], epsi.values[k]});
        io::write_csv(dir / "momentum_error.csv", mom);
        write_tip_path(dir / "tip_path.csv", traj, preset);

        // nutation trace against the closed-form solution
        const auto cubic =
            nutation_cubic(preset.top_params, preset.initial.q, preset.qdot0);
        io::CsvTable nut;
        nut.header = {"t", "theta", "theta_exact"};
        for (const auto& pt : traj.points)
            nut.rows.push_back({pt.t, pt.q[1], exact_nutation(cubic, pt.t)});
        io::write_csv(dir / "nutation.csv", nut);
    }
    summary["newton"] = newton_stats_json(traj);
    std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
    std::cout << "wrote " << (dir / "trajectory.csv") << " (" << traj.points.size()
              << " rows)\n";
    return 0;
}

struct SweepPoint {
    double h = 0.0;
    double norm = 0.0;
};

int cmd_converge(const ExperimentConfig& cfg, int halvings, const std::string& metric,
                 const std::string& reference) {
    const Preset preset = make_preset(cfg.preset);
    if (metric != "energy" && metric != "nutation")
        throw ContractViolation("--metric must be energy or nutation");
    if (reference != "exact" && reference != "none")
        throw ContractViolation("--reference must be exact or none");
    if (metric == "nutation") {
        if (!preset.is_top) throw ContractViolation("nutation metric needs a top preset");
        if (reference != "exact")
            throw ContractViolation("nutation metric needs --reference exact");
    }
    if (reference == "exact" && !preset.is_top)
        throw ContractViolation("exact reference is only available for top presets");
    if (halvings < 0) throw ContractViolation("--halvings must be nonnegative");

    const ResolvedRun base = resolve_grid(preset, cfg);
    std::optional<NutationCubic> cubic;
    if (reference == "exact")
        cubic = nutation_cubic(preset.top_params, preset.initial.q, preset.qdot0);

    auto member = [&](int k) -> SweepPoint {
        const double h = base.h / std::pow(2.0, k);
        const auto traj = run_integrator(cfg.integrator, preset, h, base.t_end, cfg.stepper);
        double norm;
        if (metric == "energy") {
            norm = sup_norm(energy_error_series(traj, preset.model));
        } else {
            auto ref = [&](double t) { return exact_nutation(*cubic, t); };
            norm = sup_norm(nutation_error_series(traj, ref));
        }
        return {h, norm};
    };

    // sweep members run concurrently; assembly stays ordered
    std::vector<std::future<SweepPoint>> jobs;
    for (int k = 0; k <= halvings; ++k)
        jobs.push_back(std::async(std::launch::async, member, k));
    std::vector<double> hs, norms;
    for (auto& j : jobs) {
        const SweepPoint pt = j.get();
        hs.push_back(pt.h);
        norms.push_back(pt.norm);
    }

    const auto report = convergence_order(hs, norms);
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    io::CsvTable t;
    t.header = {"h", "norm", "alpha"};
    for (size_t k = 0; k < hs.size(); ++k)
        t.rows.push_back({hs[k], norms[k], k == 0 ? std::nan("") : report.orders[k - 1]});
    io::write_csv(dir / "convergence.csv", t);

    json summary;
    summary["preset"] = preset.name;
    summary["integrator"] = cfg.integrator;
    summary["metric"] = metric;
    summary["reference"] = reference;
    summary["t_end"] = base.t_end;
    summary["slope"] = report.slope;
    summary["floored_rows"] = report.floored;
    std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
    std::cout << "least-squares order: " << report.slope << "\n";
    return 0;
}

int cmd_compare_reduced(double h0, int halvings, double horizon,
                        const std::string& out_dir, const StepperConfig& stepper) {
    if (!(h0 > 0.0)) throw ContractViolation("--h0 must be positive");
    if (!(horizon > 0.0)) throw ContractViolation("--horizon must be positive");
    if (halvings < 0) throw ContractViolation("--halvings must be nonnegative");
    const Preset preset = make_preset("lagrange-top-table4");
    const auto field = reduced_top_field();

    auto member = [&](int k) -> SweepPoint {
        const double h = h0 / std::pow(2.0, k);
        const long steps = static_cast<long>(std::ceil(horizon / h - 1e-9));
        const double t_end = static_cast<double>(steps) * h;
        const auto traj = integrate(preset.model, preset.initial, h, t_end, stepper);
        Vec y(3);
        y << preset.initial.q[0], preset.initial.q[1], preset.qdot0[1];
        const auto reduced = rk4_integrate(field, 0.0, y, h, steps);
        std::vector<double> theta;
        theta.reserve(reduced.size());
        for (const auto& state : reduced) theta.push_back(state[1]);
        return {h, cross_method_difference(traj, theta)};
    };

    std::vector<std::future<SweepPoint>> jobs;
    for (int k = 0; k <= halvings; ++k)
        jobs.push_back(std::async(std::launch::async, member, k));
    std::vector<double> hs, norms;
    for (auto& j : jobs) {
        const SweepPoint pt = j.get();
        hs.push_back(pt.h);
        norms.push_back(pt.norm);
    }

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    io::CsvTable t;
    t.header = {"h", "norm", "alpha"};
    json summary;
    summary["preset"] = preset.name;
    summary["horizon"] = horizon;
    if (halvings >= 1) {
        const auto report = convergence_order(hs, norms);
        for (size_t k = 0; k < hs.size(); ++k)
            t.rows.push_back(
                {hs[k], norms[k], k == 0 ? std::nan("") : report.orders[k - 1]});
        summary["slope"] = report.slope;
        std::cout << "least-squares order of the difference: " << report.slope << "\n";
    } else {
        t.rows.push_back({hs[0], norms[0], std::nan("")});
        summary["slope"] = nullptr;
        std::cout << "single norm: " << norms[0] << "\n";
    }
    io::write_csv(dir / "difference_convergence.csv", t);
    std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
    return 0;
}

int cmd_validate(const std::string& preset_name, const std::string& out_dir) {
    const Preset preset = make_preset(preset_name);
    json report;
    bool ok = true;

    // model self-checks at deterministic admissible samples
    std::mt19937 gen(20240915);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    std::uniform_real_distribution<double> theta(0.15, M_PI - 0.15);
    std::vector<Vec> samples;
    for (int k = 0; k < 32; ++k) {
        Vec q(preset.model.n);
        for (int j = 0; j < preset.model.n; ++j) q[j] = angle(gen);
        if (preset.is_top) q[1] = theta(gen);
        samples.push_back(q);
    }
    const auto model_report = validate_model(preset.model, samples);
    json checks = json::array();
    for (const auto& c : model_report.checks) {
        checks.push_back(
            {{"name", c.name}, {"max_deviation", c.max_deviation}, {"pass", c.pass}});
        ok = ok && c.pass;
    }
    report["model"] = checks;

    // Jacobian block validation for both implicit steppers
    const auto mask = validate_jacobian_blocks(preset.model, preset.initial, 0.01);
    json blocks;
    const char* rows[3] = {"F_qm", "F_p", "F_q"};
    const char* cols[3] = {"q_m", "p", "q"};
    int analytic_blocks = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            blocks[std::string("d") + rows[r] + "/d" + cols[c]] =
                mask.ok[r][c] ? "analytic" : "finite-difference";
            analytic_blocks += mask.ok[r][c] ? 1 : 0;
        }
    report["simpson_jacobian_blocks"] = blocks;
    report["simpson_jacobian_analytic_blocks"] = analytic_blocks;
    const auto mid_mask =
        midpoint::validate_jacobian_blocks(preset.model, preset.initial, 0.01);
    report["midpoint_jacobian_all_analytic"] = mid_mask.all_ok();

    // elliptic kernel identities
    bool ell_ok = true;
    ell_ok = ell_ok &&
             std::abs(carlson_rf(2.0, 2.0, 2.0) - 1.0 / std::sqrt(2.0)) <= 1e-12;
    for (double u : {0.3, 1.1}) {
        ell_ok = ell_ok && std::abs(jacobi_sn(u, 0.0) - std::sin(u)) <= 1e-12;
        ell_ok = ell_ok && std::abs(jacobi_sn(u, 1.0) - std::tanh(u)) <= 1e-12;
    }
    report["elliptic_identities"] = ell_ok;
    ok = ok && ell_ok;

    if (preset.is_top) {
        const auto cubic =
            nutation_cubic(preset.top_params, preset.initial.q, preset.qdot0);
        const double worst =
            std::max({std::abs(cubic.eval(cubic.u1)), std::abs(cubic.eval(cubic.u2)),
                      std::abs(cubic.eval(cubic.u3))});
        report["nutation_cubic_root_residual"] = worst;
        report["nutation_period"] = nutation_period(cubic);
        ok = ok && worst <= 1e-10;
    }

    report["pass"] = ok;
    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "validation.json") << report.dump(2) << "\n";
    std::cout << report.dump(2) << "\n";
    return ok ? 0 : 1;
}

int cmd_presets() {
    for (const auto& name : preset_names()) {
        const Preset p = make_preset(name);
        std::cout << name << "\n    " << p.description << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometric variational integrators: Simpson and implicit-midpoint "
                 "steppers, RK4 baseline, analytic top reference, convergence tools"};
    app.require_subcommand(1);
    // keep the short -h free for the step-size option
    app.set_help_flag("--help", "print help");
    app.set_config("--config", "", "read options from a TOML-style key=value file");

    ExperimentConfig cfg;
    int halvings = 4;
    std::string metric = "energy";
    std::string reference = "none";
    double h0 = 0.1, horizon = 1.0;

    auto add_newton_flags = [&cfg](CLI::App* cmd) {
        cmd->add_option("--newton-tol", cfg.stepper.newton.tolerance,
                        "residual infinity-norm acceptance threshold")
            ->capture_default_str();
        cmd->add_option("--newton-max-iter", cfg.stepper.newton.max_iterations,
                        "iteration budget per step")
            ->capture_default_str();
        cmd->add_option("--newton-damping", cfg.stepper.newton.damping,
                        "step fraction in (0,1]; < 1 engages the monotone safeguard")
            ->capture_default_str();
        cmd->add_flag("!--no-newton-polish", cfg.stepper.newton.polish,
                      "stop at the tolerance instead of polishing to the floor");
        cmd->add_flag("--extrapolated-guess", cfg.stepper.extrapolated_guess,
                      "seed Newton with a constant-velocity prediction");
    };
    auto add_grid_flags = [&](CLI::App* cmd) {
        cmd->set_help_flag("--help", "print help");
        cmd->add_option("--h", cfg.h, "step size [s]");
        cmd->add_option("--h-frac", cfg.h_frac,
                        "step size as a fraction of the nutation period (top presets)");
        cmd->add_option("--t-end", cfg.t_end, "horizon [s]");
        cmd->add_option("--periods", cfg.periods,
                        "horizon in nutation periods (top presets)");
        cmd->add_option("--out-dir", cfg.out_dir, "output directory")
            ->capture_default_str();
    };

    auto* sim = app.add_subcommand("simulate", "integrate a preset and export CSV/JSON");
    sim->configurable();
    sim->add_option("--preset", cfg.preset, "system preset name")->required();
    sim->add_option("--integrator", cfg.integrator, "simpson | midpoint | rk4")
        ->capture_default_str();
    add_grid_flags(sim);
    add_newton_flags(sim);

    auto* conv =
        app.add_subcommand("converge", "error norms and orders over step halvings");
    conv->configurable();
    conv->add_option("--preset", cfg.preset, "system preset name")->required();
    conv->add_option("--integrator", cfg.integrator, "simpson | midpoint | rk4")
        ->capture_default_str();
    conv->add_option("--metric", metric, "energy | nutation")->capture_default_str();
    conv->add_option("--reference", reference, "exact | none")->capture_default_str();
    conv->add_option("--halvings", halvings, "number of step halvings")
        ->capture_default_str();
    add_grid_flags(conv);
    add_newton_flags(conv);

    auto* cmp = app.add_subcommand(
        "compare-reduced",
        "Simpson on the complete cusp-motion top vs RK4 on the reduced system");
    cmp->configurable();
    cmp->add_option("--h0", h0, "coarsest step size [s]")->capture_default_str();
    cmp->add_option("--halvings", halvings, "number of step halvings")
        ->capture_default_str();
    cmp->add_option("--horizon", horizon, "comparison window [s]")
        ->capture_default_str();
    cmp->add_option("--out-dir", cfg.out_dir, "output directory")->capture_default_str();
    add_newton_flags(cmp);

    auto* val = app.add_subcommand("validate",
                                   "model derivative, Jacobian and kernel self-checks");
    val->configurable();
    val->add_option("--preset", cfg.preset, "system preset name")->required();
    val->add_option("--out-dir", cfg.out_dir, "output directory")->capture_default_str();

    auto* pre = app.add_subcommand("presets", "list registered system presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(cfg);
        if (conv->parsed()) return cmd_converge(cfg, halvings, metric, reference);
        if (cmp->parsed())
            return cmd_compare_reduced(h0, halvings, horizon, cfg.out_dir, cfg.stepper);
        if (val->parsed()) return cmd_validate(cfg.preset, cfg.out_dir);
        if (pre->parsed()) return cmd_presets();
    } catch (const ContractViolation& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
