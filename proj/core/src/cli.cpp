#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multiflow/algebroid.hpp"
#include "multiflow/cli.hpp"
#include "multiflow/diagnostics.hpp"
#include "multiflow/dynamics.hpp"
#include "multiflow/errors.hpp"
#include "multiflow/random_states.hpp"
#include "multiflow/scenarios.hpp"
#include "multiflow/snapshot.hpp"
#include "multiflow/spectral.hpp"

namespace multiflow {

namespace {

struct CommonArgs {
    std::string config_path;
    std::string scenario;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out) {
    auto* cfg = cmd->add_option("--config", args.config_path, "configuration file (key = value)");
    auto* sc = cmd->add_option("--scenario", args.scenario, "built-in scenario name");
    cfg->excludes(sc);
    if (with_out) cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "random seed (overrides config)")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_flag("--quiet", args.quiet, "suppress status output");
}

ScenarioConfig config_from(const CommonArgs& args) {
    ScenarioConfig cfg;
    if (!args.config_path.empty()) cfg = load_config(args.config_path);
    else if (!args.scenario.empty()) cfg = default_config(args.scenario);
    else throw ConfigError("one of --config or --scenario is required");
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed_set) cfg.seed = args.seed;
    return cfg;
}

std::ostream& status(bool quiet) {
    static std::ofstream null_sink;
    if (quiet) {
        if (!null_sink.is_open()) null_sink.setstate(std::ios::badbit);
        return null_sink;
    }
    return std::cerr;
}

std::string snapshot_name(long step) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "snapshot_%06ld.bin", step);
    return buf;
}

void print_report(const ValidationReport& rep, bool quiet) {
    if (!quiet) std::cout << rep.summary();
}

// ----------------------------------------------------------------- run

int cmd_run(const CommonArgs& args) {
    ScenarioConfig cfg = config_from(args);
    std::filesystem::create_directories(cfg.out_dir);
    auto& log = status(args.quiet);

    FlowState s = build_scenario(cfg);
    const long steps = std::lround(cfg.T / cfg.dt);
    log << "run: scenario=" << cfg.scenario << " dim=" << cfg.dim << " N=" << cfg.N
        << " phases=" << s.n() << " dt=" << cfg.dt << " T=" << cfg.T << " steps=" << steps
        << "\n";

    const bool kelvin = cfg.check_kelvin && s.grid().dim() == 2;
    std::vector<ScalarField> w;
    std::vector<double> curl0;
    if (kelvin) {
        for (int i = 0; i < s.n(); ++i) {
            w.push_back(curl2d(s.u.u[i]));
            double c = norm_l2(w.back());
            curl0.push_back(c > 0.0 ? c : 1.0);
        }
    }

    DiagnosticsWriter diag(cfg.out_dir + "/diagnostics.csv", s.n());
    double max_consistency = 0.0;
    double max_drift = 0.0;
    double max_div = 0.0;

    auto emit = [&](long step) {
        DiagnosticsRow row = compute_diagnostics(s);
        if (kelvin)
            for (int i = 0; i < s.n(); ++i)
                row.kelvin[static_cast<std::size_t>(i)] =
                    norm_l2(w[static_cast<std::size_t>(i)] - curl2d(s.u.u[i])) /
                    curl0[static_cast<std::size_t>(i)];
        diag.write(row);
        write_snapshot(s, cfg.out_dir + "/" + snapshot_name(step));
        if (cfg.check_consistency)
            max_consistency = std::max(max_consistency, rhs_consistency_residual(s.u, s.rho));
        log << "  t=" << format_double(row.t) << " H=" << format_double(row.energy)
            << " drift=" << format_double(max_drift) << " div=" << format_double(row.div_l2)
            << "\n";
    };

    emit(0);
    StepOptions opt;
    for (long k = 1; k <= steps; ++k) {
        StepReport rep = kelvin ? step_rk4_with_kelvin(s, w, cfg.dt, opt) : step_rk4(s, cfg.dt, opt);
        max_drift = std::max(max_drift, rep.constraint_drift_inf);
        max_div = std::max(max_div, rep.divergence_l2);
        if (k % cfg.snapshot_stride == 0 || k == steps) emit(k);
    }

    log << "run complete: t=" << format_double(s.t) << " max_drift=" << format_double(max_drift)
        << " max_div=" << format_double(max_div) << "\n";

    int rc = 0;
    if (cfg.check_consistency) {
        log << "consistency residual (max over rows): " << format_double(max_consistency) << "\n";
        if (max_consistency > 1e-8) {
            std::cerr << "consistency check failed: residual " << format_double(max_consistency)
                      << " exceeds 1e-8\n";
            rc = 1;
        }
    }
    if (cfg.check_pushforward) {
        if (s.grid().dim() != 1) {
            log << "pushforward check skipped (two-dimensional run)\n";
        } else {
            PushforwardReport rep = pushforward_check_1d(build_scenario(cfg), cfg.T, cfg.dt, opt);
            double worst = *std::max_element(rep.max_mismatch.begin(), rep.max_mismatch.end());
            log << "pushforward mismatch (max over phases): " << format_double(worst)
                << ", min jacobian " << format_double(rep.min_jacobian) << "\n";
        }
    }
    return rc;
}

// --------------------------------------------------------------- check

int cmd_check(const CommonArgs& args, const std::string& snapshot_path) {
    FlowState s = snapshot_path.empty() ? build_scenario(config_from(args))
                                        : read_snapshot(snapshot_path);
    ValidationReport rep = validate(s.rho);
    ValidationReport vel = validate(s.u, s.rho);
    for (auto& c : vel.checks) rep.checks.push_back(c);
    rep.pass = rep.pass && vel.pass;

    double cons = rhs_consistency_residual(s.u, s.rho);
    rep.add("tendency route agreement", cons, 1e-8);

    print_report(rep, args.quiet);
    return rep.pass ? 0 : 1;
}

// --------------------------------------------------------- convergence

FlowState march(FlowState s, double dt, double T) {
    const long steps = std::lround(T / dt);
    for (long k = 0; k < steps; ++k) step_rk4(s, dt);
    return s;
}

double state_distance_u(const FlowState& a, const FlowState& b) {
    double e = 0.0;
    for (int i = 0; i < a.n(); ++i) e = std::max(e, norm_l2(a.u.u[i] - b.u.u[i]));
    return e;
}

double state_distance_rho(const FlowState& a, const FlowState& b) {
    double e = 0.0;
    for (int i = 0; i < a.n(); ++i) e = std::max(e, norm_l2(a.rho.rho[i] - b.rho.rho[i]));
    return e;
}

// Restriction of a fine-grid field to a coarser power-of-two grid by
// node subsampling; the coarse nodes are a subset of the fine ones.
ScalarField restrict_field(const ScalarField& fine, const Grid& coarse) {
    int ratio = fine.grid().n() / coarse.n();
    ScalarField out(coarse);
    int nc = coarse.n(), nf = fine.grid().n();
    if (coarse.dim() == 1) {
        for (int i = 0; i < nc; ++i) out[static_cast<std::size_t>(i)] =
            fine[static_cast<std::size_t>(i * ratio)];
    } else {
        for (int ix = 0; ix < nc; ++ix)
            for (int iy = 0; iy < nc; ++iy)
                out[static_cast<std::size_t>(ix) * nc + iy] =
                    fine[static_cast<std::size_t>(ix * ratio) * nf + iy * ratio];
    }
    return out;
}

int cmd_convergence(const CommonArgs& args) {
    ScenarioConfig cfg = config_from(args);
    std::filesystem::create_directories(cfg.out_dir);
    auto& log = status(args.quiet);

    const double T = std::min(cfg.T, 0.1);
    log << "convergence: scenario=" << cfg.scenario << " T=" << T << "\n";

    // Step-size refinement against a dt/8 reference.
    {
        FlowState ref = march(build_scenario(cfg), cfg.dt / 8.0, T);
        std::ofstream out(cfg.out_dir + "/convergence_dt.csv", std::ios::trunc);
        out << "dt,error_u,error_rho,order_u,order_rho\n";
        double prev_u = 0.0, prev_rho = 0.0;
        for (int level = 0; level < 3; ++level) {
            double dt = cfg.dt / (1 << level);
            FlowState s = march(build_scenario(cfg), dt, T);
            double eu = state_distance_u(s, ref);
            double erho = state_distance_rho(s, ref);
            double ou = level ? std::log2(prev_u / eu) : 0.0;
            double orho = level ? std::log2(prev_rho / erho) : 0.0;
            out << format_double(dt) << ',' << format_double(eu) << ',' << format_double(erho)
                << ',' << format_double(ou) << ',' << format_double(orho) << "\n";
            log << "  dt=" << format_double(dt) << " error_u=" << format_double(eu)
                << (level ? " order_u=" + format_double(ou) : "") << "\n";
            prev_u = eu;
            prev_rho = erho;
        }
    }

    // Grid refinement against a doubled-resolution reference.
    {
        ScenarioConfig fine_cfg = cfg;
        fine_cfg.N = cfg.N * 2;
        FlowState fine = march(build_scenario(fine_cfg), cfg.dt, T);
        std::ofstream out(cfg.out_dir + "/convergence_N.csv", std::ios::trunc);
        out << "N,error_u,error_rho\n";
        for (int N : {cfg.N / 2, cfg.N}) {
            if (N < 16) continue;
            ScenarioConfig level_cfg = cfg;
            level_cfg.N = N;
            FlowState s = march(build_scenario(level_cfg), cfg.dt, T);
            Grid coarse = s.grid();
            double eu = 0.0, erho = 0.0;
            for (int i = 0; i < s.n(); ++i) {
                for (int c = 0; c < coarse.dim(); ++c)
                    eu = std::max(eu, norm_l2(s.u.u[i][c] - restrict_field(fine.u.u[i][c], coarse)));
                erho = std::max(erho, norm_l2(s.rho.rho[i] - restrict_field(fine.rho.rho[i], coarse)));
            }
            out << N << ',' << format_double(eu) << ',' << format_double(erho) << "\n";
            log << "  N=" << N << " error_u=" << format_double(eu)
                << " error_rho=" << format_double(erho) << "\n";
        }
    }
    return 0;
}

// -------------------------------------------------------- bracket-test

struct SuiteLine {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};

int cmd_bracket_test(const CommonArgs& args, int cases) {
    std::vector<SuiteLine> lines;
    auto record = [&](const std::string& name, double res, double tol) {
        lines.push_back({name, res, tol, res <= tol});
    };

    std::mt19937_64 rng(args.seed_set ? args.seed : 20240901ull);
    Grid grid(2, 32);

    double anti = 0.0, bilin = 0.0, routes = 0.0, dual = 0.0;
    for (int c = 0; c < cases; ++c) {
        QuadratureSet quad = random_unit_quadrature(2, grid.dim(), rng);
        MultiDensity rho = random_density(grid, quad, rng);
        MomentumCoset a = random_coset(rho, rng);
        DualCotangent x = random_cotangent(rho, rng);
        DualCotangent y = random_cotangent(rho, rng);
        DualCotangent z = random_cotangent(rho, rng);
        double lambda = uniform_double(rng, -1.0, 1.0);

        anti = std::max(anti, std::abs(poisson_tensor(a, x, y) + poisson_tensor(a, y, x)));

        std::vector<VectorField> fib;
        std::vector<ScalarField> base;
        for (int i = 0; i < rho.n(); ++i) {
            fib.push_back(x.fiber.u[i] + lambda * z.fiber.u[i]);
            base.push_back(x.base[i] + lambda * z.base[i]);
        }
        DualCotangent xz(MultiVelocity(rho.quad, std::move(fib)), std::move(base));
        bilin = std::max(bilin, std::abs(poisson_tensor(a, xz, y) - poisson_tensor(a, x, y) -
                                         lambda * poisson_tensor(a, z, y)));

        routes = std::max(routes, std::abs(poisson_tensor(a, x, y) -
                                           poisson_tensor_lie_form(a, x, y)));

        HamiltonianVector t = hamiltonian_operator(a, x);
        dual = std::max(dual, std::abs(tangent_cotangent_pairing(y, t) - poisson_tensor(a, x, y)));
    }
    record("tensor antisymmetry", anti, 1e-12);
    record("tensor bilinearity", bilin, 1e-12);
    record("tensor route agreement", routes, 1e-10);
    record("operator-tensor duality", dual, 1e-10);

    // Leibniz rule under step halving, plus the closure residual bound.
    {
        QuadratureSet quad = random_unit_quadrature(2, grid.dim(), rng);
        MultiDensity rho = random_density(grid, quad, rng);
        std::vector<VectorField> raw;
        std::vector<ScalarField> pots;
        for (int i = 0; i < rho.n(); ++i) {
            raw.push_back(random_vector(grid, rng));
            pots.push_back(random_scalar(grid, rng));
        }
        ScalarField phi = random_scalar(grid, rng);
        DensityFunctional F = [phi](const MultiDensity& d) {
            return integrate(multiply(phi, d.rho[0]));
        };
        // V is scaled by a curved functional: affine sections make the
        // centered differences exact and the defect vanish identically.
        ScalarField psi = random_scalar(grid, rng);
        DensityFunctional G = [psi](const MultiDensity& d) {
            double s = integrate(multiply(psi, d.rho[1]));
            return 1.0 + 0.5 * s * s;
        };

        std::vector<double> res, closure;
        for (double h : {1e-3, 5e-4, 2.5e-4}) {
            Section U = make_projected_constant_section(raw, h);
            Section V = scale_section(G, make_potential_section(pots, h));
            Section FV = scale_section(F, V);

            BracketResult uv = bracket_sections(U, V, rho);
            BracketResult ufv = bracket_sections(U, FV, rho);
            double Fval = F(rho);
            double dF = derivative_along_anchor(F, U, rho, h);
            MultiVelocity v = V.eval(rho);
            double r = 0.0;
            for (int i = 0; i < rho.n(); ++i)
                r = std::max(r, norm_l2(ufv.value.u[i] - Fval * uv.value.u[i] - dF * v.u[i]));
            res.push_back(r);
            closure.push_back(uv.constraint_residual);
            record("bracket closure residual (h=" + format_double(h) + ")",
                   uv.constraint_residual, 100.0 * h * h + 1e-8);
        }
        record("leibniz residual decay (h -> h/2)", res[1] / std::max(res[0], 1e-300), 0.6);
        record("leibniz residual decay (h/2 -> h/4)", res[2] / std::max(res[1], 1e-300), 0.6);
    }

    bool ok = true;
    for (const auto& l : lines) {
        ok = ok && l.pass;
        if (!args.quiet)
            std::cout << (l.pass ? "PASS" : "FAIL") << "  " << l.name << ": residual "
                      << format_double(l.residual) << " vs " << format_double(l.tolerance)
                      << "\n";
    }
    return ok ? 0 : 1;
}

// -------------------------------------------------------------- metric

int cmd_metric(const CommonArgs& args) {
    ScenarioConfig cfg = config_from(args);
    std::filesystem::create_directories(cfg.out_dir);
    FlowState s = build_scenario(cfg);

    TangentDensity xi = anchor(s.u, s.rho);
    MetricResult m = mdens_metric(xi, s.rho);

    std::ofstream out(cfg.out_dir + "/metric_potentials.csv", std::ios::trunc);
    const Grid& g = s.grid();
    out << "x";
    if (g.dim() == 2) out << ",y";
    for (int i = 1; i <= s.n(); ++i) out << ",f_" << i;
    out << "\n";
    for (std::size_t j = 0; j < g.size(); ++j) {
        out << format_double(g.x(j));
        if (g.dim() == 2) out << ',' << format_double(g.y(j));
        for (const auto& f : m.potentials) out << ',' << format_double(f[j]);
        out << "\n";
    }

    std::cout << "metric value: " << format_double(m.value) << "\n";
    status(args.quiet) << "potentials written to " << cfg.out_dir << "/metric_potentials.csv\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"multiphase incompressible flow simulator and structure checks"};
    app.require_subcommand(1);
    app.footer("Environment: MULTIFLOW_THREADS caps internal parallelism (default 1).");

    CommonArgs run_args, check_args, conv_args, bracket_args, metric_args;
    std::string snapshot_path;
    int bracket_cases = 10;

    auto* run = app.add_subcommand("run", "time-march a scenario, emitting snapshots and diagnostics");
    add_common(run, run_args, true);

    auto* check = app.add_subcommand("check", "validate invariants of a snapshot or scenario");
    add_common(check, check_args, false);
    check->add_option("--snapshot", snapshot_path, "state file to check instead of a scenario");

    auto* conv = app.add_subcommand("convergence", "step and grid refinement studies");
    add_common(conv, conv_args, true);

    auto* bracket = app.add_subcommand("bracket-test", "randomized bracket and tensor identities");
    add_common(bracket, bracket_args, false);
    bracket->add_option("--cases", bracket_cases, "number of randomized cases")
        ->check(CLI::PositiveNumber);

    auto* metric = app.add_subcommand("metric", "density-tangent metric value and potentials");
    add_common(metric, metric_args, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (check->parsed()) return cmd_check(check_args, snapshot_path);
        if (conv->parsed()) return cmd_convergence(conv_args);
        if (bracket->parsed()) return cmd_bracket_test(bracket_args, bracket_cases);
        if (metric->parsed()) return cmd_metric(metric_args);
        return 1;
    } catch (const PositivityError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const CflError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const FoldError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const SolvabilityError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace multiflow
