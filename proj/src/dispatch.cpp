#include "kdvnudge/dispatch.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "kdvnudge/csvio.hpp"
#include "kdvnudge/functionals.hpp"
#include "kdvnudge/kernels.hpp"

namespace kdv {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json config_json(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.entries()) j[k] = v;
    return j;
}

json manifest_skeleton(const std::string& subcommand, const RunConfig& cfg) {
    json m;
    m["artifact"] = {{"name", "kdvnudge"}, {"version", artifact_version}, {"build", build_id}};
    m["subcommand"] = subcommand;
    m["resolved_config"] = config_json(cfg);
    m["generator"] = generator_id();
    m["scheme"] = {{"integrator", "etdrk4-contour"},
                   {"contour_points", EtdRk4::contour_points()},
                   {"dealias", "2/3-rule"},
                   {"threads", par::threads()},
                   {"parallel", par::enabled()}};
    return m;
}

void write_manifest(const json& m, const std::string& out_dir) {
    std::ofstream os(fs::path(out_dir) / "manifest.json");
    if (!os) throw std::runtime_error("cannot write manifest.json");
    os << m.dump(2) << '\n';
}

json condition_json(const bounds::ConditionTable& t) {
    auto one = [](const bounds::ConditionEntry& e) {
        return json{{"lhs", e.lhs}, {"rhs", e.rhs}, {"pass", e.pass}};
    };
    return json{{"m", t.m},          {"cond1", one(t.cond1)},   {"cond2", one(t.cond2)},
                {"cond3", one(t.cond3)}, {"cond4", one(t.cond4)},   {"cond3p", one(t.cond3p)},
                {"cond5", one(t.cond5)}, {"cond6", one(t.cond6)},   {"cond4p", one(t.cond4p)}};
}

json bound_json(const bounds::BoundReport& r) {
    return json{{"r0_tilde", r.r0_tilde},
                {"r1_tildetilde", r.r1_tildetilde},
                {"r0", r.r0},
                {"r1_tilde", r.r1_tilde},
                {"c1_tilde", r.c1_tilde},
                {"c2_tilde", r.c2_tilde},
                {"r2_tilde", r.r2_tilde},
                {"r1", r.r1},
                {"c1", r.c1},
                {"c2", r.c2},
                {"r2", r.r2},
                {"r_inf", r.r_inf},
                {"r_prime_tilde", r.r_prime_tilde},
                {"r_prime", r.r_prime},
                {"c3", r.c3},
                {"r0_0", r.r0_0},
                {"r1_0", r.r1_0},
                {"r2_0", r.r2_0},
                {"r_inf_0", r.r_inf_0},
                {"r_prime_0", r.r_prime_0},
                {"c3_0", r.c3_0}};
}

void run_simulate(const RunConfig& cfg, const std::string& out, json& m) {
    const ModelParams p = cfg.model();
    const double T = cfg.get_double("simulate.t_end");
    const int stride = cfg.get_int("simulate.sample_stride");
    const SpectralField u0 = seeded_field(p.grid, cfg.get_u64("init.seed"),
                                          cfg.get_int("init.modes"), cfg.get_double("init.h2"),
                                          p.mean);
    const TrajectoryWindow traj = integrate(u0, 0.0, T, p, nullptr, stride, true);

    double a_max = 0, b_max = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        a_max = std::max(a_max, traj.norms[i].l2);
        b_max = std::max(b_max, traj.norms[i].h1);
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const SpectralField w = traj.state(i);
        const auto& ns = traj.norms[i];
        const FunctionalSample fs = functional_sample(traj.time(i), w, a_max, b_max);
        rows.push_back({fs.t, ns.l2, ns.h1, ns.h2, ns.linf, fs.phi1, fs.phi2, fs.h1_bound_slack,
                        fs.h2_bound_slack});
    }
    export_csv((fs::path(out) / "trajectory.csv").string(),
               {"t", "l2", "h1", "h2", "linf", "phi1", "phi2", "h1_slack", "h2_slack"}, rows);

    const int snap = cfg.get_int("simulate.snapshot_stride");
    if (snap > 0) {
        for (std::size_t i = 0; i < traj.size(); i += snap) {
            char name[64];
            std::snprintf(name, sizeof name, "state_%06zu.field", i);
            save_field(traj.state(i), (fs::path(out) / name).string());
        }
    }
    m["summary"] = {{"samples", traj.size()},
                    {"final_l2", traj.norms.back().l2},
                    {"final_h2", traj.norms.back().h2},
                    {"seed", cfg.get_u64("init.seed")}};
}

void run_assimilate_cmd(const RunConfig& cfg, const std::string& out, json& m) {
    AssimilationConfig a = cfg.assimilation();
    const AssimilationResult r = run_assimilation(a);
    std::vector<std::vector<double>> rows;
    for (const auto& s : r.series)
        rows.push_back({s.t, s.dl2, s.dh1, s.dh2, s.psi, static_cast<double>(s.sign_case)});
    export_csv((fs::path(out) / "errors.csv").string(), {"t", "dl2", "dh1", "dh2", "psi", "case"},
               rows);

    json summary;
    summary["sup_pmu_h2"] = r.sup_pmu_h2;
    summary["sync_ratio_vs_envelope"] = r.sync_ratio;
    summary["terminal_dl2"] = r.series.back().dl2;
    if (r.fit) {
        summary["decay_fit"] = {{"rate", r.fit->rate},
                                {"window", {r.fit->window[0], r.fit->window[1]}},
                                {"r_squared", r.fit->r_squared},
                                {"floor", r.fit->floor},
                                {"samples_used", r.fit->used}};
    }
    // Admissibility conditions at these parameters, reported truthfully.
    const auto bi = cfg.bound_inputs();
    summary["condition_table"] =
        condition_json(bounds::check_conditions(bounds::compute_bounds(bi), bi,
                                                std::max(a.params.m, 1)));
    if (cfg.get_bool("assimilate.control_run") && a.params.mu > 0) {
        AssimilationConfig c = a;
        c.params.mu = 0;
        c.params.m = 0;
        const AssimilationResult rc = run_assimilation(c);
        summary["control_run"] = {{"terminal_dl2", rc.series.back().dl2},
                                  {"sync_ratio_vs_envelope", rc.sync_ratio}};
    }
    m["summary"] = summary;
}

void run_steady_cmd(const RunConfig& cfg, const std::string& out, json& m) {
    const ModelParams p = cfg.model();
    const SteadyState s = solve_steady_state(p, nullptr, cfg.get_double("steady.tol"),
                                             cfg.get_int("steady.max_iter"),
                                             cfg.get_double("bounds.c"));
    save_field(s.u_star, (fs::path(out) / "steady.field").string());
    json summary{{"residual_l2", s.residual_l2},
                 {"newton_iters", s.newton_iters},
                 {"l2_bound_ok", s.l2_bound_ok},
                 {"l2_bound_slack", s.l2_bound_slack},
                 {"h3_bound_ok", s.h3_bound_ok},
                 {"h3_lhs", s.h3_lhs},
                 {"h3_rhs", s.h3_rhs}};
    if (cfg.get_bool("steady.verify_flow"))
        summary["flow_consistency_h2"] =
            verify_steady_by_flow(s.u_star, p, cfg.get_double("steady.flow_check_T"));
    m["summary"] = summary;
}

void run_bounds_cmd(const RunConfig& cfg, const std::string& out, json& m) {
    const auto bi = cfg.bound_inputs();
    const auto rep = bounds::compute_bounds(bi);
    const auto table = bounds::check_conditions(rep, bi, std::max(cfg.get_int("model.m"), 1));

    std::ofstream os(fs::path(out) / "bounds.txt");
    const json bj = bound_json(rep);
    for (const auto& [k, v] : bj.items()) os << k << " = " << format_full(v.get<double>()) << '\n';
    os << "L_W = " << format_full(bounds::lipschitz_constant(rep, bi, table.m)) << '\n';

    json summary{{"bounds", bj}, {"condition_table", condition_json(table)},
                 {"lipschitz_LW", bounds::lipschitz_constant(rep, bi, table.m)}};
    const std::string& mm_conds = cfg.raw("bounds.minimal_m_conditions");
    if (mm_conds != "none") {
        const auto conds = parse_condition_list(mm_conds);
        summary["minimal_m"] = bounds::minimal_m(bi, conds);  // InfeasibleError -> exit 3
        summary["minimal_m_real"] = bounds::minimal_m_real(bi, conds);
    }
    if (cfg.get_bool("bounds.rho_fixed_point")) {
        const auto fp = bounds::rho_fixed_point(bi);
        summary["rho_fixed_point"] = {{"converged", fp.converged},
                                      {"rho", fp.rho},
                                      {"iterations", fp.history.size() - 1}};
    }
    m["summary"] = summary;
}

void run_dform_cmd(const RunConfig& cfg, const std::string& out, json& m) {
    const ModelParams p = cfg.model();
    if (p.m < 1) throw ConfigError("dform: model.m must be >= 1");
    const SteadyState s =
        solve_steady_state(p, nullptr, cfg.get_double("dform.steady_tol"), 50,
                           cfg.get_double("bounds.c"));
    DFormOptions opt = cfg.dform_options();
    const double window = cfg.get_double("dform.window");
    const double tb = opt.w.spinup + window;
    const int n_samples =
        static_cast<int>(std::llround(window / (opt.w.sample_stride * p.dt))) + 1;

    SpectralField v0_field = s.u_star.project_low(p.m);
    const double amp = cfg.get_double("dform.perturb_amp");
    if (amp != 0) {
        SpectralField pert = seeded_field(p.grid, cfg.get_u64("dform.perturb_seed"),
                                          std::min(p.m, cfg.get_int("init.modes")), amp, p.mean);
        v0_field += pert.project_low(p.m);
    }
    const TrajectoryWindow v0 = TrajectoryWindow::constant(v0_field, p.m, 0.0, tb, n_samples + 1);

    const auto states = integrate_determining_form(v0, p, s.u_star, opt);
    std::vector<std::vector<double>> rows;
    for (const auto& st : states) rows.push_back({st.tau, st.theta, st.rho});
    export_csv((fs::path(out) / "dform.csv").string(), {"tau", "theta", "rho"}, rows);

    const auto& last = states.back();
    m["summary"] = {{"steps", states.size()},
                    {"terminal_tau", last.tau},
                    {"terminal_theta", last.theta},
                    {"terminal_rho", last.rho},
                    {"classification", last.theta <= opt.theta_stop
                                           ? "converged to P_m u*"
                                           : (last.rho <= opt.rho_stop
                                                  ? "approached fixed line point"
                                                  : "undecided within tau budget")}};
}

void run_probe_cmd(const RunConfig& cfg, const std::string& out, json& m) {
    const ProbeConfig pc = cfg.probe();
    const ProbeReport r = determining_modes_probe(pc);
    export_csv((fs::path(out) / "probe.csv").string(),
               {"m", "terminal_dl2", "terminal_q_dl2", "sync_ratio", "cond4p_lhs", "cond4p_pass"},
               {{static_cast<double>(r.m), r.terminal_dl2, r.terminal_q_dl2, r.sync_ratio,
                 r.cond4p_lhs, r.cond4p_pass ? 1.0 : 0.0}});
    m["summary"] = {{"m", r.m},
                    {"terminal_dl2", r.terminal_dl2},
                    {"terminal_q_dl2", r.terminal_q_dl2},
                    {"sync_ratio_vs_envelope", r.sync_ratio},
                    {"cond4p_pass", r.cond4p_pass}};
}

void run_sweep_cmd(const RunConfig& cfg, const std::string& out, json& m) {
    const std::string target = cfg.raw("sweep.target");
    const std::string param = cfg.raw("sweep.param");
    const SweepGrid grid = parse_sweep_grid(cfg.raw("sweep.grid"));
    const std::size_t n = grid.values.size();

    std::vector<std::vector<double>> rows(n);
    std::vector<std::string> cols;
    std::exception_ptr err;

    if (target == "bounds") {
        cols = {"value", "minimal_m_real", "c3", "c3_0", "r0", "r1", "r2", "r_inf", "r_prime"};
        const auto conds = parse_condition_list(cfg.raw("sweep.conditions"));
        par::for_tasks(n, [&](std::size_t i) {
            try {
                RunConfig local = cfg;
                local.set(param, format_full(grid.values[i]));
                const auto bi = local.bound_inputs();
                const auto rep = bounds::compute_bounds(bi);
                double mm = std::numeric_limits<double>::quiet_NaN();
                try {
                    mm = bounds::minimal_m_real(bi, conds);
                } catch (const InfeasibleError&) {
                }
                rows[i] = {grid.values[i], mm,      rep.c3,    rep.c3_0, rep.r0,
                           rep.r1,         rep.r2,  rep.r_inf, rep.r_prime};
            } catch (...) {
                if (!err) err = std::current_exception();
            }
        });
    } else if (target == "assimilate" || target == "probe") {
        cols = target == "assimilate"
                   ? std::vector<std::string>{"value", "terminal_dl2", "rate", "sync_ratio"}
                   : std::vector<std::string>{"value", "terminal_dl2", "terminal_q_dl2",
                                              "sync_ratio"};
        par::for_tasks(n, [&](std::size_t i) {
            try {
                RunConfig local = cfg;
                local.set(param, format_full(grid.values[i]));
                if (target == "assimilate") {
                    const auto r = run_assimilation(local.assimilation());
                    rows[i] = {grid.values[i], r.series.back().dl2,
                               r.fit ? r.fit->rate : 0.0, r.sync_ratio};
                } else {
                    const auto r = determining_modes_probe(local.probe());
                    rows[i] = {grid.values[i], r.terminal_dl2, r.terminal_q_dl2, r.sync_ratio};
                }
            } catch (...) {
                if (!err) err = std::current_exception();
            }
        });
    } else {
        throw ConfigError("sweep.target must be bounds, assimilate or probe");
    }
    if (err) std::rethrow_exception(err);
    export_csv((fs::path(out) / "sweep.csv").string(), cols, rows);
    m["summary"] = {{"target", target}, {"param", param}, {"points", n}};
}

}  // namespace

int dispatch(const std::string& subcommand, const RunConfig& cfg, const std::string& out_dir) {
    const auto t_start = std::chrono::steady_clock::now();
    try {
        if (subcommand == "selftest") return selftest() == 0 ? exit_ok : exit_nonconvergence;
        fs::create_directories(out_dir);
        json m = manifest_skeleton(subcommand, cfg);
        if (subcommand == "simulate")
            run_simulate(cfg, out_dir, m);
        else if (subcommand == "assimilate")
            run_assimilate_cmd(cfg, out_dir, m);
        else if (subcommand == "steady")
            run_steady_cmd(cfg, out_dir, m);
        else if (subcommand == "bounds")
            run_bounds_cmd(cfg, out_dir, m);
        else if (subcommand == "dform")
            run_dform_cmd(cfg, out_dir, m);
        else if (subcommand == "probe")
            run_probe_cmd(cfg, out_dir, m);
        else if (subcommand == "sweep")
            run_sweep_cmd(cfg, out_dir, m);
        else
            throw ConfigError("unknown subcommand '" + subcommand + "'");
        m["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        write_manifest(m, out_dir);
        return exit_ok;
    } catch (const BlowUpError& e) {
        std::cerr << "blow-up: " << e.what() << " (t = " << e.t << ")\n";
        return exit_blowup;
    } catch (const NonConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << '\n';
        return exit_nonconvergence;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
}

}  // namespace kdv
