#include "bikeshare/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "bikeshare/analysis.hpp"
#include "bikeshare/dynamics.hpp"
#include "bikeshare/errors.hpp"
#include "bikeshare/fixed_point.hpp"
#include "bikeshare/io.hpp"
#include "bikeshare/simulator.hpp"
#include "bikeshare/validation.hpp"

namespace bikeshare {

namespace {

struct Options {
    std::string params_path;
    std::string out_path;
    std::vector<std::string> overrides;

    // fixed-point
    double tol = 1e-11;
    // ode
    bool finite_n = false;
    std::optional<double> t_end;
    std::optional<double> sample_interval;
    bool until_stationary = false;
    // simulate
    std::optional<std::uint64_t> seed;
    std::string trajectory_path;
    // sweep
    std::string vary;
    std::optional<double> grid_from, grid_to;
    std::optional<int> grid_points;
    // optimize
    std::string objective;
    std::string grid_out;
    // validate
    bool skip_simulation = false;
};

std::string csv_metadata(const json& params) { return "# params: " + params.dump() + "\n"; }

template <class T>
T setting(const json& cfg, const char* key, const std::optional<T>& flag, T fallback) {
    if (flag) return *flag;
    if (cfg.contains(key)) {
        try {
            return cfg.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("key '") + key + "': " + e.what());
        }
    }
    return fallback;
}

ProfitPrices prices_from(const json& cfg) {
    ProfitPrices prices;
    prices.cost_c = setting<double>(cfg, "cost_c", std::nullopt, 0.0);
    prices.benefit_psi = setting<double>(cfg, "benefit_psi", std::nullopt, 0.0);
    prices.validate();
    return prices;
}

void emit(const Options& opt, std::ostream& out, const std::string& text) {
    if (opt.out_path.empty())
        out << text;
    else
        write_text_file(opt.out_path, text);
}

std::string derived_path(const Options& opt, const std::string& suffix) {
    if (opt.out_path.empty()) throw ConfigError("this command needs --out");
    return opt.out_path + suffix;
}

int cmd_fixed_point(const Options& opt, const json& cfg, std::ostream& out) {
    const SystemParams params = params_from_json(cfg);
    const FixedPointResult fp = solve_fixed_point(params, opt.tol);
    json j = to_json(fp);
    j["params"] = params_to_json(params);
    emit(opt, out, j.dump(2) + "\n");
    return kExitOk;
}

int cmd_ode(const Options& opt, const json& cfg, std::ostream& out) {
    const SystemParams params = params_from_json(cfg);
    OdeConfig ode;
    ode.initial = cfg.contains("initial") ? FractionVector(cfg.at("initial").get<std::vector<double>>())
                                          : default_initial(params);
    ode.step = setting<double>(cfg, "step", std::nullopt, default_step(params));
    ode.t_end = setting<double>(cfg, "t_end", opt.t_end, 100.0 / params.lambda);
    ode.sample_interval = setting<double>(cfg, "sample_interval", opt.sample_interval, 0.1);
    ode.stationarity_tol = setting<double>(cfg, "stationarity_tol", std::nullopt, 1e-10);
    ode.until_stationary = opt.until_stationary || setting<bool>(cfg, "until_stationary", std::nullopt, false);
    ode.max_time = setting<double>(cfg, "max_time", std::nullopt, 1e5 / params.lambda);
    const Trajectory traj = integrate(ode, params, opt.finite_n);

    std::ostringstream csv;
    csv << csv_metadata(params_to_json(params));
    write_trajectory_csv(csv, traj);

    json terminal{{"params", params_to_json(params)},
                  {"finite_n", opt.finite_n},
                  {"t", traj.times.back()},
                  {"y", traj.terminal().vector()},
                  {"drift_sup_norm", traj.final_drift},
                  {"stationary", traj.stationary}};
    if (opt.out_path.empty()) {
        out << csv.str();
    } else {
        write_text_file(opt.out_path, csv.str());
        write_text_file(derived_path(opt, ".terminal.json"), terminal.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_simulate(const Options& opt, json cfg, std::ostream& out) {
    if (opt.seed) cfg["seed"] = *opt.seed;
    if (!opt.trajectory_path.empty()) cfg["record_trajectory"] = true;
    if (!cfg.contains("t_warmup")) cfg["t_warmup"] = 500.0 / setting<double>(cfg, "lambda", std::nullopt, 1.0);
    if (!cfg.contains("t_measure")) cfg["t_measure"] = 2000.0 / setting<double>(cfg, "lambda", std::nullopt, 1.0);
    const SimConfig sc = sim_config_from_json(cfg);
    const SimReport rep = simulate(sc);

    json j = to_json(rep);
    j["params"] = params_to_json(sc.params);
    j["seed"] = sc.seed;
    j["t_warmup"] = sc.t_warmup;
    j["t_measure"] = sc.t_measure;
    j["sample_interval"] = sc.sample_interval;
    j["independence_statistic"] = independence_statistic(rep);
    emit(opt, out, j.dump(2) + "\n");
    if (!opt.trajectory_path.empty() && rep.trajectory) {
        std::ostringstream csv;
        json meta = params_to_json(sc.params);
        meta["seed"] = sc.seed;
        csv << csv_metadata(meta);
        write_trajectory_csv(csv, *rep.trajectory);
        write_text_file(opt.trajectory_path, csv.str());
    }
    return kExitOk;
}

int cmd_sweep(const Options& opt, const json& cfg, std::ostream& out) {
    const SystemParams base = params_from_json(cfg);
    const std::string vary = opt.vary.empty() ? setting<std::string>(cfg, "vary", std::nullopt, "lambda") : opt.vary;
    std::vector<double> grid;
    if (!opt.grid_from && cfg.contains("grid")) {
        grid = cfg.at("grid").get<std::vector<double>>();
    } else {
        const double from = setting<double>(cfg, "grid_from", opt.grid_from, 10.0);
        const double to = setting<double>(cfg, "grid_to", opt.grid_to, 30.0);
        grid = linear_grid(from, to, setting<int>(cfg, "grid_points", opt.grid_points, 41));
    }
    const auto records = sweep(base, vary, grid, prices_from(cfg));

    std::ostringstream csv;
    csv << csv_metadata(params_to_json(base));
    write_sweep_csv(csv, vary, grid, records);
    emit(opt, out, csv.str());
    return kExitOk;
}

int cmd_optimize(const Options& opt, const json& cfg, std::ostream& out) {
    const SystemParams base = params_from_json(cfg);
    DesignGrid grid;
    grid.capacity_c = setting<std::vector<int>>(cfg, "search_c", std::nullopt, {base.capacity_c});
    grid.capacity_k = setting<std::vector<int>>(cfg, "search_k", std::nullopt, {base.capacity_k});
    grid.mu = setting<std::vector<double>>(cfg, "search_mu", std::nullopt, {base.mu});
    const std::string objective =
        opt.objective.empty() ? setting<std::string>(cfg, "objective", std::nullopt, "weighted") : opt.objective;

    OptimizationResult res;
    json j{{"params", params_to_json(base)}, {"objective", objective}};
    if (objective == "weighted") {
        const auto beta = setting<std::vector<double>>(cfg, "beta", std::nullopt, {0.0, 0.0, 1.0});
        if (beta.size() != 3) throw ConfigError("beta must have three entries");
        res = optimize_weighted(grid, base, {beta[0], beta[1], beta[2]});
        j["beta"] = beta;
    } else if (objective == "profit") {
        const ProfitPrices prices = prices_from(cfg);
        res = optimize_profit(grid, base, prices);
        j["cost_c"] = prices.cost_c;
        j["benefit_psi"] = prices.benefit_psi;
    } else {
        throw ConfigError("objective must be 'weighted' or 'profit'");
    }
    j["winner"] = to_json(res.winner);
    j["objective_value"] = objective == "profit" ? -res.objective : res.objective;
    json table = json::array();
    for (const auto& c : res.table) {
        json row = to_json(c.record);
        row["feasible"] = c.feasible;
        if (c.feasible) row["objective"] = c.objective;
        table.push_back(std::move(row));
    }
    j["grid"] = std::move(table);

    std::ostringstream csv;
    csv << csv_metadata(params_to_json(base));
    write_candidates_csv(csv, res.table);
    const std::string grid_path = opt.grid_out.empty() ? derived_path(opt, ".grid.csv") : opt.grid_out;
    emit(opt, out, j.dump(2) + "\n");
    write_text_file(grid_path, csv.str());
    return kExitOk;
}

int cmd_validate(const Options& opt, const json& cfg, std::ostream& out, std::ostream& err) {
    const SystemParams params = params_from_json(cfg);
    ValidationOptions vo;
    vo.run_simulation = !opt.skip_simulation;
    if (opt.seed) vo.seed = *opt.seed;
    const auto checks = run_validation(params, vo);

    bool all = true;
    json report{{"params", params_to_json(params)}, {"checks", json::array()}};
    for (const auto& c : checks) {
        all = all && c.passed;
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        report["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    report["passed"] = all;
    if (!opt.out_path.empty()) write_text_file(opt.out_path, report.dump(2) + "\n");
    if (!all) {
        err << json{{"error", "ValidationFailed"}, {"message", "one or more checks failed"},
                    {"exit_code", static_cast<int>(kExitChecksFailed)}}
                   .dump()
            << '\n';
        return kExitChecksFailed;
    }
    return kExitOk;
}

int report_error(std::ostream& err, const std::string& name, const std::string& message, int code) {
    err << json{{"error", name}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean-field, fixed-point and simulation analysis of station-based bike-sharing systems",
                 "bikeshare"};
    app.require_subcommand(1, 1);
    Options opt;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--params", opt.params_path, "JSON parameter file")->required();
        sub->add_option("--out", opt.out_path, "Output file (stdout when omitted)");
        sub->add_option("--set", opt.overrides, "Override a parameter, key=value (repeatable)");
    };

    auto* fixed = app.add_subcommand("fixed-point", "Solve the stationary fixed point");
    common(fixed);
    fixed->add_option("--tol", opt.tol, "Residual tolerance");

    auto* ode = app.add_subcommand("ode", "Integrate the mean-field equations");
    common(ode);
    ode->add_flag("--finite-n", opt.finite_n, "Use the finite-N level-dependent rates");
    ode->add_option("--t-end", opt.t_end, "Integration horizon");
    ode->add_option("--sample-interval", opt.sample_interval, "Spacing of recorded samples");
    ode->add_flag("--until-stationary", opt.until_stationary, "Run until the drift vanishes");

    auto* sim = app.add_subcommand("simulate", "Stochastic simulation of N stations");
    common(sim);
    sim->add_option("--seed", opt.seed, "Random seed");
    sim->add_option("--trajectory", opt.trajectory_path, "Write the empirical-measure trajectory CSV here");

    auto* sw = app.add_subcommand("sweep", "Fixed-point metrics over a parameter grid");
    common(sw);
    sw->add_option("--vary", opt.vary, "Parameter to vary");
    sw->add_option("--from", opt.grid_from, "First grid value");
    sw->add_option("--to", opt.grid_to, "Last grid value");
    sw->add_option("--points", opt.grid_points, "Number of grid points");

    auto* optz = app.add_subcommand("optimize", "Grid search over (C, K, mu)");
    common(optz);
    optz->add_option("--objective", opt.objective, "weighted or profit");
    optz->add_option("--grid-out", opt.grid_out, "Grid table CSV (default <out>.grid.csv)");

    auto* val = app.add_subcommand("validate", "Run the cross-check suite");
    common(val);
    val->add_option("--seed", opt.seed, "Random seed");
    val->add_flag("--skip-simulation", opt.skip_simulation, "Leave out the stochastic simulation check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "UsageError", e.what(), kExitUsage);
    }

    try {
        json cfg = load_json_file(opt.params_path);
        if (!cfg.is_object()) throw ConfigError("parameter file must hold a JSON object");
        apply_overrides(cfg, opt.overrides);

        if (fixed->parsed()) return cmd_fixed_point(opt, cfg, out);
        if (ode->parsed()) return cmd_ode(opt, cfg, out);
        if (sim->parsed()) return cmd_simulate(opt, cfg, out);
        if (sw->parsed()) return cmd_sweep(opt, cfg, out);
        if (optz->parsed()) return cmd_optimize(opt, cfg, out);
        if (val->parsed()) return cmd_validate(opt, cfg, out, err);
        return report_error(err, "UsageError", "no subcommand", kExitUsage);
    } catch (const BikeshareError& e) {
        switch (e.kind()) {
            case ErrorKind::Config: return report_error(err, e.name(), e.what(), kExitParse);
            case ErrorKind::Domain: return report_error(err, e.name(), e.what(), kExitDomain);
            case ErrorKind::Internal: return report_error(err, e.name(), e.what(), kExitInternal);
        }
    } catch (const json::exception& e) {
        return report_error(err, "ParseError", e.what(), kExitParse);
    } catch (const std::exception& e) {
        return report_error(err, "InternalError", e.what(), kExitInternal);
    }
    return kExitInternal;
}

}  // namespace bikeshare
