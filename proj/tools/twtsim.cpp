// twtsim: scenario runner for the twin-turbine fault-tolerant control lab.
//
// Verbs:
//   run       integrate one scenario, write CSV + metrics (+ SVG charts)
//   validate  parse and validate a config, print the resolved scenario
//   compare   run several scenarios and print a side-by-side metric table
//   sweep     re-run a base scenario across fault severities for both laws
//
// Exit codes: 0 ok, 2 config/usage error, 3 divergence, 4 singular
// decoupling, 5 other model singularity.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twt/csvio.hpp"
#include "twt/errors.hpp"
#include "twt/scenario.hpp"
#include "twt/svg.hpp"

namespace fs = std::filesystem;
using namespace twt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitSingular = 4;
constexpr int kExitModel = 5;

int status_exit_code(sim::RunStatus status) {
    switch (status) {
        case sim::RunStatus::Completed: return kExitOk;
        case sim::RunStatus::Diverged: return kExitDiverged;
        case sim::RunStatus::SingularDecoupling: return kExitSingular;
        case sim::RunStatus::ModelSingularity: return kExitModel;
    }
    return kExitModel;
}

/// Resolves a config path, falling back to $TWT_CONFIG_DIR.
std::string resolve_config_path(const std::string& path) {
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("TWT_CONFIG_DIR")) {
        const fs::path candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    throw ConfigError("config not found: " + path);
}

struct Overrides {
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool plot = false;
};

scenario::ScenarioConfig load_with_overrides(const std::string& path, const Overrides& ov) {
    scenario::ScenarioConfig cfg = scenario::load_file(resolve_config_path(path));
    if (ov.dt) cfg.scenario.integrator.dt = *ov.dt;
    if (ov.seed) cfg.scenario.wind.reseed(*ov.seed);
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.plot) cfg.write_plots = true;
    cfg.scenario.validate();
    if (cfg.scenario.integrator.dt > 1e-3)
        std::cerr << "warning: dt > 1e-3 s undersamples the electrical dynamics\n";
    return cfg;
}

sim::TimeSeries thin(const sim::TimeSeries& ts, int stride) {
    if (stride <= 1) return ts;
    sim::TimeSeries out;
    for (std::size_t k = 0; k < ts.size(); k += static_cast<std::size_t>(stride)) {
        out.t.push_back(ts.t[k]);
        out.state.push_back(ts.state[k]);
        out.input.push_back(ts.input[k]);
        out.derived.push_back(ts.derived[k]);
    }
    return out;
}

void write_charts(const fs::path& dir, const std::string& name, const sim::TimeSeries& ts) {
    const std::size_t n = ts.size();
    std::vector<double> ia(n), ib(n), ic(n), id(n), iq(n), ih(n), w1(n), w2(n), ref_dir(n),
        psi(n), sum_i(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& x = ts.state[k];
        const auto& d = ts.derived[k];
        ia[k] = x.currents1[0];
        ib[k] = x.currents1[1];
        ic[k] = x.currents1[2];
        id[k] = d.dq1.d;
        iq[k] = d.dq1.q;
        ih[k] = d.dq1.h;
        w1[k] = x.omega1;
        w2[k] = x.omega2;
        psi[k] = x.psi;
        ref_dir[k] = d.wind_direction;
        sum_i[k] = x.currents1[0] + x.currents1[1] + x.currents1[2];
    }
    svg::write_line_chart((dir / (name + "_iabc1.svg")).string(), "machine 1 phase currents (A)",
                          ts.t, {{"ia1", ia}, {"ib1", ib}, {"ic1", ic}});
    svg::write_line_chart((dir / (name + "_idqh1.svg")).string(), "machine 1 dq/homopolar currents (A)",
                          ts.t, {{"id1", id}, {"iq1", iq}, {"ih1", ih}});
    svg::write_line_chart((dir / (name + "_omega.svg")).string(), "rotor speeds (rad/s)", ts.t,
                          {{"omega1", w1}, {"omega2", w2}});
    svg::write_line_chart((dir / (name + "_yaw.svg")).string(), "orientation vs wind (rad)", ts.t,
                          {{"psi", psi}, {"alpha", ref_dir}});
    svg::write_line_chart((dir / (name + "_sum_i1.svg")).string(), "machine 1 current sum (A)",
                          ts.t, {{"ia1+ib1+ic1", sum_i}});
}

struct RunArtifacts {
    sim::RunResult result;
    sim::RunMetrics metrics;
};

RunArtifacts execute(const scenario::ScenarioConfig& cfg, bool write_files) {
    RunArtifacts art;
    art.result = sim::integrate(cfg.scenario);
    art.metrics = sim::extract_metrics(art.result, cfg.scenario);
    if (write_files) {
        const fs::path dir(cfg.out_dir);
        fs::create_directories(dir);
        if (cfg.write_csv)
            csvio::write_timeseries_file((dir / (cfg.scenario.name + ".csv")).string(),
                                         thin(art.result.series, cfg.csv_stride));
        csvio::write_metrics_file((dir / (cfg.scenario.name + "_metrics.toml")).string(),
                                  art.metrics, cfg.scenario.name);
        if (cfg.write_plots && art.result.series.size() > 1)
            write_charts(dir, cfg.scenario.name, art.result.series);
    }
    return art;
}

void print_metrics_row(const std::string& name, const sim::RunMetrics& m) {
    std::printf("%-28s %-12s %9.4f %10.5f %10.5f %9.4f %9.4f %10.4f\n", name.c_str(),
                sim::to_string(m.status), m.psi_error_max, m.omega_error_rel_max[0],
                m.omega_error_rel_max[1], m.id_max[0], m.ih_max[0], m.phase_sum_max[0]);
}

void print_metrics_header() {
    std::printf("%-28s %-12s %9s %10s %10s %9s %9s %10s\n", "scenario", "status", "psi_err",
                "dW1/W1", "dW2/W2", "id1_max", "ih1_max", "sum_i1");
}

int cmd_run(const std::string& config, const Overrides& ov) {
    const scenario::ScenarioConfig cfg = load_with_overrides(config, ov);
    const RunArtifacts art = execute(cfg, true);
    print_metrics_header();
    print_metrics_row(cfg.scenario.name, art.metrics);
    if (!art.result.completed())
        std::cout << "run ended early at t = " << art.result.fail_time << ": "
                  << art.result.message << "\n";
    return status_exit_code(art.result.status);
}

int cmd_validate(const std::string& config, const Overrides& ov) {
    const scenario::ScenarioConfig cfg = load_with_overrides(config, ov);
    const sim::Scenario& sc = cfg.scenario;
    std::cout << "config ok: " << sc.name << "\n"
              << "  law        : "
              << (sc.law == sim::ControlLaw::Active
                      ? "active"
                      : (sc.law == sim::ControlLaw::Passive ? "passive" : "none"))
              << "\n"
              << "  fault      : mu=" << sc.fault.severity << " turbine=" << sc.fault.turbine
              << " t_on=" << sc.fault.onset_time << "\n"
              << "  integrator : dt=" << sc.integrator.dt << " t_end=" << sc.integrator.t_end
              << "\n"
              << "  out dir    : " << cfg.out_dir << "\n";
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& configs, const Overrides& ov) {
    std::vector<scenario::ScenarioConfig> cfgs;
    for (const auto& path : configs) cfgs.push_back(load_with_overrides(path, ov));

    std::vector<std::future<RunArtifacts>> futures;
    for (const auto& cfg : cfgs)
        futures.push_back(std::async(std::launch::async, [&cfg] { return execute(cfg, true); }));

    // A diverged run is a comparison result, not a tool failure.
    print_metrics_header();
    std::string report;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        const RunArtifacts art = futures[i].get();
        print_metrics_row(cfgs[i].scenario.name, art.metrics);
        const scenario::Verdict verdict = scenario::judge(art.metrics, cfgs[i].verdict);
        std::string reasons;
        for (const auto& r : verdict.reasons) reasons += (reasons.empty() ? "" : "; ") + r;
        std::printf("  verdict: %s%s%s\n", verdict.pass ? "pass" : "FAIL",
                    reasons.empty() ? "" : " - ", reasons.c_str());
        char line[256];
        std::snprintf(line, sizeof(line), "%s,%s,%s,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                      cfgs[i].scenario.name.c_str(), verdict.pass ? "pass" : "fail",
                      sim::to_string(art.metrics.status), art.metrics.psi_error_max,
                      std::max(art.metrics.omega_error_rel_max[0],
                               art.metrics.omega_error_rel_max[1]),
                      std::max(art.metrics.id_max[0], art.metrics.id_max[1]),
                      std::max(art.metrics.ih_max[0], art.metrics.ih_max[1]),
                      std::max(art.metrics.phase_sum_max[0], art.metrics.phase_sum_max[1]));
        report += line;
    }
    const fs::path dir(ov.out_dir ? *ov.out_dir : cfgs.front().out_dir);
    fs::create_directories(dir);
    std::ofstream rep(dir / "compare_report.csv", std::ios::binary);
    rep << "scenario,verdict,status,psi_error_max,omega_error_rel_max,id_max,ih_max,phase_sum_max\n"
        << report;
    return kExitOk;
}

int cmd_sweep(const std::string& config, std::vector<double> mu_values, const Overrides& ov) {
    if (mu_values.empty()) {
        std::cerr << "sweep: at least one --mu value is required\n";
        return kExitConfig;
    }
    std::sort(mu_values.begin(), mu_values.end());
    for (double mu : mu_values)
        if (!(mu >= 0.0 && mu < 1.0)) {
            std::cerr << "sweep: mu must lie in [0, 1)\n";
            return kExitConfig;
        }
    const scenario::ScenarioConfig base = load_with_overrides(config, ov);

    struct Cell {
        double mu;
        sim::ControlLaw law;
        RunArtifacts art;
    };
    std::vector<std::future<Cell>> futures;
    for (double mu : mu_values)
        for (const sim::ControlLaw law : {sim::ControlLaw::Passive, sim::ControlLaw::Active}) {
            scenario::ScenarioConfig cfg = base;
            cfg.scenario.fault.severity = mu;
            cfg.scenario.law = law;
            char suffix[48];
            std::snprintf(suffix, sizeof(suffix), "_%s_mu%.3f",
                          law == sim::ControlLaw::Active ? "active" : "passive", mu);
            cfg.scenario.name = base.scenario.name + suffix;
            futures.push_back(std::async(std::launch::async, [cfg] {
                return Cell{cfg.scenario.fault.severity, cfg.scenario.law, execute(cfg, false)};
            }));
        }

    double passive_max_ok = -1.0, active_max_ok = -1.0;
    std::printf("%8s %10s %14s %10s %14s\n", "mu", "passive", "p_fail_t", "active", "a_fail_t");
    std::vector<Cell> cells;
    for (auto& f : futures) cells.push_back(f.get());
    for (std::size_t i = 0; i + 1 < cells.size(); i += 2) {
        const Cell& pas = cells[i];
        const Cell& act = cells[i + 1];
        if (pas.art.result.completed()) passive_max_ok = std::max(passive_max_ok, pas.mu);
        if (act.art.result.completed()) active_max_ok = std::max(active_max_ok, act.mu);
        std::printf("%8.3f %10s %14.4f %10s %14.4f\n", pas.mu,
                    pas.art.result.completed() ? "ok" : "FAIL", pas.art.result.fail_time,
                    act.art.result.completed() ? "ok" : "FAIL", act.art.result.fail_time);
    }
    std::cout << "largest tolerated severity: passive=" << passive_max_ok
              << " active=" << active_max_ok << "\n";
    const fs::path dir(ov.out_dir ? *ov.out_dir : base.out_dir);
    fs::create_directories(dir);
    std::ofstream rep(dir / "sweep.csv", std::ios::binary);
    rep << "mu,passive_status,passive_fail_time,active_status,active_fail_time\n";
    for (std::size_t i = 0; i + 1 < cells.size(); i += 2) {
        char line[160];
        std::snprintf(line, sizeof(line), "%.6g,%s,%.6g,%s,%.6g\n", cells[i].mu,
                      sim::to_string(cells[i].art.result.status), cells[i].art.result.fail_time,
                      sim::to_string(cells[i + 1].art.result.status),
                      cells[i + 1].art.result.fail_time);
        rep << line;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twin wind turbine fault-tolerant control simulator"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config;
    std::vector<std::string> compare_configs;
    std::vector<double> mu_values;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--dt", ov.dt, "integrator step override (s)");
        cmd->add_option("--seed", ov.seed, "wind turbulence seed override");
        cmd->add_option("--out-dir", ov.out_dir, "output directory override");
        cmd->add_flag("--plot", ov.plot, "write SVG charts");
    };

    CLI::App* run = app.add_subcommand("run", "integrate one scenario");
    run->add_option("--config", config, "scenario config file")->required();
    add_common(run);

    CLI::App* validate = app.add_subcommand("validate", "check a scenario config");
    validate->add_option("--config", config, "scenario config file")->required();
    add_common(validate);

    CLI::App* compare = app.add_subcommand("compare", "run several scenarios side by side");
    compare->add_option("configs", compare_configs, "config files")->expected(-2);
    add_common(compare);

    CLI::App* sweep = app.add_subcommand("sweep", "severity sweep under both laws");
    sweep->add_option("--config", config, "base scenario config")->required();
    sweep->add_option("--mu", mu_values, "fault severities to test")->delimiter(',');
    add_common(sweep);

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(config, ov);
        if (validate->parsed()) return cmd_validate(config, ov);
        if (compare->parsed()) return cmd_compare(compare_configs, ov);
        if (sweep->parsed()) return cmd_sweep(config, mu_values, ov);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SingularDecoupling& e) {
        std::cerr << "singular decoupling: " << e.what() << "\n";
        return kExitSingular;
    } catch (const Error& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    }
    return kExitConfig;
}
