// Command-line front end: runs scenario grids and maintains the frozen
// benchmark fixture. Exit codes: 0 success, 1 configuration error,
// 2 runtime error.
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hasim/benchmark.hpp"
#include "hasim/engine.hpp"
#include "hasim/io.hpp"
#include "hasim/metrics.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::vector<std::string>& filters,
            int runs_override, long long seed_override, const std::string& out_dir,
            const std::string& emit_list, bool partial, unsigned jobs) {
    hasim::ConfigOverrides ov;
    if (!config_path.empty()) ov = hasim::parse_config(config_path);
    int line = 0;
    for (const auto& f : filters) {
        const auto eq = f.find('=');
        if (eq == std::string::npos)
            throw hasim::ConfigError("--filter expects key=value, got '" + f + "'");
        hasim::apply_config_entry(ov, f.substr(0, eq), f.substr(eq + 1), --line);
    }

    hasim::ScenarioConfig base;
    ov.apply(base);
    if (runs_override > 0) base.runs = runs_override;
    if (seed_override >= 0) base.master_seed = static_cast<std::uint64_t>(seed_override);
    base.actor.validate();

    hasim::EmitFlags emit;
    if (emit_list != "all") {
        emit = {false, false, false, false};
        std::stringstream ss(emit_list);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item == "panel") emit.panel = true;
            else if (item == "summary") emit.summary = true;
            else if (item == "series") emit.series = true;
            else if (item == "manifest") emit.manifest = true;
            else throw hasim::ConfigError("unknown --emit item '" + item + "'");
        }
    }

    const auto scenarios = hasim::build_scenarios(base, ov.grid);
    if (scenarios.empty()) throw hasim::ConfigError("scenario filter matched nothing");
    const auto bench = hasim::second_best_oracle(base.actor, base.mu, base.phi_step);

    std::fprintf(stderr, "benchmark: a*=%.6f phi*=%.3f x*=%.4f\n", bench.a_star,
                 bench.phi_star, bench.x_star);
    std::fprintf(stderr, "running %zu scenario(s), R=%d, T=%d, seed=%llu, jobs=%u\n",
                 scenarios.size(), base.runs, base.periods,
                 static_cast<unsigned long long>(base.master_seed), jobs);

    const auto panels = hasim::run_grid(scenarios, bench, jobs);
    std::vector<hasim::ScenarioSummary> summaries;
    summaries.reserve(scenarios.size());
    for (std::size_t s = 0; s < scenarios.size(); ++s)
        summaries.push_back(hasim::summarize(scenarios[s], panels[s], bench.a_star));

    hasim::RunManifest manifest;
    manifest.config_path = config_path;
    manifest.out_dir = out_dir;
    manifest.master_seed = base.master_seed;
    manifest.emit = emit;
    manifest.jobs = jobs;
    for (const auto& sc : scenarios) manifest.scenario_ids.push_back(sc.scenario_id);

    hasim::emit_outputs(manifest, scenarios, panels, summaries, base, bench, partial);
    std::fprintf(stderr, "wrote outputs to %s\n", out_dir.c_str());
    return 0;
}

int cmd_fixtures(const std::string& path, bool write) {
    hasim::ActorParams params;  // experiment defaults
    if (write) {
        hasim::write_benchmark_fixture(path, params);
        std::fprintf(stderr, "wrote %s\n", path.c_str());
        return 0;
    }
    const double drift = hasim::benchmark_fixture_drift(path);
    std::fprintf(stderr, "fixture drift: %.3g\n", drift);
    if (drift > 1e-6) {
        std::fprintf(stderr, "frozen benchmark values drifted beyond 1e-6\n");
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator of delegated effort under limited information"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", emit_list = "all";
    std::vector<std::string> filters;
    int runs_override = 0;
    long long seed_override = -1;
    bool partial = false;
    unsigned jobs = 0;

    auto* run = app.add_subcommand("run", "simulate scenarios and emit CSV outputs");
    run->add_option("--config", config_path, "key = value configuration file");
    run->add_option("--filter", filters, "restrict a grid dimension, e.g. delta=0.5")
        ->take_all();
    run->add_option("--runs", runs_override, "override the number of runs per scenario");
    run->add_option("--seed", seed_override, "override the master seed");
    run->add_option("--out", out_dir, "output directory (default ./out)");
    run->add_option("--emit", emit_list, "comma list of panel,summary,series,manifest or all");
    run->add_flag("--partial", partial, "emit even if results are incomplete");
    run->add_option("--jobs", jobs, "worker threads (0 = all cores); never affects results");

    std::string fixture_path = "fixtures/benchmark.json";
    bool fixture_write = false;
    auto* fixtures = app.add_subcommand("fixtures", "verify or regenerate the benchmark fixture");
    fixtures->add_option("--path", fixture_path, "fixture file location");
    fixtures->add_flag("--write", fixture_write, "regenerate instead of verifying");

    try {
        app.parse(argc, argv);
        if (run->parsed())
            return cmd_run(config_path, filters, runs_override, seed_override, out_dir,
                           emit_list, partial, jobs);
        return cmd_fixtures(fixture_path, fixture_write);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const hasim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
