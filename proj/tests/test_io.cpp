#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hasim/io.hpp"

using namespace hasim;

namespace {
ConfigOverrides parse_str(const std::string& text) {
    std::istringstream is(text);
    return parse_config_text(is);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("empty config keeps the full grid and defaults") {
    const auto ov = parse_str("");
    const auto scenarios = build_scenarios(ScenarioConfig{}, ov.grid);
    REQUIRE(scenarios.size() == 108);
    ScenarioConfig base;
    ov.apply(base);
    REQUIRE(base.runs == 700);
    REQUIRE(base.periods == 20);
    REQUIRE(base.actor.rho == 50.0);
}

TEST_CASE("grid keys restrict the grid") {
    const auto ov = parse_str("delta = 0.5\n");
    REQUIRE(build_scenarios(ScenarioConfig{}, ov.grid).size() == 36);
    const auto ov2 = parse_str("delta = 0.5\nm = inf\nlambda_frac = 1/5\n");
    REQUIRE(build_scenarios(ScenarioConfig{}, ov2.grid).size() == 4);
}

TEST_CASE("off-grid values are rejected with the allowed range") {
    try {
        parse_str("delta = 0.9\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("0.25") != std::string::npos);
        REQUIRE(msg.find("allow_offgrid") != std::string::npos);
        REQUIRE(msg.find("line 1") != std::string::npos);
    }
    // the escape hatch admits the value, regardless of key order
    const auto ov = parse_str("delta = 0.9\nallow_offgrid = true\n");
    const auto scenarios = build_scenarios(ScenarioConfig{}, ov.grid);
    REQUIRE(scenarios.size() == 36);
    REQUIRE(scenarios.front().delta == 0.9);
    REQUIRE(scenarios.front().scenario_index >= 1000);  // off the canonical grid
}

TEST_CASE("desk-scale overrides are accepted") {
    const auto ov = parse_str("R = 50\nT = 10\nmaster_seed = 99\n");
    ScenarioConfig base;
    ov.apply(base);
    REQUIRE(base.runs == 50);
    REQUIRE(base.periods == 10);
    REQUIRE(base.master_seed == 99);
}

TEST_CASE("unknown keys and malformed lines fail with their line number") {
    try {
        parse_str("rho = 50\nbogus = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
    REQUIRE_THROWS_AS(parse_str("delta 0.5\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_str("R = fifty\n"), ConfigError);
}

TEST_CASE("decision switches parse") {
    auto ov = parse_str("eq14_rule = literal\ncandidate_premium = fixed\nreject_estimate = record\n");
    REQUIRE(*ov.eq14 == Eq14Rule::literal);
    REQUIRE(*ov.candidate_premium == CandidatePremium::fixed);
    REQUIRE(*ov.reject_estimate == RejectEstimate::record);
    ov = parse_str("eq14_literal = true\n");
    REQUIRE(*ov.eq14 == Eq14Rule::literal);
    REQUIRE_THROWS_AS(parse_str("eq14_rule = upside_down\n"), ConfigError);
}

TEST_CASE("fractions parse in p/q and decimal form") {
    const auto a = parse_str("lambda_frac = 1/10\n");
    const auto b = parse_str("lambda_frac = 0.1\n");
    REQUIRE(a.grid.local_fractions.front() == Catch::Approx(b.grid.local_fractions.front()));
}

TEST_CASE("six significant digit formatting") {
    REQUIRE(fmt6(1.0) == "1");
    REQUIRE(fmt6(0.123456789) == "0.123457");
    REQUIRE(fmt6(-1234567.0) == "-1.23457e+06");
    REQUIRE(fmt6(std::numeric_limits<double>::quiet_NaN()).empty());
}

TEST_CASE("output files: shapes, determinism and round trip") {
    ScenarioConfig base;
    base.runs = 2;
    base.periods = 20;
    GridSpec grid;
    grid.deltas = {0.5};
    grid.memories = {3};
    grid.local_fractions = {0.2};
    grid.sigma_fractions = {0.25};
    const auto scenarios = build_scenarios(base, grid);
    REQUIRE(scenarios.size() == 1);
    const auto bench = second_best_oracle(base.actor, base.mu);
    const auto panels = run_grid(scenarios, bench, 2);
    std::vector<ScenarioSummary> summaries{summarize(scenarios[0], panels[0], bench.a_star)};

    const auto dir = std::filesystem::temp_directory_path() / "hasim_io_test";
    std::filesystem::remove_all(dir);
    RunManifest manifest;
    manifest.out_dir = dir.string();
    manifest.master_seed = base.master_seed;
    for (const auto& sc : scenarios) manifest.scenario_ids.push_back(sc.scenario_id);
    emit_outputs(manifest, scenarios, panels, summaries, base, bench);

    // 2 runs x 20 periods plus one header line
    const auto panel_text = slurp(dir / "panel.csv");
    REQUIRE(std::count(panel_text.begin(), panel_text.end(), '\n') == 41);
    const auto series_text = slurp(dir / "distance_series.csv");
    REQUIRE(std::count(series_text.begin(), series_text.end(), '\n') == 21);

    // byte identical on re-emission
    emit_outputs(manifest, scenarios, panels, summaries, base, bench);
    REQUIRE(slurp(dir / "panel.csv") == panel_text);

    // metrics recomputed from the parsed panel agree within print precision
    const auto rows = read_panel_csv((dir / "panel.csv").string());
    REQUIRE(rows.size() == 40);
    double sum = 0.0;
    for (const auto& row : rows)
        if (row.t == base.periods) sum += row.action / bench.a_star;
    REQUIRE(sum / 2.0 ==
            Catch::Approx(summaries[0].mean_normalized_action_T).epsilon(2e-5));

    // manifest carries provenance
    const auto manifest_text = slurp(dir / "manifest.json");
    REQUIRE(manifest_text.find("\"master_seed\"") != std::string::npos);
    REQUIRE(manifest_text.find(scenarios[0].scenario_id) != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("partial emission is refused unless forced") {
    ScenarioConfig base;
    base.runs = 1;
    GridSpec grid;
    grid.deltas = {0.5};
    grid.memories = {3};
    grid.local_fractions = {0.2};
    grid.sigma_fractions = {0.25};
    const auto scenarios = build_scenarios(base, grid);
    const auto bench = second_best_oracle(base.actor, base.mu);
    RunManifest manifest;
    manifest.out_dir =
        (std::filesystem::temp_directory_path() / "hasim_partial_test").string();
    REQUIRE_THROWS_AS(emit_outputs(manifest, scenarios, {}, {}, base, bench, false),
                      std::runtime_error);
    emit_outputs(manifest, scenarios, {}, {}, base, bench, true);  // forced
    std::filesystem::remove_all(manifest.out_dir);
}
