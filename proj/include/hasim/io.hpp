// Operator surface: key=value configuration files, grid filtering, and the
// CSV/JSON outputs (per-period panel, scenario summaries, distance series,
// and a provenance manifest).
#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchmark.hpp"
#include "engine.hpp"
#include "metrics.hpp"

namespace hasim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Value lists for the four grid dimensions; defaults reproduce the full
/// 3 x 3 x 3 x 4 experiment.
struct GridSpec {
    std::vector<double> deltas = grid_deltas();
    std::vector<std::size_t> memories = grid_memories();
    std::vector<double> local_fractions = grid_local_fractions();
    std::vector<double> sigma_fractions = grid_sigma_fractions();
};

struct ConfigOverrides {
    GridSpec grid;
    bool allow_offgrid = false;
    std::optional<double> rho, eta, reservation_utility, mu;
    std::optional<int> periods, runs;
    std::optional<std::uint64_t> master_seed;
    std::optional<Eq14Rule> eq14;
    std::optional<CandidatePremium> candidate_premium;
    std::optional<RejectRule> reject_rule;
    std::optional<RejectEstimate> reject_estimate;
    std::optional<DegenerateMode> degenerate_mode;
    std::optional<ResetRule> reset_rule;

    void apply(ScenarioConfig& base) const {
        if (rho) base.actor.rho = *rho;
        if (eta) base.actor.eta = *eta;
        if (reservation_utility) base.actor.reservation_utility = *reservation_utility;
        if (mu) base.mu = *mu;
        if (periods) base.periods = *periods;
        if (runs) base.runs = *runs;
        if (master_seed) base.master_seed = *master_seed;
        if (eq14) base.eq14 = *eq14;
        if (candidate_premium) base.candidate_premium = *candidate_premium;
        if (reject_rule) base.reject_rule = *reject_rule;
        if (reject_estimate) base.reject_estimate = *reject_estimate;
        if (degenerate_mode) base.degenerate_mode = *degenerate_mode;
        if (reset_rule) base.reset_rule = *reset_rule;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_number(const std::string& v, int line) {
    // accept plain numbers and p/q fractions such as 1/5
    const auto slash = v.find('/');
    try {
        if (slash != std::string::npos)
            return std::stod(v.substr(0, slash)) / std::stod(v.substr(slash + 1));
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": cannot parse number '" + v + "'");
    }
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("line " + std::to_string(line) + ": expected boolean, got '" + v + "'");
}

inline bool on_grid(double v, const std::vector<double>& grid) {
    for (double g : grid)
        if (near(v, g)) return true;
    return false;
}

inline std::string list_str(const std::vector<double>& grid) {
    std::ostringstream os;
    for (std::size_t i = 0; i < grid.size(); ++i) os << (i ? ", " : "") << grid[i];
    return os.str();
}

}  // namespace detail

/// Applies one `key = value` assignment. `line` is used in error messages.
inline void apply_config_entry(ConfigOverrides& ov, const std::string& key,
                               const std::string& value, int line) {
    using detail::parse_bool;
    using detail::parse_number;
    const auto offgrid_error = [&](const std::string& k, const std::string& range) {
        throw ConfigError("line " + std::to_string(line) + ": " + k + " = " + value +
                          " is outside the experiment grid {" + range +
                          "}; set allow_offgrid = true to force it");
    };
    if (key == "delta") {
        const double d = parse_number(value, line);
        if (!ov.allow_offgrid && !detail::on_grid(d, grid_deltas()))
            offgrid_error("delta", detail::list_str(grid_deltas()));
        if (!(d > 0.0 && d < 1.0))
            throw ConfigError("line " + std::to_string(line) + ": delta must lie in (0,1)");
        ov.grid.deltas = {d};
    } else if (key == "m") {
        if (value == "inf" || value == "infinity") {
            ov.grid.memories = {kUnboundedMemory};
        } else {
            const double m = parse_number(value, line);
            if (!ov.allow_offgrid && m != 1.0 && m != 3.0)
                offgrid_error("m", "1, 3, inf");
            if (m < 1.0 || m != std::floor(m))
                throw ConfigError("line " + std::to_string(line) + ": m must be a positive integer or inf");
            ov.grid.memories = {static_cast<std::size_t>(m)};
        }
    } else if (key == "lambda_frac") {
        const double lf = parse_number(value, line);
        if (!ov.allow_offgrid && !detail::on_grid(lf, grid_local_fractions()))
            offgrid_error("lambda_frac", "1/3, 1/5, 1/10");
        if (!(lf > 0.0 && lf < 1.0))
            throw ConfigError("line " + std::to_string(line) + ": lambda_frac must lie in (0,1)");
        ov.grid.local_fractions = {lf};
    } else if (key == "sigma_frac") {
        const double sf = parse_number(value, line);
        if (!ov.allow_offgrid && !detail::on_grid(sf, grid_sigma_fractions()))
            offgrid_error("sigma_frac", detail::list_str(grid_sigma_fractions()));
        if (!(sf > 0.0))
            throw ConfigError("line " + std::to_string(line) + ": sigma_frac must be > 0");
        ov.grid.sigma_fractions = {sf};
    } else if (key == "rho") {
        ov.rho = parse_number(value, line);
    } else if (key == "eta") {
        ov.eta = parse_number(value, line);
    } else if (key == "reservation_utility") {
        ov.reservation_utility = parse_number(value, line);
    } else if (key == "mu") {
        ov.mu = parse_number(value, line);
    } else if (key == "T") {
        ov.periods = static_cast<int>(parse_number(value, line));
        if (*ov.periods < 1)
            throw ConfigError("line " + std::to_string(line) + ": T must be >= 1");
    } else if (key == "R") {
        ov.runs = static_cast<int>(parse_number(value, line));
        if (*ov.runs < 1)
            throw ConfigError("line " + std::to_string(line) + ": R must be >= 1");
    } else if (key == "master_seed") {
        ov.master_seed = static_cast<std::uint64_t>(std::strtoull(value.c_str(), nullptr, 10));
    } else if (key == "eq14_literal") {
        ov.eq14 = parse_bool(value, line) ? Eq14Rule::literal : ScenarioConfig{}.eq14;
    } else if (key == "eq14_rule") {
        if (value == "corrected") ov.eq14 = Eq14Rule::corrected;
        else if (value == "literal") ov.eq14 = Eq14Rule::literal;
        else if (value == "mirror") ov.eq14 = Eq14Rule::mirror;
        else throw ConfigError("line " + std::to_string(line) +
                               ": eq14_rule must be corrected|literal|mirror");
    } else if (key == "candidate_premium") {
        if (value == "reoptimize") ov.candidate_premium = CandidatePremium::reoptimize;
        else if (value == "fixed") ov.candidate_premium = CandidatePremium::fixed;
        else throw ConfigError("line " + std::to_string(line) +
                               ": candidate_premium must be reoptimize|fixed");
    } else if (key == "reject_rule") {
        if (value == "zero_action") ov.reject_rule = RejectRule::zero_action;
        else if (value == "take_action") ov.reject_rule = RejectRule::take_action;
        else throw ConfigError("line " + std::to_string(line) +
                               ": reject_rule must be zero_action|take_action");
    } else if (key == "reject_estimate") {
        if (value == "skip") ov.reject_estimate = RejectEstimate::skip;
        else if (value == "record") ov.reject_estimate = RejectEstimate::record;
        else throw ConfigError("line " + std::to_string(line) +
                               ": reject_estimate must be skip|record");
    } else if (key == "degenerate_mode") {
        if (value == "always_local") ov.degenerate_mode = DegenerateMode::always_local;
        else if (value == "bernoulli") ov.degenerate_mode = DegenerateMode::bernoulli;
        else throw ConfigError("line " + std::to_string(line) +
                               ": degenerate_mode must be always_local|bernoulli");
    } else if (key == "reset_rule") {
        if (value == "global_draw") ov.reset_rule = ResetRule::global_draw;
        else if (value == "uniform") ov.reset_rule = ResetRule::uniform;
        else throw ConfigError("line " + std::to_string(line) +
                               ": reset_rule must be global_draw|uniform");
    } else if (key == "allow_offgrid") {
        ov.allow_offgrid = parse_bool(value, line);
    } else {
        throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
}

/// Parses a key = value file. '#' starts a comment; blank lines are ignored.
inline ConfigOverrides parse_config_text(std::istream& is) {
    ConfigOverrides ov;
    std::string raw;
    int line = 0;
    // two passes so allow_offgrid works regardless of its position
    std::vector<std::pair<int, std::pair<std::string, std::string>>> entries;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (key == "allow_offgrid") ov.allow_offgrid = detail::parse_bool(value, line);
        entries.push_back({line, {key, value}});
    }
    for (const auto& [ln, kv] : entries)
        if (kv.first != "allow_offgrid") apply_config_entry(ov, kv.first, kv.second, ln);
    return ov;
}

inline ConfigOverrides parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    return parse_config_text(is);
}

/// Grid expansion honoring the overrides. On-grid combinations keep their
/// canonical full-grid index so filtered runs replay full-grid streams.
inline std::vector<ScenarioConfig> build_scenarios(const ScenarioConfig& base,
                                                   const GridSpec& grid) {
    const auto canonical_index = [](double d, std::size_t m, double lf, double sf,
                                    std::uint32_t& out) {
        std::uint32_t idx = 0;
        for (double gd : grid_deltas())
            for (std::size_t gm : grid_memories())
                for (double glf : grid_local_fractions())
                    for (double gsf : grid_sigma_fractions()) {
                        if (near(gd, d) && gm == m && near(glf, lf) && near(gsf, sf)) {
                            out = idx;
                            return true;
                        }
                        ++idx;
                    }
        return false;
    };
    std::vector<ScenarioConfig> out;
    std::uint32_t custom_index = 1000;  // off-grid scenarios sit outside 0..107
    for (double d : grid.deltas)
        for (std::size_t m : grid.memories)
            for (double lf : grid.local_fractions)
                for (double sf : grid.sigma_fractions) {
                    ScenarioConfig sc = base;
                    sc.delta = d;
                    sc.memory = m;
                    sc.local_fraction = lf;
                    sc.sigma_fraction = sf;
                    std::uint32_t idx;
                    sc.scenario_index = canonical_index(d, m, lf, sf, idx) ? idx : custom_index++;
                    sc.scenario_id = scenario_label(d, m, lf, sf);
                    out.push_back(sc);
                }
    return out;
}

// --- output files ------------------------------------------------------------

/// Fixed-width significant-digit formatting shared by every CSV field.
inline std::string fmt6(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline const char* mode_label(SearchMode m) {
    switch (m) {
        case SearchMode::local: return "local";
        case SearchMode::global: return "global";
        case SearchMode::reset: return "reset";
        default: return "none";
    }
}

struct EmitFlags {
    bool panel = true;
    bool summary = true;
    bool series = true;
    bool manifest = true;
};

struct RunManifest {
    std::string config_path;
    std::string out_dir;
    std::uint64_t master_seed = 0;
    EmitFlags emit;
    unsigned jobs = 0;
    std::vector<std::string> scenario_ids;
};

inline void write_panel_csv(const std::string& path, const std::vector<ScenarioConfig>& scs,
                            const std::vector<Panel>& panels) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "scenario_id,delta,m,lambda_frac,sigma_frac,r,t,phi,target_action,accepted,action,"
          "theta,outcome,estimate,mode,u_p,u_a\n";
    for (std::size_t s = 0; s < scs.size(); ++s) {
        const auto& sc = scs[s];
        const std::string head = sc.scenario_id + "," + fmt6(sc.delta) + "," +
                                 memory_label(sc.memory) + "," + fmt6(sc.local_fraction) + "," +
                                 fmt6(sc.sigma_fraction) + ",";
        for (const auto& run : panels[s])
            for (const auto& pr : run.periods)
                os << head << run.run << "," << pr.t << "," << fmt6(pr.premium) << ","
                   << fmt6(pr.target_action) << "," << (pr.accepted ? 1 : 0) << ","
                   << fmt6(pr.action) << "," << fmt6(pr.theta) << "," << fmt6(pr.outcome) << ","
                   << fmt6(pr.estimate) << "," << mode_label(pr.mode) << "," << fmt6(pr.u_p)
                   << "," << fmt6(pr.u_a) << "\n";
    }
}

inline void write_summary_csv(const std::string& path,
                              const std::vector<ScenarioSummary>& summaries) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "scenario_id,delta,m,lambda_frac,sigma_frac,a_tilde_T,ci99,p_excess,avg_excess\n";
    for (const auto& s : summaries) {
        os << s.scenario_id << "," << fmt6(s.delta) << "," << memory_label(s.memory) << ","
           << fmt6(s.local_fraction) << "," << fmt6(s.sigma_fraction) << ","
           << fmt6(s.mean_normalized_action_T) << "," << fmt6(s.ci99_halfwidth) << ","
           << fmt6(s.excess_probability) << ","
           << (s.average_excess ? fmt6(*s.average_excess) : "") << "\n";
    }
}

inline void write_distance_csv(const std::string& path,
                               const std::vector<ScenarioSummary>& summaries) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "scenario_id,t,d_t\n";
    for (const auto& s : summaries)
        for (std::size_t t = 0; t < s.distance_series.size(); ++t)
            os << s.scenario_id << "," << (t + 1) << "," << fmt6(s.distance_series[t]) << "\n";
}

inline void write_manifest_json(const std::string& path, const RunManifest& m,
                                const ScenarioConfig& base, const BenchmarkSolution& bench) {
    nlohmann::json j;
    j["config_path"] = m.config_path;
    j["out_dir"] = m.out_dir;
    j["master_seed"] = m.master_seed;
    j["jobs"] = m.jobs;
    j["emit"] = {{"panel", m.emit.panel},
                 {"summary", m.emit.summary},
                 {"series", m.emit.series},
                 {"manifest", m.emit.manifest}};
    j["scenarios"] = m.scenario_ids;
    j["T"] = base.periods;
    j["R"] = base.runs;
    j["actor"] = {{"rho", base.actor.rho},
                  {"eta", base.actor.eta},
                  {"reservation_utility", base.actor.reservation_utility}};
    j["benchmark"] = {{"a_star", bench.a_star}, {"phi_star", bench.phi_star},
                      {"x_star", bench.x_star}};
    j["eq14_rule"] = base.eq14 == Eq14Rule::corrected ? "corrected"
                     : base.eq14 == Eq14Rule::literal ? "literal" : "mirror";
    j["candidate_premium"] =
        base.candidate_premium == CandidatePremium::reoptimize ? "reoptimize" : "fixed";
    j["reject_rule"] =
        base.reject_rule == RejectRule::zero_action ? "zero_action" : "take_action";
    j["reject_estimate"] = base.reject_estimate == RejectEstimate::skip ? "skip" : "record";
    j["degenerate_mode"] =
        base.degenerate_mode == DegenerateMode::always_local ? "always_local" : "bernoulli";
    j["reset_rule"] = base.reset_rule == ResetRule::global_draw ? "global_draw" : "uniform";
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(2) << "\n";
}

/// Writes the selected outputs; refuses incomplete result sets unless told
/// otherwise so partial files cannot masquerade as full experiments.
inline void emit_outputs(const RunManifest& manifest, const std::vector<ScenarioConfig>& scs,
                         const std::vector<Panel>& panels,
                         const std::vector<ScenarioSummary>& summaries,
                         const ScenarioConfig& base, const BenchmarkSolution& bench,
                         bool allow_partial = false) {
    if (panels.size() != scs.size() || summaries.size() != scs.size()) {
        if (!allow_partial)
            throw std::runtime_error("emit_outputs: incomplete results (pass --partial to force)");
    }
    const std::vector<ScenarioConfig> done(scs.begin(),
                                           scs.begin() + std::min(scs.size(), panels.size()));
    std::filesystem::create_directories(manifest.out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(manifest.out_dir) / name).string();
    };
    if (manifest.emit.panel) write_panel_csv(path("panel.csv"), done, panels);
    if (manifest.emit.summary) write_summary_csv(path("summary.csv"), summaries);
    if (manifest.emit.series) write_distance_csv(path("distance_series.csv"), summaries);
    if (manifest.emit.manifest) write_manifest_json(path("manifest.json"), manifest, base, bench);
}

/// Minimal reader for the per-period panel, used by the round-trip checks.
struct PanelRow {
    std::string scenario_id;
    int r = 0, t = 0;
    bool accepted = false;
    double action = 0.0;
};

inline std::vector<PanelRow> read_panel_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(is, line);  // header
    std::vector<PanelRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() < 17) throw std::runtime_error("panel.csv: short row");
        PanelRow row;
        row.scenario_id = f[0];
        row.r = std::stoi(f[5]);
        row.t = std::stoi(f[6]);
        row.accepted = f[9] == "1";
        row.action = std::stod(f[10]);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hasim
