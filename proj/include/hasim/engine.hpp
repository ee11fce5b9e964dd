// Period loop and experiment orchestration. One run is a pure function of
// (master seed, scenario index, run index); scenarios form the Cartesian
// parameter grid and runs execute independently on a worker pool without
// affecting results.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "beliefs.hpp"
#include "benchmark.hpp"
#include "decision.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace hasim {

/// What happens when the agent's predicted utility falls short of the
/// reservation level. Either the offer lapses for the period (no action, no
/// trade) or the engaged agent carries out his best response anyway, with
/// the shortfall only recorded.
enum class RejectRule { zero_action, take_action };

/// What the principal records when the agent turns the offer down. With no
/// trade there is no produced outcome; by default she makes no environment
/// estimate that period. The alternative treats the raw realization as an
/// outcome of a zero action and estimates as usual.
enum class RejectEstimate { skip, record };

struct ScenarioConfig {
    double delta = 0.5;
    std::size_t memory = kUnboundedMemory;  // m, estimates/observations retained
    double local_fraction = 0.2;            // 1/lambda
    double sigma_fraction = 0.25;           // sigma as a share of x*
    ActorParams actor;
    double mu = 0.0;
    int periods = 20;  // T
    int runs = 700;    // R
    std::uint64_t master_seed = 42;
    std::uint32_t scenario_index = 0;
    std::string scenario_id = "custom";

    // resolution switches (see README)
    Eq14Rule eq14 = Eq14Rule::mirror;
    CandidatePremium candidate_premium = CandidatePremium::reoptimize;
    DegenerateMode degenerate_mode = DegenerateMode::always_local;
    ResetRule reset_rule = ResetRule::global_draw;
    RejectRule reject_rule = RejectRule::zero_action;
    RejectEstimate reject_estimate = RejectEstimate::skip;
    int search_candidates = 2;
    bool search_final_period = true;
    double phi_step = 0.001;
    double prior_prediction = 0.0;

    double sigma(const BenchmarkSolution& bench) const {
        return sigma_fraction * bench.x_star;
    }
};

struct PeriodRecord {
    int t = 0;
    double target_action = 0.0;
    double premium = 0.0;
    bool accepted = false;
    bool capped = false;
    double action = 0.0;
    double theta = 0.0;
    double outcome = 0.0;
    double estimate = std::numeric_limits<double>::quiet_NaN();  // NaN when none was made
    SearchMode mode = SearchMode::none;
    double u_p = 0.0;
    double u_a = 0.0;
};

struct RunRecord {
    int run = 0;
    std::vector<PeriodRecord> periods;
};

using Panel = std::vector<RunRecord>;

namespace detail {
/// Search space under the current prediction: the principal bounds it above
/// by the best target she could want and below by participation under the
/// premium that target needs. Degenerates to {0,0} when no premium
/// satisfies participation at all.
inline ActionSpace principal_space(const PremiumLadder& ladder, const ActorParams& actor) {
    const auto best = ladder.best_target();
    if (!best.feasible) return {0.0, 0.0};
    const auto space = predicted_action_space(ladder.prediction(), best.premium, actor);
    if (!space) return {0.0, best.action};
    return {space->lower, best.action};
}
}  // namespace detail

/// Executes one full run of T periods.
inline RunRecord run_one(const ScenarioConfig& sc, const BenchmarkSolution& bench, int run_index) {
    const RunRng rng(sc.master_seed, sc.scenario_index, static_cast<std::uint32_t>(run_index));
    const double sigma = sc.sigma(bench);
    SearchParams search{sc.delta, sc.local_fraction, sc.search_candidates};
    search.validate();

    BeliefMemory principal_mem(sc.memory);
    BeliefMemory agent_mem(sc.memory);
    std::optional<PremiumLadder> ladder;  // carried across tau boundaries while the prediction holds
    double incumbent = 0.0;

    RunRecord rec;
    rec.run = run_index;
    rec.periods.reserve(static_cast<std::size_t>(sc.periods));

    for (int t = 1; t <= sc.periods; ++t) {
        const auto period = static_cast<std::uint32_t>(t);
        PeriodRecord pr;
        pr.t = t;

        // tau 1: contract design under the current prediction
        const double pred_p = principal_mem.predict(sc.prior_prediction);
        if (!ladder || ladder->prediction() != pred_p)
            ladder.emplace(sc.actor, pred_p, sc.phi_step);
        if (t == 1) {
            const ActionSpace first = detail::principal_space(*ladder, sc.actor);
            incumbent = rng.uniform_in(period, DrawSlot::init, first.lower, first.upper);
        }
        const Contract contract = ladder->design(incumbent);
        pr.target_action = contract.target_action;
        pr.premium = contract.premium;
        pr.capped = contract.capped;

        // tau 2-3: acceptance and action choice under the agent's prediction
        const double pred_a = agent_mem.predict(sc.prior_prediction);
        const AgentResponse resp = agent_respond(contract, pred_a, sc.actor);
        pr.accepted = resp.accepted;
        const bool engaged =
            resp.accepted || sc.reject_rule == RejectRule::take_action;
        pr.action = engaged ? best_response(contract.premium, pred_a, sc.actor) : 0.0;

        // tau 4-5: the environment takes effect, payoffs realize, both sides learn
        pr.theta = rng.normal(period, DrawSlot::theta, sc.mu, sigma);
        pr.outcome = outcome(pr.action, sc.actor.rho, pr.theta);
        if (engaged) {
            const double share = sharing(pr.outcome, contract.premium);
            pr.u_p = principal_utility(pr.outcome, share);
            pr.u_a = agent_utility(share, pr.action, sc.actor);
            pr.estimate = estimate_theta(pr.outcome, contract.target_action, sc.actor.rho);
            principal_mem.record(pr.estimate);
        } else {
            pr.u_p = pr.outcome;  // nothing is shared without a contract
            pr.u_a = sc.actor.reservation_utility;
            if (sc.reject_estimate == RejectEstimate::record) {
                pr.estimate = estimate_theta(pr.outcome, contract.target_action, sc.actor.rho);
                principal_mem.record(pr.estimate);
            }
        }
        agent_mem.record(pr.theta);

        // tau 6-7: pick the target for t+1
        if (t < sc.periods || sc.search_final_period) {
            const double pred_p2 = principal_mem.predict(sc.prior_prediction);
            if (ladder->prediction() != pred_p2) ladder.emplace(sc.actor, pred_p2, sc.phi_step);
            const ActionSpace space = detail::principal_space(*ladder, sc.actor);
            const auto kappa = exploration_threshold(principal_mem, sc.delta, sc.eq14);
            const double last_est = principal_mem.empty() ? 0.0 : principal_mem.newest();
            const bool global_mode = choose_global(last_est, kappa, sc.delta, sc.eq14, rng,
                                                   period, sc.degenerate_mode);
            const SearchContext ctx{*ladder, space, search, sc.candidate_premium,
                                    contract.premium, sc.reset_rule};
            const SearchOutcome step = search_step(ctx, incumbent, global_mode, rng, period);
            pr.mode = step.mode;
            incumbent = step.next_target;
        } else {
            pr.mode = SearchMode::none;
        }

        rec.periods.push_back(pr);
    }
    return rec;
}

/// All R runs of one scenario, in run order.
inline Panel run_scenario(const ScenarioConfig& sc, const BenchmarkSolution& bench) {
    Panel panel(static_cast<std::size_t>(sc.runs));
    for (int r = 0; r < sc.runs; ++r) panel[static_cast<std::size_t>(r)] = run_one(sc, bench, r);
    return panel;
}

// --- parameter grid ---------------------------------------------------------

inline const std::vector<double>& grid_deltas() {
    static const std::vector<double> v{0.25, 0.50, 0.75};
    return v;
}
inline const std::vector<std::size_t>& grid_memories() {
    static const std::vector<std::size_t> v{1, 3, kUnboundedMemory};
    return v;
}
inline const std::vector<double>& grid_local_fractions() {
    static const std::vector<double> v{1.0 / 3.0, 1.0 / 5.0, 1.0 / 10.0};
    return v;
}
inline const std::vector<double>& grid_sigma_fractions() {
    static const std::vector<double> v{0.05, 0.25, 0.45, 0.65};
    return v;
}

inline std::string memory_label(std::size_t m) {
    return m == kUnboundedMemory ? "inf" : std::to_string(m);
}

inline std::string scenario_label(double delta, std::size_t m, double lf, double sf) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "d%02d_m%s_l%d_s%02d", (int)std::lround(delta * 100),
                  memory_label(m).c_str(), (int)std::lround(1.0 / lf),
                  (int)std::lround(sf * 100));
    return buf;
}

/// Cartesian product of the experiment grid (delta x m x 1/lambda x sigma),
/// optionally filtered to single values per dimension. Indices follow the
/// nesting order delta, m, 1/lambda, sigma and are stable under filtering so
/// seeds never depend on which subset runs.
struct GridFilter {
    std::optional<double> delta;
    std::optional<std::size_t> memory;
    std::optional<double> local_fraction;
    std::optional<double> sigma_fraction;
};

inline bool near(double a, double b) { return std::abs(a - b) < 1e-9; }

inline std::vector<ScenarioConfig> scenario_grid(const ScenarioConfig& base,
                                                 const GridFilter& filter = {}) {
    std::vector<ScenarioConfig> out;
    std::uint32_t index = 0;
    for (double d : grid_deltas())
        for (std::size_t m : grid_memories())
            for (double lf : grid_local_fractions())
                for (double sf : grid_sigma_fractions()) {
                    const std::uint32_t idx = index++;
                    if (filter.delta && !near(*filter.delta, d)) continue;
                    if (filter.memory && *filter.memory != m) continue;
                    if (filter.local_fraction && !near(*filter.local_fraction, lf)) continue;
                    if (filter.sigma_fraction && !near(*filter.sigma_fraction, sf)) continue;
                    ScenarioConfig sc = base;
                    sc.delta = d;
                    sc.memory = m;
                    sc.local_fraction = lf;
                    sc.sigma_fraction = sf;
                    sc.scenario_index = idx;
                    sc.scenario_id = scenario_label(d, m, lf, sf);
                    out.push_back(sc);
                }
    return out;
}

/// Runs many scenarios on `jobs` workers. Tasks are (scenario, run) pairs
/// writing into preallocated slots, so the worker count cannot change any
/// output byte.
inline std::vector<Panel> run_grid(const std::vector<ScenarioConfig>& scenarios,
                                   const BenchmarkSolution& bench, unsigned jobs = 0) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    std::vector<Panel> results(scenarios.size());
    std::vector<std::pair<std::size_t, int>> tasks;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        results[s].resize(static_cast<std::size_t>(scenarios[s].runs));
        for (int r = 0; r < scenarios[s].runs; ++r) tasks.emplace_back(s, r);
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const auto [s, r] = tasks[i];
            results[s][static_cast<std::size_t>(r)] = run_one(scenarios[s], bench, r);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return results;
}

}  // namespace hasim
