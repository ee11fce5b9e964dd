// The per-period decision machinery: contract design (the premium grid),
// the agent's response, and the principal's two-candidate hill-climbing
// search with its exploration threshold and reset rule.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "beliefs.hpp"
#include "model.hpp"
#include "numeric.hpp"
#include "rng.hpp"

namespace hasim {

struct SearchParams {
    double delta = 0.5;           ///< tendency for global search
    double local_fraction = 0.2;  ///< share of the action space a local search can reach (1/lambda)
    int candidates = 2;           ///< alternatives drawn per search step

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0))
            throw std::domain_error("SearchParams: delta outside (0,1)");
        if (!(local_fraction > 0.0 && local_fraction < 1.0))
            throw std::domain_error("SearchParams: local_fraction outside (0,1)");
        if (candidates < 1) throw std::domain_error("SearchParams: need >= 1 candidate");
    }
};

/// Resolution of the threshold equation's printed inconsistency (the stated
/// delta-quantile with ">= kappa" makes high delta explore *less*).
///   corrected: kappa at the (1-delta)-quantile, global iff newest >= kappa
///   literal:   kappa at the delta-quantile,     global iff newest >= kappa
///   mirror:    kappa at the delta-quantile,     global iff newest <  kappa
enum class Eq14Rule { corrected, literal, mirror };

/// Premium used when scoring search candidates: re-derived per candidate or
/// held at the period's contract value.
enum class CandidatePremium { reoptimize, fixed };

/// Mode choice when the threshold is undefined (memory spread zero). The
/// experiment tables are invariant in delta wherever the memory holds a
/// single estimate, which identifies the always-local behavior; a Bernoulli
/// draw with success probability delta is available as an alternative.
enum class DegenerateMode { always_local, bernoulli };

/// Restart behavior when the incumbent target has left the feasible
/// interval: a forced global step (two fresh candidates from the whole
/// interval, best one wins) or a single uniform reposition.
enum class ResetRule { global_draw, uniform };

enum class SearchMode { local, global, reset, none };

struct SearchOutcome {
    double next_target = 0.0;
    SearchMode mode = SearchMode::none;
    std::vector<double> candidates_evaluated;  // incumbent plus drawn alternatives
};

/// Best responses along the premium grid {0, step, ..., 1} for one fixed
/// environment prediction. The response rises in the premium up to a single
/// peak (richer agents value the marginal share less), so contract design
/// only ever needs the rising branch, which is short. Built once per
/// prediction and shared by contract design, boundary construction and
/// candidate scoring.
class PremiumLadder {
public:
    PremiumLadder(const ActorParams& params, double prediction, double phi_step = 0.001)
        : params_(params), prediction_(prediction), step_(phi_step) {
        n_grid_ = static_cast<std::size_t>(std::llround(1.0 / step_));
        br_.reserve(64);
        feasible_.reserve(64);
        br_.push_back(0.0);
        feasible_.push_back(participates(0.0, 0.0));
        for (std::size_t i = 1; i <= n_grid_; ++i) {
            const double phi = static_cast<double>(i) * step_;
            const double a = best_response(phi, prediction_, params_);
            if (a < br_.back()) break;  // past the peak
            br_.push_back(a);
            feasible_.push_back(participates(phi, a));
        }
        peak_ = br_.size() - 1;
        best_index_ = 0;
        best_found_ = false;
        double best_v = 0.0;
        for (std::size_t i = 0; i <= peak_; ++i) {
            if (!feasible_[i]) continue;
            const double v = principal_value(br_[i], phi_at(i));
            if (!best_found_ || v > best_v) {
                best_found_ = true;
                best_v = v;
                best_index_ = i;
            }
        }
    }

    double prediction() const { return prediction_; }
    double phi_step() const { return step_; }
    double phi_at(std::size_t i) const { return static_cast<double>(i) * step_; }
    double max_inducible() const { return br_[peak_]; }

    /// Expected principal payoff from a target action at a given premium.
    double principal_value(double action, double premium) const {
        return (action * params_.rho + prediction_) * (1.0 - premium);
    }

    /// Smallest grid premium whose induced best response reaches the target
    /// while the agent still participates. Targets beyond the inducible
    /// maximum come back capped at the peak premium.
    Contract design(double target) const {
        if (!(target >= 0.0)) throw std::domain_error("design: negative target");
        if (target <= 0.0) return Contract{target, 0.0, false};
        if (target > br_[peak_]) return Contract{target, phi_at(peak_), true};
        auto it = std::lower_bound(br_.begin(), br_.end(), target);
        std::size_t i = static_cast<std::size_t>(it - br_.begin());
        while (i <= peak_ && !feasible_[i]) ++i;
        if (i > peak_) {
            // participation holds nowhere on the rising branch; try beyond
            // the peak while the falling response still covers the target
            for (std::size_t j = peak_ + 1; j <= n_grid_; ++j) {
                const double phi = phi_at(j);
                const double a = best_response(phi, prediction_, params_);
                if (a < target) break;
                if (participates(phi, a)) return Contract{target, phi, false};
            }
            return Contract{target, phi_at(peak_), true};
        }
        return Contract{target, phi_at(i), false};
    }

    struct BestTarget {
        double action = 0.0;
        double premium = 0.0;
        bool feasible = false;
    };

    /// The inducible target that maximizes the principal's expected payoff
    /// under this prediction; it is the upper boundary of her search space.
    BestTarget best_target() const {
        if (!best_found_) return {};
        return {br_[best_index_], phi_at(best_index_), true};
    }

    /// Candidate score with a per-candidate premium from design().
    double value_reoptimized(double candidate) const {
        return principal_value(candidate, design(candidate).premium);
    }

private:
    bool participates(double phi, double a) const {
        return predicted_utility(phi, prediction_, a, params_) >=
               params_.reservation_utility - 1e-12;
    }

    ActorParams params_;
    double prediction_;
    double step_;
    std::size_t n_grid_;
    std::vector<double> br_;      // best responses on the rising branch
    std::vector<bool> feasible_;  // participation at the induced response
    std::size_t peak_;
    std::size_t best_index_;
    bool best_found_;
};

/// Sub-model A: premium for a requested action under the principal's prediction.
inline Contract design_contract(double target_action, double principal_prediction,
                                const ActorParams& params, double phi_step = 0.001) {
    return PremiumLadder(params, principal_prediction, phi_step).design(target_action);
}

struct AgentResponse {
    bool accepted = false;
    double action = 0.0;
};

/// Sub-model B: the agent's feasible interval under the offered premium is
/// topped by his best response, which is where his predicted utility peaks;
/// he accepts when that utility clears the reservation level.
inline AgentResponse agent_respond(const Contract& contract, double agent_prediction,
                                   const ActorParams& params) {
    contract.validate();
    const auto space = predicted_action_space(agent_prediction, contract.premium, params);
    if (!space) return {false, 0.0};
    return {true, space->upper};
}

/// Quantile threshold over the memory of estimates; empty when the memory's
/// spread is degenerate (the caller then falls back to a Bernoulli draw).
inline std::optional<double> exploration_threshold(const BeliefMemory& memory, double delta,
                                                   Eq14Rule rule = Eq14Rule::corrected) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("exploration_threshold: delta outside (0,1)");
    const double sd = memory.stddev();
    if (sd <= 0.0) return std::nullopt;
    const double q = rule == Eq14Rule::corrected ? 1.0 - delta : delta;
    return memory.predict() + sd * norm_ppf(q);
}

/// Global-vs-local decision for one period. Only the Bernoulli degenerate
/// variant consumes randomness, from its own slot.
inline bool choose_global(double last_estimate, std::optional<double> kappa, double delta,
                          Eq14Rule rule, const RunRng& rng, std::uint32_t period,
                          DegenerateMode degenerate = DegenerateMode::always_local) {
    if (!kappa) {
        if (degenerate == DegenerateMode::bernoulli)
            return rng.bernoulli(period, DrawSlot::bernoulli, delta);
        return false;
    }
    if (rule == Eq14Rule::mirror) return last_estimate < *kappa;
    return last_estimate >= *kappa;
}

/// Local window and global remainder of the space around the incumbent. The
/// local window is clipped to the space; the global region is defined by the
/// unclipped window so the two always partition the space.
struct SearchRegions {
    double local_lo = 0.0, local_hi = 0.0;
    double global_lo1 = 0.0, global_hi1 = 0.0;  // below the window
    double global_lo2 = 0.0, global_hi2 = 0.0;  // above the window

    double local_len() const { return std::max(0.0, local_hi - local_lo); }
    double global_len() const {
        return std::max(0.0, global_hi1 - global_lo1) + std::max(0.0, global_hi2 - global_lo2);
    }
};

inline SearchRegions search_spaces(const ActionSpace& space, double incumbent,
                                   double local_fraction) {
    SearchRegions r;
    const double w = local_fraction * space.width();
    r.local_lo = std::max(space.lower, incumbent - 0.5 * w);
    r.local_hi = std::min(space.upper, incumbent + 0.5 * w);
    r.global_lo1 = space.lower;
    r.global_hi1 = std::max(space.lower, incumbent - 0.5 * w);
    r.global_lo2 = std::min(space.upper, incumbent + 0.5 * w);
    r.global_hi2 = space.upper;
    return r;
}

namespace detail {
inline double draw_in_regions(const SearchRegions& r, bool global_region, const RunRng& rng,
                              std::uint32_t period, DrawSlot slot, std::uint32_t sub = 0) {
    if (global_region) {
        const double len1 = std::max(0.0, r.global_hi1 - r.global_lo1);
        const double len = r.global_len();
        double u = rng.uniform(period, slot, sub) * len;
        if (u <= len1) return r.global_lo1 + u;
        return r.global_lo2 + (u - len1);
    }
    return r.local_lo + rng.uniform(period, slot, sub) * r.local_len();
}
}  // namespace detail

/// Sub-model C, one step. Everything the step needs about the period is in
/// the ladder (post-update prediction) and the space derived from it.
struct SearchContext {
    const PremiumLadder& ladder;
    ActionSpace space;
    SearchParams search;
    CandidatePremium candidate_premium = CandidatePremium::reoptimize;
    double current_premium = 0.0;  // used by the fixed variant
    ResetRule reset_rule = ResetRule::global_draw;
};

namespace detail {
inline double candidate_value(const SearchContext& ctx, double candidate) {
    return ctx.candidate_premium == CandidatePremium::fixed
               ? ctx.ladder.principal_value(candidate, ctx.current_premium)
               : ctx.ladder.value_reoptimized(candidate);
}
}  // namespace detail

inline SearchOutcome search_step(const SearchContext& ctx, double incumbent, bool global_mode,
                                 const RunRng& rng, std::uint32_t period) {
    SearchOutcome out;
    if (ctx.space.width() <= 0.0 || !ctx.space.contains(incumbent)) {
        out.mode = SearchMode::reset;
        if (ctx.reset_rule == ResetRule::uniform || ctx.space.width() <= 0.0) {
            out.next_target =
                rng.uniform_in(period, DrawSlot::reset, ctx.space.lower, ctx.space.upper);
            return out;
        }
        // forced global step over the whole interval; the infeasible
        // incumbent takes no part in the comparison
        const double c1 =
            rng.uniform_in(period, DrawSlot::candidate1, ctx.space.lower, ctx.space.upper);
        const double c2 =
            rng.uniform_in(period, DrawSlot::candidate2, ctx.space.lower, ctx.space.upper);
        out.candidates_evaluated = {c1, c2};
        const double v1 = detail::candidate_value(ctx, c1);
        const double v2 = detail::candidate_value(ctx, c2);
        out.next_target = v2 > v1 || (v2 == v1 && c2 < c1) ? c2 : c1;
        return out;
    }
    const SearchRegions regions = search_spaces(ctx.space, incumbent, ctx.search.local_fraction);
    bool use_global = global_mode;
    if (use_global && regions.global_len() <= 0.0) use_global = false;
    if (!use_global && regions.local_len() <= 0.0) {
        if (regions.global_len() <= 0.0) {
            out.mode = SearchMode::reset;
            out.next_target =
                rng.uniform_in(period, DrawSlot::reset, ctx.space.lower, ctx.space.upper);
            return out;
        }
        use_global = true;
    }
    out.mode = use_global ? SearchMode::global : SearchMode::local;

    out.candidates_evaluated.push_back(incumbent);
    out.candidates_evaluated.push_back(
        detail::draw_in_regions(regions, use_global, rng, period, DrawSlot::candidate1));
    out.candidates_evaluated.push_back(
        detail::draw_in_regions(regions, use_global, rng, period, DrawSlot::candidate2));
    for (int extra = 2; extra < ctx.search.candidates; ++extra)
        out.candidates_evaluated.push_back(detail::draw_in_regions(
            regions, use_global, rng, period, DrawSlot::candidate2, 1 + extra));

    double best_a = out.candidates_evaluated.front();
    double best_v = -std::numeric_limits<double>::infinity();
    for (double cand : out.candidates_evaluated) {
        const double v = detail::candidate_value(ctx, cand);
        if (v > best_v || (v == best_v && cand < best_a)) {
            best_v = v;
            best_a = cand;
        }
    }
    out.next_target = best_a;
    return out;
}

}  // namespace hasim
