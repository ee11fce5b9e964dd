// Outcome measures over a panel of runs, all normalized by the benchmark
// action: final mean performance with its confidence interval, the squared
// distance series, and the two excess-effort statistics.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "engine.hpp"
#include "numeric.hpp"

namespace hasim {

namespace detail {
inline void check_panel(const Panel& panel, double a_star) {
    if (panel.empty()) throw std::invalid_argument("metrics: empty panel");
    if (!(a_star > 0.0)) throw std::invalid_argument("metrics: a_star must be > 0");
}
inline double action_at(const RunRecord& run, int t) {
    return run.periods.at(static_cast<std::size_t>(t - 1)).action;
}
}  // namespace detail

/// (1/R) sum_r a_{tr} / a*
inline double mean_normalized_action(const Panel& panel, int t, double a_star) {
    detail::check_panel(panel, a_star);
    double s = 0.0;
    for (const auto& run : panel) s += detail::action_at(run, t) / a_star;
    return s / static_cast<double>(panel.size());
}

/// sum_r (1 - a_{tr}/a*)^2
inline double squared_distance(const Panel& panel, int t, double a_star) {
    detail::check_panel(panel, a_star);
    double s = 0.0;
    for (const auto& run : panel) {
        const double d = 1.0 - detail::action_at(run, t) / a_star;
        s += d * d;
    }
    return s;
}

/// Share of period-run cells with above-benchmark effort, periods 2..T. The
/// first period is excluded: the initial draw cannot exceed the benchmark.
inline double excess_probability(const Panel& panel, double a_star) {
    detail::check_panel(panel, a_star);
    const int T = static_cast<int>(panel.front().periods.size());
    if (T < 2) throw std::invalid_argument("excess_probability: need T >= 2");
    std::size_t count = 0;
    for (const auto& run : panel)
        for (int t = 2; t <= T; ++t)
            if (detail::action_at(run, t) > a_star) ++count;
    return static_cast<double>(count) /
           (static_cast<double>(panel.size()) * static_cast<double>(T - 1));
}

/// Mean normalized overshoot conditional on exceeding the benchmark,
/// periods 2..T; empty when no cell ever exceeds it.
inline std::optional<double> average_excess(const Panel& panel, double a_star) {
    detail::check_panel(panel, a_star);
    const int T = static_cast<int>(panel.front().periods.size());
    if (T < 2) throw std::invalid_argument("average_excess: need T >= 2");
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& run : panel)
        for (int t = 2; t <= T; ++t) {
            const double a = detail::action_at(run, t);
            if (a > a_star) {
                sum += a / a_star - 1.0;
                ++count;
            }
        }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

/// Normal-approximation CI halfwidth at confidence 1 - alpha.
inline double confidence_interval(const std::vector<double>& values, double alpha = 0.01) {
    if (values.size() < 2) throw std::invalid_argument("confidence_interval: need >= 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return norm_ppf(1.0 - alpha / 2.0) * sd / std::sqrt(static_cast<double>(values.size()));
}

struct ScenarioSummary {
    std::string scenario_id;
    double delta = 0.0;
    std::size_t memory = 0;
    double local_fraction = 0.0;
    double sigma_fraction = 0.0;
    double mean_normalized_action_T = 0.0;
    double ci99_halfwidth = 0.0;
    double excess_probability = 0.0;
    std::optional<double> average_excess;
    std::vector<double> distance_series;  // d_1..d_T
};

inline ScenarioSummary summarize(const ScenarioConfig& sc, const Panel& panel, double a_star) {
    ScenarioSummary s;
    s.scenario_id = sc.scenario_id;
    s.delta = sc.delta;
    s.memory = sc.memory;
    s.local_fraction = sc.local_fraction;
    s.sigma_fraction = sc.sigma_fraction;
    const int T = static_cast<int>(panel.front().periods.size());
    s.mean_normalized_action_T = mean_normalized_action(panel, T, a_star);
    std::vector<double> finals;
    finals.reserve(panel.size());
    for (const auto& run : panel) finals.push_back(detail::action_at(run, T) / a_star);
    s.ci99_halfwidth = confidence_interval(finals, 0.01);
    s.excess_probability = excess_probability(panel, a_star);
    s.average_excess = average_excess(panel, a_star);
    s.distance_series.reserve(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) s.distance_series.push_back(squared_distance(panel, t, a_star));
    return s;
}

}  // namespace hasim
