// Full-information benchmark of the linear-contract problem. The environment
// is held at its mean, so the benchmark is available before sigma (which the
// experiments define relative to x*) exists. Also provides the numerical
// check that a flat wage is optimal when the action itself is contractible.
#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "decision.hpp"
#include "model.hpp"
#include "numeric.hpp"

namespace hasim {

struct BenchmarkSolution {
    double a_star = 0.0;
    double phi_star = 0.0;
    double x_star = 0.0;
};

/// Second-best optimum over the premium grid: the agent's best response is
/// solved per premium, premiums violating participation are dropped, and the
/// principal keeps the grid point maximizing (a(phi)*rho + mu)(1 - phi).
inline BenchmarkSolution second_best_oracle(const ActorParams& params, double mu = 0.0,
                                            double phi_step = 0.001) {
    params.validate();
    PremiumLadder ladder(params, mu, phi_step);
    const auto best = ladder.best_target();
    if (!best.feasible)
        throw std::runtime_error("second_best_oracle: no premium satisfies participation");
    return {best.action, best.premium, best.action * params.rho + mu};
}

/// Inputs for the first-best (observable action) comparison.
struct BenchmarkProblem {
    ActorParams actor;
    double mu = 0.0;
    double sigma = 1.0;
    double a_grid_step = 1e-3;
    std::size_t gh_nodes = 64;
    double tol = 1e-4;
};

struct FlatWageCheck {
    bool flat_wage_optimal = false;
    double action = 0.0;         // first-best action
    double flat_value = 0.0;     // principal's value paying the certainty wage
    double linear_value = 0.0;   // best linear-premium alternative at the same action
    double risk_premium = 0.0;   // flat_value - linear_value
};

/// With a contractible action the principal dictates the effort level and
/// only chooses how to pay for it. Paying the binding certainty-equivalent
/// wage dominates every outcome-linear premium that meets participation,
/// because the linear contract loads outcome risk onto the risk-averse
/// agent. Confirmed by quadrature to `tol` in principal expected utility.
inline FlatWageCheck verify_first_best_flat_wage(const BenchmarkProblem& pb) {
    pb.actor.validate();
    if (pb.gh_nodes < 24 || pb.a_grid_step > 1e-2)
        throw std::runtime_error("verify_first_best_flat_wage: grid too coarse, inconclusive");
    const GaussHermite gh(pb.gh_nodes);
    // quadrature span must cover at least +-6 sigma of the outcome shock
    if (std::sqrt(2.0) * gh.nodes.back() < 6.0)
        throw std::runtime_error("verify_first_best_flat_wage: quadrature span below 6 sigma");

    const double eta = pb.actor.eta, rho = pb.actor.rho, c = pb.actor.disutility_coeff;
    const double ubar = pb.actor.reservation_utility;
    // certainty wage making participation bind: V(w) = ubar + c a^2
    const auto wage = [&](double a) {
        const double need = 1.0 - eta * (ubar + c * a * a);
        if (need <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(need) / eta;
    };
    const auto flat_value = [&](double a) { return a * rho + pb.mu - wage(a); };

    const double a_cap = std::sqrt((1.0 / eta - ubar) / c) * (1.0 - 1e-9);
    double best_a = 0.0, best_v = flat_value(0.0);
    for (double a = 0.0; a <= a_cap; a += pb.a_grid_step) {
        const double v = flat_value(a);
        if (v > best_v) { best_v = v; best_a = a; }
    }
    best_a = golden_section_max(flat_value, std::max(0.0, best_a - pb.a_grid_step),
                                std::min(a_cap, best_a + pb.a_grid_step), 1e-9);
    best_v = flat_value(best_a);

    // best linear premium paying for the same dictated action
    const double xbar = best_a * rho + pb.mu;
    const double effort_cost = c * best_a * best_a;
    double best_lin = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 1000; ++i) {
        const double phi = i / 1000.0;
        const double ev = gh.expect(
            [&](double theta) {
                const double s = phi * (best_a * rho + theta);
                return (1.0 - std::exp(-eta * s)) / eta;
            },
            pb.mu, pb.sigma);
        if (ev - effort_cost < ubar - 1e-12) continue;
        best_lin = std::max(best_lin, (1.0 - phi) * xbar);
    }

    FlatWageCheck out;
    out.action = best_a;
    out.flat_value = best_v;
    out.linear_value = best_lin;
    out.risk_premium = best_v - best_lin;
    out.flat_wage_optimal = best_v >= best_lin - pb.tol;
    return out;
}

/// Frozen benchmark values plus the grid that produced them.
inline nlohmann::json benchmark_fixture_json(const ActorParams& params, double mu,
                                             double phi_step) {
    const auto sol = second_best_oracle(params, mu, phi_step);
    return nlohmann::json{{"rho", params.rho},
                          {"eta", params.eta},
                          {"reservation_utility", params.reservation_utility},
                          {"mu", mu},
                          {"phi_grid_step", phi_step},
                          {"a_star", sol.a_star},
                          {"phi_star", sol.phi_star},
                          {"x_star", sol.x_star}};
}

inline void write_benchmark_fixture(const std::string& path, const ActorParams& params,
                                    double mu = 0.0, double phi_step = 0.001) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write fixture file: " + path);
    os << benchmark_fixture_json(params, mu, phi_step).dump(2) << "\n";
}

/// Recomputes the benchmark for the fixture's parameters and reports the
/// largest drift across (a*, phi*, x*).
inline double benchmark_fixture_drift(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read fixture file: " + path);
    nlohmann::json j;
    is >> j;
    ActorParams p;
    p.rho = j.at("rho").get<double>();
    p.eta = j.at("eta").get<double>();
    p.reservation_utility = j.at("reservation_utility").get<double>();
    const auto sol = second_best_oracle(p, j.at("mu").get<double>(),
                                        j.at("phi_grid_step").get<double>());
    double drift = std::abs(sol.a_star - j.at("a_star").get<double>());
    drift = std::max(drift, std::abs(sol.phi_star - j.at("phi_star").get<double>()));
    drift = std::max(drift, std::abs(sol.x_star - j.at("x_star").get<double>()));
    return drift;
}

}  // namespace hasim
