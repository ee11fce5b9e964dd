// Bounded-memory information machinery. Both parties store recent
// environment values (the principal her estimates, the agent his
// observations), predict by the plain mean, and derive the action interval
// they consider feasible under a given contract.
#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>

#include "model.hpp"
#include "numeric.hpp"

namespace hasim {

constexpr std::size_t kUnboundedMemory = std::numeric_limits<std::size_t>::max();

/// Rolling window of the last `capacity` recorded values, newest first.
class BeliefMemory {
public:
    explicit BeliefMemory(std::size_t capacity = kUnboundedMemory) : capacity_(capacity) {}

    void record(double value) {
        values_.push_front(value);
        if (values_.size() > capacity_) values_.pop_back();
    }

    /// Mean of the stored values; `prior` when nothing has been recorded yet.
    double predict(double prior = 0.0) const {
        if (values_.empty()) return prior;
        double s = 0.0;
        for (double v : values_) s += v;
        return s / static_cast<double>(values_.size());
    }

    /// Sample standard deviation (n-1 denominator); 0 with fewer than two entries.
    double stddev() const {
        const std::size_t n = values_.size();
        if (n < 2) return 0.0;
        const double m = predict();
        double ss = 0.0;
        for (double v : values_) ss += (v - m) * (v - m);
        return std::sqrt(ss / static_cast<double>(n - 1));
    }

    double newest() const { return values_.front(); }
    bool empty() const { return values_.empty(); }
    std::size_t size() const { return values_.size(); }
    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::deque<double> values_;
};

/// theta estimate from an observed outcome and the contracted action.
inline double estimate_theta(double x, double target_action, double rho) {
    return x - target_action * rho;
}

/// Interval of actions an actor considers feasible under a contract.
struct ActionSpace {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    bool contains(double a) const { return a >= lower && a <= upper; }
};

/// Agent's optimal action under a linear contract with share `premium`,
/// holding the environment at the point prediction. The objective
/// (1-exp(-eta*premium*(a*rho+E)))/eta - c*a^2 is strictly concave, so the
/// unique stationary point solves
///   premium*rho*exp(-eta*premium*(a*rho+E)) = 2*c*a,
/// which reduces to w*exp(w) = eta*rho^2*premium^2*exp(-eta*premium*E)/(2c)
/// with w = eta*rho*premium*a.
inline double best_response(double premium, double prediction, const ActorParams& p) {
    if (premium <= 0.0) return 0.0;
    const double k = p.eta * p.rho * premium;
    const double log_arg = std::log(p.eta * p.rho * p.rho * premium * premium /
                                    (2.0 * p.disutility_coeff)) -
                           p.eta * premium * prediction;
    return lambert_w0_exp(log_arg) / k;
}

/// Predicted utility of taking `action` under (premium, prediction).
inline double predicted_utility(double premium, double prediction, double action,
                                const ActorParams& p) {
    const double xt = action * p.rho + prediction;
    return agent_utility(sharing(xt, premium), action, p);
}

/// Feasible action interval under a contract premium and an environment
/// prediction: bounded above by the agent's best response and below by the
/// participation constraint (clamped at zero). Returns nothing when even the
/// best response violates participation; the contract is then unacceptable.
inline std::optional<ActionSpace> predicted_action_space(double prediction, double premium,
                                                         const ActorParams& p,
                                                         double tol = 1e-6) {
    const double upper = best_response(premium, prediction, p);
    const double ubar = p.reservation_utility;
    if (predicted_utility(premium, prediction, upper, p) < ubar - 1e-12)
        return std::nullopt;
    double lower = 0.0;
    if (predicted_utility(premium, prediction, 0.0, p) < ubar - 1e-12) {
        lower = bisect_first_nonneg(
            [&](double a) { return predicted_utility(premium, prediction, a, p) - ubar; },
            0.0, upper, tol);
    }
    return ActionSpace{lower, upper};
}

}  // namespace hasim
