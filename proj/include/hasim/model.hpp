// Economic primitives of the delegation model: linear production with an
// additive normal shock, a linear sharing rule, a risk-neutral principal and
// a CARA agent with quadratic effort cost.
#pragma once

#include <cmath>
#include <stdexcept>

namespace hasim {

/// Fixed characteristics of the agent, known to both parties.
struct ActorParams {
    double rho = 50.0;                  ///< productivity: outcome per unit of action
    double eta = 0.5;                   ///< Arrow-Pratt coefficient of absolute risk aversion
    double reservation_utility = 0.0;   ///< utility of the outside option
    double disutility_coeff = 0.1;      ///< quadratic effort cost coefficient (fixed)
    double disutility_exponent = 2.0;   ///< effort cost exponent (fixed)

    void validate() const {
        if (!(rho > 0.0)) throw std::domain_error("ActorParams: rho must be > 0");
        if (!(eta > 0.0)) throw std::domain_error("ActorParams: eta must be > 0");
        if (disutility_coeff != 0.1 || disutility_exponent != 2.0)
            throw std::domain_error("ActorParams: effort cost is fixed at 0.1*a^2");
    }
};

/// Exogenous environment: a single normal random variable per period.
struct EnvParams {
    double mu = 0.0;
    double sigma = 1.0;

    void validate() const {
        if (!(sigma > 0.0)) throw std::domain_error("EnvParams: sigma must be > 0");
    }
};

/// The per-period offer: the action the principal asks for and the share of
/// the outcome the agent keeps.
struct Contract {
    double target_action = 0.0;
    double premium = 0.0;  ///< agent's outcome share in [0,1]
    bool capped = false;   ///< target exceeded every inducible action

    void validate() const {
        if (!(premium >= 0.0 && premium <= 1.0))
            throw std::domain_error("Contract: premium outside [0,1]");
        if (!(target_action >= 0.0))
            throw std::domain_error("Contract: negative target action");
    }
};

/// x = a * rho + theta
inline double outcome(double action, double rho, double theta) {
    if (!(action >= 0.0)) throw std::domain_error("outcome: negative action");
    return action * rho + theta;
}

/// s(x) = x * premium
inline double sharing(double x, double premium) {
    if (!(premium >= 0.0 && premium <= 1.0))
        throw std::domain_error("sharing: premium outside [0,1]");
    return x * premium;
}

/// U_P = x - s(x); the principal is risk neutral.
inline double principal_utility(double x, double share) { return x - share; }

/// U_A = (1 - exp(-eta * s)) / eta - 0.1 * a^2
inline double agent_utility(double share, double action, const ActorParams& p) {
    if (!(action >= 0.0)) throw std::domain_error("agent_utility: negative action");
    return (1.0 - std::exp(-p.eta * share)) / p.eta -
           p.disutility_coeff * action * action;
}

}  // namespace hasim
