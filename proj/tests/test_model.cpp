#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hasim/model.hpp"

using namespace hasim;

namespace {
ActorParams params(double eta = 0.5) {
    ActorParams p;
    p.eta = eta;
    return p;
}
}  // namespace

TEST_CASE("production function") {
    REQUIRE(outcome(0.0, 50.0, 0.0) == 0.0);
    REQUIRE(outcome(1.0, 50.0, 5.0) == 55.0);
    REQUIRE(outcome(2.0, 50.0, -3.0) == 97.0);
    REQUIRE_THROWS_AS(outcome(-0.1, 50.0, 0.0), std::domain_error);
}

TEST_CASE("sharing rule") {
    REQUIRE(sharing(100.0, 0.3) == 30.0);
    REQUIRE(sharing(0.0, 0.7) == 0.0);
    REQUIRE(sharing(-10.0, 0.5) == -5.0);
    REQUIRE_THROWS_AS(sharing(1.0, 1.2), std::domain_error);
    REQUIRE_THROWS_AS(sharing(1.0, -0.1), std::domain_error);
}

TEST_CASE("principal utility is the retained outcome") {
    REQUIRE(principal_utility(100.0, 30.0) == 70.0);
    REQUIRE(principal_utility(0.0, 0.0) == 0.0);
    REQUIRE(principal_utility(55.0, 55.0) == 0.0);
}

TEST_CASE("agent utility") {
    const auto p = params();
    REQUIRE(agent_utility(0.0, 0.0, p) == 0.0);
    REQUIRE(agent_utility(2.0, 1.0, p) ==
            Catch::Approx((1.0 - std::exp(-1.0)) / 0.5 - 0.1).epsilon(1e-12));
    // CARA asymptote: utility of wealth saturates at 1/eta
    REQUIRE(agent_utility(1e6, 0.0, p) == Catch::Approx(2.0).margin(1e-12));
    REQUIRE_THROWS_AS(agent_utility(1.0, -1.0, p), std::domain_error);
}

TEST_CASE("outcome conservation") {
    for (double x : {-25.0, 0.0, 13.7, 101.3}) {
        for (double phi : {0.0, 0.25, 0.5, 1.0}) {
            const double s = sharing(x, phi);
            REQUIRE(s + (x - s) == x);  // exact in floating point
        }
    }
}

TEST_CASE("agent utility monotone in share and action") {
    const auto p = params();
    const double h = 1e-4;
    for (double s = -1.0; s < 5.0; s += 0.25) {
        REQUIRE(agent_utility(s + h, 1.0, p) > agent_utility(s, 1.0, p));
    }
    for (double a = 0.1; a < 3.0; a += 0.2) {
        REQUIRE(agent_utility(2.0, a + h, p) < agent_utility(2.0, a, p));
    }
}

TEST_CASE("principal utility decreasing in premium for positive outcome") {
    const double x = 80.0;
    double prev = principal_utility(x, sharing(x, 0.0));
    for (double phi = 0.05; phi <= 1.0; phi += 0.05) {
        const double u = principal_utility(x, sharing(x, phi));
        REQUIRE(u < prev);
        prev = u;
    }
}

TEST_CASE("sharing homogeneous of degree one") {
    for (double x : {-3.0, 1.0, 7.5}) {
        for (double k : {0.5, 2.0, 10.0}) {
            REQUIRE(sharing(k * x, 0.3) == Catch::Approx(k * sharing(x, 0.3)).epsilon(1e-12));
        }
    }
}

TEST_CASE("parameter validation") {
    ActorParams bad;
    bad.eta = -1.0;
    REQUIRE_THROWS_AS(bad.validate(), std::domain_error);
    bad = ActorParams{};
    bad.disutility_coeff = 0.2;
    REQUIRE_THROWS_AS(bad.validate(), std::domain_error);
    EnvParams env;
    env.sigma = 0.0;
    REQUIRE_THROWS_AS(env.validate(), std::domain_error);
    Contract c{1.0, 1.5, false};
    REQUIRE_THROWS_AS(c.validate(), std::domain_error);
}
