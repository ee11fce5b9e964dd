#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hasim/beliefs.hpp"
#include "hasim/numeric.hpp"

using namespace hasim;

namespace {
ActorParams params() { return ActorParams{}; }  // rho 50, eta 0.5, Ubar 0

// brute-force argmax of the predicted utility over an action grid
double grid_best_response(double premium, double prediction, const ActorParams& p,
                          double step = 1e-4, double hi = 6.0) {
    double best_a = 0.0, best_u = predicted_utility(premium, prediction, 0.0, p);
    for (double a = step; a <= hi; a += step) {
        const double u = predicted_utility(premium, prediction, a, p);
        if (u > best_u) { best_u = u; best_a = a; }
    }
    return best_a;
}
}  // namespace

TEST_CASE("memory record and eviction") {
    BeliefMemory m1(1);
    m1.record(5.0);
    REQUIRE(m1.size() == 1);
    REQUIRE(m1.newest() == 5.0);
    m1.record(7.0);
    REQUIRE(m1.size() == 1);
    REQUIRE(m1.newest() == 7.0);

    BeliefMemory minf;  // unbounded
    minf.record(3.0);
    minf.record(5.0);
    minf.record(7.0);
    REQUIRE(minf.size() == 3);
    REQUIRE(minf.newest() == 7.0);
}

TEST_CASE("prediction is the plain mean with a zero prior") {
    BeliefMemory m;
    REQUIRE(m.predict() == 0.0);
    m.record(2.0);
    m.record(4.0);
    m.record(6.0);
    REQUIRE(m.predict() == Catch::Approx(4.0));
    BeliefMemory one;
    one.record(5.0);
    REQUIRE(one.predict() == 5.0);
}

TEST_CASE("memory standard deviation uses the sample convention") {
    BeliefMemory m;
    m.record(4.0);
    m.record(4.0);
    m.record(4.0);
    REQUIRE(m.stddev() == 0.0);
    BeliefMemory two;
    two.record(2.0);
    two.record(4.0);
    REQUIRE(two.stddev() == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
    BeliefMemory single;
    single.record(5.0);
    REQUIRE(single.stddev() == 0.0);
}

TEST_CASE("theta estimation") {
    REQUIRE(estimate_theta(55.0, 1.0, 50.0) == 5.0);
    REQUIRE(estimate_theta(0.0, 0.0, 50.0) == 0.0);
    REQUIRE(estimate_theta(40.0, 1.0, 50.0) == -10.0);
}

TEST_CASE("estimator is exact when the target is executed") {
    for (double a : {0.0, 0.5, 1.9}) {
        for (double th : {-3.0, 0.0, 8.25}) {
            REQUIRE(estimate_theta(outcome(a, 50.0, th), a, 50.0) ==
                    Catch::Approx(th).margin(1e-12));
        }
    }
}

TEST_CASE("long unbounded memory concentrates around the true mean") {
    const double sigma = 4.0;
    int ok = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        std::mt19937_64 gen(1234 + trial);
        std::normal_distribution<double> nd(0.0, sigma);
        BeliefMemory m;  // m = infinity
        for (int i = 0; i < 1000; ++i) m.record(nd(gen));
        if (std::abs(m.predict()) < 4.0 * sigma / std::sqrt(1000.0)) ++ok;
    }
    REQUIRE(ok >= static_cast<int>(0.99 * trials));
}

TEST_CASE("zero premium collapses the feasible interval to idleness") {
    const auto sp = predicted_action_space(0.0, 0.0, params());
    REQUIRE(sp.has_value());
    REQUIRE(sp->lower == 0.0);
    REQUIRE(sp->upper == 0.0);
}

TEST_CASE("upper boundary matches the brute-force argmax") {
    const auto p = params();
    for (double phi : {0.01, 0.02, 0.1, 0.5, 1.0}) {
        for (double pred : {-20.0, 0.0, 15.0}) {
            const auto sp = predicted_action_space(pred, phi, p);
            REQUIRE(sp.has_value());
            const double oracle = grid_best_response(phi, pred, p);
            REQUIRE(sp->upper == Catch::Approx(oracle).margin(2e-4));
            REQUIRE(sp->lower <= sp->upper);
        }
    }
}

TEST_CASE("upper boundary is a stationary point") {
    const auto p = params();
    const double h = 1e-5;
    for (double phi : {0.02, 0.3, 1.0}) {
        for (double pred : {-10.0, 0.0, 30.0}) {
            const auto sp = predicted_action_space(pred, phi, p);
            REQUIRE(sp.has_value());
            const double d = (predicted_utility(phi, pred, sp->upper + h, p) -
                              predicted_utility(phi, pred, sp->upper - h, p)) /
                             (2.0 * h);
            REQUIRE(std::abs(d) < 1e-3);
        }
    }
}

TEST_CASE("more optimistic predictions lower the upper boundary") {
    const auto p = params();
    for (double phi : {0.02, 0.2, 0.8}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double pred = -60.0; pred <= 60.0; pred += 10.0) {
            const auto sp = predicted_action_space(pred, phi, p);
            REQUIRE(sp.has_value());
            REQUIRE(sp->upper <= prev + 1e-12);
            prev = sp->upper;
        }
    }
}

TEST_CASE("participation trims the lower boundary under pessimism") {
    const auto p = params();
    // with a negative predicted environment, idleness has negative utility
    const auto sp = predicted_action_space(-40.0, 0.05, p);
    REQUIRE(sp.has_value());
    REQUIRE(sp->lower > 0.0);
    REQUIRE(predicted_utility(0.05, -40.0, sp->lower, p) ==
            Catch::Approx(0.0).margin(1e-5));
    // slightly below the boundary the constraint is violated
    REQUIRE(predicted_utility(0.05, -40.0, sp->lower * 0.9, p) < 0.0);
}

TEST_CASE("hopeless contracts come back empty") {
    // deeply pessimistic prediction: no action clears the reservation level
    const auto sp = predicted_action_space(-250.0, 0.02, params());
    REQUIRE_FALSE(sp.has_value());
}

TEST_CASE("best response against golden-section oracle") {
    const auto p = params();
    for (double phi : {0.005, 0.02, 0.15, 0.7}) {
        for (double pred : {-35.0, 0.0, 25.0}) {
            const double a = best_response(phi, pred, p);
            const double gs = golden_section_max(
                [&](double x) { return predicted_utility(phi, pred, x, p); }, 0.0,
                a * 2.0 + 1.0, 1e-9);
            REQUIRE(a == Catch::Approx(gs).margin(1e-6));
        }
    }
}
