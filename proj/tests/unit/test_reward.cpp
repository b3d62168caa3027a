#include "instances.hpp"

#include <doctest.h>

using namespace ecdc;
using namespace ecdc::testing;

namespace {

ModelParams hand_params() {
    ModelParams p;
    p.lambda = 1.0;
    p.mu1 = 2.0;
    p.mu2 = 1.0;
    p.m1 = 1;
    p.m2 = 2;
    p.m3 = 3;
    p.P1W = 1.0;
    p.P2W = 2.0;
    p.P2S = 0.5;
    p.C1 = 1.0;
    p.C2_1 = 0.1;
    p.C2_2 = 0.2;
    p.C2_3 = 0.3;
    p.C3_1 = 0.4;
    p.C3_2 = 0.5;
    p.C4 = 0.6;
    p.C5 = 0.7;
    p.R = 3.0;
    return p;
}

} // namespace

TEST_SUITE("reward") {

TEST_CASE("empty-system reward") {
    ModelParams p;
    p.m1 = 2;
    p.m2 = 2;
    p.m3 = 2;
    p.P1W = 1.0;
    p.P2S = 0.2;
    p.P2W = 1.0;
    p.C1 = 1.0;
    CHECK(reward_at(p, minimal_policy(p), {0, 0, 0, 0}) == doctest::Approx(-2.4));
}

TEST_CASE("hand-evaluated rewards, one state per level type") {
    const ModelParams p = hand_params();
    Policy d = minimal_policy(p);
    d.setup_at(3) = 2;
    d.sleep_at(2, 0) = 1;
    CHECK(reward_at(p, d, {1, 0, 0, 0}) == doctest::Approx(3.9));
    CHECK(reward_at(p, d, {1, 0, 3, 1}) == doctest::Approx(-1.5));
    CHECK(reward_at(p, d, {1, 2, 0, 3}) == doctest::Approx(3.3));
    CHECK(reward_at(p, d, {1, 2, 3, 4}) == doctest::Approx(3.7));
}

TEST_CASE("Group 1 increments and policy-independent blocks") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 20; ++k) {
        const ModelParams p = random_instance(rng);
        const StateSpace S(p);
        const Vector f1 = reward_vector(p, random_policy(rng, p), S).f();
        const Vector f2 = reward_vector(p, random_policy(rng, p), S).f();
        for (std::size_t i = 0; i < S.size(); ++i) {
            const int level = S.at(i).level;
            if (level == 0 || level == p.m2 + 2) CHECK(f1(i) == f2(i));
        }
        for (int n1 = 1; n1 <= p.m1; ++n1) {
            CHECK(f1(n1) - f1(n1 - 1) == doctest::Approx(p.R * p.mu1 - p.C2_1));
        }
    }
}

TEST_CASE("no-setup buffer states pay sleeping power only") {
    const ModelParams p = hand_params();
    const Policy d = minimal_policy(p);
    // (1,0,2): A = m1 mu1, B = (m1 P1W + m2 P2S) C1 + m1 C2_1 + 2 C2_3
    CHECK(reward_at(p, d, {1, 0, 2, 1}) == doctest::Approx(3.0 * 2.0 - (1.0 + 1.0 + 0.1 + 0.6)));
}

TEST_CASE("profit is affine in the price") {
    std::mt19937_64 rng(22);
    for (int k = 0; k < 20; ++k) {
        ModelParams p = random_instance(rng);
        const Policy d = random_policy(rng, p);
        const GeneratorMatrix G = build_generator(p, d);
        const Vector pi = stationary(G);
        const RewardVector rw = reward_vector(p, d, G.space);
        const ProfitCoefficients c = profit_coefficients(rw, pi);
        CHECK(c.D > 0.0);
        CHECK(c.F > 0.0);
        const double e0 = average_profit(pi, rw.at_price(0.0));
        const double e1 = average_profit(pi, rw.at_price(1.0));
        const double e7 = average_profit(pi, rw.at_price(7.0));
        CHECK(rel_diff(e0 + 7.0 * (e1 - e0), e7) <= 1e-12);
        CHECK(rel_diff(c.eta(p.R), average_profit(pi, rw.f())) <= 1e-12);
        CHECK(c.eta(0.0) == doctest::Approx(-c.F));
    }
}

TEST_CASE("average profit basics") {
    const Vector pi = Vector::Constant(4, 0.25);
    CHECK(average_profit(pi, Vector::Constant(4, 3.5)) == doctest::Approx(3.5));
    CHECK_THROWS_AS(average_profit(pi, Vector::Constant(3, 1.0)), ValidationError);
}

} // TEST_SUITE
