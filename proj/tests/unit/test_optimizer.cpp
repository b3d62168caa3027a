#include "instances.hpp"

#include <doctest.h>

using namespace ecdc;
using namespace ecdc::testing;

TEST_SUITE("optimizer") {

TEST_CASE("threshold expansion") {
    ModelParams p;
    p.m2 = 2;
    p.m3 = 3;
    const ThresholdPolicy t = threshold_policy(p, 2, 1);
    CHECK(t.expanded.setup == std::vector<int>{0, 2, 2});
    CHECK(t.expanded.sleep[0] == std::vector<int>{2, 2, 2});
    CHECK(t.expanded.sleep[1] == std::vector<int>{0, 0});
    CHECK(threshold_policy(p, 1, 0).expanded == case1_policy(p));
    CHECK(threshold_policy(p, p.m3 + 1, p.m2).expanded == case2_policy(p));
    CHECK(case1_policy(p).setup == std::vector<int>{1, 2, 2});
    CHECK(case2_policy(p).setup == std::vector<int>{0, 0, 0});
    CHECK_THROWS_AS(threshold_policy(p, 0, 0), ValidationError);
    CHECK_THROWS_AS(threshold_policy(p, 1, 3), ValidationError);
    for (int t1 = 1; t1 <= p.m3 + 1; ++t1) {
        for (int t2 = 0; t2 <= p.m2; ++t2) CHECK_NOTHROW(validate_policy(p, threshold_policy(p, t1, t2).expanded));
    }
}

TEST_CASE("smallest instance: optimum equals the best of four direct evaluations") {
    std::mt19937_64 rng(51);
    for (int k = 0; k < 10; ++k) {
        const ModelParams p = random_params(rng, 1 + k % 3, 1, 1);
        const auto all = enumerate_policies(p);
        REQUIRE(all.size() == 4);
        double best = -INFINITY;
        for (const auto& d : all) best = std::max(best, policy_profit(p, d));
        const OptimizationReport o = enumerate_optimal(p);
        CHECK(o.best_eta == best);
        CHECK(o.gap >= -1e-9);
        CHECK(o.policies == 4);
    }
}

TEST_CASE("optimum dominates every threshold policy and ties resolve to the smallest rank") {
    std::mt19937_64 rng(52);
    for (int k = 0; k < 8; ++k) {
        const ModelParams p = random_params(rng, 1 + k % 2, 1 + k % 2, 2 + k % 2);
        const OptimizationReport o = enumerate_optimal(p);
        CHECK(o.gap >= -1e-9);
        const auto etas = enumerate_profits(p);
        for (std::uint64_t r = 0; r < o.best_rank; ++r) {
            CHECK(etas[r] < o.best_eta - kTieTolerance * std::max(1.0, std::abs(o.best_eta)));
        }
        for (int t1 = 1; t1 <= p.m3 + 1; ++t1) {
            for (int t2 = 0; t2 <= p.m2; ++t2) {
                CHECK(policy_profit(p, threshold_policy(p, t1, t2).expanded) <= o.threshold.eta + 1e-12);
            }
        }
    }
}

TEST_CASE("uniform cost shift leaves the optimum unchanged") {
    std::mt19937_64 rng(53);
    ModelParams p = random_params(rng, 2, 2, 2);
    const OptimizationReport a = enumerate_optimal(p);
    p.P1W += 0.75; // adds m1 * 0.75 * C1 to every state's cost
    const OptimizationReport b = enumerate_optimal(p);
    CHECK(a.best_rank == b.best_rank);
    CHECK(b.best_eta == doctest::Approx(a.best_eta - p.m1 * 0.75 * p.C1));
}

TEST_CASE("zero price: no setup is optimal") {
    std::mt19937_64 rng(54);
    for (int k = 0; k < 6; ++k) {
        ModelParams p = random_params(rng, 1, 1 + k % 2, 2);
        p.R = 0.0;
        const OptimizationReport o = enumerate_optimal(p);
        for (int v : o.best_policy.setup) CHECK(v == 0);
        CHECK(o.best_eta == doctest::Approx(policy_profit(p, case2_policy(p))));
        CHECK(o.threshold.theta1 == p.m3 + 1);
        CHECK(o.gap == doctest::Approx(0.0));
    }
}

TEST_CASE("price above the high critical price: optimum keeps the high-price setup") {
    // The optimum may still sleep every server at a state whose job then returns
    // to the buffer and triggers a larger setup; that is the only deviation seen.
    std::mt19937_64 rng(55);
    int shortcuts = 0;
    for (int k = 0; k < 4; ++k) {
        ModelParams p = random_params(rng, 1, 1 + k % 2, 2);
        p.R = critical_prices(p).RH + 1.0;
        const OptimizationReport o = enumerate_optimal(p);
        const Policy c1 = case1_policy(p);
        CHECK(o.best_policy.setup == c1.setup);
        CHECK(o.best_eta >= policy_profit(p, c1));
        CHECK(o.gap >= 0.0);
        CHECK(bang_bang_violations(p, o.best_policy).empty());
        for (int n2 = 1; n2 <= p.m2; ++n2) {
            for (int n3 = 0; n3 <= p.m3 - n2; ++n3) {
                if (o.best_policy.sleep_at(n2, n3) == c1.sleep_at(n2, n3)) continue;
                CHECK(o.best_policy.sleep_at(n2, n3) == p.m2);
                ++shortcuts;
            }
        }
    }
    CHECK(shortcuts == 1);
}

TEST_CASE("bang-bang check reports non-extreme entries verbatim") {
    ModelParams p;
    p.m2 = 2;
    p.m3 = 3;
    Policy d = case1_policy(p);
    CHECK(bang_bang_violations(p, d).empty());
    d.setup_at(3) = 1;
    d.sleep_at(2, 0) = 1;
    const auto v = bang_bang_violations(p, d);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == "setup(n3=3)=1 not in {0,2}");
    CHECK(v[1] == "sleep(n2=2,n3=0)=1 not in {0,2}");
}

TEST_CASE("trend classification") {
    CHECK(classify_trend({1.0, 2.0, 3.0}) == Trend::increasing);
    CHECK(classify_trend({3.0, 2.0, 2.0}) == Trend::decreasing);
    CHECK(classify_trend({1.0, 1.0 + 1e-13}) == Trend::flat);
    CHECK(classify_trend({1.0, 2.0, 1.5}) == Trend::mixed);
    CHECK(to_string(Trend::mixed) == "mixed");
    CHECK(to_string(PriceRegime::high) == "high");
}

TEST_CASE("linear law over the flat-activation region") {
    std::mt19937_64 rng(56);
    for (int k = 0; k < 5; ++k) {
        const ModelParams p = random_params(rng, 2, 2, 3);
        const MonotonicityReport m = monotonicity_report(p, random_policy(rng, p), PriceRegime::mid);
        REQUIRE(m.linear_law.size() == 1);
        CHECK(m.linear_law[0].pass);
        CHECK(m.linear_law[0].measured_slope == doctest::Approx(m.linear_law[0].predicted_slope).epsilon(1e-9));
    }
}

TEST_CASE("monotonicity sweeps cover every decision element") {
    ModelParams p;
    p.m2 = 2;
    p.m3 = 3;
    const MonotonicityReport m = monotonicity_report(p, case1_policy(p), PriceRegime::mid);
    // 3 setup elements and 3 + 2 sleep elements
    CHECK(m.sweeps.size() == 8);
    CHECK(m.sweeps[0].values == std::vector<int>{0, 1});
    CHECK(m.sweeps[3].values == std::vector<int>{1, 2});
    CHECK(m.sweeps[6].values == std::vector<int>{0, 1, 2});
}

TEST_CASE("closed-form constants by hand") {
    ModelParams p;
    p.m1 = 2;
    p.m2 = 3;
    p.m3 = 4;
    p.mu1 = 1.5;
    p.P1W = 1.0;
    p.P2W = 2.0;
    p.P2S = 0.5;
    p.C1 = 2.0;
    p.C2_1 = 0.1;
    p.C2_2 = 0.2;
    p.C3_1 = 0.3;
    p.C4 = 0.4;
    const ClosedFormConstants c = closed_form_constants(p);
    CHECK(c.c0 == doctest::Approx(3.0));
    CHECK(c.c1 == doctest::Approx(16.0));
    CHECK(c.c2 == doctest::Approx(16.2));
    CHECK(c.c3 == doctest::Approx(17.1));
    CHECK(c.c4 == doctest::Approx(17.4));
    CHECK(c.c5_base == doctest::Approx(18.0));
}

TEST_CASE("closed-form profits match the direct profit") {
    std::mt19937_64 rng(57);
    for (int k = 0; k < 20; ++k) {
        const ModelParams p = random_instance(rng);
        for (ProfitCase pc : {ProfitCase::high, ProfitCase::low}) {
            const Policy d = pc == ProfitCase::high ? case1_policy(p) : case2_policy(p);
            const GeneratorMatrix G = build_generator(p, d);
            const Vector pi = stationary(G);
            const double eta = average_profit(pi, reward_vector(p, d, G.space).f());
            CHECK(rel_diff(closed_form_profit(p, pi, pc), eta) <= 1e-9);
        }
    }
}

TEST_CASE("printed closed form differs from the reward definition by the sleeping-power baseline") {
    std::mt19937_64 rng(58);
    ModelParams p = random_params(rng, 1, 2, 3);
    p.C4 = 0.0;
    p.C5 = 0.0;
    const Policy d = case2_policy(p);
    const Vector pi = stationary(build_generator(p, d));
    const double gap = closed_form_profit(p, pi, ProfitCase::low, ClosedFormVariant::consistent) -
                       closed_form_profit(p, pi, ProfitCase::low, ClosedFormVariant::printed);
    CHECK(gap == doctest::Approx(p.m2 * (p.P2W - p.P2S) * p.C1));
}

} // TEST_SUITE
