#include "instances.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace ecdc;
using namespace ecdc::testing;

TEST_SUITE("generator") {

TEST_CASE("assembled generator equals the event-by-event oracle") {
    std::mt19937_64 rng(101);
    for (int k = 0; k < 60; ++k) {
        const ModelParams p = random_instance(rng);
        const Policy d = random_policy(rng, p);
        const GeneratorMatrix G = build_generator(p, d);
        const Matrix O = oracle_generator(p, d);
        const double scale = O.cwiseAbs().maxCoeff();
        CAPTURE(to_string(d));
        CHECK((G.Q - O).cwiseAbs().maxCoeff() <= 1e-14 * scale);
    }
}

TEST_CASE("first-row, Group 1 and Group 2 departure entries") {
    ModelParams p;
    p.lambda = 1.3;
    p.mu1 = 2.1;
    p.mu2 = 0.7;
    p.m1 = 2;
    p.m2 = 2;
    p.m3 = 3;
    const Policy d = case1_policy(p);
    const GeneratorMatrix G = build_generator(p, d);
    const StateSpace& S = G.space;
    CHECK(G.Q(0, S.index(1, 0, 0)) == doctest::Approx(1.3));
    CHECK(G.Q(0, 0) == doctest::Approx(-1.3));
    CHECK(G.Q(S.index(2, 0, 1), S.index(2, 0, 0)) == doctest::Approx(2 * 2.1));
    CHECK(G.Q(S.index(2, 1, 0), S.index(2, 0, 0)) == doctest::Approx(0.7));
    CHECK(G.Q(S.index(2, 2, 3), S.index(2, 2, 2)) == doctest::Approx(2 * 2.1 + 2 * 0.7));
}

TEST_CASE("setup rate families") {
    ModelParams p;
    p.lambda = 1.0;
    p.mu1 = 2.0;
    p.mu2 = 0.5;
    p.m1 = 1;
    p.m2 = 2;
    p.m3 = 3;
    Policy d = minimal_policy(p);
    const double full = 1.0 + 2.0 + 0.5;
    d.setup_at(1) = 1;
    CHECK(setup_rates(p, d, 1, 1).a1 == doctest::Approx(full));
    d.setup_at(1) = 2; // more than n3: the indicator d >= k1 stays on
    CHECK(setup_rates(p, d, 1, 1).a1 == doctest::Approx(full));
    d.setup_at(2) = 2;
    CHECK(setup_rates(p, d, 1, 2).a2 == 0.0);
    CHECK(setup_rates(p, d, 2, 2).a2 == doctest::Approx(full));
    d.setup_at(3) = 1;
    CHECK(setup_rates(p, d, 1, 3).a3 == doctest::Approx(1.0));
    CHECK(setup_rates(p, d, 2, 3).a3 == 0.0);
    CHECK_THROWS_AS(setup_rates(p, d, 3, 3), ValidationError);
    CHECK(setup_activation_rate(p, 2) == doctest::Approx(full));
    CHECK(setup_activation_rate(p, 3) == doctest::Approx(1.0));
}

TEST_CASE("sleep rate families") {
    ModelParams p;
    p.lambda = 1.0;
    p.mu1 = 2.0;
    p.mu2 = 0.5;
    p.m1 = 1;
    p.m2 = 2;
    p.m3 = 3;
    Policy d = minimal_policy(p);
    d.sleep_at(1, 1) = 2; // k5 = 0 working after the decision
    const SleepRates on = sleep_rates(p, d, 1, 1, 0);
    CHECK(on[0] == doctest::Approx(2.0 + 2 * 0.5));
    CHECK(on[1] == doctest::Approx(1.0 + 2.0 + 2 * 0.5));
    CHECK(on[2] == doctest::Approx(1.0));
    CHECK(on[3] == doctest::Approx(2.0));
    CHECK(on[4] == doctest::Approx(1.0 + 2.0));
    CHECK(on[5] == doctest::Approx(1.0 + 2.0 + 1 * 0.5));
    const SleepRates off = sleep_rates(p, d, 1, 1, 1);
    for (int i = 0; i < 6; ++i) CHECK(off[i] == 0.0);

    CHECK(sleep_rate_family(p, 1, 0) == 0);
    CHECK(sleep_rate_family(p, 1, 1) == 1);
    CHECK(sleep_rate_family(p, 1, 2) == 2);
    CHECK(sleep_rate_family(p, 2, 0) == 3);
    CHECK(sleep_rate_family(p, 2, 1) == 5);
    p.m3 = 2; // single-state level: the last-state family wins
    CHECK(sleep_rate_family(p, 2, 0) == 5);
}

TEST_CASE("generator report on random policies") {
    std::mt19937_64 rng(202);
    for (int k = 0; k < 40; ++k) {
        const ModelParams p = random_instance(rng);
        const Policy d = random_policy(rng, p);
        const GeneratorMatrix G = build_generator(p, d);
        const GeneratorReport r = verify_generator(p, d, G);
        CHECK(r.rows_conservative());
        CHECK(r.negative_off_diagonals == 0);
        CHECK(r.pattern_violations.empty());
        // Only the buffer-full sleep display on the top sleep level may disagree.
        for (const auto& m : r.mismatches) CHECK(m.formula == "b(5)");
    }
}

TEST_CASE("block pattern") {
    const int m2 = 3;
    CHECK(block_in_pattern(m2, 0, 1));
    CHECK_FALSE(block_in_pattern(m2, 0, 2));
    CHECK(block_in_pattern(m2, 1, m2 + 1));
    CHECK_FALSE(block_in_pattern(m2, 1, m2 + 2));
    CHECK(block_in_pattern(m2, 2, 0));
    CHECK_FALSE(block_in_pattern(m2, 3, 0));
    CHECK(block_in_pattern(m2, 4, 1));
    CHECK_FALSE(block_in_pattern(m2, 3, 4));
    CHECK(block_in_pattern(m2, m2 + 1, m2 + 2));
    CHECK(block_in_pattern(m2, m2 + 2, m2 + 1));
    CHECK_FALSE(block_in_pattern(m2, m2 + 2, m2));
}

TEST_CASE("levels above the buffer level are unreachable without setup") {
    std::mt19937_64 rng(303);
    const ModelParams p = random_params(rng, 2, 2, 3);
    const GeneratorMatrix G = build_generator(p, case2_policy(p));
    const auto seen = reachable_from(G.Q, 0);
    for (std::size_t i = 0; i < G.dim(); ++i) CHECK(seen[i] == (G.space.at(i).level <= 1));
    CHECK_FALSE(verify_generator(p, case2_policy(p), G).irreducible);
    CHECK(verify_generator(p, case1_policy(p), build_generator(p, case1_policy(p))).irreducible);
}

TEST_CASE("strongly connected components of a small pattern") {
    Matrix Q(4, 4);
    Q << -1, 1, 0, 0,  //
        1, -2, 1, 0,   //
        0, 0, -1, 1,   //
        0, 0, 1, -1;
    std::vector<int> comp;
    CHECK(strongly_connected_components(Q, &comp) == 2);
    CHECK(comp[0] == comp[1]);
    CHECK(comp[2] == comp[3]);
    CHECK(comp[0] != comp[2]);
}

TEST_CASE("interchangeable setup entries give identical generators") {
    std::mt19937_64 rng(404);
    for (int k = 0; k < 30; ++k) {
        const ModelParams p = random_params(rng, 1 + k % 3, 3, 4);
        Policy a = random_policy(rng, p);
        Policy b = a;
        for (int n3 = 1; n3 <= p.m3; ++n3) {
            if (n3 <= p.m2) {
                std::uniform_int_distribution<int> pick(n3, p.m2);
                if (a.setup_at(n3) >= n3) b.setup_at(n3) = pick(rng);
            }
        }
        CHECK(build_generator(p, a).Q == build_generator(p, b).Q);
    }
}

TEST_CASE("triplet dump lists every nonzero entry") {
    ModelParams p;
    const GeneratorMatrix G = build_generator(p, case1_policy(p));
    std::ostringstream os;
    write_triplets(os, G);
    std::istringstream in(os.str());
    int rows = 0;
    std::size_t i, j;
    double v;
    while (in >> i >> j >> v) {
        CHECK(G.Q(i, j) == v);
        ++rows;
    }
    CHECK(rows == (G.Q.array() != 0.0).count());
}

} // TEST_SUITE
