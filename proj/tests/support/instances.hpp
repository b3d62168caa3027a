#pragma once

#include "ecdc/ecdc.hpp"

#include <cstdint>
#include <random>

namespace ecdc::testing {

/// Random admissible parameters of the given size. Costs are drawn so that
/// every constraint of validate_params holds.
inline ModelParams random_params(std::mt19937_64& rng, int m1, int m2, int m3) {
    std::uniform_real_distribution<double> rate(0.5, 2.0), cost(0.0, 1.0), price(0.0, 5.0);
    ModelParams p;
    p.m1 = m1;
    p.m2 = m2;
    p.m3 = m3;
    p.lambda = rate(rng);
    p.mu2 = rate(rng);
    p.mu1 = p.mu2 * rate(rng) * 1.5;
    if (p.mu1 < p.mu2) p.mu1 = p.mu2;
    p.P1W = rate(rng);
    p.P2S = 0.1 + 0.2 * cost(rng);
    p.P2W = p.P2S + rate(rng);
    p.C1 = rate(rng);
    p.C2_1 = cost(rng);
    p.C2_2 = p.C2_1 + cost(rng);
    p.C2_3 = cost(rng);
    p.C3_1 = cost(rng);
    p.C3_2 = cost(rng);
    p.C4 = cost(rng);
    p.C5 = cost(rng);
    p.R = price(rng);
    return p;
}

/// Random size with m1 <= 3, m2 <= 3 and m2 <= m3 <= max_m3.
inline ModelParams random_instance(std::mt19937_64& rng, int max_m3 = 5) {
    std::uniform_int_distribution<int> m1d(1, 3), m2d(1, 3);
    const int m2 = m2d(rng);
    std::uniform_int_distribution<int> m3d(m2, std::max(m2, max_m3));
    const int m1 = m1d(rng);
    const int m3 = m3d(rng);
    return random_params(rng, m1, m2, m3);
}

/// Uniformly drawn admissible policy.
inline Policy random_policy(std::mt19937_64& rng, const ModelParams& p) {
    const EntryBounds b = policy_entry_bounds(p);
    std::vector<int> flat;
    for (std::size_t i = 0; i < b.lo.size(); ++i) {
        std::uniform_int_distribution<int> d(b.lo[i], b.hi[i]);
        flat.push_back(d(rng));
    }
    Policy d = minimal_policy(p);
    std::size_t k = 0;
    for (int n3 = 1; n3 <= p.m3; ++n3) d.setup_at(n3) = flat[k++];
    for (int n2 = 1; n2 <= p.m2; ++n2) {
        for (int n3 = 0; n3 <= p.m3 - n2; ++n3) d.sleep_at(n2, n3) = flat[k++];
    }
    return d;
}

/// Relative difference with a floor of 1 on the scale.
inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

} // namespace ecdc::testing
