#pragma once

#include "ecdc/generator.hpp"

#include <cstdint>
#include <string>

namespace ecdc {

/// Identifier of the pseudo-random engine used by simulate().
inline constexpr const char* kSimRngAlgorithm = "mt19937_64";

struct SimResult {
    double etaHat = 0.0;
    double stderr_ = 0.0;      ///< standard error of etaHat
    double horizon = 0.0;      ///< simulated time per replication
    std::uint64_t jumps = 0;   ///< transitions over all replications
    std::uint64_t seed = 0;
    int reps = 0;
    std::string rng = kSimRngAlgorithm;
    Vector occupancy;          ///< time fraction per state after burn-in, averaged over reps
};

/// Simulates the jump chain of Q^(d) from (0,0,0) and time-averages f.
/// The first 1% of each replication is discarded. The standard error comes
/// from the spread across replications, or from 20 batch means when reps == 1.
SimResult simulate(const ModelParams& p, const Policy& d, double horizon, std::uint64_t seed, int reps);

} // namespace ecdc
