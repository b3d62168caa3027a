#pragma once

#include "ecdc/reward.hpp"
#include "ecdc/stationary.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace ecdc {

/// Generator with its first row and column removed.
Matrix reduced_generator(const Matrix& Q);

/// Potentials anchored at g(0,0,0) = 1.
struct PotentialSolution {
    Vector g;
    double eta = 0.0;
    double residual = 0.0; ///< || Q g - (eta e - f) ||_inf
};

/// Throws NumericalError when the reduced generator is singular or the
/// Poisson residual exceeds 1e-8 * max(1, ||f||_inf).
PotentialSolution solve_potential(const Matrix& Q, const Vector& pi, const Vector& f);
PotentialSolution solve_potential(const ModelParams& p, const Policy& d, const Vector& pi,
                                  const Vector& f);

/// Everything computed for one policy at the price stored in the params.
struct PolicyEvaluation {
    GeneratorMatrix generator;
    Vector pi;
    RewardVector reward;
    double eta = 0.0;
    PotentialSolution potential;
};

PolicyEvaluation evaluate_policy(const ModelParams& p, const Policy& d,
                                 StationaryMethod method = StationaryMethod::direct);

/// Long-run average profit only (no potentials).
double policy_profit(const ModelParams& p, const Policy& d,
                     StationaryMethod method = StationaryMethod::direct);

/// g(R) = R*W - V for fixed everything-but-price.
struct AffinePotential {
    Vector W;
    Vector V;
    double check_error = 0.0; ///< relative error of the reconstruction at R = 2

    Vector at(double R) const { return R * W - V; }
};

AffinePotential affine_decomposition(const ModelParams& p, const Policy& d);
AffinePotential affine_decomposition(const GeneratorMatrix& G, const RewardVector& rw, const Vector& pi);

/// G(n, n') = g(n') - g(n).
double realization_factor(const StateSpace& space, const Vector& g, const State& n, const State& np);

/// Rates weighting the target potentials in a composite factor.
enum class FactorRates {
    generator, ///< the activation rate of the assembled generator at the source state
    printed,   ///< m1*mu1 + i*mu2 for a target with i busy Group 2 servers
};

/// G1 = g(m1,i1,n3-i1) - g(m1,i2,n3-i2), G2 = g(m1,0,n3) - g(m1,i1,n3-i1),
/// G3 = g(m1,0,n3) - g(m1,i2,n3-i2).
struct FactorParts {
    double G1 = 0.0;
    double G2 = 0.0;
    double G3 = 0.0;
    double beta = 0.0;
};

FactorParts setup_factor_parts(const ModelParams& p, const StateSpace& space, const Vector& g, int n3,
                               int i1, int i2);
FactorParts sleep_factor_parts(const ModelParams& p, const StateSpace& space, const Vector& g, int n2,
                               int n3, int j1, int j2);

/// Composite setup factor: bracket of the profit difference when d^W(n3)
/// changes from i2 to i1, evaluated with the potentials g of the i2 policy.
/// With FactorRates::printed this is m1mu1 G1 - i1 mu2 (G2+b1) + i2 mu2 (G3+b1).
double setup_factor(const ModelParams& p, const StateSpace& space, const Vector& g, int n3, int i1,
                    int i2, FactorRates rates = FactorRates::generator);

/// Composite sleep factor: bracket of the profit difference when the number of
/// working Group 2 servers at (m1,n2,n3) changes from j1 to j2 (j2 < j1).
/// With FactorRates::printed this is m1mu1 G1 + j1 mu2 (G2+b2) - j2 mu2 (G3+b2).
double sleep_factor(const ModelParams& p, const StateSpace& space, const Vector& g, int n2, int n3,
                    int j1, int j2, FactorRates rates = FactorRates::generator);

/// factor(R) = slope * R + intercept; root is the critical price.
struct CriticalPrice {
    double slope = 0.0;
    double intercept = 0.0;
    bool defined = false; ///< false when the slope vanishes (sign independent of R)
    double value = 0.0;

    double factor_at(double R) const { return slope * R + intercept; }
};

CriticalPrice critical_price_setup(const ModelParams& p, const StateSpace& space, const AffinePotential& a,
                                   int n3, int i1, int i2, FactorRates rates = FactorRates::generator);
CriticalPrice critical_price_sleep(const ModelParams& p, const StateSpace& space, const AffinePotential& a,
                                   int n2, int n3, int j1, int j2,
                                   FactorRates rates = FactorRates::generator);

CriticalPrice critical_price_setup(const ModelParams& p, const Policy& d, int n3, int i1, int i2,
                                   FactorRates rates = FactorRates::generator);
CriticalPrice critical_price_sleep(const ModelParams& p, const Policy& d, int n2, int n3, int j1, int j2,
                                   FactorRates rates = FactorRates::generator);

struct FullScope {};
struct SampledScope {
    std::uint64_t k = 100;
    std::uint64_t seed = 1;
};
using PriceScope = std::variant<FullScope, SampledScope>;

struct CriticalPrices {
    double RHW = 0.0, RLW = 0.0, RHS = 0.0, RLS = 0.0, RH = 0.0, RL = 0.0;
    std::uint64_t policies = 0;     ///< policies visited
    std::uint64_t setup_pairs = 0;  ///< defined setup critical prices
    std::uint64_t sleep_pairs = 0;  ///< defined sleep critical prices
    std::uint64_t undefined = 0;    ///< pairs with a vanishing slope
};

/// Extremes of every defined per-policy, per-pair critical price in the scope.
/// Full scope throws EnumerationCapError above `cap`.
CriticalPrices critical_prices(const ModelParams& p, const PriceScope& scope = FullScope{},
                               std::uint64_t cap = kDefaultEnumerationCap, FactorRates rates = FactorRates::generator);

/// Right-hand side of the performance difference identity:
/// pi' [ (Q' - Q) g + (f' - f) ].
double performance_difference(const ModelParams& p, const Policy& d, const Policy& dp);
double performance_difference(const PolicyEvaluation& e, const PolicyEvaluation& ep);

} // namespace ecdc
