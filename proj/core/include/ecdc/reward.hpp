#pragma once

#include "ecdc/generator.hpp"

namespace ecdc {

/// Per-state profit rates f = R*A - B.
struct RewardVector {
    Vector A; ///< throughput coefficient of the service price
    Vector B; ///< cost rate
    double R = 0.0;

    Vector f() const { return R * A - B; }
    Vector at_price(double price) const { return price * A - B; }
};

RewardVector reward_vector(const ModelParams& p, const Policy& d, const StateSpace& space);
RewardVector reward_vector(const ModelParams& p, const Policy& d);

/// Single state profit rate.
double reward_at(const ModelParams& p, const Policy& d, const State& s);

/// eta = pi . f; throws ValidationError on a dimension mismatch.
double average_profit(const Vector& pi, const Vector& f);

/// eta(R) = R*D - F.
struct ProfitCoefficients {
    double D = 0.0;
    double F = 0.0;
    double eta(double R) const { return R * D - F; }
};

ProfitCoefficients profit_coefficients(const RewardVector& f, const Vector& pi);
ProfitCoefficients profit_coefficients(const ModelParams& p, const Policy& d, const Vector& pi);

} // namespace ecdc
