#pragma once

#include "ecdc/potential.hpp"

#include <string>
#include <vector>

namespace ecdc {

/// Threshold pair and its expanded policy.
///   setup: d^W(n3) = 0 for n3 < theta1, else min(n3, m2)
///   sleep: d^S(n2, .) = m2 for n2 <= theta2, else m2 - n2
struct ThresholdPolicy {
    int theta1 = 1;
    int theta2 = 0;
    Policy expanded;
};

/// theta1 in 1..m3+1 (m3+1 means no setup), theta2 in 0..m2.
ThresholdPolicy threshold_policy(const ModelParams& p, int theta1, int theta2);

/// Policy displayed for high prices: setup min(n3,m2), only idle servers asleep.
Policy case1_policy(const ModelParams& p);
/// Policy displayed for low prices: no setup, every Group 2 server asleep.
Policy case2_policy(const ModelParams& p);

struct ThresholdResult {
    int theta1 = 1;
    int theta2 = 0;
    double eta = 0.0;
};

/// Relative tolerance under which two profits count as tied.
constexpr double kTieTolerance = 1e-10;

/// Grid argmax over (theta1, theta2); ties go to the smallest theta1, then theta2.
ThresholdResult threshold_search(const ModelParams& p);

struct OptimizationReport {
    Policy best_policy;
    double best_eta = 0.0;
    std::uint64_t best_rank = 0;
    std::uint64_t policies = 0;
    ThresholdResult threshold;
    double gap = 0.0; ///< best_eta - threshold.eta
};

/// Exhaustive argmax; ties (within kTieTolerance) go to the lexicographically smallest policy.
OptimizationReport enumerate_optimal(const ModelParams& p, std::uint64_t cap = kDefaultEnumerationCap);

/// Profit of every policy in enumeration order.
std::vector<double> enumerate_profits(const ModelParams& p, std::uint64_t cap = kDefaultEnumerationCap);

struct BangBangReport {
    OptimizationReport optimum;
    std::vector<std::string> violations; ///< one line per non-extreme element

    bool ok() const { return violations.empty(); }
};

/// Checks that the enumerated optimum uses only extreme admissible values.
BangBangReport bang_bang_check(const ModelParams& p, std::uint64_t cap = kDefaultEnumerationCap);
/// Extremality check of a given policy.
std::vector<std::string> bang_bang_violations(const ModelParams& p, const Policy& d);

enum class PriceRegime { high, low, mid };

std::string to_string(PriceRegime r);

/// Direction of a profit sequence as a decision element increases.
enum class Trend { flat, increasing, decreasing, mixed };

std::string to_string(Trend t);

/// Trend of consecutive differences with a tolerance for "flat" steps.
Trend classify_trend(const std::vector<double>& values, double tol = 1e-10);

struct ElementSweep {
    std::string element; ///< e.g. "setup(n3=2)" or "sleep(n2=1,n3=0)"
    std::vector<int> values;
    std::vector<double> etas;
    Trend trend = Trend::flat;
    bool pass = true;
    std::string note;
};

struct LinearLawCheck {
    int n3 = 0;
    double measured_slope = 0.0;
    double predicted_slope = 0.0;
    double fit_residual = 0.0;
    bool pass = true;
};

struct MonotonicityReport {
    PriceRegime regime = PriceRegime::mid;
    std::vector<ElementSweep> sweeps;
    std::vector<LinearLawCheck> linear_law;

    bool ok() const;
};

/// Sweeps every decision element of d over its admissible values, others fixed.
/// setup elements sweep 0..min(n3,m2); sleep elements sweep the sleeping count.
/// high: setup nondecreasing and sleep nonincreasing; low: reversed;
/// mid: each element monotone in one direction. Also checks the linear law
/// on the flat-activation region d^W in {n3..m2}.
MonotonicityReport monotonicity_report(const ModelParams& p, const Policy& d, PriceRegime regime);

/// Slope of eta in d^W(n3) over {n3..m2} predicted by the linear law.
double linear_law_slope(const ModelParams& p, const Vector& pi, int n3);

/// Constants of the closed-form profit.
struct ClosedFormConstants {
    double c0, c1, c2, c3, c4;
    double c5_base; ///< c5 without the lost-job term
};

ClosedFormConstants closed_form_constants(const ModelParams& p);

enum class ProfitCase { high, low };
enum class ClosedFormVariant {
    printed,   ///< constants and bracket terms exactly as displayed
    consistent ///< bracket terms rebuilt from the per-state reward definition
};

/// Closed-form long-run average profit of the high-price or low-price displayed policy.
double closed_form_profit(const ModelParams& p, const Vector& pi, ProfitCase c,
                          ClosedFormVariant variant = ClosedFormVariant::consistent);

} // namespace ecdc
