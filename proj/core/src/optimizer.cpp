#include "ecdc/optimizer.hpp"

#include "ecdc/errors.hpp"
#include "ecdc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ecdc {

ThresholdPolicy threshold_policy(const ModelParams& p, int theta1, int theta2) {
    validate_params(p);
    if (theta1 < 1 || theta1 > p.m3 + 1) {
        throw ValidationError("theta1=" + std::to_string(theta1) + " outside [1," + std::to_string(p.m3 + 1) + "]");
    }
    if (theta2 < 0 || theta2 > p.m2) {
        throw ValidationError("theta2=" + std::to_string(theta2) + " outside [0," + std::to_string(p.m2) + "]");
    }
    ThresholdPolicy t{theta1, theta2, minimal_policy(p)};
    for (int n3 = 1; n3 <= p.m3; ++n3) t.expanded.setup_at(n3) = n3 < theta1 ? 0 : std::min(n3, p.m2);
    for (int n2 = 1; n2 <= p.m2; ++n2) {
        for (int n3 = 0; n3 <= p.m3 - n2; ++n3) t.expanded.sleep_at(n2, n3) = n2 <= theta2 ? p.m2 : p.m2 - n2;
    }
    return t;
}

Policy case1_policy(const ModelParams& p) { return threshold_policy(p, 1, 0).expanded; }
Policy case2_policy(const ModelParams& p) { return threshold_policy(p, p.m3 + 1, p.m2).expanded; }

namespace {

bool beats(double candidate, double incumbent) {
    return candidate > incumbent + kTieTolerance * std::max(1.0, std::abs(incumbent));
}

} // namespace

ThresholdResult threshold_search(const ModelParams& p) {
    validate_params(p);
    std::vector<ThresholdResult> grid;
    for (int t1 = 1; t1 <= p.m3 + 1; ++t1) {
        for (int t2 = 0; t2 <= p.m2; ++t2) grid.push_back({t1, t2, 0.0});
    }
    parallel_for(grid.size(), [&](std::size_t i) {
        grid[i].eta = policy_profit(p, threshold_policy(p, grid[i].theta1, grid[i].theta2).expanded);
    });
    double top = grid.front().eta;
    for (const auto& g : grid) top = std::max(top, g.eta);
    // First grid point within the tie tolerance of the maximum.
    for (const auto& g : grid) {
        if (!beats(top, g.eta)) return g;
    }
    return grid.front();
}

std::vector<double> enumerate_profits(const ModelParams& p, std::uint64_t cap) {
    const std::uint64_t n = checked_policy_count(p, cap);
    std::vector<double> etas(n);
    parallel_for(n, [&](std::size_t r) { etas[r] = policy_profit(p, policy_at_rank(p, r)); });
    return etas;
}

OptimizationReport enumerate_optimal(const ModelParams& p, std::uint64_t cap) {
    const std::vector<double> etas = enumerate_profits(p, cap);
    const double top = *std::max_element(etas.begin(), etas.end());
    OptimizationReport rep;
    rep.policies = etas.size();
    for (std::uint64_t r = 0; r < etas.size(); ++r) {
        if (!beats(top, etas[r])) {
            rep.best_rank = r;
            break;
        }
    }
    rep.best_policy = policy_at_rank(p, rep.best_rank);
    rep.best_eta = etas[rep.best_rank];
    rep.threshold = threshold_search(p);
    rep.gap = rep.best_eta - rep.threshold.eta;
    return rep;
}

std::vector<std::string> bang_bang_violations(const ModelParams& p, const Policy& d) {
    std::vector<std::string> out;
    for (int n3 = 1; n3 <= p.m3; ++n3) {
        const int v = d.setup_at(n3);
        if (v != 0 && v != std::min(n3, p.m2)) {
            out.push_back("setup(n3=" + std::to_string(n3) + ")=" + std::to_string(v) + " not in {0," +
                          std::to_string(std::min(n3, p.m2)) + "}");
        }
    }
    for (int n2 = 1; n2 <= p.m2; ++n2) {
        for (int n3 = 0; n3 <= p.m3 - n2; ++n3) {
            const int v = d.sleep_at(n2, n3);
            if (v != p.m2 - n2 && v != p.m2) {
                out.push_back("sleep(n2=" + std::to_string(n2) + ",n3=" + std::to_string(n3) + ")=" +
                              std::to_string(v) + " not in {" + std::to_string(p.m2 - n2) + "," +
                              std::to_string(p.m2) + "}");
            }
        }
    }
    return out;
}

BangBangReport bang_bang_check(const ModelParams& p, std::uint64_t cap) {
    BangBangReport rep;
    rep.optimum = enumerate_optimal(p, cap);
    rep.violations = bang_bang_violations(p, rep.optimum.best_policy);
    return rep;
}

std::string to_string(PriceRegime r) {
    switch (r) {
    case PriceRegime::high: return "high";
    case PriceRegime::low: return "low";
    default: return "mid";
    }
}

std::string to_string(Trend t) {
    switch (t) {
    case Trend::flat: return "flat";
    case Trend::increasing: return "increasing";
    case Trend::decreasing: return "decreasing";
    default: return "mixed";
    }
}

Trend classify_trend(const std::vector<double>& v, double tol) {
    bool up = false, down = false;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double step = v[i] - v[i - 1];
        const double t = tol * std::max(1.0, std::abs(v[i - 1]));
        if (step > t) up = true;
        if (step < -t) down = true;
    }
    if (up && down) return Trend::mixed;
    if (up) return Trend::increasing;
    if (down) return Trend::decreasing;
    return Trend::flat;
}

bool MonotonicityReport::ok() const {
    return std::all_of(sweeps.begin(), sweeps.end(), [](const ElementSweep& s) { return s.pass; }) &&
           std::all_of(linear_law.begin(), linear_law.end(), [](const LinearLawCheck& c) { return c.pass; });
}

double linear_law_slope(const ModelParams& p, const Vector& pi, int n3) {
    const StateSpace S(p);
    return -pi(S.index(p.m1, 0, n3)) * ((p.P2W - p.P2S) * p.C1 + p.C3_1);
}

namespace {

bool trend_ok(Trend t, PriceRegime regime, bool is_setup) {
    if (t == Trend::flat) return true;
    if (t == Trend::mixed) return false;
    if (regime == PriceRegime::mid) return true;
    // Setup sweeps count woken servers; sleep sweeps count sleeping servers.
    const bool want_up = (regime == PriceRegime::high) == is_setup;
    return want_up ? t == Trend::increasing : t == Trend::decreasing;
}

} // namespace

MonotonicityReport monotonicity_report(const ModelParams& p, const Policy& d, PriceRegime regime) {
    validate_policy(p, d);
    MonotonicityReport rep;
    rep.regime = regime;

    for (int n3 = 1; n3 <= p.m3; ++n3) {
        ElementSweep s;
        s.element = "setup(n3=" + std::to_string(n3) + ")";
        for (int v = 0; v <= std::min(n3, p.m2); ++v) {
            Policy q = d;
            q.setup_at(n3) = v;
            s.values.push_back(v);
            s.etas.push_back(policy_profit(p, q));
        }
        s.trend = classify_trend(s.etas);
        s.pass = trend_ok(s.trend, regime, true);
        rep.sweeps.push_back(std::move(s));

        if (n3 < p.m2) {
            // Flat-activation region: identical generator, reward linear in d^W.
            LinearLawCheck c;
            c.n3 = n3;
            std::vector<double> etas;
            Vector pi;
            for (int v = n3; v <= p.m2; ++v) {
                Policy q = d;
                q.setup_at(n3) = v;
                const GeneratorMatrix G = build_generator(p, q);
                const Vector pv = stationary(G);
                if (v == n3) pi = pv;
                etas.push_back(average_profit(pv, reward_vector(p, q, G.space).f()));
            }
            c.measured_slope = etas[1] - etas[0];
            c.predicted_slope = linear_law_slope(p, pi, n3);
            for (std::size_t k = 0; k < etas.size(); ++k) {
                c.fit_residual = std::max(c.fit_residual, std::abs(etas[0] + k * c.measured_slope - etas[k]));
            }
            c.pass = std::abs(c.measured_slope - c.predicted_slope) <= 1e-9 && c.fit_residual <= 1e-9;
            rep.linear_law.push_back(c);
        }
    }

    for (int n2 = 1; n2 <= p.m2; ++n2) {
        for (int n3 = 0; n3 <= p.m3 - n2; ++n3) {
            ElementSweep s;
            s.element = "sleep(n2=" + std::to_string(n2) + ",n3=" + std::to_string(n3) + ")";
            for (int v = p.m2 - n2; v <= p.m2; ++v) {
                Policy q = d;
                q.sleep_at(n2, n3) = v;
                s.values.push_back(v);
                s.etas.push_back(policy_profit(p, q));
            }
            s.trend = classify_trend(s.etas);
            s.pass = trend_ok(s.trend, regime, false);
            rep.sweeps.push_back(std::move(s));
        }
    }
    return rep;
}

ClosedFormConstants closed_form_constants(const ModelParams& p) {
    ClosedFormConstants c{};
    const double base = (p.m1 * p.P1W + p.m2 * p.P2W) * p.C1;
    c.c0 = (p.P2W - p.P2S) * p.C1;
    c.c1 = base;
    c.c2 = base + p.m1 * p.C2_1;
    c.c3 = c.c2 + p.m2 * p.C3_1;
    c.c4 = c.c2 + p.m1 * p.mu1 * p.C4;
    c.c5_base = c.c2 + p.m2 * p.C2_2 + p.m1 * p.mu1 * p.C4;
    return c;
}

double closed_form_profit(const ModelParams& p, const Vector& pi, ProfitCase pc, ClosedFormVariant variant) {
    const StateSpace S(p);
    if (static_cast<std::size_t>(pi.size()) != S.size()) throw ValidationError("pi has the wrong dimension");
    const ClosedFormConstants c = closed_form_constants(p);
    const bool printed = variant == ClosedFormVariant::printed;
    const bool high = pc == ProfitCase::high;
    const double R = p.R, m1mu1 = p.m1 * p.mu1;
    // Power baseline of a level where every non-working Group 2 server sleeps.
    const double shift = printed ? 0.0 : p.m2 * c.c0;
    const double c1 = c.c1 - shift, c2 = c.c2 - shift;
    const double lost = p.lambda * p.C5;

    double eta = 0.0;
    for (int n1 = 0; n1 <= p.m1; ++n1) eta += pi(S.index(n1, 0, 0)) * ((R * p.mu1 - p.C2_1) * n1 - c1);

    for (int n3 = 1; n3 <= p.m3; ++n3) {
        double term = R * m1mu1 - c2 - p.C2_3 * n3;
        if (high) term -= (c.c0 + p.C3_1) * std::min(n3, p.m2);
        if (!printed && n3 == p.m3) term -= lost;
        eta += pi(S.index(p.m1, 0, n3)) * term;
    }

    for (int n2 = 1; n2 <= p.m2; ++n2) {
        for (int n3 = 0; n3 <= p.m3 - n2; ++n3) {
            double term;
            if (printed) {
                term = R * m1mu1 - c.c4 - p.C2_3 * n3;
            } else {
                term = R * m1mu1 - c2 - p.C2_3 * n3 - (n3 == 0 ? m1mu1 * p.C4 : 0.0) -
                       (n2 + n3 == p.m3 ? lost : 0.0);
            }
            term += high ? (R * p.mu2 - c.c0 - p.C2_2) * n2 : -(p.C2_2 + p.C3_2) * n2;
            eta += pi(S.index(p.m1, n2, n3)) * term;
        }
    }

    for (int n3 = p.m3 - p.m2 + 1; n3 <= p.m3; ++n3) {
        const double c5 = c.c5_base + (n3 == p.m3 ? lost : 0.0);
        eta += pi(S.index(p.m1, p.m2, n3)) * (R * (m1mu1 + p.m2 * p.mu2) - c5 - p.C2_3 * n3);
    }
    return eta;
}

} // namespace ecdc
