#include "ecdc/potential.hpp"

#include "ecdc/errors.hpp"
#include "ecdc/parallel.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace ecdc {

Matrix reduced_generator(const Matrix& Q) {
    const auto n = Q.rows();
    return Q.bottomRightCorner(n - 1, n - 1);
}

namespace {

Eigen::PartialPivLU<Matrix> factor_reduced(const Matrix& Q) {
    const Matrix A = -reduced_generator(Q);
    Eigen::PartialPivLU<Matrix> lu(A);
    const double det = lu.determinant();
    if (!std::isfinite(det) || det == 0.0) throw NumericalError("reduced generator is singular");
    return lu;
}

// Solves -Q~ phi = (f - eta)[1:] + Q[1:,0] and prepends the anchor g(0,0,0) = 1.
Vector anchored_solve(const Eigen::PartialPivLU<Matrix>& lu, const Matrix& Q, const Vector& f, double eta) {
    const auto n = Q.rows();
    const Vector rhs = (f.tail(n - 1).array() - eta).matrix() + Q.col(0).tail(n - 1);
    Vector g(n);
    g(0) = 1.0;
    g.tail(n - 1) = lu.solve(rhs);
    return g;
}

double poisson_residual(const Matrix& Q, const Vector& g, const Vector& f, double eta) {
    return (Q * g - (Vector::Constant(g.size(), eta) - f)).cwiseAbs().maxCoeff();
}

} // namespace

PotentialSolution solve_potential(const Matrix& Q, const Vector& pi, const Vector& f) {
    PotentialSolution out;
    out.eta = average_profit(pi, f);
    const auto lu = factor_reduced(Q);
    out.g = anchored_solve(lu, Q, f, out.eta);
    out.residual = poisson_residual(Q, out.g, f, out.eta);
    const double tol = 1e-8 * std::max(1.0, f.cwiseAbs().maxCoeff());
    if (!(out.residual <= tol)) {
        throw NumericalError("Poisson residual " + std::to_string(out.residual) + " exceeds tolerance");
    }
    return out;
}

PotentialSolution solve_potential(const ModelParams& p, const Policy& d, const Vector& pi, const Vector& f) {
    return solve_potential(build_generator(p, d).Q, pi, f);
}

PolicyEvaluation evaluate_policy(const ModelParams& p, const Policy& d, StationaryMethod method) {
    PolicyEvaluation e{build_generator(p, d), Vector(), RewardVector(), 0.0, PotentialSolution()};
    e.pi = stationary(e.generator, method);
    e.reward = reward_vector(p, d, e.generator.space);
    e.potential = solve_potential(e.generator.Q, e.pi, e.reward.f());
    e.eta = e.potential.eta;
    return e;
}

double policy_profit(const ModelParams& p, const Policy& d, StationaryMethod method) {
    const GeneratorMatrix G = build_generator(p, d);
    return average_profit(stationary(G, method), reward_vector(p, d, G.space).f());
}

AffinePotential affine_decomposition(const GeneratorMatrix& G, const RewardVector& rw, const Vector& pi) {
    // pi does not depend on R, so one factorization serves both price coefficients.
    const Matrix& Q = G.Q;
    const auto lu = factor_reduced(Q);
    const Vector g0 = anchored_solve(lu, Q, rw.at_price(0.0), pi.dot(rw.at_price(0.0)));
    const Vector g1 = anchored_solve(lu, Q, rw.at_price(1.0), pi.dot(rw.at_price(1.0)));
    AffinePotential a{g1 - g0, -g0, 0.0};
    // Guard: an independent solve at a third price must match the affine form.
    const PotentialSolution check = solve_potential(Q, pi, rw.at_price(2.0));
    const double scale = std::max(1.0, check.g.cwiseAbs().maxCoeff());
    a.check_error = (a.at(2.0) - check.g).cwiseAbs().maxCoeff() / scale;
    if (!(a.check_error <= 1e-10)) {
        throw NumericalError("affine potential reconstruction error " + std::to_string(a.check_error));
    }
    return a;
}

AffinePotential affine_decomposition(const ModelParams& p, const Policy& d) {
    const GeneratorMatrix G = build_generator(p, d);
    return affine_decomposition(G, reward_vector(p, d, G.space), stationary(G));
}

double realization_factor(const StateSpace& space, const Vector& g, const State& n, const State& np) {
    return g(space.index(np)) - g(space.index(n));
}

namespace {

// Source, two targets and their weights; the composite is
// w1 g(t1) - w2 g(t2) - (w1 - w2) g(s).
struct Composite {
    std::size_t s = 0, t1 = 0, t2 = 0;
    double w1 = 0.0, w2 = 0.0;

    double apply(const Vector& v) const { return w1 * v(t1) - w2 * v(t2) - (w1 - w2) * v(s); }
};

void require(bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
}

// Setup: moving from i2 to i1 busy servers; t1 carries i1.
Composite setup_composite(const ModelParams& p, const StateSpace& S, int n3, int i1, int i2, FactorRates rates) {
    require(n3 >= 1 && n3 <= p.m3, "setup factor: n3 out of range");
    require(i2 >= 0 && i2 < i1 && i1 <= std::min(n3, p.m2), "setup factor: need 0 <= i2 < i1 <= min(n3, m2)");
    auto weight = [&](int i) {
        return rates == FactorRates::printed ? p.m1 * p.mu1 + i * p.mu2 : setup_activation_rate(p, n3);
    };
    Composite c;
    c.s = S.index(p.m1, 0, n3);
    c.t1 = S.index(p.m1, i1, n3 - i1);
    c.t2 = S.index(p.m1, i2, n3 - i2);
    c.w1 = weight(i1);
    c.w2 = weight(i2);
    return c;
}

// Sleep: moving from j1 to j2 working servers; t1 carries j2 (the new policy).
Composite sleep_composite(const ModelParams& p, const StateSpace& S, int n2, int n3, int j1, int j2,
                          FactorRates rates) {
    require(n2 >= 1 && n2 <= p.m2 && n3 >= 0 && n3 <= p.m3 - n2, "sleep factor: state out of range");
    require(j2 >= 0 && j2 < j1 && j1 <= n2, "sleep factor: need 0 <= j2 < j1 <= n2");
    auto weight = [&](int j) {
        return rates == FactorRates::printed ? p.m1 * p.mu1 + j * p.mu2 : sleep_activation_rate(p, n2, n3);
    };
    Composite c;
    c.s = S.index(p.m1, n2, n3);
    c.t1 = S.index(p.m1, j2, n3 + n2 - j2);
    c.t2 = S.index(p.m1, j1, n3 + n2 - j1);
    c.w1 = weight(j2);
    c.w2 = weight(j1);
    return c;
}

double beta1(const ModelParams& p) { return ((p.P2W - p.P2S) * p.C1 + p.C3_1) / p.mu2; }

double beta2_const(const ModelParams& p) { return ((p.P2W - p.P2S) * p.C1 - p.C3_2) / p.mu2; }

} // namespace

FactorParts setup_factor_parts(const ModelParams& p, const StateSpace& S, const Vector& g, int n3, int i1, int i2) {
    const Composite c = setup_composite(p, S, n3, i1, i2, FactorRates::printed);
    return {g(c.t1) - g(c.t2), g(c.s) - g(c.t1), g(c.s) - g(c.t2), beta1(p)};
}

FactorParts sleep_factor_parts(const ModelParams& p, const StateSpace& S, const Vector& g, int n2, int n3, int j1,
                               int j2) {
    const Composite c = sleep_composite(p, S, n2, n3, j1, j2, FactorRates::printed);
    // G1 = g(target j2) - g(target j1), G2 = g(s) - g(target j1), G3 = g(s) - g(target j2).
    return {g(c.t1) - g(c.t2), g(c.s) - g(c.t2), g(c.s) - g(c.t1), beta2_const(p) - p.R};
}

double setup_factor(const ModelParams& p, const StateSpace& S, const Vector& g, int n3, int i1, int i2,
                    FactorRates rates) {
    const Composite c = setup_composite(p, S, n3, i1, i2, rates);
    return c.apply(g) - (i1 - i2) * p.mu2 * beta1(p);
}

double sleep_factor(const ModelParams& p, const StateSpace& S, const Vector& g, int n2, int n3, int j1, int j2,
                    FactorRates rates) {
    const Composite c = sleep_composite(p, S, n2, n3, j1, j2, rates);
    return c.apply(g) + (j1 - j2) * p.mu2 * (beta2_const(p) - p.R);
}

namespace {

CriticalPrice solve_linear(double slope, double intercept, double scale) {
    CriticalPrice cp;
    cp.slope = slope;
    cp.intercept = intercept;
    cp.defined = std::abs(slope) > 1e-12 * std::max(1.0, scale);
    if (cp.defined) cp.value = -intercept / slope;
    return cp;
}

} // namespace

CriticalPrice critical_price_setup(const ModelParams& p, const StateSpace& S, const AffinePotential& a, int n3,
                                   int i1, int i2, FactorRates rates) {
    const Composite c = setup_composite(p, S, n3, i1, i2, rates);
    const double slope = c.apply(a.W);
    const double intercept = -c.apply(a.V) - (i1 - i2) * p.mu2 * beta1(p);
    const double scale = std::abs(c.w1 * a.W(c.t1)) + std::abs(c.w2 * a.W(c.t2)) +
                         std::abs((c.w1 - c.w2) * a.W(c.s));
    return solve_linear(slope, intercept, scale);
}

CriticalPrice critical_price_sleep(const ModelParams& p, const StateSpace& S, const AffinePotential& a, int n2,
                                   int n3, int j1, int j2, FactorRates rates) {
    const Composite c = sleep_composite(p, S, n2, n3, j1, j2, rates);
    // beta2 carries -R, so its price term joins the slope.
    const double slope = c.apply(a.W) - (j1 - j2) * p.mu2;
    const double intercept = -c.apply(a.V) + (j1 - j2) * p.mu2 * beta2_const(p);
    const double scale = std::abs(c.w1 * a.W(c.t1)) + std::abs(c.w2 * a.W(c.t2)) +
                         std::abs((c.w1 - c.w2) * a.W(c.s)) + (j1 - j2) * p.mu2;
    return solve_linear(slope, intercept, scale);
}

CriticalPrice critical_price_setup(const ModelParams& p, const Policy& d, int n3, int i1, int i2, FactorRates rates) {
    return critical_price_setup(p, StateSpace(p), affine_decomposition(p, d), n3, i1, i2, rates);
}

CriticalPrice critical_price_sleep(const ModelParams& p, const Policy& d, int n2, int n3, int j1, int j2,
                                   FactorRates rates) {
    return critical_price_sleep(p, StateSpace(p), affine_decomposition(p, d), n2, n3, j1, j2, rates);
}

namespace {

struct PriceExtremes {
    double hiW = -std::numeric_limits<double>::infinity(), loW = std::numeric_limits<double>::infinity();
    double hiS = -std::numeric_limits<double>::infinity(), loS = std::numeric_limits<double>::infinity();
    std::uint64_t nW = 0, nS = 0, undefined = 0;

    void merge(const PriceExtremes& o) {
        hiW = std::max(hiW, o.hiW);
        loW = std::min(loW, o.loW);
        hiS = std::max(hiS, o.hiS);
        loS = std::min(loS, o.loS);
        nW += o.nW;
        nS += o.nS;
        undefined += o.undefined;
    }
};

PriceExtremes policy_extremes(const ModelParams& p, const Policy& d, FactorRates rates) {
    const GeneratorMatrix G = build_generator(p, d);
    const AffinePotential a = affine_decomposition(G, reward_vector(p, d, G.space), stationary(G));
    PriceExtremes e;
    for (int n3 = 1; n3 <= p.m3; ++n3) {
        for (int i1 = 1; i1 <= std::min(n3, p.m2); ++i1) {
            for (int i2 = 0; i2 < i1; ++i2) {
                const CriticalPrice cp = critical_price_setup(p, G.space, a, n3, i1, i2, rates);
                if (!cp.defined) {
                    ++e.undefined;
                    continue;
                }
                ++e.nW;
                e.hiW = std::max(e.hiW, cp.value);
                e.loW = std::min(e.loW, cp.value);
            }
        }
    }
    for (int n2 = 1; n2 <= p.m2; ++n2) {
        for (int n3 = 0; n3 <= p.m3 - n2; ++n3) {
            for (int j1 = 1; j1 <= n2; ++j1) {
                for (int j2 = 0; j2 < j1; ++j2) {
                    const CriticalPrice cp = critical_price_sleep(p, G.space, a, n2, n3, j1, j2, rates);
                    if (!cp.defined) {
                        ++e.undefined;
                        continue;
                    }
                    ++e.nS;
                    e.hiS = std::max(e.hiS, cp.value);
                    e.loS = std::min(e.loS, cp.value);
                }
            }
        }
    }
    return e;
}

} // namespace

CriticalPrices critical_prices(const ModelParams& p, const PriceScope& scope, std::uint64_t cap, FactorRates rates) {
    validate_params(p);
    std::vector<std::uint64_t> ranks;
    const PolicySpaceSize total = policy_space_size(p);
    if (std::holds_alternative<FullScope>(scope)) {
        const std::uint64_t n = checked_policy_count(p, cap);
        ranks.resize(n);
        for (std::uint64_t r = 0; r < n; ++r) ranks[r] = r;
    } else {
        const auto& s = std::get<SampledScope>(scope);
        if (!total.saturated && s.k >= total.value) {
            ranks.resize(total.value);
            for (std::uint64_t r = 0; r < total.value; ++r) ranks[r] = r;
        } else {
            std::mt19937_64 rng(s.seed);
            std::uniform_int_distribution<std::uint64_t> pick(0, total.value - 1);
            std::set<std::uint64_t> chosen;
            while (chosen.size() < s.k) chosen.insert(pick(rng));
            ranks.assign(chosen.begin(), chosen.end());
        }
    }

    std::vector<PriceExtremes> per(ranks.size());
    parallel_for(ranks.size(), [&](std::size_t i) { per[i] = policy_extremes(p, policy_at_rank(p, ranks[i]), rates); });
    PriceExtremes all;
    for (const auto& e : per) all.merge(e);

    CriticalPrices out;
    out.policies = ranks.size();
    out.setup_pairs = all.nW;
    out.sleep_pairs = all.nS;
    out.undefined = all.undefined;
    out.RHW = std::max(0.0, all.hiW);
    out.RHS = std::max(0.0, all.hiS);
    out.RLW = all.nW ? all.loW : 0.0;
    out.RLS = all.nS ? all.loS : 0.0;
    out.RH = std::max(out.RHW, out.RHS);
    out.RL = std::min(out.RLW, out.RLS);
    return out;
}

double performance_difference(const PolicyEvaluation& e, const PolicyEvaluation& ep) {
    const Vector bracket = (ep.generator.Q - e.generator.Q) * e.potential.g + (ep.reward.f() - e.reward.f());
    return ep.pi.dot(bracket);
}

double performance_difference(const ModelParams& p, const Policy& d, const Policy& dp) {
    return performance_difference(evaluate_policy(p, d), evaluate_policy(p, dp));
}

} // namespace ecdc
