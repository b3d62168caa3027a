#include "ecdc/reward.hpp"

#include "ecdc/errors.hpp"

namespace ecdc {

namespace {

struct Split {
    double A = 0.0;
    double B = 0.0;
};

Split split_at(const ModelParams& p, const Policy& d, const State& s) {
    const double m1mu1 = p.m1 * p.mu1;
    const double group1_power = p.m1 * p.P1W;
    Split r;
    if (s.level == 0) {
        // Group 2 all asleep while the buffer is empty.
        r.A = s.n1 * p.mu1;
        r.B = (group1_power + p.m2 * p.P2S) * p.C1 + s.n1 * p.C2_1;
        return r;
    }
    if (s.level == 1) {
        const int dW = d.setup_at(s.n3);
        r.A = m1mu1;
        r.B = (group1_power + dW * p.P2W + (p.m2 - dW) * p.P2S) * p.C1 + p.m1 * p.C2_1 +
              s.n3 * p.C2_3 + dW * p.C3_1 + (s.n3 == p.m3 ? p.lambda * p.C5 : 0.0);
        return r;
    }
    if (s.level == p.m2 + 2) {
        r.A = m1mu1 + p.m2 * p.mu2;
        r.B = (group1_power + p.m2 * p.P2W) * p.C1 + p.m1 * p.C2_1 + p.m2 * p.C2_2 +
              s.n3 * p.C2_3 + m1mu1 * p.C4 + (s.n3 == p.m3 ? p.lambda * p.C5 : 0.0);
        return r;
    }
    const int dS = d.sleep_at(s.n2, s.n3);
    const int working = p.m2 - dS;
    r.A = m1mu1 + working * p.mu2;
    r.B = (group1_power + dS * p.P2S + working * p.P2W) * p.C1 + p.m1 * p.C2_1 + s.n2 * p.C2_2 +
          s.n3 * p.C2_3 + (s.n2 - working) * p.C3_2 + (s.n3 == 0 ? m1mu1 * p.C4 : 0.0) +
          (s.n2 + s.n3 == p.m3 ? p.lambda * p.C5 : 0.0);
    return r;
}

} // namespace

double reward_at(const ModelParams& p, const Policy& d, const State& s) {
    const Split r = split_at(p, d, s);
    return p.R * r.A - r.B;
}

RewardVector reward_vector(const ModelParams& p, const Policy& d, const StateSpace& space) {
    validate_policy(p, d);
    const auto n = static_cast<Eigen::Index>(space.size());
    RewardVector out{Vector(n), Vector(n), p.R};
    for (Eigen::Index i = 0; i < n; ++i) {
        const Split r = split_at(p, d, space.at(i));
        out.A(i) = r.A;
        out.B(i) = r.B;
    }
    return out;
}

RewardVector reward_vector(const ModelParams& p, const Policy& d) {
    return reward_vector(p, d, StateSpace(p));
}

double average_profit(const Vector& pi, const Vector& f) {
    if (pi.size() != f.size()) {
        throw ValidationError("dimension mismatch: pi has " + std::to_string(pi.size()) +
                              " entries, f has " + std::to_string(f.size()));
    }
    return pi.dot(f);
}

ProfitCoefficients profit_coefficients(const RewardVector& f, const Vector& pi) {
    return {average_profit(pi, f.A), average_profit(pi, f.B)};
}

ProfitCoefficients profit_coefficients(const ModelParams& p, const Policy& d, const Vector& pi) {
    return profit_coefficients(reward_vector(p, d), pi);
}

} // namespace ecdc
