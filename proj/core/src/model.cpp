#include "ecdc/model.hpp"

#include "ecdc/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ecdc {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

} // namespace

void validate_params(const ModelParams& p) {
    require(std::isfinite(p.lambda) && p.lambda > 0.0, "lambda must be > 0");
    require(std::isfinite(p.mu2) && p.mu2 > 0.0, "mu2 must be > 0");
    require(std::isfinite(p.mu1) && p.mu1 >= p.mu2, "mu1 must be >= mu2");
    require(p.m1 >= 1, "m1 must be >= 1");
    require(p.m2 >= 1, "m2 must be >= 1");
    require(p.m3 >= p.m2, "m3 must be >= m2 (buffer no smaller than Group 2)");
    require(std::isfinite(p.P2S) && p.P2S > 0.0, "P2S must be > 0");
    require(std::isfinite(p.P2W) && p.P2W > p.P2S, "P2W must be > P2S");
    require(finite_nonneg(p.P1W), "P1W must be >= 0");
    require(finite_nonneg(p.C1), "C1 must be >= 0");
    require(finite_nonneg(p.C2_1), "C2_1 must be >= 0");
    require(finite_nonneg(p.C2_2), "C2_2 must be >= 0");
    require(p.C2_1 <= p.C2_2, "C2_1 must be <= C2_2");
    require(finite_nonneg(p.C2_3), "C2_3 must be >= 0");
    require(finite_nonneg(p.C3_1), "C3_1 must be >= 0");
    require(finite_nonneg(p.C3_2), "C3_2 must be >= 0");
    require(finite_nonneg(p.C4), "C4 must be >= 0");
    require(finite_nonneg(p.C5), "C5 must be >= 0");
    require(finite_nonneg(p.R), "R must be >= 0");
}

std::string to_string(const State& s) {
    std::ostringstream os;
    os << '(' << s.n1 << ',' << s.n2 << ',' << s.n3 << ')';
    return os.str();
}

StateSpace::StateSpace(const ModelParams& p) : m1_(p.m1), m2_(p.m2), m3_(p.m3) {
    validate_params(p);
    offsets_.push_back(0);
    for (int n1 = 0; n1 <= m1_; ++n1) states_.push_back({n1, 0, 0, 0});
    offsets_.push_back(states_.size());
    for (int n3 = 1; n3 <= m3_; ++n3) states_.push_back({m1_, 0, n3, 1});
    offsets_.push_back(states_.size());
    for (int n2 = 1; n2 <= m2_; ++n2) {
        for (int n3 = 0; n3 <= m3_ - n2; ++n3) states_.push_back({m1_, n2, n3, n2 + 1});
        offsets_.push_back(states_.size());
    }
    for (int n3 = m3_ - m2_ + 1; n3 <= m3_; ++n3) states_.push_back({m1_, m2_, n3, m2_ + 2});
    offsets_.push_back(states_.size());
}

int StateSpace::level_of(int n1, int n2, int n3) const {
    if (n1 < 0 || n1 > m1_ || n2 < 0 || n2 > m2_ || n3 < 0 || n3 > m3_) return -1;
    if (n1 < m1_) return (n2 == 0 && n3 == 0) ? 0 : -1;
    if (n2 == 0) return n3 == 0 ? 0 : 1;
    if (n3 <= m3_ - n2) return n2 + 1;
    if (n2 == m2_) return m2_ + 2;
    return -1;
}

std::size_t StateSpace::index(int n1, int n2, int n3) const {
    const int lv = level_of(n1, n2, n3);
    if (lv < 0) {
        throw ValidationError("state " + to_string(State{n1, n2, n3, -1}) + " is not in the state space");
    }
    const std::size_t base = offsets_[lv];
    if (lv == 0) return base + n1;
    if (lv == 1) return base + (n3 - 1);
    if (lv <= m2_ + 1) return base + n3;
    return base + (n3 - (m3_ - m2_ + 1));
}

StateSpace build_state_space(const ModelParams& p) { return StateSpace(p); }

std::size_t state_count_formula(int m1, int m2, int m3) {
    // 3m2/2 - m2^2/2 = m2(3 - m2)/2 is an integer for every integer m2.
    const long long v = m1 + (static_cast<long long>(m2) * (3 - m2)) / 2 +
                        static_cast<long long>(m2) * m3 + m3 + 1;
    return static_cast<std::size_t>(v);
}

std::vector<int> Policy::flatten() const {
    std::vector<int> out(setup);
    for (const auto& row : sleep) out.insert(out.end(), row.begin(), row.end());
    return out;
}

std::string to_string(const Policy& d) {
    std::ostringstream os;
    os << "setup=[";
    for (std::size_t i = 0; i < d.setup.size(); ++i) os << (i ? "," : "") << d.setup[i];
    os << "] sleep=[";
    for (std::size_t r = 0; r < d.sleep.size(); ++r) {
        os << (r ? ";" : "");
        for (std::size_t i = 0; i < d.sleep[r].size(); ++i) os << (i ? "," : "") << d.sleep[r][i];
    }
    os << ']';
    return os.str();
}

Policy minimal_policy(const ModelParams& p) {
    Policy d;
    d.setup.assign(p.m3, 0);
    for (int n2 = 1; n2 <= p.m2; ++n2) d.sleep.emplace_back(p.m3 - n2 + 1, p.m2 - n2);
    return d;
}

void validate_policy(const ModelParams& p, const Policy& d) {
    if (static_cast<int>(d.setup.size()) != p.m3) {
        throw ValidationError("setup vector has length " + std::to_string(d.setup.size()) +
                              ", expected m3=" + std::to_string(p.m3));
    }
    for (int n3 = 1; n3 <= p.m3; ++n3) {
        const int v = d.setup_at(n3);
        if (v < 0 || v > p.m2) {
            throw ValidationError("setup(n3=" + std::to_string(n3) + ")=" + std::to_string(v) +
                                  " outside [0," + std::to_string(p.m2) + "]");
        }
    }
    if (static_cast<int>(d.sleep.size()) != p.m2) {
        throw ValidationError("sleep map has " + std::to_string(d.sleep.size()) +
                              " rows, expected m2=" + std::to_string(p.m2));
    }
    for (int n2 = 1; n2 <= p.m2; ++n2) {
        const auto& row = d.sleep[n2 - 1];
        if (static_cast<int>(row.size()) != p.m3 - n2 + 1) {
            throw ValidationError("sleep row n2=" + std::to_string(n2) + " has length " +
                                  std::to_string(row.size()) + ", expected " +
                                  std::to_string(p.m3 - n2 + 1));
        }
        for (int n3 = 0; n3 <= p.m3 - n2; ++n3) {
            const int v = row[n3];
            if (v < p.m2 - n2 || v > p.m2) {
                throw ValidationError("sleep(n2=" + std::to_string(n2) + ",n3=" + std::to_string(n3) +
                                      ")=" + std::to_string(v) + " outside [" +
                                      std::to_string(p.m2 - n2) + "," + std::to_string(p.m2) + "]");
            }
        }
    }
}

EntryBounds policy_entry_bounds(const ModelParams& p) {
    EntryBounds b;
    for (int n3 = 1; n3 <= p.m3; ++n3) {
        b.lo.push_back(0);
        b.hi.push_back(p.m2);
    }
    for (int n2 = 1; n2 <= p.m2; ++n2) {
        for (int n3 = 0; n3 <= p.m3 - n2; ++n3) {
            b.lo.push_back(p.m2 - n2);
            b.hi.push_back(p.m2);
        }
    }
    return b;
}

PolicySpaceSize policy_space_size(const ModelParams& p) {
    const auto b = policy_entry_bounds(p);
    PolicySpaceSize out{1, false};
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < b.lo.size(); ++i) {
        const auto card = static_cast<std::uint64_t>(b.hi[i] - b.lo[i] + 1);
        if (out.value > kMax / card) {
            out.value = kMax;
            out.saturated = true;
            return out;
        }
        out.value *= card;
    }
    return out;
}

EnumerationCapError::EnumerationCapError(PolicySpaceSize size, std::uint64_t cap)
    : ValidationError("policy space has " + std::string(size.saturated ? ">= " : "") +
                      std::to_string(size.value) + " policies, above the enumeration cap " +
                      std::to_string(cap)),
      size_(size) {}

std::uint64_t checked_policy_count(const ModelParams& p, std::uint64_t cap) {
    const auto n = policy_space_size(p);
    if (n.saturated || n.value > cap) throw EnumerationCapError(n, cap);
    return n.value;
}

namespace {

Policy unflatten(const ModelParams& p, const std::vector<int>& flat) {
    Policy d;
    std::size_t k = 0;
    d.setup.assign(flat.begin(), flat.begin() + p.m3);
    k = p.m3;
    for (int n2 = 1; n2 <= p.m2; ++n2) {
        const std::size_t len = p.m3 - n2 + 1;
        d.sleep.emplace_back(flat.begin() + k, flat.begin() + k + len);
        k += len;
    }
    return d;
}

} // namespace

Policy policy_at_rank(const ModelParams& p, std::uint64_t rank) {
    const auto b = policy_entry_bounds(p);
    const auto total = policy_space_size(p);
    if (!total.saturated && rank >= total.value) {
        throw ValidationError("policy rank " + std::to_string(rank) + " out of range");
    }
    std::vector<int> flat(b.lo.size());
    // Mixed radix with the last entry varying fastest.
    for (std::size_t i = flat.size(); i-- > 0;) {
        const auto card = static_cast<std::uint64_t>(b.hi[i] - b.lo[i] + 1);
        flat[i] = b.lo[i] + static_cast<int>(rank % card);
        rank /= card;
    }
    return unflatten(p, flat);
}

void for_each_policy(const ModelParams& p,
                     const std::function<void(std::uint64_t, const Policy&)>& fn,
                     std::uint64_t cap) {
    const std::uint64_t n = checked_policy_count(p, cap);
    const auto b = policy_entry_bounds(p);
    std::vector<int> flat = b.lo;
    for (std::uint64_t r = 0; r < n; ++r) {
        fn(r, unflatten(p, flat));
        for (std::size_t i = flat.size(); i-- > 0;) {
            if (flat[i] < b.hi[i]) {
                ++flat[i];
                break;
            }
            flat[i] = b.lo[i];
        }
    }
}

std::vector<Policy> enumerate_policies(const ModelParams& p, std::uint64_t cap) {
    std::vector<Policy> out;
    out.reserve(checked_policy_count(p, cap));
    for_each_policy(p, [&](std::uint64_t, const Policy& d) { out.push_back(d); }, cap);
    return out;
}

} // namespace ecdc
