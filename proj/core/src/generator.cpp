#include "ecdc/generator.hpp"

#include "ecdc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ecdc {

namespace {

double ind(bool b) { return b ? 1.0 : 0.0; }

void check_range(bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("index out of range in ") + what);
}

} // namespace

SetupRates setup_rates(const ModelParams& p, const Policy& d, int k1, int k2) {
    check_range(k1 >= 1 && k1 <= p.m2 && k2 >= k1 && k2 <= p.m3, "setup_rates");
    const int dW = d.setup_at(k2);
    const double full = p.lambda + p.m1 * p.mu1 + p.mu2;
    return {ind(dW >= k1) * full, ind(dW == k1) * full, ind(dW == k1) * p.lambda};
}

SleepRates sleep_rates(const ModelParams& p, const Policy& d, int k3, int k4, int k5) {
    check_range(k3 >= 1 && k3 <= p.m2 && k4 >= 0 && k4 <= p.m3 - k3 && k5 >= 0 && k5 <= p.m2,
                "sleep_rates");
    const double on = ind(d.sleep_at(k3, k4) == p.m2 - k5);
    const double m1mu1 = p.m1 * p.mu1;
    SleepRates r;
    r.a[0] = on * (m1mu1 + (k3 + 1) * p.mu2);
    r.a[1] = on * (p.lambda + m1mu1 + (k3 + 1) * p.mu2);
    r.a[2] = on * p.lambda;
    r.a[3] = on * m1mu1;
    r.a[4] = on * (p.lambda + m1mu1);
    r.a[5] = on * (p.lambda + m1mu1 + p.m1 * p.mu2);
    return r;
}

int sleep_rate_family(const ModelParams& p, int k3, int k4) {
    const bool last = (k4 == p.m3 - k3);
    const bool first = (k4 == 0);
    const int base = (k3 == p.m2) ? 3 : 0;
    if (last) return base + 2;
    if (first) return base;
    return base + 1;
}

double setup_activation_rate(const ModelParams& p, int n3) {
    return n3 < p.m3 ? p.lambda + p.m1 * p.mu1 + p.mu2 : p.lambda;
}

double sleep_activation_rate(const ModelParams& p, int n2, int n3) {
    Policy probe = minimal_policy(p);
    probe.sleep_at(n2, n3) = p.m2; // k5 = 0 switches the indicator on
    return sleep_rates(p, probe, n2, n3, 0)[sleep_rate_family(p, n2, n3)];
}

bool block_in_pattern(int m2, int r, int c) {
    const int top = m2 + 2;
    if (r < 0 || c < 0 || r > top || c > top) return false;
    if (r == 0) return c <= 1;
    if (r == 1) return c <= m2 + 1;
    if (r == top) return c == m2 + 1 || c == top;
    // levels 2..m2+1
    if (c == 0) return r == 2;
    if (c >= 1 && c <= r) return true;
    return r == m2 + 1 && c == top;
}

GeneratorMatrix build_generator(const ModelParams& p, const Policy& d) {
    validate_policy(p, d);
    GeneratorMatrix G{StateSpace(p), Matrix()};
    const StateSpace& S = G.space;
    const int m1 = p.m1, m2 = p.m2, m3 = p.m3;
    const double m1mu1 = m1 * p.mu1;
    Matrix& Q = G.Q;
    Q.setZero(S.size(), S.size());

    auto add = [&](int a1, int a2, int a3, int b1, int b2, int b3, double rate) {
        if (rate == 0.0) return;
        Q(S.index(a1, a2, a3), S.index(b1, b2, b3)) += rate;
    };

    // Level 0: birth-death in n1, arrival at (m1,0,0) enters the buffer.
    for (int n1 = 0; n1 <= m1; ++n1) {
        if (n1 < m1) add(n1, 0, 0, n1 + 1, 0, 0, p.lambda);
        else add(m1, 0, 0, m1, 0, 1, p.lambda);
        if (n1 > 0) add(n1, 0, 0, n1 - 1, 0, 0, n1 * p.mu1);
    }

    // Level 1: buffer-only states and the setup jumps.
    for (int n3 = 1; n3 <= m3; ++n3) {
        if (n3 < m3) add(m1, 0, n3, m1, 0, n3 + 1, p.lambda);
        add(m1, 0, n3, m1, 0, n3 - 1, m1mu1);
        for (int k1 = 1; k1 <= std::min(n3, m2); ++k1) {
            const SetupRates a = setup_rates(p, d, k1, n3);
            double rate;
            if (n3 == m3) rate = a.a3;
            else if (n3 == k1 && k1 < m2) rate = a.a1;
            else rate = a.a2;
            add(m1, 0, n3, m1, k1, n3 - k1, rate);
        }
    }

    // Levels 2..m2+1: n2 = k3 busy Group 2 servers.
    for (int k3 = 1; k3 <= m2; ++k3) {
        const int last = m3 - k3;
        for (int k4 = 0; k4 <= last; ++k4) {
            if (k4 < last) add(m1, k3, k4, m1, k3, k4 + 1, p.lambda);
            else if (k3 == m2) add(m1, k3, k4, m1, k3, k4 + 1, p.lambda); // into level m2+2
            if (k4 > 0) add(m1, k3, k4, m1, k3, k4 - 1, m1mu1);
            add(m1, k3, k4, m1, k3 - 1, k4, k3 * p.mu2);
            const int fam = sleep_rate_family(p, k3, k4);
            for (int k5 = 0; k5 < k3; ++k5) {
                add(m1, k3, k4, m1, k5, k4 + k3 - k5, sleep_rates(p, d, k3, k4, k5)[fam]);
            }
        }
    }

    // Level m2+2: full Group 2, buffer above m3-m2.
    const double a = m1mu1 + m2 * p.mu2;
    for (int n3 = m3 - m2 + 1; n3 <= m3; ++n3) {
        if (n3 < m3) add(m1, m2, n3, m1, m2, n3 + 1, p.lambda);
        add(m1, m2, n3, m1, m2, n3 - 1, a);
    }

    for (Eigen::Index i = 0; i < Q.rows(); ++i) {
        Q(i, i) = 0.0;
        Q(i, i) = -Q.row(i).sum();
    }
    return G;
}

std::vector<bool> reachable_from(const Matrix& Q, std::size_t from) {
    const auto n = static_cast<std::size_t>(Q.rows());
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && Q(i, j) > 0.0 && !seen[j]) {
                seen[j] = true;
                stack.push_back(j);
            }
        }
    }
    return seen;
}

int strongly_connected_components(const Matrix& Q, std::vector<int>* component) {
    // Kosaraju: finish order on the graph, then sweep the transpose.
    const auto n = static_cast<std::size_t>(Q.rows());
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
        seen[s] = true;
        while (!stack.empty()) {
            auto& [i, j] = stack.back();
            while (j < n && (j == i || Q(i, j) <= 0.0 || seen[j])) ++j;
            if (j < n) {
                seen[j] = true;
                stack.push_back({j, 0});
            } else {
                order.push_back(i);
                stack.pop_back();
            }
        }
    }
    std::vector<int> comp(n, -1);
    int count = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[*it] >= 0) continue;
        std::vector<std::size_t> stack{*it};
        comp[*it] = count;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && Q(j, i) > 0.0 && comp[j] < 0) {
                    comp[j] = count;
                    stack.push_back(j);
                }
            }
        }
        ++count;
    }
    if (component) *component = std::move(comp);
    return count;
}

namespace {

// Printed diagonal magnitude for one state, with a label naming the formula.
std::pair<std::string, double> printed_diagonal(const ModelParams& p, const Policy& d, const State& s) {
    const double m1mu1 = p.m1 * p.mu1;
    const int m2 = p.m2, m3 = p.m3;
    if (s.level == 0) return {"Q00", p.lambda + s.n1 * p.mu1};
    if (s.level == 1) {
        const int k2 = s.n3;
        double sum = 0.0;
        if (k2 <= m2 - 1) {
            sum = setup_rates(p, d, k2, k2).a1;
            for (int k1 = 1; k1 < k2; ++k1) sum += setup_rates(p, d, k1, k2).a2;
            return {"b1(1)", p.lambda + m1mu1 + sum};
        }
        if (k2 < m3) {
            for (int k1 = 1; k1 <= m2; ++k1) sum += setup_rates(p, d, k1, k2).a2;
            return {"b1(2)", p.lambda + m1mu1 + sum};
        }
        for (int k1 = 1; k1 <= m2; ++k1) sum += setup_rates(p, d, k1, k2).a3;
        return {"b1(3)", m1mu1 + sum};
    }
    if (s.level == m2 + 2) {
        const double a = m1mu1 + m2 * p.mu2;
        return {"Qm2+2", s.n3 < m3 ? p.lambda + a : a};
    }
    const int k3 = s.n2, k4 = s.n3;
    const int fam = sleep_rate_family(p, k3, k4);
    // The b(5) display sums the a(2) family.
    const int summed = fam == 5 ? 2 : fam;
    double sum = 0.0;
    for (int k5 = 0; k5 <= k3; ++k5) {
        if (k5 == k3) continue; // keeping every working server is a self-jump
        sum += sleep_rates(p, d, k3, k4, k5)[summed];
    }
    const double k3mu2 = k3 * p.mu2, m2mu2 = m2 * p.mu2;
    switch (fam) {
    case 0: return {"b(0)", p.lambda + k3mu2 + sum};
    case 1: return {"b(1)", p.lambda + m1mu1 + k3mu2 + sum};
    case 2: return {"b(2)", m1mu1 + k3mu2 + sum};
    case 3: return {"b(3)", p.lambda + m2mu2 + sum};
    case 4: return {"b(4)", p.lambda + m1mu1 + m2mu2 + sum};
    default: return {"b(5)", m1mu1 + m2mu2 + sum};
    }
}

} // namespace

GeneratorReport verify_generator(const ModelParams& p, const Policy& d, const GeneratorMatrix& G) {
    GeneratorReport rep;
    const Matrix& Q = G.Q;
    const auto n = Q.rows();
    rep.max_abs_entry = Q.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        rep.max_abs_row_sum = std::max(rep.max_abs_row_sum, std::abs(Q.row(i).sum()));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && Q(i, j) < 0.0) ++rep.negative_off_diagonals;
        }
    }
    rep.scc_count = strongly_connected_components(Q);
    rep.irreducible = rep.scc_count == 1;

    const int levels = G.space.num_levels();
    for (int r = 0; r < levels; ++r) {
        for (int c = 0; c < levels; ++c) {
            if (!block_in_pattern(p.m2, r, c) && G.block(r, c).cwiseAbs().maxCoeff() != 0.0) {
                rep.pattern_violations.emplace_back(r, c);
            }
        }
    }

    const double tol = 1e-12 * std::max(1.0, rep.max_abs_entry);
    for (std::size_t i = 0; i < G.space.size(); ++i) {
        const State& s = G.space.at(i);
        const auto [label, value] = printed_diagonal(p, d, s);
        const double assembled = -Q(i, i);
        if (std::abs(assembled - value) > tol) rep.mismatches.push_back({i, s, label, assembled, value});
    }
    return rep;
}

void write_triplets(std::ostream& os, const GeneratorMatrix& G) {
    const auto prec = os.precision(17);
    for (Eigen::Index i = 0; i < G.Q.rows(); ++i) {
        for (Eigen::Index j = 0; j < G.Q.cols(); ++j) {
            if (G.Q(i, j) != 0.0) os << i << ' ' << j << ' ' << G.Q(i, j) << '\n';
        }
    }
    os.precision(prec);
}

} // namespace ecdc
