#pragma once

// Reference implementations used only by tests. They are written from the
// model description directly and share no code paths with the library
// beyond the state enumeration.

#include "ecdc/ecdc.hpp"

#include <Eigen/QR>

#include <map>
#include <tuple>

namespace ecdc::testing {

using Triple = std::tuple<int, int, int>;

/// Transition rates listed event by event.
inline std::map<Triple, std::map<Triple, double>> oracle_rates(const ModelParams& p, const Policy& d) {
    std::map<Triple, std::map<Triple, double>> out;
    const int m1 = p.m1, m2 = p.m2, m3 = p.m3;
    const double l = p.lambda, m1mu1 = m1 * p.mu1;
    auto put = [&](Triple a, Triple b, double r) {
        if (r > 0.0) out[a][b] += r;
    };
    // Group 1 filling and draining while Group 2 and the buffer are empty.
    for (int n1 = 0; n1 <= m1; ++n1) {
        put({n1, 0, 0}, n1 < m1 ? Triple{n1 + 1, 0, 0} : Triple{m1, 0, 1}, l);
        if (n1 > 0) put({n1, 0, 0}, {n1 - 1, 0, 0}, n1 * p.mu1);
    }
    // Jobs waiting in the buffer, Group 2 asleep.
    for (int n3 = 1; n3 <= m3; ++n3) {
        if (n3 < m3) put({m1, 0, n3}, {m1, 0, n3 + 1}, l);
        put({m1, 0, n3}, {m1, 0, n3 - 1}, m1mu1);
        const int wake = std::min(d.setup_at(n3), n3);
        if (wake > 0) put({m1, 0, n3}, {m1, wake, n3 - wake}, n3 < m3 ? l + m1mu1 + p.mu2 : l);
    }
    // Some Group 2 servers busy.
    for (int n2 = 1; n2 <= m2; ++n2) {
        for (int n3 = 0; n3 <= m3 - n2; ++n3) {
            const bool last = n3 == m3 - n2, first = n3 == 0, top = n2 == m2;
            if (!last || top) put({m1, n2, n3}, {m1, n2, n3 + 1}, l);
            if (n3 > 0) put({m1, n2, n3}, {m1, n2, n3 - 1}, m1mu1);
            put({m1, n2, n3}, {m1, n2 - 1, n3}, n2 * p.mu2);
            const int working = m2 - d.sleep_at(n2, n3);
            if (working < n2) {
                double r;
                if (!top) r = last ? l : first ? m1mu1 + (n2 + 1) * p.mu2 : l + m1mu1 + (n2 + 1) * p.mu2;
                else r = last ? l + m1mu1 + m1 * p.mu2 : first ? m1mu1 : l + m1mu1;
                put({m1, n2, n3}, {m1, working, n3 + n2 - working}, r);
            }
        }
    }
    // Group 2 fully busy with more than m3 - m2 jobs buffered.
    for (int n3 = m3 - m2 + 1; n3 <= m3; ++n3) {
        if (n3 < m3) put({m1, m2, n3}, {m1, m2, n3 + 1}, l);
        put({m1, m2, n3}, {m1, m2, n3 - 1}, m1mu1 + m2 * p.mu2);
    }
    return out;
}

/// Dense generator assembled from oracle_rates in the library's state order.
inline Matrix oracle_generator(const ModelParams& p, const Policy& d) {
    const StateSpace S(p);
    Matrix Q = Matrix::Zero(S.size(), S.size());
    for (const auto& [from, row] : oracle_rates(p, d)) {
        const auto i = S.index(std::get<0>(from), std::get<1>(from), std::get<2>(from));
        for (const auto& [to, r] : row) {
            const auto j = S.index(std::get<0>(to), std::get<1>(to), std::get<2>(to));
            Q(i, j) += r;
            Q(i, i) -= r;
        }
    }
    return Q;
}

/// Stationary vector by Grassmann-Taksar-Heyman state reduction.
/// Needs an irreducible generator.
inline Vector oracle_stationary_gth(const Matrix& Q) {
    const auto n = Q.rows();
    if (n < 2) return Vector::Ones(n);
    Matrix A = Q;
    Vector out = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) A(i, i) = 0.0;
    for (Eigen::Index k = n - 1; k > 0; --k) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) s += A(k, j);
        out(k) = s;
        for (Eigen::Index i = 0; i < k; ++i) {
            const double f = A(i, k) / s;
            for (Eigen::Index j = 0; j < k; ++j) A(i, j) += f * A(k, j);
        }
    }
    Vector pi = Vector::Zero(n);
    pi(0) = 1.0;
    for (Eigen::Index k = 1; k < n; ++k) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) s += pi(i) * A(i, k);
        pi(k) = s / out(k);
    }
    return pi / pi.sum();
}

/// Censored generator on the states below `cut` (Schur complement).
inline Matrix oracle_censor(const Matrix& Q, Eigen::Index cut) {
    const auto n = Q.rows();
    if (cut == n) return Q;
    const Matrix top = Q.topLeftCorner(cut, cut), tr = Q.topRightCorner(cut, n - cut);
    const Matrix bl = Q.bottomLeftCorner(n - cut, cut), br = Q.bottomRightCorner(n - cut, n - cut);
    return top + tr * (-br).colPivHouseholderQr().solve(bl);
}

/// Potentials from a QR least-squares solve of Q g = eta e - f with g(0) = 1.
inline Vector oracle_potential(const Matrix& Q, const Vector& pi, const Vector& f) {
    const auto n = Q.rows();
    const double eta = pi.dot(f);
    Matrix A(n + 1, n);
    A.topRows(n) = Q;
    A.row(n).setZero();
    A(n, 0) = 1.0;
    Vector b(n + 1);
    b.head(n) = Vector::Constant(n, eta) - f;
    b(n) = 1.0;
    return A.colPivHouseholderQr().solve(b);
}

} // namespace ecdc::testing
