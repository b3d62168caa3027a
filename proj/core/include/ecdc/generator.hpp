#pragma once

#include "ecdc/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ecdc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Setup-policy rate families at row n3 = k2 towards level k1 + 1.
struct SetupRates {
    double a1 = 0.0; ///< used when k2 == k1 < m2
    double a2 = 0.0; ///< used when k1 < k2 < m3 (and k2 == k1 == m2 < m3)
    double a3 = 0.0; ///< used when k2 == m3
};

SetupRates setup_rates(const ModelParams& p, const Policy& d, int k1, int k2);

/// Sleep-policy rate families a0..a5 at (m1,k3,k4) towards (m1,k5,k4+k3-k5).
struct SleepRates {
    std::array<double, 6> a{};
    double operator[](int i) const { return a.at(i); }
};

SleepRates sleep_rates(const ModelParams& p, const Policy& d, int k3, int k4, int k5);

/// Which sleep rate family applies at (m1,k3,k4): 0..2 below level m2+1, 3..5 on it.
int sleep_rate_family(const ModelParams& p, int k3, int k4);

/// Rate of the setup-triggered jump out of (m1,0,n3) when d^W(n3) >= 1.
double setup_activation_rate(const ModelParams& p, int n3);

/// Rate of the sleep-triggered jump out of (m1,n2,n3) when it moves the state.
double sleep_activation_rate(const ModelParams& p, int n2, int n3);

/// Level n2 reached by the setup jump from (m1,0,n3) under entry value dW.
inline int setup_target_n2(int n3, int dW) { return dW < n3 ? dW : n3; }

/// Dense generator together with its state space and level layout.
struct GeneratorMatrix {
    StateSpace space;
    Matrix Q;

    std::size_t dim() const { return space.size(); }

    auto block(int row_level, int col_level) const {
        return Q.block(space.level_begin(row_level), space.level_begin(col_level),
                       space.level_size(row_level), space.level_size(col_level));
    }
};

/// True if block (row_level, col_level) may be nonzero in the level structure.
bool block_in_pattern(int m2, int row_level, int col_level);

GeneratorMatrix build_generator(const ModelParams& p, const Policy& d);

struct DiagonalMismatch {
    std::size_t index = 0;
    State state;
    std::string formula; ///< label of the printed diagonal formula, e.g. "b5"
    double assembled = 0.0;
    double printed = 0.0;
};

struct GeneratorReport {
    double max_abs_row_sum = 0.0;
    double max_abs_entry = 0.0;
    int negative_off_diagonals = 0;
    int scc_count = 0;
    bool irreducible = false;
    std::vector<std::pair<int, int>> pattern_violations; ///< nonzero blocks outside the pattern
    std::vector<DiagonalMismatch> mismatches;

    bool rows_conservative(double rel_tol = 1e-12) const {
        return max_abs_row_sum <= rel_tol * max_abs_entry;
    }
};

GeneratorReport verify_generator(const ModelParams& p, const Policy& d, const GeneratorMatrix& G);

/// Number of strongly connected components of the off-diagonal nonzero pattern.
int strongly_connected_components(const Matrix& Q, std::vector<int>* component = nullptr);

/// States reachable from `from` along positive off-diagonal rates.
std::vector<bool> reachable_from(const Matrix& Q, std::size_t from);

/// Writes "row col rate" lines for every nonzero entry.
void write_triplets(std::ostream& os, const GeneratorMatrix& G);

} // namespace ecdc
