#pragma once

#include "ecdc/errors.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ecdc {

/// Rates, sizes, power levels and prices of the two-group data center.
struct ModelParams {
    double lambda = 1.0; ///< arrival rate
    double mu1 = 1.0;    ///< per-server service rate, Group 1
    double mu2 = 1.0;    ///< per-server service rate, Group 2
    int m1 = 1;          ///< servers in Group 1
    int m2 = 1;          ///< servers in Group 2
    int m3 = 1;          ///< buffer size
    double P1W = 1.0;    ///< power of a working Group 1 server
    double P2W = 1.0;    ///< power of a working Group 2 server
    double P2S = 0.5;    ///< power of a sleeping Group 2 server
    double C1 = 1.0;     ///< power price
    double C2_1 = 0.0;   ///< holding cost in Group 1
    double C2_2 = 0.0;   ///< holding cost in Group 2
    double C2_3 = 0.0;   ///< holding cost in the buffer
    double C3_1 = 0.0;   ///< setup cost per woken server
    double C3_2 = 0.0;   ///< cost of moving a job back to the buffer
    double C4 = 0.0;     ///< cost of moving a job to Group 1
    double C5 = 0.0;     ///< opportunity cost of a lost job
    double R = 1.0;      ///< service price per completed job

    bool operator==(const ModelParams&) const = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate_params(const ModelParams& p);

/// A state (n1, n2, n3) together with the level it belongs to.
struct State {
    int n1 = 0;
    int n2 = 0;
    int n3 = 0;
    int level = 0;

    bool operator==(const State& o) const { return n1 == o.n1 && n2 == o.n2 && n3 == o.n3; }
};

std::string to_string(const State& s);

/// Ordered state space grouped by level 0..m2+2.
class StateSpace {
public:
    explicit StateSpace(const ModelParams& p);

    std::size_t size() const { return states_.size(); }
    int num_levels() const { return static_cast<int>(offsets_.size()) - 1; }
    const State& at(std::size_t i) const { return states_.at(i); }
    const std::vector<State>& states() const { return states_; }

    /// Start index of each level, plus a final sentinel equal to size().
    const std::vector<std::size_t>& level_offsets() const { return offsets_; }
    std::size_t level_begin(int level) const { return offsets_.at(level); }
    std::size_t level_size(int level) const { return offsets_.at(level + 1) - offsets_.at(level); }

    /// Level of (n1,n2,n3), or -1 if the triple is not a state.
    int level_of(int n1, int n2, int n3) const;
    bool contains(int n1, int n2, int n3) const { return level_of(n1, n2, n3) >= 0; }

    /// Throws ValidationError for triples outside the space.
    std::size_t index(int n1, int n2, int n3) const;
    std::size_t index(const State& s) const { return index(s.n1, s.n2, s.n3); }

    int m1() const { return m1_; }
    int m2() const { return m2_; }
    int m3() const { return m3_; }

private:
    int m1_, m2_, m3_;
    std::vector<State> states_;
    std::vector<std::size_t> offsets_;
};

StateSpace build_state_space(const ModelParams& p);

/// Closed-form state count m1 + 3m2/2 - m2^2/2 + m2 m3 + m3 + 1.
std::size_t state_count_formula(int m1, int m2, int m3);

/// Setup vector indexed by n3 = 1..m3 and ragged sleep map indexed by (n2, n3).
struct Policy {
    std::vector<int> setup;              ///< setup[n3-1], n3 = 1..m3
    std::vector<std::vector<int>> sleep; ///< sleep[n2-1][n3], n2 = 1..m2, n3 = 0..m3-n2

    int setup_at(int n3) const { return setup.at(n3 - 1); }
    int sleep_at(int n2, int n3) const { return sleep.at(n2 - 1).at(n3); }
    int& setup_at(int n3) { return setup.at(n3 - 1); }
    int& sleep_at(int n2, int n3) { return sleep.at(n2 - 1).at(n3); }

    /// Entries flattened as setup followed by sleep rows; defines the lexicographic order.
    std::vector<int> flatten() const;

    bool operator==(const Policy&) const = default;
    bool operator<(const Policy& o) const { return flatten() < o.flatten(); }
};

std::string to_string(const Policy& d);

/// Policy with every entry at its lower bound.
Policy minimal_policy(const ModelParams& p);

/// Throws ValidationError naming the first offending entry and its bound.
void validate_policy(const ModelParams& p, const Policy& d);

/// Lower and upper admissible value for each flattened entry.
struct EntryBounds {
    std::vector<int> lo;
    std::vector<int> hi;
};
EntryBounds policy_entry_bounds(const ModelParams& p);

struct PolicySpaceSize {
    std::uint64_t value = 0;
    bool saturated = false; ///< true when the exact count exceeds 2^64-1
};

PolicySpaceSize policy_space_size(const ModelParams& p);

constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000ULL;

/// Thrown when the policy space exceeds the enumeration cap.
class EnumerationCapError : public ValidationError {
public:
    EnumerationCapError(PolicySpaceSize size, std::uint64_t cap);
    PolicySpaceSize size() const { return size_; }

private:
    PolicySpaceSize size_;
};

/// Throws EnumerationCapError if the space is larger than cap; returns its size otherwise.
std::uint64_t checked_policy_count(const ModelParams& p, std::uint64_t cap = kDefaultEnumerationCap);

/// Policy of lexicographic rank r (0-based) in the enumeration order.
Policy policy_at_rank(const ModelParams& p, std::uint64_t rank);

/// Every admissible policy exactly once in lexicographic order.
std::vector<Policy> enumerate_policies(const ModelParams& p,
                                       std::uint64_t cap = kDefaultEnumerationCap);

/// Streaming variant; the callback receives the rank and the policy.
void for_each_policy(const ModelParams& p,
                     const std::function<void(std::uint64_t, const Policy&)>& fn,
                     std::uint64_t cap = kDefaultEnumerationCap);

} // namespace ecdc
