#pragma once

#include "rotlab/params.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rotlab {

enum class MinMode { box, positive };

// Exact minimum of |n_1 alpha_1 + ... + n_k alpha_k| to zero over one of the
// two constraint families: box mode ranges over 0 < max|n_i| <= s (argmin
// canonicalized so its first nonzero entry is positive), positive mode over
// n_i >= 1 with sum n_i <= s.
struct MinRecord {
    std::int64_t s = 0;
    FixedPoint value;
    std::vector<std::int64_t> argmin;
    MinMode mode = MinMode::box;
};

// Raised when an enumeration would exceed the tuple budget (10^8) and the
// caller did not pass allow_large_budget.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DiophTable {
    MinMode mode = MinMode::box;
    ParameterSet params;
    std::vector<MinRecord> records;  // one per ladder rung, ascending in s

    // Record at rung s; throws std::out_of_range if s is not on the ladder.
    const MinRecord& at(std::int64_t s) const;
};

MinRecord phi(const ParameterSet& ps, std::int64_t s, bool allow_large_budget = false);
MinRecord phi_positive(const ParameterSet& ps, std::int64_t s,
                       bool allow_large_budget = false);

// Builds the whole table in one sweep: every tuple is binned by the smallest
// s whose constraint set contains it, then running minima are sampled at the
// ladder rungs (strictly increasing, first rung >= 1 in box mode / >= k in
// positive mode). Ties go to the lexicographically smallest argmin. Throws
// domain_error when a minimum falls below 2^(-F/2): such a value cannot be
// distinguished from a hidden rational dependence at working precision.
DiophTable build_table(const ParameterSet& ps, MinMode mode,
                       const std::vector<std::int64_t>& ladder,
                       bool allow_large_budget = false);

// Dense ladder 1..s_max (box) or k..s_max (positive).
DiophTable build_table(const ParameterSet& ps, MinMode mode, std::int64_t s_max,
                       bool allow_large_budget = false);

// All s in a box-mode table violating the pigeonhole bound value <= 2 s^-k,
// by exact mantissa comparison. Expected empty for independent parameters.
std::vector<std::int64_t> dirichlet_check(const DiophTable& tbl);

// All-nonzero tuples |q_i| <= s_max, first coordinate positive, with
// |sum q_i alpha_i| * (prod |q_i|)^(1 + delta) <= 1, delta = num/den checked
// exactly in integers. Finiteness (stabilization as s_max grows) is the
// algebraic-independence prediction.
std::vector<std::vector<std::int64_t>> schmidt_violation_scan(
    const ParameterSet& ps, std::int64_t delta_num, std::int64_t delta_den,
    std::int64_t s_max, bool allow_large_budget = false);

struct ExponentFit {
    double tau = 0.0;    // decay exponent: value ~ C * s^-tau
    double log_c = 0.0;  // natural-log intercept
    double residual = 0.0;
    std::int64_t s_min = 0;
    std::int64_t s_max = 0;
    // Same fit restricted to rungs where the minimum strictly improves.
    double tau_envelope = 0.0;
    double log_c_envelope = 0.0;
    std::size_t envelope_points = 0;
};

ExponentFit exponent_fit(const DiophTable& tbl, std::int64_t s_min, std::int64_t s_max);

// ceil((C t / 2)^(1/tau)) clamped to [1, t]: the predicted lower bound on the
// number of occupied scale-1/t intervals. Non-positive tau yields 1.
std::int64_t predicted_min_cover(std::int64_t t, const ExponentFit& fit);

// Positive pairs (k_1, k_2) with max(k_1, k_2) <= max_k satisfying
// |k_1 alpha_1 + k_2 alpha_2| <= max(k_1, k_2)^-gamma for the golden exponent
// gamma = (1 + sqrt 5)/2. Requires k = 2.
std::vector<std::array<std::int64_t, 2>> golden_pair_scan(const ParameterSet& ps,
                                                          std::int64_t max_k);

}  // namespace rotlab
