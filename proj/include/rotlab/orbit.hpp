// Multi-rotation orbits x_0 = 0, x_i = reduce(x_{i-1} + alpha_{w(i)}), plus
// the quantities the doubling-word analysis runs on: word endpoints, the
// return points x_{L_i} with their doubling recursion, the epsilon-avoidance
// construction, and density diagnostics (gap profile, closest return).

#pragma once

#include "rotlab/numerics.hpp"
#include "rotlab/params.hpp"
#include "rotlab/sequences.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace rotlab {

class Orbit {
public:
    Orbit(ParameterSet params, StreamKind source, std::vector<Digit> digits,
          std::vector<CirclePoint> points);

    const ParameterSet& params() const { return params_; }
    StreamKind source() const { return source_; }
    std::uint64_t length() const { return digits_.size(); }  // N
    int frac_bits() const { return params_.frac_bits(); }

    const std::vector<CirclePoint>& points() const { return points_; }  // x_0..x_N
    const std::vector<Digit>& digits() const { return digits_; }        // w(1)..w(N)
    const CirclePoint& point(std::uint64_t i) const { return points_.at(i); }

private:
    ParameterSet params_;
    StreamKind source_;
    std::vector<Digit> digits_;
    std::vector<CirclePoint> points_;
};

// Walks the stream for n steps; throws if the stream runs out or emits a
// digit outside [1, ps.k()].
Orbit compute_orbit(const ParameterSet& ps, const DigitStream& s, std::uint64_t n);

// Orbit endpoint of a finite word applied from 0: exact circle sum of its
// digits' parameters.
CirclePoint word_endpoint(const Word& w, const ParameterSet& ps);

// delta(a, b) = endpoint(b) - endpoint(a) on the circle.
CirclePoint delta(const Word& a, const Word& b, const ParameterSet& ps);

// The return points x_{L_1}, ..., x_{L_depth} along the prefix schedule
// L_i = |w_{i-1}| + l_i, computed by the doubling recursion
//   x_{L_1} = endpoint(a_0 a_1),  x_{L_{i+1}} = reduce(2 x_{L_i} + delta(a_i, a_{i+1})),
// which costs O(depth) regardless of how large the L_i grow.
std::vector<CirclePoint> return_points(const RecurrentBuilder& b, const ParameterSet& ps,
                                       std::size_t depth);

// Same values read off a literally computed orbit; usable only while
// L_depth <= 2^62 (stage lengths double, so this caps depth near 60).
// Kept as an independent cross-check of the recursion.
std::vector<CirclePoint> return_points_streamed(const RecurrentBuilder& b,
                                                const ParameterSet& ps, std::size_t depth);

// Max over 1 <= i < depth of ||x_{L_{i+1}} - 2 x_{L_i} - delta(a_i, a_{i+1})||
// with the x_{L_i} taken from the streamed orbit. Exact arithmetic makes the
// true value 0; anything else is a bug.
FixedPoint check_return_recursion(const RecurrentBuilder& b, const ParameterSet& ps,
                                  std::size_t depth);

// Digit record of an avoidance run; digit 1 = alpha-step, 2 = beta-step.
class AvoidanceStream : public DigitStream {
public:
    explicit AvoidanceStream(Word digits);

    Digit digit_at(std::uint64_t n) const override;
    StreamKind kind() const override { return StreamKind::avoidance; }
    int alphabet_size() const override { return 2; }

private:
    Word digits_;
};

// Raised when both the alpha-step and the beta-step land inside (-eps, eps):
// the construction's implicit claim failed at this precision.
class AvoidanceFailure : public std::runtime_error {
public:
    AvoidanceFailure(std::uint64_t step, const std::string& detail);
    std::uint64_t step() const { return step_; }

private:
    std::uint64_t step_;
};

struct AvoidanceResult {
    Orbit orbit;
    std::shared_ptr<AvoidanceStream> stream;
};

// The avoidance construction: step by alpha unless that lands in (-eps, eps),
// in which case step by beta; the beta fallback must escape the interval or
// AvoidanceFailure is thrown. Requires 0 < eps < 0.5 * |alpha - beta|.
AvoidanceResult avoidance_orbit(const CirclePoint& alpha, const CirclePoint& beta,
                                const FixedPoint& eps, std::uint64_t n);

struct GapProfile {
    std::vector<FixedPoint> gaps;  // circular gaps between distinct points, ascending
    FixedPoint max_gap;
    std::size_t distinct_gaps = 0;
    std::size_t distinct_points = 0;
};

// Gaps between neighbouring distinct orbit points on the circle, including
// the wrap-around gap; they sum to exactly 1.
GapProfile gap_stats(const Orbit& o);

// min over 1 <= i <= N of ||x_i||: how close the orbit returns to 0.
FixedPoint min_return(const Orbit& o);

struct ShiftContainmentReport {
    std::size_t occurrences = 0;     // recurrences of the prefix past position 0
    FixedPoint max_deviation;        // sup over checks; 0 in exact arithmetic
};

// Finite form of the shift-containment lemma: wherever the digit prefix
// w(1..prefix_len) recurs at offset i, the orbit satisfies
// x_{i+j} = reduce(x_i + x_j) for j <= prefix_len. Throws std::runtime_error
// if the prefix never recurs within the first n digits.
ShiftContainmentReport shift_containment_check(const DigitStream& s, const ParameterSet& ps,
                                               std::uint64_t n, std::size_t prefix_len,
                                               const FixedPoint& tol);

}  // namespace rotlab
