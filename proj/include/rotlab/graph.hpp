#pragma once

#include "rotlab/covering.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace rotlab {

struct GraphEdge {
    std::int64_t from = 0;
    std::int64_t to = 0;
    Digit digit = 0;
};

// Directed rotation graph at scale t: vertex j is the partition interval
// [-0.5 + j/t, -0.5 + (j+1)/t], and digit d sends vertex a to the intervals
// met by the translated interval a + alpha_d. Targets come from the exact
// endpoint images with the right endpoint treated half-open, so each
// (source, digit) pair has one target when the translate nests and two when
// it straddles a partition endpoint.
class RotationGraph {
public:
    RotationGraph(std::int64_t t, int k, std::vector<std::array<std::int64_t, 2>> targets);

    std::int64_t t() const { return t_; }
    int k() const { return k_; }

    // Targets of (source, digit); [0] == [1] when there is a single target.
    const std::array<std::int64_t, 2>& targets(std::int64_t source, Digit digit) const;
    bool has_edge(std::int64_t from, std::int64_t to, Digit digit) const;

    // Flattened distinct (from, to, digit) triples.
    std::vector<GraphEdge> edges() const;

    std::int64_t max_out_degree() const;
    std::int64_t max_in_degree() const;
    bool has_self_loop() const;
    // True when some ordered vertex pair is connected by two digit labels.
    bool has_parallel_edges() const;

private:
    std::int64_t t_;
    int k_;
    std::vector<std::array<std::int64_t, 2>> targets_;  // [source * k + digit - 1]
};

RotationGraph build_graph(const ParameterSet& ps, std::int64_t t);

// Smallest power of two t* such that every digit moves points by more than
// one interval (1/t* < |alpha_i| to zero) and distinct digits land more than
// two intervals apart (2/t* < |alpha_i - alpha_j|); above t* the graph has no
// self-loops and no parallel edges. Throws when some governing norm is below
// 2^(-F/2), too small to trust at working precision.
std::int64_t degeneracy_threshold(const ParameterSet& ps);

// Interval indices g_1..g_{N+1} visited by an orbit, g_j = index of x_{j-1};
// the step from g_j to g_{j+1} uses digit w(j), recorded in digits[j-1].
struct WalkTrace {
    std::int64_t t = 0;
    int k = 0;
    std::vector<std::int64_t> indices;
    std::vector<Digit> digits;
};

// Requires t >= degeneracy_threshold and validates every consecutive index
// pair against the edges of build_graph (a failure means an indexing bug).
WalkTrace walk_trace(const Orbit& o, std::int64_t t);

// A primitive cycle inside a trace: positions are 1-based into indices,
// indices[start] == indices[end], everything strictly between is pairwise
// distinct and differs from the endpoints, s = end - start edges, and
// counts[i] tallies digit i+1 along the cycle (sum = s).
struct CycleWitness {
    std::size_t start = 0;
    std::size_t end = 0;
    std::int64_t s = 0;
    std::vector<std::int64_t> counts;
    std::int64_t t = 0;
};

// Finds the primitive cycle with the smallest end position, breaking ties
// toward the largest start. Requires trace length > t so the pigeonhole
// guarantees a repeat.
CycleWitness find_primitive_cycle(const WalkTrace& w);

// Distance to zero of sum counts[i] * alpha_{i+1}; for a cycle extracted from
// a valid trace this is at most 2/t, and the function throws if the bound
// fails (it is a theorem for correctly extracted cycles).
FixedPoint cycle_form_value(const CycleWitness& c, const ParameterSet& ps);

}  // namespace rotlab
