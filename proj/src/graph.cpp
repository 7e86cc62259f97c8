#include "rotlab/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace rotlab {

RotationGraph::RotationGraph(std::int64_t t, int k,
                             std::vector<std::array<std::int64_t, 2>> targets)
    : t_(t), k_(k), targets_(std::move(targets)) {
    if (t_ < 1 || k_ < 1 || targets_.size() != static_cast<std::size_t>(t_) * k_)
        throw std::invalid_argument("RotationGraph: inconsistent dimensions");
}

const std::array<std::int64_t, 2>& RotationGraph::targets(std::int64_t source,
                                                          Digit digit) const {
    if (source < 0 || source >= t_) throw std::out_of_range("RotationGraph: bad source");
    if (digit < 1 || digit > k_) throw std::out_of_range("RotationGraph: bad digit");
    return targets_[static_cast<std::size_t>(source) * k_ + (digit - 1)];
}

bool RotationGraph::has_edge(std::int64_t from, std::int64_t to, Digit digit) const {
    const auto& tg = targets(from, digit);
    return tg[0] == to || tg[1] == to;
}

std::vector<GraphEdge> RotationGraph::edges() const {
    std::vector<GraphEdge> out;
    for (std::int64_t j = 0; j < t_; ++j)
        for (Digit d = 1; d <= k_; ++d) {
            const auto& tg = targets(j, d);
            out.push_back({j, tg[0], d});
            if (tg[1] != tg[0]) out.push_back({j, tg[1], d});
        }
    return out;
}

std::int64_t RotationGraph::max_out_degree() const {
    std::int64_t best = 0;
    for (std::int64_t j = 0; j < t_; ++j) {
        std::int64_t deg = 0;
        for (Digit d = 1; d <= k_; ++d) {
            const auto& tg = targets(j, d);
            deg += tg[0] == tg[1] ? 1 : 2;
        }
        best = std::max(best, deg);
    }
    return best;
}

std::int64_t RotationGraph::max_in_degree() const {
    std::vector<std::int64_t> in(static_cast<std::size_t>(t_), 0);
    for (const GraphEdge& e : edges()) ++in[static_cast<std::size_t>(e.to)];
    return *std::max_element(in.begin(), in.end());
}

bool RotationGraph::has_self_loop() const {
    for (const GraphEdge& e : edges())
        if (e.from == e.to) return true;
    return false;
}

bool RotationGraph::has_parallel_edges() const {
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const GraphEdge& e : edges())
        if (!seen.insert({e.from, e.to}).second) return true;
    return false;
}

RotationGraph build_graph(const ParameterSet& ps, std::int64_t t) {
    if (t < 1) throw std::invalid_argument("build_graph: t must be >= 1");
    const int f = ps.frac_bits();
    const BigInt one = BigInt(1) << f;
    const BigInt circle = one * t;
    const int k = static_cast<int>(ps.k());

    std::vector<std::array<std::int64_t, 2>> targets(static_cast<std::size_t>(t) * k);
    for (Digit d = 1; d <= k; ++d) {
        BigInt lifted = ps.alpha(static_cast<std::size_t>(d)).mantissa() % one;
        if (lifted.sign() < 0) lifted += one;
        const BigInt offset = lifted * t;
        for (std::int64_t j = 0; j < t; ++j) {
            BigInt left = (one * j + offset) % circle;
            BigInt c_left = left >> f;
            BigInt c_right = ((left + one - 1) >> f) % t;
            targets[static_cast<std::size_t>(j) * k + (d - 1)] = {
                c_left.convert_to<std::int64_t>(), c_right.convert_to<std::int64_t>()};
        }
    }
    return RotationGraph(t, k, std::move(targets));
}

std::int64_t degeneracy_threshold(const ParameterSet& ps) {
    const int f = ps.frac_bits();
    const BigInt one = BigInt(1) << f;
    const BigInt floor_norm = BigInt(1) << (f - f / 2);

    std::vector<BigInt> self_norms, pair_norms;
    for (std::size_t i = 1; i <= ps.k(); ++i) {
        self_norms.push_back(dist_to_zero(ps.alpha(i)).mantissa());
        for (std::size_t j = i + 1; j <= ps.k(); ++j)
            pair_norms.push_back(dist_to_zero(circle_sub(ps.alpha(i), ps.alpha(j))).mantissa());
    }
    for (const BigInt& m : self_norms)
        if (m < floor_norm)
            throw std::domain_error(
                "degeneracy_threshold: a parameter is within 2^(-F/2) of zero");
    for (const BigInt& m : pair_norms)
        if (m < floor_norm)
            throw std::domain_error(
                "degeneracy_threshold: two parameters are within 2^(-F/2) of each other");

    std::int64_t t = 1;
    auto admissible = [&](std::int64_t cand) {
        for (const BigInt& m : self_norms)
            if (m * cand <= one) return false;
        for (const BigInt& m : pair_norms)
            if (m * cand <= 2 * one) return false;
        return true;
    };
    while (!admissible(t)) t *= 2;
    return t;
}

WalkTrace walk_trace(const Orbit& o, std::int64_t t) {
    const std::int64_t threshold = degeneracy_threshold(o.params());
    if (t < threshold)
        throw std::invalid_argument("walk_trace: t = " + std::to_string(t) +
                                    " is below the degeneracy threshold " +
                                    std::to_string(threshold));
    RotationGraph g = build_graph(o.params(), t);

    WalkTrace w;
    w.t = t;
    w.k = static_cast<int>(o.params().k());
    w.digits = o.digits();
    w.indices.reserve(o.points().size());
    for (const CirclePoint& x : o.points()) w.indices.push_back(interval_index(x, t));
    for (std::size_t j = 0; j + 1 < w.indices.size(); ++j)
        if (!g.has_edge(w.indices[j], w.indices[j + 1], w.digits[j]))
            throw std::logic_error("walk_trace: consecutive intervals not joined by an edge");
    return w;
}

CycleWitness find_primitive_cycle(const WalkTrace& w) {
    const std::size_t n = w.indices.size();
    if (w.t < 1 || n <= static_cast<std::size_t>(w.t))
        throw std::invalid_argument("find_primitive_cycle: trace no longer than t");
    if (w.k < 1 || w.digits.size() + 1 != n)
        throw std::invalid_argument("find_primitive_cycle: malformed trace");

    // The first position whose value was seen before, paired with the last
    // earlier occurrence, is automatically primitive: an interior repeat or
    // an interior copy of the endpoint would itself have been an earlier or
    // tighter first repeat.
    std::unordered_map<std::int64_t, std::size_t> last_seen;
    for (std::size_t pos = 1; pos <= n; ++pos) {
        auto [it, fresh] = last_seen.try_emplace(w.indices[pos - 1], pos);
        if (fresh) continue;
        CycleWitness c;
        c.start = it->second;
        c.end = pos;
        c.s = static_cast<std::int64_t>(pos - it->second);
        c.t = w.t;
        c.counts.assign(static_cast<std::size_t>(w.k), 0);
        for (std::size_t j = c.start; j < c.end; ++j) {
            Digit d = w.digits[j - 1];
            if (d < 1 || d > w.k)
                throw std::invalid_argument("find_primitive_cycle: digit outside alphabet");
            ++c.counts[static_cast<std::size_t>(d - 1)];
        }
        return c;
    }
    throw std::logic_error("find_primitive_cycle: no repeat in a trace longer than t");
}

FixedPoint cycle_form_value(const CycleWitness& c, const ParameterSet& ps) {
    if (c.counts.size() != ps.k())
        throw std::invalid_argument("cycle_form_value: count/parameter size mismatch");
    const int f = ps.frac_bits();
    BigInt sum = 0;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < c.counts.size(); ++i) {
        if (c.counts[i] < 0) throw std::invalid_argument("cycle_form_value: negative count");
        sum += ps.alpha(i + 1).mantissa() * c.counts[i];
        total += c.counts[i];
    }
    if (total != c.s) throw std::invalid_argument("cycle_form_value: counts do not sum to s");

    FixedPoint value = dist_to_zero(reduce(FixedPoint(sum, f)));
    if (value.mantissa() * c.t > BigInt(1) << (f + 1))
        throw std::logic_error("cycle_form_value: cycle value exceeds 2/t");
    return value;
}

}  // namespace rotlab
