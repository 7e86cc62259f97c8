#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rotlab/graph.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace rotlab;

namespace {

constexpr int F = 96;

ParameterSet rt23() { return ParameterSet::from_texts({"sqrt(2)", "sqrt(3)"}, F); }

// Closed-arc intersection on the circle of circumference t * 2^F: the direct
// edge definition. Includes targets touched in a single point, which the
// half-open builder deliberately drops at exact alignments.
std::set<std::int64_t> closed_targets_oracle(const ParameterSet& ps, std::int64_t t,
                                             std::int64_t source, Digit d) {
    const int f = ps.frac_bits();
    const BigInt one = BigInt(1) << f;
    const BigInt circle = one * t;
    BigInt lifted = ps.alpha(static_cast<std::size_t>(d)).mantissa() % one;
    if (lifted.sign() < 0) lifted += one;
    BigInt arc_start = (one * source + lifted * t) % circle;

    std::set<std::int64_t> out;
    for (std::int64_t b = 0; b < t; ++b) {
        BigInt fwd = (one * b - arc_start + circle) % circle;   // arc start -> interval start
        BigInt back = (arc_start - one * b + circle) % circle;  // interval start -> arc start
        if (fwd <= one || back <= one) out.insert(b);
    }
    return out;
}

bool arc_start_on_boundary(const ParameterSet& ps, std::int64_t t, std::int64_t source,
                           Digit d) {
    const int f = ps.frac_bits();
    const BigInt one = BigInt(1) << f;
    BigInt lifted = ps.alpha(static_cast<std::size_t>(d)).mantissa() % one;
    if (lifted.sign() < 0) lifted += one;
    BigInt rem = (one * source + lifted * t) % one;
    return rem.is_zero();
}

std::set<std::int64_t> built_targets(const RotationGraph& g, std::int64_t source, Digit d) {
    const auto& tg = g.targets(source, d);
    return {tg[0], tg[1]};
}

void check_witness_invariants(const CycleWitness& c, const WalkTrace& w) {
    REQUIRE(c.start >= 1);
    REQUIRE(c.end <= w.indices.size());
    REQUIRE(c.start < c.end);
    CHECK(w.indices[c.start - 1] == w.indices[c.end - 1]);
    std::set<std::int64_t> interior;
    for (std::size_t p = c.start + 1; p < c.end; ++p) {
        CHECK(w.indices[p - 1] != w.indices[c.start - 1]);
        CHECK(interior.insert(w.indices[p - 1]).second);
    }
    std::int64_t total = 0;
    for (std::int64_t n : c.counts) {
        CHECK(n >= 0);
        total += n;
    }
    CHECK(total == c.s);
    CHECK(c.s == static_cast<std::int64_t>(c.end - c.start));
}

WalkTrace synthetic_trace(std::mt19937_64& rng) {
    WalkTrace w;
    w.t = 2 + static_cast<std::int64_t>(rng() % 49);
    w.k = 1 + static_cast<int>(rng() % 3);
    std::size_t len = static_cast<std::size_t>(w.t) + 1 + rng() % 150;
    for (std::size_t i = 0; i < len; ++i)
        w.indices.push_back(static_cast<std::int64_t>(rng() % w.t));
    for (std::size_t i = 0; i + 1 < len; ++i)
        w.digits.push_back(1 + static_cast<Digit>(rng() % w.k));
    return w;
}

// All primitive cycles of a trace by direct enumeration, then the
// (smallest end, largest start) representative.
CycleWitness dumb_oracle(const WalkTrace& w) {
    const std::size_t n = w.indices.size();
    std::size_t best_start = 0, best_end = 0;
    for (std::size_t a = 1; a <= n; ++a)
        for (std::size_t b = a + 1; b <= n; ++b) {
            if (w.indices[a - 1] != w.indices[b - 1]) continue;
            bool primitive = true;
            std::set<std::int64_t> interior;
            for (std::size_t p = a + 1; p < b && primitive; ++p) {
                if (w.indices[p - 1] == w.indices[a - 1]) primitive = false;
                if (!interior.insert(w.indices[p - 1]).second) primitive = false;
            }
            if (!primitive) continue;
            if (best_end == 0 || b < best_end || (b == best_end && a > best_start)) {
                best_start = a;
                best_end = b;
            }
        }
    REQUIRE(best_end != 0);
    CycleWitness c;
    c.start = best_start;
    c.end = best_end;
    c.s = static_cast<std::int64_t>(best_end - best_start);
    c.t = w.t;
    c.counts.assign(static_cast<std::size_t>(w.k), 0);
    for (std::size_t j = best_start; j < best_end; ++j) ++c.counts[w.digits[j - 1] - 1];
    return c;
}

}  // namespace

TEST_CASE("exact quarter rotation maps each interval onto the next") {
    ParameterSet ps = ParameterSet::from_texts({"1/4"}, F);
    RotationGraph g = build_graph(ps, 4);
    for (std::int64_t j = 0; j < 4; ++j) {
        const auto& tg = g.targets(j, 1);
        CHECK(tg[0] == (j + 1) % 4);
        CHECK(tg[1] == (j + 1) % 4);
    }
    CHECK(g.max_out_degree() == 1);
    CHECK(g.max_in_degree() == 1);
    CHECK_FALSE(g.has_self_loop());
}

TEST_CASE("an irrational rotation straddles a boundary from every source") {
    ParameterSet ps = ParameterSet::from_texts({"sqrt(2)"}, F);
    RotationGraph g = build_graph(ps, 64);
    for (std::int64_t j = 0; j < 64; ++j) CHECK(built_targets(g, j, 1).size() == 2);
    CHECK(g.max_out_degree() == 2);
    CHECK(g.edges().size() == 128);
}

TEST_CASE("degree bound 3k holds at t = 128 over {sqrt2, sqrt3}") {
    RotationGraph g = build_graph(rt23(), 128);
    CHECK(g.max_out_degree() <= 6);
    CHECK(g.max_in_degree() <= 6);
    MESSAGE("observed max degrees: out=", g.max_out_degree(), " in=", g.max_in_degree());
    CHECK_FALSE(g.has_self_loop());
    CHECK_FALSE(g.has_parallel_edges());
}

TEST_CASE("endpoint-image edges match closed-arc intersection off alignments") {
    ParameterSet ps = rt23();
    for (std::int64_t t : {3, 4, 5, 8, 16, 37}) {
        RotationGraph g = build_graph(ps, t);
        for (Digit d = 1; d <= 2; ++d)
            for (std::int64_t j = 0; j < t; ++j) {
                auto oracle = closed_targets_oracle(ps, t, j, d);
                auto built = built_targets(g, j, d);
                REQUIRE_FALSE(arc_start_on_boundary(ps, t, j, d));
                CHECK(built == oracle);
            }
    }
}

TEST_CASE("at exact alignment the builder keeps the nesting interval only") {
    ParameterSet ps = ParameterSet::from_texts({"1/4"}, F);
    RotationGraph g = build_graph(ps, 4);
    for (std::int64_t j = 0; j < 4; ++j) {
        REQUIRE(arc_start_on_boundary(ps, 4, j, 1));
        auto built = built_targets(g, j, 1);
        auto oracle = closed_targets_oracle(ps, 4, j, 1);
        CHECK(built.size() == 1);
        // the closed oracle adds the two single-point touches
        CHECK(oracle.size() == 3);
        CHECK(std::includes(oracle.begin(), oracle.end(), built.begin(), built.end()));
    }
}

TEST_CASE("degeneracy thresholds match direct norm evaluation") {
    CHECK(degeneracy_threshold(rt23()) == 8);
    CHECK(degeneracy_threshold(ParameterSet::from_texts({"1/2"}, F)) == 4);
    CHECK(degeneracy_threshold(ParameterSet::from_texts({"sqrt(2)"}, F)) == 4);
}

TEST_CASE("degenerate parameters are rejected by the threshold") {
    const int f = 80;
    // |alpha| = 2^-47 < 2^-40
    ParameterSet tiny = ParameterSet::from_texts({"1/140737488355328"}, f);
    CHECK_THROWS_AS(degeneracy_threshold(tiny), std::domain_error);
    // pair distance 2^-50 < 2^-40
    ParameterSet close =
        ParameterSet::from_texts({"sqrt(2)", "sqrt(2) + 1/1125899906842624"}, f);
    CHECK_THROWS_AS(degeneracy_threshold(close), std::domain_error);
}

TEST_CASE("above the threshold: no loops, no parallel edges") {
    const ParameterSet sets[] = {rt23(), ParameterSet::from_texts({"pi/3", "e/4"}, F),
                                 ParameterSet::from_texts({"sqrt(2)", "sqrt(3)", "sqrt(5)"}, F)};
    for (const ParameterSet& ps : sets) {
        std::int64_t ts = degeneracy_threshold(ps);
        for (std::int64_t t : {ts, 2 * ts, 3 * ts, 8 * ts}) {
            RotationGraph g = build_graph(ps, t);
            CHECK_FALSE(g.has_self_loop());
            CHECK_FALSE(g.has_parallel_edges());
            CHECK(g.max_out_degree() <= 3 * static_cast<std::int64_t>(ps.k()));
            CHECK(g.max_in_degree() <= 3 * static_cast<std::int64_t>(ps.k()));
        }
    }
}

TEST_CASE("below the threshold loops and parallels do appear") {
    ParameterSet small = ParameterSet::from_texts({"1/16"}, F);
    CHECK(build_graph(small, 2).has_self_loop());
    ParameterSet pair = ParameterSet::from_texts({"1/16", "1/8"}, F);
    CHECK(build_graph(pair, 2).has_parallel_edges());
}

TEST_CASE("graph accessors validate their arguments") {
    RotationGraph g = build_graph(rt23(), 8);
    CHECK_THROWS_AS(g.targets(8, 1), std::out_of_range);
    CHECK_THROWS_AS(g.targets(-1, 1), std::out_of_range);
    CHECK_THROWS_AS(g.targets(0, 0), std::out_of_range);
    CHECK_THROWS_AS(g.targets(0, 3), std::out_of_range);
    CHECK_THROWS_AS(build_graph(rt23(), 0), std::invalid_argument);
}

TEST_CASE("walk traces follow graph edges") {
    ParameterSet ps = ParameterSet::from_texts({"sqrt(2)"}, F);
    PeriodicStream ones({1});
    Orbit o = compute_orbit(ps, ones, 10);
    WalkTrace w = walk_trace(o, 16);
    REQUIRE(w.indices.size() == 11);
    RotationGraph g = build_graph(ps, 16);
    for (std::size_t j = 0; j + 1 < w.indices.size(); ++j)
        CHECK(g.has_edge(w.indices[j], w.indices[j + 1], 1));
    CHECK(w.indices[0] == interval_index(CirclePoint::zero(F), 16));

    Orbit seed = compute_orbit(ps, ones, 0);
    CHECK(walk_trace(seed, 16).indices.size() == 1);
    CHECK_THROWS_AS(walk_trace(o, 2), std::invalid_argument);  // below threshold 4
}

TEST_CASE("shrinking a first repeat: pinned small traces") {
    WalkTrace a;
    a.t = 4;
    a.k = 1;
    a.indices = {1, 2, 3, 0, 1};
    a.digits = {1, 1, 1, 1};
    CycleWitness ca = find_primitive_cycle(a);
    CHECK(ca.start == 1);
    CHECK(ca.end == 5);
    CHECK(ca.s == 4);
    CHECK(ca.counts == std::vector<std::int64_t>{4});

    WalkTrace b;
    b.t = 4;
    b.k = 2;
    b.indices = {1, 2, 1, 3, 1, 2, 1};
    b.digits = {1, 2, 1, 2, 1, 2};
    CycleWitness cb = find_primitive_cycle(b);
    CHECK(cb.start == 1);
    CHECK(cb.end == 3);
    CHECK(cb.s == 2);
    CHECK(cb.counts == std::vector<std::int64_t>{1, 1});
}

TEST_CASE("extraction enforces its preconditions") {
    WalkTrace w;
    w.t = 6;
    w.k = 1;
    w.indices = {0, 1, 2, 3};
    w.digits = {1, 1, 1};
    CHECK_THROWS_AS(find_primitive_cycle(w), std::invalid_argument);  // length <= t
    w.t = 2;
    w.digits = {1, 1};  // wrong size
    CHECK_THROWS_AS(find_primitive_cycle(w), std::invalid_argument);
}

TEST_CASE("witness invariants hold on 10^4 random traces") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 10000; ++trial) {
        WalkTrace w = synthetic_trace(rng);
        CycleWitness c = find_primitive_cycle(w);
        check_witness_invariants(c, w);
    }
}

TEST_CASE("extraction matches the enumerate-everything oracle") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 400; ++trial) {
        WalkTrace w = synthetic_trace(rng);
        if (w.indices.size() > 120) w.indices.resize(120);  // keep the O(n^3) oracle cheap
        if (w.indices.size() <= static_cast<std::size_t>(w.t)) continue;
        w.digits.resize(w.indices.size() - 1);
        CycleWitness mine = find_primitive_cycle(w);
        CycleWitness oracle = dumb_oracle(w);
        CHECK(mine.start == oracle.start);
        CHECK(mine.end == oracle.end);
        CHECK(mine.counts == oracle.counts);
    }
}

TEST_CASE("real traces above threshold give cycles of length at least two") {
    std::mt19937_64 rng(107);
    ParameterSet ps = rt23();
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Word> words;
        for (int i = 0; i < 3; ++i)
            words.push_back({1 + static_cast<Digit>(rng() % 2), 1 + static_cast<Digit>(rng() % 2)});
        auto b = RecurrentBuilder::random(words, rng());
        RecurrentStream rec(b);
        Orbit o = compute_orbit(ps, rec, 70);
        WalkTrace w = walk_trace(o, 64);
        CycleWitness c = find_primitive_cycle(w);
        check_witness_invariants(c, w);
        CHECK(c.s >= 2);
        FixedPoint v = cycle_form_value(c, ps);
        CHECK(v.mantissa() * 64 <= BigInt(1) << (F + 1));
    }
}

TEST_CASE("cycle value specializes to |s * alpha| for one parameter") {
    ParameterSet ps = ParameterSet::from_texts({"sqrt(2)"}, F);
    PeriodicStream ones({1});
    Orbit o = compute_orbit(ps, ones, 20);
    WalkTrace w = walk_trace(o, 16);
    CycleWitness c = find_primitive_cycle(w);
    FixedPoint v = cycle_form_value(c, ps);
    FixedPoint scaled(ps.alpha(1).mantissa() * c.s, ps.frac_bits());
    CHECK(v == dist_to_zero(reduce(scaled)));
}

TEST_CASE("pinned cycle of the Thue-Morse walk at t = 1024") {
    const int f = 64;
    ParameterSet ps = ParameterSet::from_texts({"sqrt(2)", "sqrt(3)"}, f);
    ThueMorseStream tm;
    Orbit o = compute_orbit(ps, tm, 1300);
    CycleWitness c = find_primitive_cycle(walk_trace(o, 1024));
    CHECK(c.start == 3);
    CHECK(c.end == 12);
    CHECK(c.s == 9);
    CHECK(c.counts == std::vector<std::int64_t>{5, 4});
    FixedPoint v = cycle_form_value(c, ps);
    // |5 sqrt2 + 4 sqrt3| = |13.99927104...| to zero, well under 2/1024
    CHECK(v.to_decimal(12) == "0.000728957859016");
    CHECK(v <= FixedPoint::from_ratio(2, 1024, f));
}

TEST_CASE("corrupted witnesses are rejected") {
    ParameterSet ps = rt23();
    CycleWitness c;
    c.start = 1;
    c.end = 3;
    c.s = 2;
    c.t = 1024;
    c.counts = {2, 1};  // sum != s
    CHECK_THROWS_AS(cycle_form_value(c, ps), std::invalid_argument);
    c.counts = {1};  // wrong arity
    CHECK_THROWS_AS(cycle_form_value(c, ps), std::invalid_argument);
    c.s = 1;
    c.counts = {1, 0};  // consistent but |sqrt2| = 0.414 > 2/1024
    CHECK_THROWS_AS(cycle_form_value(c, ps), std::logic_error);
}
