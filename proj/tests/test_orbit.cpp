#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rotlab/orbit.hpp"

#include <random>

using namespace rotlab;

namespace {

constexpr int F = 96;

ParameterSet rt23() { return ParameterSet::from_texts({"sqrt(2)", "sqrt(3)"}, F); }

std::vector<Word> random_words(std::mt19937_64& rng, std::size_t count) {
    std::vector<Word> words;
    for (std::size_t i = 0; i < count; ++i) {
        Word w;
        std::size_t len = 1 + rng() % 3;
        for (std::size_t j = 0; j < len; ++j) w.push_back(1 + static_cast<Digit>(rng() % 2));
        words.push_back(std::move(w));
    }
    return words;
}

}  // namespace

TEST_CASE("single rotation by sqrt(2)-1 visits the expected points") {
    ParameterSet ps = ParameterSet::from_texts({"sqrt(2)-1"}, F);
    PeriodicStream ones({1});
    Orbit o = compute_orbit(ps, ones, 3);
    CHECK(o.length() == 3);
    CHECK(o.point(0).fixed().is_zero());
    CHECK(o.point(1).fixed().to_decimal(5) == "0.41421");
    CHECK(o.point(2).fixed().to_decimal(5) == "-0.17157");
    CHECK(o.point(3).fixed().to_decimal(5) == "0.24264");
    CHECK(o.digits() == std::vector<Digit>{1, 1, 1});
}

TEST_CASE("zero-length orbit is the single point 0") {
    Orbit o = compute_orbit(rt23(), ThueMorseStream(), 0);
    CHECK(o.length() == 0);
    REQUIRE(o.points().size() == 1);
    CHECK(o.point(0).fixed().is_zero());
}

TEST_CASE("constant digit stream gives the pure rotation i*alpha") {
    ParameterSet ps = rt23();
    PeriodicStream twos({2});
    Orbit o = compute_orbit(ps, twos, 200);
    for (std::uint64_t i = 0; i <= 200; ++i) {
        FixedPoint scaled(ps.alpha(2).mantissa() * i, F);
        CHECK(o.point(i) == reduce(scaled));
    }
}

TEST_CASE("orbits are deterministic bit for bit") {
    ParameterSet ps = rt23();
    ThueMorseStream tm;
    Orbit a = compute_orbit(ps, tm, 500);
    Orbit b = compute_orbit(ps, tm, 500);
    for (std::uint64_t i = 0; i <= 500; ++i) CHECK(a.point(i).mantissa() == b.point(i).mantissa());
}

TEST_CASE("orbit computation surfaces stream exhaustion and bad digits") {
    ParameterSet ps = rt23();
    ExplicitStream short_stream({1, 2, 1});
    CHECK_THROWS_AS(compute_orbit(ps, short_stream, 5), std::out_of_range);
    ExplicitStream bad_digit({1, 3});
    CHECK_THROWS_AS(compute_orbit(ps, bad_digit, 2), std::out_of_range);
}

TEST_CASE("word endpoints accumulate exactly") {
    ParameterSet ps = rt23();
    CHECK(word_endpoint({}, ps).fixed().is_zero());
    CHECK(word_endpoint({1}, ps) == ps.alpha(1));
    CHECK(word_endpoint({2}, ps) == ps.alpha(2));
    // sqrt(2) + sqrt(3) = 3.14626..., reduced to 0.14626...
    CHECK(word_endpoint({1, 2}, ps).fixed().to_decimal(5) == "0.14626");
    // endpoint only depends on digit counts, not order
    CHECK(word_endpoint({1, 2, 1}, ps) == word_endpoint({2, 1, 1}, ps));
}

TEST_CASE("delta compares word endpoints") {
    ParameterSet ps = rt23();
    CHECK(delta({1, 2}, {1, 2}, ps).fixed().is_zero());
    CHECK(delta({}, {2, 1}, ps) == word_endpoint({2, 1}, ps));
    // sqrt(3) - sqrt(2) = 0.31783...
    CHECK(delta({1}, {2}, ps).fixed().to_decimal(5) == "0.31784");
}

TEST_CASE("first return point is the endpoint of a_0 a_1") {
    ParameterSet ps = rt23();
    auto b = RecurrentBuilder::from_words({{1, 2}, {2}}, true);
    auto pts = return_points(*b, ps, 1);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0] == word_endpoint({1, 2, 2}, ps));
}

TEST_CASE("constant builder reduces to the single rotation at L_i = 2^i") {
    ParameterSet ps = ParameterSet::from_texts({"sqrt(2)"}, F);
    auto b = RecurrentBuilder::from_words({{1}}, true);
    auto pts = return_points(*b, ps, 12);
    for (std::size_t i = 1; i <= 12; ++i) {
        CHECK(b->prefix_length(i) == BigInt(1) << i);
        FixedPoint scaled(ps.alpha(1).mantissa() * (BigInt(1) << i), F);
        CHECK(pts[i - 1] == reduce(scaled));
    }
}

TEST_CASE("doubling recursion agrees with the streamed orbit") {
    std::mt19937_64 rng(57);
    ParameterSet ps = rt23();
    for (int trial = 0; trial < 15; ++trial) {
        auto b = RecurrentBuilder::random(random_words(rng, 4), rng());
        auto fast = return_points(*b, ps, 10);
        auto slow = return_points_streamed(*b, ps, 10);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == slow[i]);
    }
}

TEST_CASE("return recursion residual is exactly zero") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        ParameterSet ps = trial % 2 == 0 ? rt23()
                                         : ParameterSet::from_texts({"pi/3", "e/4"}, F);
        auto b = RecurrentBuilder::random(random_words(rng, 5), rng());
        CHECK(check_return_recursion(*b, ps, 8).is_zero());
    }
    CHECK_THROWS_AS(
        check_return_recursion(*RecurrentBuilder::from_words({{1}}, true), rt23(), 1),
        std::invalid_argument);
}

TEST_CASE("hand-expanded depth-2 recursion") {
    // a_0=(1), a_1=(2), a_2=(1): v_1 = 1 2, v_2 = 1 2 1 1, L_1 = 2, L_2 = 4
    ParameterSet ps = rt23();
    auto b = RecurrentBuilder::from_words({{1}, {2}, {1}}, false);
    auto pts = return_points(*b, ps, 2);
    CHECK(pts[0] == word_endpoint({1, 2}, ps));
    CHECK(pts[1] == word_endpoint({1, 2, 1, 1}, ps));
    CHECK(check_return_recursion(*b, ps, 2).is_zero());
}

TEST_CASE("orbit segments are exact translates of the initial segment") {
    ParameterSet ps = rt23();
    ThueMorseStream tm;
    Orbit o = compute_orbit(ps, tm, 2000);
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 200; ++trial) {
        std::uint64_t i = rng() % 1000;
        std::uint64_t j = 1 + rng() % 1000;
        Word segment(o.digits().begin() + i, o.digits().begin() + (i + j));
        CirclePoint expect = reduce(o.point(i).fixed() + word_endpoint(segment, ps).fixed());
        CHECK(o.point(i + j) == expect);
    }
}

TEST_CASE("gap profile of {0, 0.5} and of {0}") {
    ParameterSet ps = ParameterSet::from_texts({"1/2"}, F);
    PeriodicStream ones({1});
    GapProfile two = gap_stats(compute_orbit(ps, ones, 1));
    REQUIRE(two.gaps.size() == 2);
    CHECK(two.gaps[0] == FixedPoint::from_ratio(1, 2, F));
    CHECK(two.gaps[1] == FixedPoint::from_ratio(1, 2, F));
    CHECK(two.distinct_gaps == 1);

    GapProfile one = gap_stats(compute_orbit(ps, ones, 0));
    REQUIRE(one.gaps.size() == 1);
    CHECK(one.gaps[0] == FixedPoint::from_integer(1, F));
    CHECK(one.max_gap == FixedPoint::from_integer(1, F));
}

TEST_CASE("gaps sum to exactly one") {
    ParameterSet ps = rt23();
    ThueMorseStream tm;
    for (std::uint64_t n : {1ull, 17ull, 400ull}) {
        GapProfile g = gap_stats(compute_orbit(ps, tm, n));
        FixedPoint total(BigInt(0), F);
        for (const FixedPoint& gap : g.gaps) {
            CHECK(gap.sign() > 0);
            total = total + gap;
        }
        CHECK(total == FixedPoint::from_integer(1, F));
        CHECK(g.max_gap == g.gaps.back());
    }
}

TEST_CASE("single rotations show at most three distinct gaps") {
    PeriodicStream ones({1});
    for (const char* alpha : {"sqrt(2)", "pi/7", "e/3", "phi"}) {
        ParameterSet ps = ParameterSet::from_texts({alpha}, F);
        for (std::uint64_t n : {10ull, 100ull, 1000ull, 4000ull}) {
            GapProfile g = gap_stats(compute_orbit(ps, ones, n));
            CHECK(g.distinct_gaps <= 3);
        }
    }
}

TEST_CASE("closest return of the sqrt(2) rotation in 100 steps is at i = 70") {
    ParameterSet ps = ParameterSet::from_texts({"sqrt(2)-1"}, F);
    PeriodicStream ones({1});
    Orbit o = compute_orbit(ps, ones, 100);
    FixedPoint best = min_return(o);
    CHECK(best == dist_to_zero(o.point(70)));
    CHECK(best.to_double() == doctest::Approx(0.00505063).epsilon(1e-4));
    // i = 70 really is the argmin: nothing earlier comes as close
    for (std::uint64_t i = 1; i < 70; ++i) CHECK(best < dist_to_zero(o.point(i)));
}

TEST_CASE("min return hits zero on an exact revisit") {
    ParameterSet ps = ParameterSet::from_texts({"1/4"}, F);
    PeriodicStream ones({1});
    CHECK(min_return(compute_orbit(ps, ones, 4)).is_zero());
    CHECK_THROWS_AS(min_return(compute_orbit(ps, ones, 0)), std::invalid_argument);
}

TEST_CASE("builder orbit max gap shrinks along the scale ladder") {
    ParameterSet ps = rt23();
    auto b = RecurrentBuilder::from_words({{1}, {2}, {1, 2}}, true);
    RecurrentStream rec(b);
    FixedPoint g3 = gap_stats(compute_orbit(ps, rec, 1000)).max_gap;
    FixedPoint g4 = gap_stats(compute_orbit(ps, rec, 10000)).max_gap;
    FixedPoint g5 = gap_stats(compute_orbit(ps, rec, 100000)).max_gap;
    CHECK(g4 < g3);
    CHECK(g5 < g4);
}

TEST_CASE("avoidance construction dodges the forbidden interval") {
    const int f = 80;
    CirclePoint alpha = reduce(eval_param(*parse_param("pi/3"), f));
    CirclePoint beta = reduce(eval_param(*parse_param("e/4"), f));
    FixedPoint eps = FixedPoint::from_ratio(5, 100, f);
    AvoidanceResult r = avoidance_orbit(alpha, beta, eps, 10000);
    CHECK(r.orbit.length() == 10000);
    for (std::uint64_t i = 1; i <= r.orbit.length(); ++i)
        CHECK(eps <= dist_to_zero(r.orbit.point(i)));
    CHECK(eps <= min_return(r.orbit));
    CHECK(r.stream->kind() == StreamKind::avoidance);

    // replaying the recorded digits through compute_orbit reproduces the run
    Orbit replay = compute_orbit(r.orbit.params(), *r.stream, r.orbit.length());
    for (std::uint64_t i = 0; i <= replay.length(); ++i)
        CHECK(replay.point(i) == r.orbit.point(i));

    // both digits actually occur at eps = 0.05
    bool saw1 = false, saw2 = false;
    for (Digit d : r.orbit.digits()) (d == 1 ? saw1 : saw2) = true;
    CHECK(saw1);
    CHECK(saw2);
}

TEST_CASE("a vanishing eps makes the avoidance stream all alpha") {
    const int f = 80;
    CirclePoint alpha = reduce(eval_param(*parse_param("pi/3"), f));
    CirclePoint beta = reduce(eval_param(*parse_param("e/4"), f));
    FixedPoint tiny(BigInt(1), f);  // 2^-80
    AvoidanceResult r = avoidance_orbit(alpha, beta, tiny, 2000);
    for (Digit d : r.orbit.digits()) CHECK(d == 1);
}

TEST_CASE("one avoidance step picks alpha when it already clears eps") {
    const int f = 80;
    CirclePoint alpha = reduce(eval_param(*parse_param("pi/3"), f));  // 0.0472
    CirclePoint beta = reduce(eval_param(*parse_param("e/4"), f));
    FixedPoint eps = FixedPoint::from_ratio(4, 100, f);
    AvoidanceResult r = avoidance_orbit(alpha, beta, eps, 1);
    CHECK(r.orbit.digits() == std::vector<Digit>{1});
    CHECK(r.orbit.point(1) == alpha);
}

TEST_CASE("avoidance precondition is enforced") {
    const int f = 80;
    CirclePoint alpha = reduce(eval_param(*parse_param("pi/3"), f));
    CirclePoint beta = reduce(eval_param(*parse_param("e/4"), f));
    FixedPoint zero(BigInt(0), f);
    CHECK_THROWS_AS(avoidance_orbit(alpha, beta, zero, 10), std::invalid_argument);
    // |alpha - beta| = 0.3676..., so eps must stay below 0.1838
    FixedPoint tool_large = FixedPoint::from_ratio(19, 100, f);
    CHECK_THROWS_AS(avoidance_orbit(alpha, beta, tool_large, 10), std::invalid_argument);
    FixedPoint ok = FixedPoint::from_ratio(18, 100, f);
    CHECK_NOTHROW(avoidance_orbit(alpha, beta, ok, 10));
}

TEST_CASE("shift containment holds exactly wherever the prefix recurs") {
    ParameterSet ps = rt23();
    ThueMorseStream tm;
    FixedPoint tol(BigInt(0), F);  // demand exactness
    ShiftContainmentReport rep = shift_containment_check(tm, ps, 2000, 8, tol);
    CHECK(rep.occurrences > 0);
    CHECK(rep.max_deviation.is_zero());

    ExplicitStream once({1, 2, 2, 2, 2, 2, 2, 2});
    CHECK_THROWS_AS(shift_containment_check(once, ps, 8, 2, tol), std::runtime_error);
}
