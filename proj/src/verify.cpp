#include "rotlab/verify.hpp"

#include "rotlab/covering.hpp"
#include "rotlab/dioph.hpp"
#include "rotlab/graph.hpp"
#include "rotlab/orbit.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <sstream>

namespace rotlab {

namespace {

std::vector<std::int64_t> pow2_ladder(std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> v;
    for (std::int64_t t = lo; t <= hi; t *= 2) v.push_back(t);
    return v;
}

std::vector<std::int64_t> cf_denominators(const std::vector<std::int64_t>& tail,
                                          std::int64_t limit) {
    std::vector<std::int64_t> qs{1};
    std::int64_t prev = 0, cur = 1;
    for (std::size_t i = 0;; ++i) {
        std::int64_t next = tail[i % tail.size()] * cur + prev;
        if (next > limit) break;
        qs.push_back(next);
        prev = cur;
        cur = next;
    }
    return qs;
}

// Index range of the scale-1/t intervals lying entirely inside (-eps, eps),
// and the predicted count floor(2 eps t); everything in exact integers.
struct CentralBand {
    std::int64_t lo, hi, expected;
};

CentralBand central_band(const FixedPoint& eps, std::int64_t t) {
    const int f = eps.frac_bits();
    const BigInt period = BigInt(1) << f;
    const BigInt half = BigInt(1) << (f - 1);
    const BigInt e = eps.mantissa();
    BigInt lo = ((half - e) * t + period - 1) / period;
    BigInt hi = (half + e) * t / period - 1;
    BigInt expected = (BigInt(2) * e * t) >> f;
    return {lo.convert_to<long long>(), hi.convert_to<long long>(),
            expected.convert_to<long long>()};
}

struct Matrix {
    std::vector<CriterionResult> results;
    std::ostream* progress;

    void report(int id, const std::string& name, bool passed, const std::string& detail) {
        results.push_back({id, name, passed, detail});
        if (progress)
            *progress << "criterion " << id << (passed ? " PASS " : " FAIL ") << name
                      << " — " << detail << "\n";
    }
};

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream* progress) {
    Matrix m{{}, progress};

    ParameterSet rt23_64 = ParameterSet::from_texts({"sqrt(2)", "sqrt(3)"}, 64);
    ParameterSet rt23_62 = ParameterSet::from_texts({"sqrt(2)", "sqrt(3)"}, 62);

    // 1: every primitive cycle of the Thue-Morse walk satisfies the exact
    //    scale bound, five scales, one million steps.
    ThueMorseStream tm;
    Orbit tm_orbit = compute_orbit(rt23_64, tm, 1000000);
    {
        bool ok = true;
        std::string worst = "scales 64..1024";
        try {
            for (std::int64_t t = 64; t <= 1024; t *= 2) {
                CycleWitness c = find_primitive_cycle(walk_trace(tm_orbit, t));
                FixedPoint v = cycle_form_value(c, rt23_64);
                if (!(v <= FixedPoint::from_ratio(2, t, 64))) ok = false;
                if (t == 1024)
                    worst = "at t=1024: form value " + v.to_decimal(6) + " vs bound " +
                            FixedPoint::from_ratio(2, t, 64).to_decimal(6);
            }
        } catch (const std::exception& e) {
            ok = false;
            worst = std::string("cycle extraction failed: ") + e.what();
        }
        m.report(1, "cycle form values within 2/t", ok, worst);
    }

    // 2: pigeonhole bound on twenty seeded screened random pairs plus the
    //    reference pair, s <= 500, exact comparisons.
    {
        std::mt19937_64 rng(20260814);
        int built = 0, redraws = 0, violations = 0;
        while (built < 20 && redraws < 200) {
            BigInt m1 = BigInt(rng() & ((std::uint64_t(1) << 62) - 1)) | 1;
            BigInt m2 = BigInt(rng() & ((std::uint64_t(1) << 62) - 1)) | 1;
            auto ps = ParameterSet::from_values({FixedPoint(m1, 62), FixedPoint(m2, 62)});
            if (!independence_screen(ps, 30, default_screen_tol(62)).empty()) {
                ++redraws;
                continue;
            }
            violations +=
                static_cast<int>(dirichlet_check(build_table(ps, MinMode::box, 500)).size());
            ++built;
        }
        violations += static_cast<int>(
            dirichlet_check(build_table(rt23_62, MinMode::box, 500)).size());
        std::ostringstream d;
        d << built << " pairs built, " << redraws << " redraws, " << violations
          << " violations";
        m.report(2, "pigeonhole bound on random screened pairs", built == 20 && violations == 0,
                 d.str());
    }

    // 3: decay exponent of the two-parameter minima on the geometric ladder.
    ExponentFit fit3 = exponent_fit(
        build_table(rt23_62, MinMode::box, pow2_ladder(32, 4096)), 32, 4096);
    {
        std::ostringstream d;
        d << "tau = " << fit3.tau << " (window [1.8, 2.3]), envelope " << fit3.tau_envelope;
        m.report(3, "two-parameter decay exponent in window", fit3.tau > 1.8 && fit3.tau < 2.3,
                 d.str());
    }

    // 4: single-parameter minima equal the continued-fraction convergents,
    //    value and argmin, every s up to ten thousand.
    {
        auto rt2 = ParameterSet::from_texts({"sqrt(2)"}, 62);
        auto qs = cf_denominators({2}, 10000);
        DiophTable tbl = build_table(rt2, MinMode::box, 10000);
        bool ok = true;
        std::size_t qi = 0;
        for (const MinRecord& r : tbl.records) {
            while (qi + 1 < qs.size() && qs[qi + 1] <= r.s) ++qi;
            FixedPoint want =
                dist_to_zero(reduce(FixedPoint(rt2.alpha(1).mantissa() * qs[qi], 62)));
            if (r.argmin != std::vector<std::int64_t>{qs[qi]} || r.value != want) {
                ok = false;
                break;
            }
        }
        std::ostringstream d;
        d << qs.size() << " convergent denominators up to 10^4, all argmins and values exact";
        m.report(4, "single-parameter minima match convergents", ok, d.str());
    }

    // 5: the doubling recursion for return points closes exactly for one
    //    hundred seeded random builders at depth fifteen.
    {
        ParameterSet ps96 = ParameterSet::from_texts({"sqrt(2)", "sqrt(3)"}, 96);
        int nonzero = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            auto b = RecurrentBuilder::random({{1}, {2}, {1, 2}, {2, 2, 1}}, seed);
            if (!check_return_recursion(*b, ps96, 15).is_zero()) ++nonzero;
        }
        std::ostringstream d;
        d << "100 builders, depth 15, " << nonzero << " nonzero residuals";
        m.report(5, "return recursion residual is zero", nonzero == 0, d.str());
    }

    // 6/7: density and closest return of the word-cycling builder orbit.
    // Thresholds are frozen at twice the values measured by the calibration
    // run, well inside the 10^-2 / 10^-3 caps the claims need.
    {
        auto b = RecurrentBuilder::from_words({{1}, {2}, {1, 2}}, true);
        RecurrentStream bs(b);
        Orbit o5 = compute_orbit(rt23_64, bs, 100000);
        Orbit o6 = compute_orbit(rt23_64, bs, 1000000);
        FixedPoint g5 = gap_stats(o5).max_gap;
        FixedPoint g6 = gap_stats(o6).max_gap;
        FixedPoint th5 = FixedPoint::from_ratio(2563596, BigInt(10000000000), 64);
        FixedPoint th6 = FixedPoint::from_ratio(186762250, BigInt(10000000000000), 64);
        bool ok6 = g5 <= th5 && g6 <= th6;
        std::ostringstream d6;
        d6 << "max gap " << g5.to_decimal(4) << " at 10^5 (threshold " << th5.to_decimal(4)
           << ", cap 0.01), " << g6.to_decimal(4) << " at 10^6 (threshold " << th6.to_decimal(4)
           << ", cap 0.001)";
        m.report(6, "builder orbit max gap shrinks on schedule", ok6, d6.str());

        FixedPoint mr = min_return(o6);
        FixedPoint th7 = FixedPoint::from_ratio(503834746, BigInt(100000000000000), 64);
        std::ostringstream d7;
        d7 << "min return " << mr.to_decimal(4) << " at 10^6 (threshold " << th7.to_decimal(4)
           << ", cap 0.001)";
        m.report(7, "builder orbit returns near zero", mr <= th7, d7.str());
    }

    // 8: the avoidance construction leaves the target window empty, for two
    //    radii, one million steps, including the central covering band.
    {
        ParameterSet ps80 = ParameterSet::from_texts({"pi/3", "e/4"}, 80);
        bool ok = true;
        std::ostringstream d;
        for (auto [num, den] : {std::pair{1, 20}, std::pair{1, 10}}) {
            FixedPoint eps = FixedPoint::from_ratio(num, den, 80);
            try {
                AvoidanceResult r = avoidance_orbit(ps80.alpha(1), ps80.alpha(2), eps, 1000000);
                std::uint64_t inside = 0;
                for (std::uint64_t i = 1; i <= r.orbit.length(); ++i)
                    if (dist_to_zero(r.orbit.point(i)) < eps) ++inside;
                std::vector<CirclePoint> tail(r.orbit.points().begin() + 1,
                                              r.orbit.points().end());
                OccupiedResult occ = occupied(tail, 1024);
                CentralBand band = central_band(eps, 1024);
                std::int64_t hit = 0;
                for (std::int64_t j = band.lo; j <= band.hi; ++j)
                    if (occ.bitmap[static_cast<std::size_t>(j)]) ++hit;
                bool this_ok = inside == 0 && hit == 0 &&
                               band.hi - band.lo + 1 == band.expected;
                ok = ok && this_ok;
                d << "eps=" << num << "/" << den << ": 0 failures, " << inside
                  << " points inside, " << hit << "/" << band.expected
                  << " central intervals occupied; ";
            } catch (const AvoidanceFailure&) {
                ok = false;
                d << "eps=" << num << "/" << den << ": construction failure; ";
            }
        }
        m.report(8, "avoidance construction keeps the window empty", ok, d.str());
    }

    // 9: block complexity: mechanical-word counts n+1, the doubling sequence
    //    table {2,4,6,10}, and a linear bound for the cycling builder.
    {
        ParameterSet theta = ParameterSet::from_texts({"phi - 1"}, 64);
        SturmianStream st(theta.raw(1), FixedPoint::from_integer(0, 64));
        bool sturmian_ok = true;
        for (std::size_t n = 1; n <= 30; ++n)
            if (complexity(st, n, 100000) != n + 1) sturmian_ok = false;

        const std::uint64_t tm_table[4] = {2, 4, 6, 10};
        bool tm_ok = true;
        for (std::size_t n = 1; n <= 4; ++n)
            if (complexity(tm, n, 100000) != tm_table[n - 1]) tm_ok = false;

        auto b = RecurrentBuilder::from_words({{1}, {2}, {1, 2}}, true);
        RecurrentStream bs(b);
        double c_fit = 0;
        bool linear_ok = true;
        for (std::size_t n = 1; n <= 30; ++n) {
            auto p = complexity(bs, n, 100000);
            c_fit = std::max(c_fit, static_cast<double>(p) / static_cast<double>(n));
            if (p > 3 * n) linear_ok = false;  // bound pre-registered from an oracle run
        }
        std::ostringstream d;
        d << "mechanical p_n = n+1 for n <= 30: " << (sturmian_ok ? "yes" : "no")
          << "; doubling p_1..4 = {2,4,6,10}: " << (tm_ok ? "yes" : "no")
          << "; builder fitted C = " << c_fit << " (bound 3)";
        m.report(9, "block complexity profiles", sturmian_ok && tm_ok && linear_ok, d.str());
    }

    // 10: in/out degree bound of the rotation graph at two scales.
    {
        bool ok = true;
        std::ostringstream d;
        for (std::int64_t t : {128, 1024}) {
            RotationGraph g = build_graph(rt23_64, t);
            ok = ok && g.max_out_degree() <= 6 && g.max_in_degree() <= 6;
            d << "t=" << t << ": out " << g.max_out_degree() << ", in " << g.max_in_degree()
              << "; ";
        }
        m.report(10, "graph degree bound", ok, d.str() + "bound 6");
    }

    // 11: covering slopes of the single-rotation orbit across the ladder.
    {
        ParameterSet rt2 = ParameterSet::from_texts({"sqrt(2)"}, 64);
        PeriodicStream ones({1});
        Orbit o = compute_orbit(rt2, ones, 1000000);
        CoverProfile p = box_dim_profile(o, pow2_ladder(8, 1024), true);
        bool ok = p.min_slope >= 0.95 && p.max_slope <= 1.0;
        std::ostringstream d;
        d << "slopes in [" << p.min_slope << ", " << p.max_slope << "], window [0.95, 1.0]";
        m.report(11, "single-rotation covering slopes", ok, d.str());
    }

    // 12: box-constrained minima never exceed the positive-constrained ones.
    {
        DiophTable box = build_table(rt23_62, MinMode::box, 1000);
        DiophTable pos = build_table(rt23_62, MinMode::positive, 1000);
        bool ok = true;
        for (std::int64_t s = 2; s <= 1000; ++s)
            if (!(box.at(s).value <= pos.at(s).value)) ok = false;
        m.report(12, "box minima bound positive minima", ok, "all s in [2, 1000], exact");
    }

    // 13: occupied intervals of the Thue-Morse orbit beat the predicted
    //    lower bound from the fitted decay law.
    {
        OccupiedResult occ = occupied(tm_orbit, 1024);
        std::int64_t predicted = predicted_min_cover(1024, fit3);
        std::ostringstream d;
        d << "occupied " << occ.count << " >= predicted " << predicted << " at t=1024";
        m.report(13, "occupied intervals beat the predicted cover", occ.count >= predicted,
                 d.str());
    }

    std::sort(m.results.begin(), m.results.end(),
              [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
    return m.results;
}

}  // namespace rotlab
