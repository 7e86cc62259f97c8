#include "rotlab/orbit.hpp"

#include <algorithm>
#include <map>

namespace rotlab {

namespace {

const CirclePoint& checked_alpha(const ParameterSet& ps, Digit d, std::uint64_t position) {
    if (d < 1 || d > ps.k())
        throw std::out_of_range("digit " + std::to_string(d) + " at position " +
                                std::to_string(position) + " outside parameter range [1, " +
                                std::to_string(ps.k()) + "]");
    return ps.alpha(d);
}

}  // namespace

Orbit::Orbit(ParameterSet params, StreamKind source, std::vector<Digit> digits,
             std::vector<CirclePoint> points)
    : params_(std::move(params)), source_(source), digits_(std::move(digits)),
      points_(std::move(points)) {
    if (points_.size() != digits_.size() + 1)
        throw std::invalid_argument("orbit needs exactly one more point than digits");
}

Orbit compute_orbit(const ParameterSet& ps, const DigitStream& s, std::uint64_t n) {
    std::vector<Digit> digits;
    std::vector<CirclePoint> points;
    digits.reserve(n);
    points.reserve(n + 1);
    CirclePoint x = CirclePoint::zero(ps.frac_bits());
    points.push_back(x);
    for (std::uint64_t i = 1; i <= n; ++i) {
        Digit d = s.digit_at(i);
        x = circle_add(x, checked_alpha(ps, d, i));
        digits.push_back(d);
        points.push_back(x);
    }
    return Orbit(ps, s.kind(), std::move(digits), std::move(points));
}

CirclePoint word_endpoint(const Word& w, const ParameterSet& ps) {
    CirclePoint x = CirclePoint::zero(ps.frac_bits());
    std::uint64_t pos = 0;
    for (Digit d : w) x = circle_add(x, checked_alpha(ps, d, ++pos));
    return x;
}

CirclePoint delta(const Word& a, const Word& b, const ParameterSet& ps) {
    return circle_sub(word_endpoint(b, ps), word_endpoint(a, ps));
}

std::vector<CirclePoint> return_points(const RecurrentBuilder& b, const ParameterSet& ps,
                                       std::size_t depth) {
    if (depth < 1) throw std::invalid_argument("return_points needs depth >= 1");
    std::vector<CirclePoint> out;
    out.reserve(depth);
    // x_{L_1}: endpoint of v_1 = a_0 a_1
    CirclePoint x = circle_add(word_endpoint(b.building_word(0), ps),
                               word_endpoint(b.building_word(1), ps));
    out.push_back(x);
    for (std::size_t i = 1; i < depth; ++i) {
        CirclePoint d = delta(b.building_word(i), b.building_word(i + 1), ps);
        x = reduce(x.fixed() + x.fixed() + d.fixed());
        out.push_back(x);
    }
    return out;
}

std::vector<CirclePoint> return_points_streamed(const RecurrentBuilder& b,
                                                const ParameterSet& ps, std::size_t depth) {
    if (depth < 1) throw std::invalid_argument("return_points needs depth >= 1");
    if (b.prefix_length(depth) > BigInt(1) << 62)
        throw std::overflow_error("prefix length past 2^62; use the doubling recursion");
    std::vector<BigInt> marks;
    marks.reserve(depth);
    for (std::size_t i = 1; i <= depth; ++i) marks.push_back(b.prefix_length(i));

    std::vector<CirclePoint> out;
    out.reserve(depth);
    CirclePoint x = CirclePoint::zero(ps.frac_bits());
    std::size_t next = 0;
    const std::uint64_t n_max = marks.back().convert_to<std::uint64_t>();
    for (std::uint64_t n = 1; n <= n_max && next < depth; ++n) {
        x = circle_add(x, checked_alpha(ps, b.digit_at(n), n));
        while (next < depth && marks[next] == n) {
            out.push_back(x);
            ++next;
        }
    }
    return out;
}

FixedPoint check_return_recursion(const RecurrentBuilder& b, const ParameterSet& ps,
                                  std::size_t depth) {
    if (depth < 2) throw std::invalid_argument("the recursion needs depth >= 2");
    std::vector<CirclePoint> streamed = return_points_streamed(b, ps, depth);
    FixedPoint worst(BigInt(0), ps.frac_bits());
    for (std::size_t i = 1; i < depth; ++i) {
        const CirclePoint& cur = streamed[i - 1];
        const CirclePoint& nxt = streamed[i];
        CirclePoint d = delta(b.building_word(i), b.building_word(i + 1), ps);
        CirclePoint predicted = reduce(cur.fixed() + cur.fixed() + d.fixed());
        FixedPoint resid = dist_to_zero(circle_sub(nxt, predicted));
        if (worst < resid) worst = resid;
    }
    return worst;
}

AvoidanceStream::AvoidanceStream(Word digits) : digits_(std::move(digits)) {}

Digit AvoidanceStream::digit_at(std::uint64_t n) const {
    if (n < 1 || n > digits_.size())
        throw std::out_of_range("avoidance stream has " + std::to_string(digits_.size()) +
                                " digits; asked for " + std::to_string(n));
    return digits_[static_cast<std::size_t>(n - 1)];
}

AvoidanceFailure::AvoidanceFailure(std::uint64_t step, const std::string& detail)
    : std::runtime_error("avoidance construction failed at step " + std::to_string(step) +
                         ": " + detail),
      step_(step) {}

AvoidanceResult avoidance_orbit(const CirclePoint& alpha, const CirclePoint& beta,
                                const FixedPoint& eps, std::uint64_t n) {
    const int f = eps.frac_bits();
    if (alpha.frac_bits() != f || beta.frac_bits() != f)
        throw std::invalid_argument("alpha, beta and eps must share frac_bits");
    FixedPoint separation = (alpha.fixed() - beta.fixed()).abs();
    if (!(eps.sign() > 0) || !(eps + eps < separation))
        throw std::invalid_argument("avoidance needs 0 < eps < 0.5*|alpha - beta|");

    std::vector<Digit> digits;
    std::vector<CirclePoint> points;
    digits.reserve(n);
    points.reserve(n + 1);
    CirclePoint x = CirclePoint::zero(f);
    points.push_back(x);
    for (std::uint64_t i = 1; i <= n; ++i) {
        CirclePoint by_alpha = circle_add(x, alpha);
        if (dist_to_zero(by_alpha) >= eps) {
            x = by_alpha;
            digits.push_back(1);
        } else {
            CirclePoint by_beta = circle_add(x, beta);
            if (dist_to_zero(by_beta) < eps)
                throw AvoidanceFailure(i, "alpha and beta steps both land inside (-eps, eps)");
            x = by_beta;
            digits.push_back(2);
        }
        points.push_back(x);
    }
    auto stream = std::make_shared<AvoidanceStream>(digits);
    ParameterSet ps = ParameterSet::from_values({alpha.fixed(), beta.fixed()});
    return AvoidanceResult{Orbit(std::move(ps), StreamKind::avoidance, std::move(digits),
                                 std::move(points)),
                           std::move(stream)};
}

GapProfile gap_stats(const Orbit& o) {
    if (o.points().empty()) throw std::invalid_argument("gap_stats needs at least one point");
    const int f = o.frac_bits();
    std::vector<BigInt> ms;
    ms.reserve(o.points().size());
    for (const CirclePoint& p : o.points()) ms.push_back(p.mantissa());
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

    GapProfile profile;
    profile.distinct_points = ms.size();
    profile.gaps.reserve(ms.size());
    const BigInt circumference = BigInt(1) << f;
    for (std::size_t i = 0; i + 1 < ms.size(); ++i)
        profile.gaps.emplace_back(ms[i + 1] - ms[i], f);
    profile.gaps.emplace_back(circumference - ms.back() + ms.front(), f);  // wrap-around
    std::sort(profile.gaps.begin(), profile.gaps.end());
    profile.max_gap = profile.gaps.back();
    profile.distinct_gaps = 1;
    for (std::size_t i = 1; i < profile.gaps.size(); ++i)
        profile.distinct_gaps += profile.gaps[i] != profile.gaps[i - 1];
    return profile;
}

FixedPoint min_return(const Orbit& o) {
    if (o.length() < 1) throw std::invalid_argument("min_return needs N >= 1");
    FixedPoint best = dist_to_zero(o.point(1));
    for (std::uint64_t i = 2; i <= o.length(); ++i) {
        FixedPoint d = dist_to_zero(o.point(i));
        if (d < best) best = d;
    }
    return best;
}

ShiftContainmentReport shift_containment_check(const DigitStream& s, const ParameterSet& ps,
                                               std::uint64_t n, std::size_t prefix_len,
                                               const FixedPoint& tol) {
    if (prefix_len < 1 || n < 2 * prefix_len)
        throw std::invalid_argument("shift containment needs n >= 2*prefix_len >= 2");
    Orbit o = compute_orbit(ps, s, n);
    const std::vector<Digit>& w = o.digits();

    ShiftContainmentReport report;
    report.max_deviation = FixedPoint(BigInt(0), ps.frac_bits());
    for (std::size_t i = 1; i + prefix_len <= w.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < prefix_len && match; ++j) match = w[i + j] == w[j];
        if (!match) continue;
        ++report.occurrences;
        // x_{i+j} should be the translate of x_j by c = x_i
        const CirclePoint& c = o.point(i);
        for (std::size_t j = 1; j <= prefix_len; ++j) {
            CirclePoint translated = reduce(c.fixed() + o.point(j).fixed());
            FixedPoint dev = dist_to_zero(circle_sub(o.point(i + j), translated));
            if (report.max_deviation < dev) report.max_deviation = dev;
        }
    }
    if (report.occurrences == 0)
        throw std::runtime_error("prefix of length " + std::to_string(prefix_len) +
                                 " does not recur in the first " + std::to_string(n) +
                                 " digits");
    return report;
}

}  // namespace rotlab
