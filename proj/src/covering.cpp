#include "rotlab/covering.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rotlab {

namespace {

// x + 0.5 as a nonnegative numerator over 2^frac_bits, validated to [0, 1].
BigInt shifted_numerator(const FixedPoint& x, std::int64_t t) {
    if (t < 1) throw std::invalid_argument("interval_index: t must be >= 1");
    const BigInt one = BigInt(1) << x.frac_bits();
    BigInt u = x.mantissa() + (one >> 1);
    if (u.sign() < 0 || u > one)
        throw std::invalid_argument("interval_index: x outside [-0.5, 0.5]");
    return u;
}

}  // namespace

std::int64_t interval_index(const FixedPoint& x, std::int64_t t) {
    BigInt idx = (shifted_numerator(x, t) * t) >> x.frac_bits();
    if (idx == t) idx = t - 1;  // x = 0.5 lands past the last left endpoint
    return idx.convert_to<std::int64_t>();
}

std::int64_t interval_index(const CirclePoint& x, std::int64_t t) {
    return interval_index(x.fixed(), t);
}

bool on_interval_boundary(const FixedPoint& x, std::int64_t t) {
    BigInt scaled = shifted_numerator(x, t) * t;
    const BigInt mask = (BigInt(1) << x.frac_bits()) - 1;
    BigInt rem = scaled & mask;
    return rem.is_zero();
}

bool on_interval_boundary(const CirclePoint& x, std::int64_t t) {
    return on_interval_boundary(x.fixed(), t);
}

OccupiedResult occupied(const std::vector<CirclePoint>& points, std::int64_t t) {
    if (t < 1) throw std::invalid_argument("occupied: t must be >= 1");
    OccupiedResult result;
    result.bitmap.assign(static_cast<std::size_t>(t), false);
    for (const CirclePoint& x : points) {
        auto j = static_cast<std::size_t>(interval_index(x, t));
        if (!result.bitmap[j]) {
            result.bitmap[j] = true;
            ++result.count;
        }
        if (on_interval_boundary(x, t)) ++result.boundary_hits;
    }
    return result;
}

OccupiedResult occupied(const Orbit& o, std::int64_t t) { return occupied(o.points(), t); }

CoverProfile box_dim_profile(const Orbit& o, const std::vector<std::int64_t>& t_ladder,
                             bool allow_beyond_guard) {
    if (t_ladder.empty()) throw std::invalid_argument("box_dim_profile: empty ladder");
    for (std::size_t i = 0; i < t_ladder.size(); ++i) {
        if (t_ladder[i] < 1) throw std::invalid_argument("box_dim_profile: t must be >= 1");
        if (i > 0 && t_ladder[i] <= t_ladder[i - 1])
            throw std::invalid_argument("box_dim_profile: ladder must be strictly increasing");
    }
    if (!allow_beyond_guard) {
        const std::int64_t t_max = t_ladder.back();
        if (BigInt(t_max) * t_max > BigInt(o.length()))
            throw std::invalid_argument(
                "box_dim_profile: t = " + std::to_string(t_max) +
                " exceeds the sqrt(N) resolution guard for N = " + std::to_string(o.length()) +
                " (pass allow_beyond_guard to override)");
    }

    CoverProfile profile;
    for (std::int64_t t : t_ladder)
        profile.rungs.push_back({t, occupied(o, t).count});
    for (std::size_t i = 0; i + 1 < profile.rungs.size(); ++i) {
        double count_ratio =
            static_cast<double>(profile.rungs[i + 1].count) / profile.rungs[i].count;
        double t_ratio = static_cast<double>(profile.rungs[i + 1].t) / profile.rungs[i].t;
        profile.slopes.push_back(std::log(count_ratio) / std::log(t_ratio));
    }
    if (!profile.slopes.empty()) {
        profile.min_slope = profile.slopes.front();
        profile.max_slope = profile.slopes.front();
        for (double s : profile.slopes) {
            profile.min_slope = std::min(profile.min_slope, s);
            profile.max_slope = std::max(profile.max_slope, s);
        }
    }
    return profile;
}

}  // namespace rotlab
