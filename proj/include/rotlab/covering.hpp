#pragma once

#include "rotlab/orbit.hpp"

#include <cstdint>
#include <vector>

namespace rotlab {

// Index of the partition interval [-0.5 + j/t, -0.5 + (j+1)/t] containing x,
// computed as floor((x + 0.5) * t) on exact mantissas. Shared endpoints go to
// the higher-index interval; x = 0.5 clamps to t - 1. Accepts any x in the
// closed band [-0.5, 0.5].
std::int64_t interval_index(const FixedPoint& x, std::int64_t t);
std::int64_t interval_index(const CirclePoint& x, std::int64_t t);

// True when x + 0.5 is an exact multiple of 1/t, i.e. x lies on an endpoint
// shared by two partition intervals and the index was a tie-break.
bool on_interval_boundary(const FixedPoint& x, std::int64_t t);
bool on_interval_boundary(const CirclePoint& x, std::int64_t t);

struct OccupiedResult {
    std::int64_t count = 0;
    std::vector<bool> bitmap;        // occupancy of intervals 0..t-1
    std::int64_t boundary_hits = 0;  // points that landed on shared endpoints
};

// Marks the interval of every point and counts distinct occupied intervals.
OccupiedResult occupied(const std::vector<CirclePoint>& points, std::int64_t t);
OccupiedResult occupied(const Orbit& o, std::int64_t t);

struct CoverRung {
    std::int64_t t = 0;
    std::int64_t count = 0;
};

struct CoverProfile {
    std::vector<CoverRung> rungs;
    std::vector<double> slopes;  // log(count ratio) / log(t ratio) per ladder step
    double min_slope = 0.0;
    double max_slope = 0.0;
};

// Occupied counts over an increasing scale ladder with log-log slopes between
// consecutive rungs. An N-point sample cannot resolve scales much below
// 1/sqrt(N), so rungs with t^2 > N are rejected unless allow_beyond_guard.
CoverProfile box_dim_profile(const Orbit& o, const std::vector<std::int64_t>& t_ladder,
                             bool allow_beyond_guard = false);

}  // namespace rotlab
