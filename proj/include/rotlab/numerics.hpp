// Exact dyadic fixed-point arithmetic on the circle.
//
// Every real in the library is a FixedPoint: an arbitrary-precision mantissa
// scaled by 2^-F. Circle addition of two F-bit values is exact, so the only
// rounding in an orbit computation is the one-time encoding of the rotation
// parameters; that error propagates linearly in the number of steps, which is
// what precision_budget() accounts for.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace rotlab {

using BigInt = boost::multiprecision::cpp_int;

// Floor square root of a non-negative integer (Newton iteration).
BigInt isqrt(const BigInt& n);

// v / 2^k rounded to nearest, ties away from zero. k >= 0.
BigInt round_shift_right(const BigInt& v, int k);

// num / den rounded to nearest, ties away from zero. den > 0.
BigInt round_div(const BigInt& num, const BigInt& den);

// floor(num / den) for den > 0 (C++ '/' truncates toward zero instead).
BigInt floor_div(const BigInt& num, const BigInt& den);

class FixedPoint {
public:
    FixedPoint() = default;
    FixedPoint(BigInt mantissa, int frac_bits);

    static FixedPoint from_integer(long long v, int frac_bits);
    // Rounded encoding of num/den at frac_bits. den != 0.
    static FixedPoint from_ratio(const BigInt& num, const BigInt& den, int frac_bits);

    const BigInt& mantissa() const { return mantissa_; }
    int frac_bits() const { return frac_bits_; }
    bool is_zero() const { return mantissa_ == 0; }
    int sign() const { return mantissa_.sign(); }

    FixedPoint operator-() const;
    FixedPoint operator+(const FixedPoint& o) const;   // exact
    FixedPoint operator-(const FixedPoint& o) const;   // exact
    FixedPoint operator*(const FixedPoint& o) const;   // rounded, <= 1/2 ulp
    FixedPoint operator/(const FixedPoint& o) const;   // rounded, <= 1/2 ulp; throws on zero divisor
    FixedPoint abs() const;

    bool operator==(const FixedPoint& o) const;
    bool operator!=(const FixedPoint& o) const { return !(*this == o); }
    bool operator<(const FixedPoint& o) const;
    bool operator<=(const FixedPoint& o) const;
    bool operator>(const FixedPoint& o) const { return o < *this; }
    bool operator>=(const FixedPoint& o) const { return o <= *this; }

    // Exact when new_bits >= frac_bits, otherwise rounded to nearest.
    FixedPoint rescale(int new_bits) const;

    double to_double() const;
    // Exact decimal rendering rounded to `sig` significant digits.
    std::string to_decimal(int sig = 30) const;

private:
    BigInt mantissa_ = 0;
    int frac_bits_ = 0;
};

// sqrt(x) rounded to nearest representable value. x >= 0.
FixedPoint fixed_sqrt(const FixedPoint& x);

// A point of the circle R/Z represented by its reduced fractional part,
// a FixedPoint constrained to (-0.5, 0.5]. The value exactly +0.5 is the
// canonical representative of the half point.
class CirclePoint {
public:
    CirclePoint() = default;
    static CirclePoint zero(int frac_bits);

    const FixedPoint& fixed() const { return value_; }
    const BigInt& mantissa() const { return value_.mantissa(); }
    int frac_bits() const { return value_.frac_bits(); }

    bool operator==(const CirclePoint& o) const { return value_ == o.value_; }
    bool operator!=(const CirclePoint& o) const { return value_ != o.value_; }
    bool operator<(const CirclePoint& o) const { return value_ < o.value_; }

private:
    friend CirclePoint reduce(const FixedPoint& x);
    explicit CirclePoint(FixedPoint reduced) : value_(std::move(reduced)) {}
    FixedPoint value_;
};

// x minus its closest integer, valued in (-0.5, 0.5]. A tie (x exactly
// halfway between integers) resolves to +0.5.
CirclePoint reduce(const FixedPoint& x);

// reduce(x + y); exact, both operands at the same frac_bits.
CirclePoint circle_add(const CirclePoint& x, const CirclePoint& y);
CirclePoint circle_sub(const CirclePoint& x, const CirclePoint& y);

// Distance from x to the nearest integer, |reduce(x)|, in [0, 0.5].
FixedPoint dist_to_zero(const FixedPoint& x);
FixedPoint dist_to_zero(const CirclePoint& x);

// Smallest F with steps * 2^-F <= 2^-guard_bits / finest_scale: orbits of
// length <= steps computed at F stay within 2^-guard_bits of a cell of size
// 1/finest_scale even though parameter encodings are rounded.
struct PrecisionBudget {
    std::uint64_t steps = 1;
    std::uint64_t finest_scale = 1;
    int guard_bits = 32;

    int frac_bits() const;
};

int precision_budget(std::uint64_t steps, std::uint64_t finest_scale, int guard_bits);

// Evaluated constants, each within 2^-frac_bits of the true value.
FixedPoint const_pi(int frac_bits);
FixedPoint const_e(int frac_bits);
FixedPoint const_phi(int frac_bits);
// sqrt(m) for integer m >= 2. Perfect squares are rejected (they would be
// rational and break independence assumptions silently) unless allowed.
FixedPoint const_sqrt(const BigInt& m, int frac_bits, bool allow_perfect_square = false);

// name is "pi", "e", "phi" or "sqrt(<integer>)".
FixedPoint eval_const(const std::string& name, int frac_bits, bool allow_perfect_square = false);

}  // namespace rotlab
