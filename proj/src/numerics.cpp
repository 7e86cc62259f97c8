#include "rotlab/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rotlab {

namespace {

void require_same_bits(const FixedPoint& a, const FixedPoint& b) {
    if (a.frac_bits() != b.frac_bits())
        throw std::invalid_argument("FixedPoint operands have different frac_bits (" +
                                    std::to_string(a.frac_bits()) + " vs " +
                                    std::to_string(b.frac_bits()) + ")");
}

BigInt pow2(int k) { return BigInt(1) << k; }

}  // namespace

BigInt isqrt(const BigInt& n) {
    if (n < 0) throw std::domain_error("isqrt of negative value");
    if (n == 0) return 0;
    // Start above the root so the iteration decreases monotonically.
    unsigned bits = boost::multiprecision::msb(n) + 1;
    BigInt x = BigInt(1) << ((bits + 1) / 2);
    for (;;) {
        BigInt y = (x + n / x) >> 1;
        if (y >= x) return x;
        x = std::move(y);
    }
}

BigInt round_shift_right(const BigInt& v, int k) {
    if (k <= 0) return v << -k;
    BigInt a = boost::multiprecision::abs(v);
    BigInt r = (a + (BigInt(1) << (k - 1))) >> k;
    return v < 0 ? BigInt(-r) : r;
}

BigInt round_div(const BigInt& num, const BigInt& den) {
    if (den <= 0) throw std::domain_error("round_div requires positive denominator");
    BigInt a = boost::multiprecision::abs(num);
    BigInt r = (2 * a + den) / (2 * den);
    return num < 0 ? BigInt(-r) : r;
}

BigInt floor_div(const BigInt& num, const BigInt& den) {
    if (den <= 0) throw std::domain_error("floor_div requires positive denominator");
    BigInt q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
}

FixedPoint::FixedPoint(BigInt mantissa, int frac_bits)
    : mantissa_(std::move(mantissa)), frac_bits_(frac_bits) {
    if (frac_bits < 0) throw std::invalid_argument("frac_bits must be >= 0");
}

FixedPoint FixedPoint::from_integer(long long v, int frac_bits) {
    return FixedPoint(BigInt(v) << frac_bits, frac_bits);
}

FixedPoint FixedPoint::from_ratio(const BigInt& num, const BigInt& den, int frac_bits) {
    if (den == 0) throw std::domain_error("from_ratio: zero denominator");
    BigInt n = num << frac_bits;
    if (den < 0) return FixedPoint(round_div(-n, -den), frac_bits);
    return FixedPoint(round_div(n, den), frac_bits);
}

FixedPoint FixedPoint::operator-() const { return FixedPoint(-mantissa_, frac_bits_); }

FixedPoint FixedPoint::operator+(const FixedPoint& o) const {
    require_same_bits(*this, o);
    return FixedPoint(mantissa_ + o.mantissa_, frac_bits_);
}

FixedPoint FixedPoint::operator-(const FixedPoint& o) const {
    require_same_bits(*this, o);
    return FixedPoint(mantissa_ - o.mantissa_, frac_bits_);
}

FixedPoint FixedPoint::operator*(const FixedPoint& o) const {
    require_same_bits(*this, o);
    return FixedPoint(round_shift_right(mantissa_ * o.mantissa_, frac_bits_), frac_bits_);
}

FixedPoint FixedPoint::operator/(const FixedPoint& o) const {
    require_same_bits(*this, o);
    if (o.mantissa_ == 0) throw std::domain_error("FixedPoint division by zero");
    BigInt num = mantissa_ << frac_bits_;
    if (o.mantissa_ < 0) return FixedPoint(round_div(-num, -o.mantissa_), frac_bits_);
    return FixedPoint(round_div(num, o.mantissa_), frac_bits_);
}

FixedPoint FixedPoint::abs() const {
    return FixedPoint(boost::multiprecision::abs(mantissa_), frac_bits_);
}

bool FixedPoint::operator==(const FixedPoint& o) const {
    require_same_bits(*this, o);
    return mantissa_ == o.mantissa_;
}

bool FixedPoint::operator<(const FixedPoint& o) const {
    require_same_bits(*this, o);
    return mantissa_ < o.mantissa_;
}

bool FixedPoint::operator<=(const FixedPoint& o) const {
    require_same_bits(*this, o);
    return mantissa_ <= o.mantissa_;
}

FixedPoint FixedPoint::rescale(int new_bits) const {
    if (new_bits >= frac_bits_) return FixedPoint(mantissa_ << (new_bits - frac_bits_), new_bits);
    return FixedPoint(round_shift_right(mantissa_, frac_bits_ - new_bits), new_bits);
}

double FixedPoint::to_double() const {
    return std::ldexp(mantissa_.convert_to<double>(), -frac_bits_);
}

std::string FixedPoint::to_decimal(int sig) const {
    if (sig < 1) sig = 1;
    if (mantissa_ == 0) return "0";
    const bool neg = mantissa_ < 0;
    BigInt a = boost::multiprecision::abs(mantissa_);
    BigInt integer = a >> frac_bits_;
    BigInt frac = a - (integer << frac_bits_);

    auto pow10 = [](int k) {
        BigInt p = 1;
        for (int i = 0; i < k; ++i) p *= 10;
        return p;
    };

    std::string int_str = integer.str();
    int frac_digits;
    int leading_zeros = 0;
    if (integer > 0) {
        frac_digits = sig - static_cast<int>(int_str.size());
        if (frac_digits < 0) frac_digits = 0;  // integer part is never truncated
    } else {
        // Count zeros between the point and the first significant digit.
        BigInt probe = frac;
        while (probe * 10 < pow2(frac_bits_)) {
            probe *= 10;
            ++leading_zeros;
        }
        frac_digits = leading_zeros + sig;
    }

    // Round half away from zero at the last kept digit; a carry can ripple
    // into the integer part or shorten the run of leading zeros.
    BigInt scaled = round_div(frac * pow10(frac_digits), pow2(frac_bits_));
    if (scaled >= pow10(frac_digits)) {
        integer += 1;
        scaled = 0;
        int_str = integer.str();
    }

    std::string frac_str = scaled.str();
    if (static_cast<int>(frac_str.size()) < frac_digits)
        frac_str.insert(0, frac_digits - frac_str.size(), '0');
    while (!frac_str.empty() && frac_str.back() == '0') frac_str.pop_back();

    std::string out = neg ? "-" : "";
    out += int_str;
    if (!frac_str.empty()) {
        out += '.';
        out += frac_str;
    }
    return out;
}

FixedPoint fixed_sqrt(const FixedPoint& x) {
    if (x.mantissa() < 0) throw std::domain_error("sqrt of negative value");
    // round(sqrt(m * 2^F)) computed as (floor(sqrt(4 m 2^F)) + 1) / 2.
    BigInt r = isqrt(x.mantissa() << (x.frac_bits() + 2));
    return FixedPoint((r + 1) >> 1, x.frac_bits());
}

CirclePoint CirclePoint::zero(int frac_bits) {
    return CirclePoint(FixedPoint(0, frac_bits));
}

CirclePoint reduce(const FixedPoint& x) {
    const int f = x.frac_bits();
    BigInt period = pow2(f);
    BigInt r = x.mantissa() % period;
    if (r < 0) r += period;
    if (2 * r > period) r -= period;  // lands in (-2^(F-1), 2^(F-1)]
    return CirclePoint(FixedPoint(std::move(r), f));
}

CirclePoint circle_add(const CirclePoint& x, const CirclePoint& y) {
    return reduce(x.fixed() + y.fixed());
}

CirclePoint circle_sub(const CirclePoint& x, const CirclePoint& y) {
    return reduce(x.fixed() - y.fixed());
}

FixedPoint dist_to_zero(const FixedPoint& x) { return reduce(x).fixed().abs(); }

FixedPoint dist_to_zero(const CirclePoint& x) { return x.fixed().abs(); }

int precision_budget(std::uint64_t steps, std::uint64_t finest_scale, int guard_bits) {
    if (steps < 1 || finest_scale < 1) throw std::invalid_argument("precision_budget: steps and scale must be >= 1");
    if (guard_bits < 0) throw std::invalid_argument("precision_budget: guard_bits must be >= 0");
    BigInt target = BigInt(steps) * finest_scale;  // need 2^(F - guard) >= steps * scale
    int f = 0;
    while (pow2(f) < target) ++f;
    return f + guard_bits;
}

int PrecisionBudget::frac_bits() const { return precision_budget(steps, finest_scale, guard_bits); }

namespace {

// arctan(1/x) * 2^prec by the alternating series, truncated when terms vanish.
// Each floor division loses < 1, and the term count is O(prec / log2(x)),
// so the result is within prec/(2 log2 x) + 1 units of the truth.
BigInt arctan_recip_scaled(long x, int prec) {
    BigInt acc = 0;
    BigInt power = pow2(prec) / x;
    const BigInt xx = BigInt(x) * x;
    long n = 1;
    bool add = true;
    while (power != 0) {
        BigInt term = power / n;
        acc += add ? term : -term;
        add = !add;
        power /= xx;
        n += 2;
    }
    return acc;
}

}  // namespace

FixedPoint const_pi(int frac_bits) {
    // Machin: pi = 16 arctan(1/5) - 4 arctan(1/239), with 32 guard bits.
    const int prec = frac_bits + 32;
    BigInt pi_scaled = 16 * arctan_recip_scaled(5, prec) - 4 * arctan_recip_scaled(239, prec);
    return FixedPoint(round_shift_right(pi_scaled, prec - frac_bits), frac_bits);
}

FixedPoint const_e(int frac_bits) {
    const int prec = frac_bits + 32;
    BigInt acc = pow2(prec) * 2;  // 1/0! + 1/1!
    BigInt term = pow2(prec);
    long n = 2;
    while (term != 0) {
        term /= n;
        acc += term;
        ++n;
    }
    return FixedPoint(round_shift_right(acc, prec - frac_bits), frac_bits);
}

FixedPoint const_phi(int frac_bits) {
    // (sqrt(5) + 1) / 2, rounded once at the end: sqrt(5)*2^(F+1) + 2^(F+1)
    // is phi * 2^(F+2), so two final bits are dropped with rounding.
    BigInt sqrt5 = isqrt(BigInt(5) << (2 * frac_bits + 2));  // floor(sqrt(5) * 2^(F+1))
    return FixedPoint(round_shift_right(sqrt5 + pow2(frac_bits + 1), 2), frac_bits);
}

FixedPoint const_sqrt(const BigInt& m, int frac_bits, bool allow_perfect_square) {
    if (m < 2) throw std::domain_error("const_sqrt requires m >= 2");
    BigInt root = isqrt(m);
    if (root * root == m && !allow_perfect_square)
        throw std::domain_error("sqrt(" + m.str() + ") is an integer; pass the override to allow it");
    return fixed_sqrt(FixedPoint(m << frac_bits, frac_bits));
}

FixedPoint eval_const(const std::string& name, int frac_bits, bool allow_perfect_square) {
    if (frac_bits < 8) throw std::invalid_argument("eval_const requires frac_bits >= 8");
    if (name == "pi") return const_pi(frac_bits);
    if (name == "e") return const_e(frac_bits);
    if (name == "phi") return const_phi(frac_bits);
    if (name.rfind("sqrt(", 0) == 0 && name.back() == ')') {
        BigInt m(name.substr(5, name.size() - 6));
        return const_sqrt(m, frac_bits, allow_perfect_square);
    }
    throw std::invalid_argument("unknown constant: " + name);
}

}  // namespace rotlab
