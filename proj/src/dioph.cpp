#include "rotlab/dioph.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace rotlab {

namespace {

constexpr std::int64_t kTupleBudget = 100'000'000;

using BinFloat = boost::multiprecision::cpp_bin_float_50;

// Modular arithmetic on the circle 2^F in a machine word; valid for F <= 62.
struct Ring64 {
    using V = std::uint64_t;
    std::uint64_t period;

    V lift(const BigInt& m) const {
        BigInt r = m % BigInt(period);
        if (r.sign() < 0) r += BigInt(period);
        return r.convert_to<std::uint64_t>();
    }
    V zero() const { return 0; }
    V add(V a, V b) const {
        V s = a + b;
        return s >= period ? s - period : s;
    }
    V mul_signed(V a, std::int64_t c) const {
        const std::uint64_t mag = static_cast<std::uint64_t>(c < 0 ? -c : c);
        auto prod = static_cast<unsigned __int128>(a) * mag;
        V r = static_cast<V>(prod % period);
        return c < 0 && r != 0 ? period - r : r;
    }
    V dist(V a) const { return a <= period - a ? a : period - a; }
    BigInt to_big(V a) const { return BigInt(a); }
};

struct RingBig {
    using V = BigInt;
    BigInt period;

    V lift(const BigInt& m) const {
        BigInt r = m % period;
        if (r.sign() < 0) r += period;
        return r;
    }
    V zero() const { return BigInt(0); }
    V add(const V& a, const V& b) const {
        BigInt s = a + b;
        if (s >= period) s -= period;
        return s;
    }
    V mul_signed(const V& a, std::int64_t c) const {
        BigInt r = (a * c) % period;
        if (r.sign() < 0) r += period;
        return r;
    }
    V dist(const V& a) const {
        BigInt other = period - a;
        return a <= other ? a : other;
    }
    BigInt to_big(const V& a) const { return a; }
};

template <typename V>
struct ShellBest {
    std::vector<bool> has;
    std::vector<V> value;
    std::vector<std::vector<std::int64_t>> arg;

    explicit ShellBest(std::size_t size) : has(size, false), value(size), arg(size) {}

    void offer(std::size_t shell, const V& d, const std::vector<std::int64_t>& n) {
        if (!has[shell] || d < value[shell] || (d == value[shell] && n < arg[shell])) {
            has[shell] = true;
            value[shell] = d;
            arg[shell] = n;
        }
    }
};

// Enumerates the canonical half of the punctured box max|n_i| <= s (first
// nonzero coordinate positive), binning each tuple by its max-norm shell.
// The running sum is updated by one modular addition per tuple.
template <typename Ring>
ShellBest<typename Ring::V> box_scan(const Ring& ring, const ParameterSet& ps,
                                     std::int64_t s) {
    const int k = static_cast<int>(ps.k());
    std::vector<typename Ring::V> step;
    for (int i = 1; i <= k; ++i) step.push_back(ring.lift(ps.alpha(i).mantissa()));

    ShellBest<typename Ring::V> best(static_cast<std::size_t>(s) + 1);
    std::vector<std::int64_t> n(static_cast<std::size_t>(k), 0);

    auto recurse = [&](auto&& self, int j, typename Ring::V sum, bool zero_prefix,
                       std::int64_t cur_max) -> void {
        if (j == k) {
            if (!zero_prefix) best.offer(static_cast<std::size_t>(cur_max), ring.dist(sum), n);
            return;
        }
        const std::int64_t lo = zero_prefix ? 0 : -s;
        typename Ring::V cur = ring.add(sum, ring.mul_signed(step[j], lo));
        for (std::int64_t v = lo;; ++v) {
            n[static_cast<std::size_t>(j)] = v;
            self(self, j + 1, cur, zero_prefix && v == 0, std::max(cur_max, v < 0 ? -v : v));
            if (v == s) break;
            cur = ring.add(cur, step[j]);
        }
    };
    recurse(recurse, 0, ring.zero(), true, 0);
    return best;
}

// Enumerates n_i >= 1 with sum n_i <= s, binning by the sum.
template <typename Ring>
ShellBest<typename Ring::V> positive_scan(const Ring& ring, const ParameterSet& ps,
                                          std::int64_t s) {
    const int k = static_cast<int>(ps.k());
    std::vector<typename Ring::V> step;
    for (int i = 1; i <= k; ++i) step.push_back(ring.lift(ps.alpha(i).mantissa()));

    ShellBest<typename Ring::V> best(static_cast<std::size_t>(s) + 1);
    std::vector<std::int64_t> n(static_cast<std::size_t>(k), 0);

    auto recurse = [&](auto&& self, int j, typename Ring::V sum, std::int64_t used) -> void {
        if (j == k) {
            best.offer(static_cast<std::size_t>(used), ring.dist(sum), n);
            return;
        }
        const std::int64_t hi = s - used - (k - j - 1);
        typename Ring::V cur = ring.add(sum, step[j]);
        for (std::int64_t v = 1; v <= hi; ++v) {
            n[static_cast<std::size_t>(j)] = v;
            self(self, j + 1, cur, used + v);
            cur = ring.add(cur, step[j]);
        }
    };
    recurse(recurse, 0, ring.zero(), 0);
    return best;
}

BigInt box_tuple_count(std::int64_t s, std::size_t k) {
    return boost::multiprecision::pow(BigInt(2 * s + 1), static_cast<unsigned>(k));
}

BigInt positive_tuple_count(std::int64_t s, std::size_t k) {
    // compositions with k positive parts summing to <= s: C(s, k)
    BigInt c = 1;
    for (std::size_t i = 0; i < k; ++i) c = c * (s - static_cast<std::int64_t>(i));
    for (std::size_t i = 1; i <= k; ++i) c /= static_cast<std::int64_t>(i);
    return c;
}

void check_budget(const BigInt& tuples, bool allow) {
    if (!allow && tuples > kTupleBudget)
        throw BudgetExceeded("enumeration of " + tuples.str() +
                             " tuples exceeds the 10^8 budget (pass allow_large_budget)");
}

template <typename Ring>
DiophTable fold_table(const Ring& ring, const ParameterSet& ps, MinMode mode,
                      const std::vector<std::int64_t>& ladder) {
    const std::int64_t s_max = ladder.back();
    auto best = mode == MinMode::box ? box_scan(ring, ps, s_max)
                                     : positive_scan(ring, ps, s_max);
    const int f = ps.frac_bits();
    const std::int64_t s_first =
        mode == MinMode::box ? 1 : static_cast<std::int64_t>(ps.k());

    DiophTable tbl{mode, ps, {}};
    std::size_t next = 0;
    bool have = false;
    typename Ring::V run_value{};
    std::vector<std::int64_t> run_arg;
    for (std::int64_t s = s_first; s <= s_max; ++s) {
        const auto shell = static_cast<std::size_t>(s);
        if (best.has[shell] &&
            (!have || best.value[shell] < run_value ||
             (best.value[shell] == run_value && best.arg[shell] < run_arg))) {
            have = true;
            run_value = best.value[shell];
            run_arg = best.arg[shell];
        }
        if (!have) throw std::logic_error("build_table: empty shell before first record");
        if (next < ladder.size() && ladder[next] == s) {
            tbl.records.push_back({s, FixedPoint(ring.to_big(run_value), f), run_arg, mode});
            ++next;
        }
    }

    const BigInt floor_norm = BigInt(1) << (f - f / 2);
    if (tbl.records.back().value.mantissa() < floor_norm)
        throw std::domain_error(
            "build_table: a minimum fell below 2^(-F/2); raise the precision or check the "
            "parameters for rational dependence");
    return tbl;
}

double rung_log_value(const MinRecord& r) {
    if (r.value.mantissa().is_zero())
        throw std::invalid_argument("exponent_fit: zero value in range");
    return std::log(r.value.to_double());
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double se = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        se += e * e;
    }
    fit.rms = std::sqrt(se / n);
    return fit;
}

}  // namespace

const MinRecord& DiophTable::at(std::int64_t s) const {
    auto it = std::lower_bound(records.begin(), records.end(), s,
                               [](const MinRecord& r, std::int64_t v) { return r.s < v; });
    if (it == records.end() || it->s != s)
        throw std::out_of_range("DiophTable: s is not a ladder rung");
    return *it;
}

DiophTable build_table(const ParameterSet& ps, MinMode mode,
                       const std::vector<std::int64_t>& ladder, bool allow_large_budget) {
    const std::int64_t s_first =
        mode == MinMode::box ? 1 : static_cast<std::int64_t>(ps.k());
    if (ladder.empty() || ladder.front() < s_first)
        throw std::invalid_argument("build_table: ladder must start at a feasible s");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i] <= ladder[i - 1])
            throw std::invalid_argument("build_table: ladder must be strictly increasing");
    check_budget(mode == MinMode::box ? box_tuple_count(ladder.back(), ps.k())
                                      : positive_tuple_count(ladder.back(), ps.k()),
                 allow_large_budget);
    if (ps.frac_bits() <= 62)
        return fold_table(Ring64{std::uint64_t(1) << ps.frac_bits()}, ps, mode, ladder);
    return fold_table(RingBig{BigInt(1) << ps.frac_bits()}, ps, mode, ladder);
}

DiophTable build_table(const ParameterSet& ps, MinMode mode, std::int64_t s_max,
                       bool allow_large_budget) {
    const std::int64_t s_first =
        mode == MinMode::box ? 1 : static_cast<std::int64_t>(ps.k());
    if (s_max < s_first)
        throw std::invalid_argument("build_table: s_max below the first feasible s");
    std::vector<std::int64_t> ladder;
    ladder.reserve(static_cast<std::size_t>(s_max - s_first + 1));
    for (std::int64_t s = s_first; s <= s_max; ++s) ladder.push_back(s);
    return build_table(ps, mode, ladder, allow_large_budget);
}

MinRecord phi(const ParameterSet& ps, std::int64_t s, bool allow_large_budget) {
    return build_table(ps, MinMode::box, s, allow_large_budget).records.back();
}

MinRecord phi_positive(const ParameterSet& ps, std::int64_t s, bool allow_large_budget) {
    if (s < static_cast<std::int64_t>(ps.k()))
        throw std::invalid_argument("phi_positive: constraint set empty for s < k");
    return build_table(ps, MinMode::positive, s, allow_large_budget).records.back();
}

std::vector<std::int64_t> dirichlet_check(const DiophTable& tbl) {
    if (tbl.mode != MinMode::box)
        throw std::invalid_argument("dirichlet_check: needs a box-mode table");
    const int f = tbl.params.frac_bits();
    const BigInt two = BigInt(1) << (f + 1);
    std::vector<std::int64_t> bad;
    for (const MinRecord& r : tbl.records) {
        BigInt scaled = r.value.mantissa() *
                        boost::multiprecision::pow(BigInt(r.s),
                                                   static_cast<unsigned>(tbl.params.k()));
        if (scaled > two) bad.push_back(r.s);
    }
    return bad;
}

std::vector<std::vector<std::int64_t>> schmidt_violation_scan(const ParameterSet& ps,
                                                              std::int64_t delta_num,
                                                              std::int64_t delta_den,
                                                              std::int64_t s_max,
                                                              bool allow_large_budget) {
    if (ps.k() < 2) throw std::invalid_argument("schmidt_violation_scan: needs k >= 2");
    if (delta_num < 0 || delta_den < 1)
        throw std::invalid_argument("schmidt_violation_scan: delta must be >= 0");
    if (s_max < 1) throw std::invalid_argument("schmidt_violation_scan: s_max must be >= 1");
    check_budget(box_tuple_count(s_max, ps.k()), allow_large_budget);

    const int f = ps.frac_bits();
    const int k = static_cast<int>(ps.k());
    RingBig ring{BigInt(1) << f};
    std::vector<BigInt> step;
    for (int i = 1; i <= k; ++i) step.push_back(ring.lift(ps.alpha(i).mantissa()));

    const auto exponent = static_cast<unsigned>(delta_num + delta_den);
    const BigInt rhs =
        boost::multiprecision::pow(ring.period, static_cast<unsigned>(delta_den));

    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> q(static_cast<std::size_t>(k), 0);
    auto recurse = [&](auto&& self, int j, BigInt sum, BigInt prod) -> void {
        if (j == k) {
            BigInt d = ring.dist(sum);
            if (d * prod > ring.period) return;  // cheap necessary condition
            BigInt lhs = boost::multiprecision::pow(d, static_cast<unsigned>(delta_den)) *
                         boost::multiprecision::pow(prod, exponent);
            if (lhs <= rhs) out.push_back(q);
            return;
        }
        const std::int64_t lo = j == 0 ? 1 : -s_max;
        for (std::int64_t v = lo; v <= s_max; ++v) {
            if (v == 0) continue;
            q[static_cast<std::size_t>(j)] = v;
            self(self, j + 1, ring.add(sum, ring.mul_signed(step[j], v)),
                 prod * (v < 0 ? -v : v));
        }
    };
    recurse(recurse, 0, BigInt(0), BigInt(1));
    return out;
}

ExponentFit exponent_fit(const DiophTable& tbl, std::int64_t s_min, std::int64_t s_max) {
    if (s_min < 1 || s_max < s_min)
        throw std::invalid_argument("exponent_fit: bad fit range");

    std::vector<double> xs, ys, ex, ey;
    for (std::size_t i = 0; i < tbl.records.size(); ++i) {
        const MinRecord& r = tbl.records[i];
        if (r.s < s_min || r.s > s_max) continue;
        xs.push_back(std::log(static_cast<double>(r.s)));
        ys.push_back(rung_log_value(r));
        const bool record_setting =
            i == 0 || r.value.mantissa() < tbl.records[i - 1].value.mantissa();
        if (record_setting) {
            ex.push_back(xs.back());
            ey.push_back(ys.back());
        }
    }
    if (xs.size() < 4)
        throw std::invalid_argument("exponent_fit: need at least 4 rungs in range");

    ExponentFit fit;
    fit.s_min = s_min;
    fit.s_max = s_max;
    LineFit full = least_squares(xs, ys);
    fit.tau = -full.slope;
    fit.log_c = full.intercept;
    fit.residual = full.rms;
    fit.envelope_points = ex.size();
    if (ex.size() >= 2) {
        LineFit env = least_squares(ex, ey);
        fit.tau_envelope = -env.slope;
        fit.log_c_envelope = env.intercept;
    } else {
        fit.tau_envelope = 0.0;
        fit.log_c_envelope = ex.empty() ? ys.front() : ey.front();
    }
    return fit;
}

std::int64_t predicted_min_cover(std::int64_t t, const ExponentFit& fit) {
    if (t < 1) throw std::invalid_argument("predicted_min_cover: t must be >= 1");
    if (fit.tau <= 0.0) return 1;
    const double raw = std::pow(std::exp(fit.log_c) * static_cast<double>(t) / 2.0,
                                1.0 / fit.tau);
    if (!(raw < 9.0e18)) return t;
    auto bound = static_cast<std::int64_t>(std::ceil(raw));
    return std::clamp<std::int64_t>(bound, 1, t);
}

std::vector<std::array<std::int64_t, 2>> golden_pair_scan(const ParameterSet& ps,
                                                          std::int64_t max_k) {
    if (ps.k() != 2) throw std::invalid_argument("golden_pair_scan: needs exactly k = 2");
    if (max_k < 1) throw std::invalid_argument("golden_pair_scan: max_k must be >= 1");
    if (BigInt(max_k) * max_k > kTupleBudget)
        throw BudgetExceeded("golden_pair_scan: pair count exceeds the 10^8 budget");

    const int f = ps.frac_bits();
    const BigInt period = BigInt(1) << f;

    // thresholds[j] = floor(2^F * j^-gamma), gamma the golden ratio
    const BinFloat gamma = (1 + sqrt(BinFloat(5))) / 2;
    const BinFloat scale(period);
    std::vector<BigInt> thresholds(static_cast<std::size_t>(max_k) + 1);
    for (std::int64_t j = 1; j <= max_k; ++j) {
        BinFloat th = floor(pow(BinFloat(j), -gamma) * scale);
        thresholds[static_cast<std::size_t>(j)] = th.convert_to<BigInt>();
    }

    std::vector<std::array<std::int64_t, 2>> out;
    if (f <= 62) {
        Ring64 ring{std::uint64_t(1) << f};
        const std::uint64_t m1 = ring.lift(ps.alpha(1).mantissa());
        const std::uint64_t m2 = ring.lift(ps.alpha(2).mantissa());
        std::vector<std::uint64_t> th(thresholds.size());
        for (std::size_t j = 1; j < th.size(); ++j)
            th[j] = thresholds[j].convert_to<std::uint64_t>();

        std::uint64_t sum1 = 0;
        for (std::int64_t k1 = 1; k1 <= max_k; ++k1) {
            sum1 = ring.add(sum1, m1);
            std::uint64_t s = sum1;
            const std::uint64_t row = th[static_cast<std::size_t>(k1)];
            for (std::int64_t k2 = 1; k2 <= max_k; ++k2) {
                s = ring.add(s, m2);
                const std::uint64_t bound = k2 <= k1 ? row : th[static_cast<std::size_t>(k2)];
                if (ring.dist(s) <= bound) out.push_back({k1, k2});
            }
        }
        return out;
    }

    RingBig ring{period};
    const BigInt m1 = ring.lift(ps.alpha(1).mantissa());
    const BigInt m2 = ring.lift(ps.alpha(2).mantissa());
    BigInt sum1 = 0;
    for (std::int64_t k1 = 1; k1 <= max_k; ++k1) {
        sum1 = ring.add(sum1, m1);
        BigInt s = sum1;
        for (std::int64_t k2 = 1; k2 <= max_k; ++k2) {
            s = ring.add(s, m2);
            if (ring.dist(s) <= thresholds[static_cast<std::size_t>(std::max(k1, k2))])
                out.push_back({k1, k2});
        }
    }
    return out;
}

}  // namespace rotlab
