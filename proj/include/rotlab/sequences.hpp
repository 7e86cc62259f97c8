// Digit sequences driving multi-rotation orbits. A DigitStream is a
// deterministic position-indexed source of digits in [1, k]; concrete
// streams cover explicit and periodic lists, the Thue-Morse word, Sturmian
// (mechanical) words, and the doubling-word construction
// w_i = w_{i-1} a_i w_{i-1} realized lazily by RecurrentBuilder.
// Analyzers (block complexity, balance defect, recurrence gap) operate on a
// finite window and report window-limited lower bounds.

#pragma once

#include "rotlab/numerics.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rotlab {

using Digit = int;                // 1-based index into a ParameterSet
using Word = std::vector<Digit>;  // finite digit string

enum class StreamKind { explicit_list, periodic, recurrent, thue_morse, sturmian, avoidance, custom };

class DigitStream {
public:
    virtual ~DigitStream() = default;

    virtual Digit digit_at(std::uint64_t n) const = 0;  // n >= 1
    virtual StreamKind kind() const = 0;
    virtual int alphabet_size() const = 0;  // digits fall in [1, alphabet_size]
};

class ExplicitStream : public DigitStream {
public:
    explicit ExplicitStream(Word digits);

    Digit digit_at(std::uint64_t n) const override;  // throws past the end
    StreamKind kind() const override { return StreamKind::explicit_list; }
    int alphabet_size() const override { return alphabet_; }

private:
    Word digits_;
    int alphabet_;
};

class PeriodicStream : public DigitStream {
public:
    explicit PeriodicStream(Word period);

    Digit digit_at(std::uint64_t n) const override;
    StreamKind kind() const override { return StreamKind::periodic; }
    int alphabet_size() const override { return alphabet_; }
    std::size_t period() const { return period_.size(); }

private:
    Word period_;
    int alphabet_;
};

// Digit n of the fixed point of a -> ab, b -> ba (a = 1, b = 2), starting
// from a: 1 when popcount(n-1) is even, 2 otherwise.
Digit thue_morse_digit(std::uint64_t n);

class ThueMorseStream : public DigitStream {
public:
    Digit digit_at(std::uint64_t n) const override { return thue_morse_digit(n); }
    StreamKind kind() const override { return StreamKind::thue_morse; }
    int alphabet_size() const override { return 2; }
};

// Mechanical word: digit 2 when floor((n+1)*theta + rho) - floor(n*theta + rho)
// is 1, digit 1 otherwise. Floors are computed exactly in fixed point; theta
// should be (the encoding of) an irrational in (0, 1).
Digit sturmian_digit(const FixedPoint& theta, const FixedPoint& rho, std::uint64_t n);

class SturmianStream : public DigitStream {
public:
    SturmianStream(FixedPoint theta, FixedPoint rho);

    Digit digit_at(std::uint64_t n) const override { return sturmian_digit(theta_, rho_, n); }
    StreamKind kind() const override { return StreamKind::sturmian; }
    int alphabet_size() const override { return 2; }

private:
    FixedPoint theta_, rho_;
};

// The doubling construction: w_0 = a_0, w_i = w_{i-1} a_i w_{i-1}. Building
// words come from a finite list (used once or cycled) or are drawn from a
// finite set by a seeded generator; either way stages are cached, so repeated
// queries are consistent. Lengths obey |w_i| = 2|w_{i-1}| + l_i and the
// prefix schedule L_i = |w_{i-1}| + l_i.
class RecurrentBuilder {
public:
    static std::shared_ptr<RecurrentBuilder> from_words(std::vector<Word> words, bool cycle);
    static std::shared_ptr<RecurrentBuilder> random(std::vector<Word> word_set, std::uint64_t seed);

    Digit digit_at(std::uint64_t n) const;  // w(n); throws if a finite builder runs out

    // Stage introspection; stages are generated on demand and throw when a
    // finite word list is exhausted.
    Word building_word(std::size_t i) const;        // a_i
    std::size_t word_length(std::size_t i) const;   // l_i
    BigInt omega_length(std::size_t i) const;       // |w_i|
    BigInt prefix_length(std::size_t i) const;      // L_i, i >= 1
    int alphabet_size() const { return alphabet_; }

private:
    RecurrentBuilder(std::vector<Word> words, bool cycle, bool randomized, std::uint64_t seed);

    void ensure_stage(std::size_t i) const;         // requires lock held
    void ensure_length(std::uint64_t n) const;      // requires lock held

    std::vector<Word> source_;
    bool cycle_;
    bool randomized_;
    int alphabet_;

    mutable std::mutex mu_;
    mutable std::mt19937_64 rng_;
    mutable std::vector<Word> words_;      // a_0, a_1, ...
    mutable std::vector<BigInt> lengths_;  // |w_0|, |w_1|, ...
};

class RecurrentStream : public DigitStream {
public:
    explicit RecurrentStream(std::shared_ptr<RecurrentBuilder> builder);

    Digit digit_at(std::uint64_t n) const override { return builder_->digit_at(n); }
    StreamKind kind() const override { return StreamKind::recurrent; }
    int alphabet_size() const override { return builder_->alphabet_size(); }
    const RecurrentBuilder& builder() const { return *builder_; }

private:
    std::shared_ptr<RecurrentBuilder> builder_;
};

class CustomStream : public DigitStream {
public:
    CustomStream(std::function<Digit(std::uint64_t)> fn, int alphabet)
        : fn_(std::move(fn)), alphabet_(alphabet) {}

    Digit digit_at(std::uint64_t n) const override { return fn_(n); }
    StreamKind kind() const override { return StreamKind::custom; }
    int alphabet_size() const override { return alphabet_; }

private:
    std::function<Digit(std::uint64_t)> fn_;
    int alphabet_;
};

// Number of distinct length-n blocks starting at positions 1..window-n+1.
// A lower bound for the true block complexity; exact once the window covers
// every block, i.e. past the recurrence gap.
std::uint64_t complexity(const DigitStream& s, std::size_t n, std::uint64_t window);

// Max minus min, over length-n blocks in the window, of occurrences of digit.
std::uint64_t balance_defect(const DigitStream& s, Digit digit, std::size_t n,
                             std::uint64_t window);

// Largest distance between consecutive occurrences (by start position) of the
// prefix s(1..n) within the window; empty when it occurs fewer than twice.
std::optional<std::uint64_t> recurrence_gap(const DigitStream& s, std::size_t n,
                                            std::uint64_t window);

// Building-word file: one word per line, digits space-separated, '#' starts
// a comment, blank lines ignored.
std::vector<Word> load_building_words(std::istream& in);
std::vector<Word> load_building_words_file(const std::string& path);

// Stream specification syntax used by the CLI:
//   "thue-morse"
//   "sturmian:theta=<expr>,rho=<expr>"
//   "recurrent:file=<path>[,cycle|,random]"
//   "periodic:<digits>"   "explicit:<digits>"
// <digits> is either a run of single digits ("112") or separated by
// spaces/commas ("1,12,2" needs separators). Expressions are evaluated at
// frac_bits; seed feeds the random builder mode.
std::shared_ptr<DigitStream> parse_stream_spec(const std::string& spec, int frac_bits,
                                               std::uint64_t seed);

}  // namespace rotlab
