// Rotation-parameter expressions: a small arithmetic grammar (integers,
// pi/e/phi, sqrt, + - * /) parsed into an AST, evaluated into FixedPoint,
// and collected into a ParameterSet whose rational independence is screened
// by brute force over a coefficient box. Screening is evidence, not proof.

#pragma once

#include "rotlab/numerics.hpp"

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotlab {

struct ParamExpr;
using ExprPtr = std::shared_ptr<const ParamExpr>;

struct ParamExpr {
    enum class Kind { integer, constant, sqrt_fn, negate, add, sub, mul, div };

    Kind kind;
    BigInt value;       // Kind::integer
    std::string name;   // Kind::constant: "pi" | "e" | "phi"
    ExprPtr lhs, rhs;   // children; unary nodes use lhs only
};

bool same_structure(const ParamExpr& a, const ParamExpr& b);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Grammar: expr := term (('+'|'-') term)*
//          term := factor (('*'|'/') factor)*
//          factor := integer | 'pi' | 'e' | 'phi' | 'sqrt' '(' expr ')'
//                  | '(' expr ')' | '-' factor
// Whitespace is ignored. Errors carry the byte offset of the offending token.
ExprPtr parse_param(const std::string& text);

// Inverse of parse_param up to structure: parse_param(print_param(e)) has the
// same shape as e (parentheses are emitted only where precedence demands).
std::string print_param(const ParamExpr& e);

// Evaluate at F fractional bits; every arithmetic node adds at most one unit
// of last-place error. Throws std::domain_error on division by a value that
// is zero at working precision and on sqrt of a negative value.
FixedPoint eval_param(const ParamExpr& e, int frac_bits);

struct Parameter {
    std::string text;     // source expression as given
    ExprPtr expr;
    FixedPoint value;     // evaluated, unreduced
    CirclePoint reduced;
};

// The ordered rotation parameters alpha_1..alpha_k. Digits index them 1-based.
class ParameterSet {
public:
    static ParameterSet from_texts(const std::vector<std::string>& texts, int frac_bits);

    // Wrap already-evaluated values; the recorded source text is the exact
    // dyadic fraction mantissa/2^F, which reparses to the same value.
    static ParameterSet from_values(const std::vector<FixedPoint>& values);

    int k() const { return static_cast<int>(params_.size()); }
    int frac_bits() const { return frac_bits_; }
    const Parameter& param(int j) const;            // j in [1, k]
    const CirclePoint& alpha(int j) const { return param(j).reduced; }
    const FixedPoint& raw(int j) const { return param(j).value; }

private:
    ParameterSet(std::vector<Parameter> params, int frac_bits)
        : params_(std::move(params)), frac_bits_(frac_bits) {}

    std::vector<Parameter> params_;
    int frac_bits_;
};

// An integer relation candidate (n_0, n_1, ..., n_k) meaning
// |n_0 + n_1*alpha_1 + ... + n_k*alpha_k| <= tol on the unreduced values.
using Relation = std::vector<long long>;

// Brute-force search over |n_i| <= coeff_bound (n_1..n_k not all zero,
// first nonzero of n_1..n_k positive to drop sign duplicates). An empty
// result means no small relation was found, nothing stronger.
std::vector<Relation> independence_screen(const ParameterSet& ps, long long coeff_bound,
                                          const FixedPoint& tol);

// Default screening tolerance, 2^-(F/2): wide enough to catch encoding-error
// smeared exact relations, far below any honest near-miss at desk scale.
FixedPoint default_screen_tol(int frac_bits);

}  // namespace rotlab
