#include "rotlab/params.hpp"

#include <cctype>

namespace rotlab {

namespace {

std::shared_ptr<ParamExpr> make_node(ParamExpr::Kind kind, ExprPtr lhs = nullptr,
                                     ExprPtr rhs = nullptr) {
    auto n = std::make_shared<ParamExpr>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    ExprPtr run() {
        ExprPtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        for (;;) {
            if (eat('+')) {
                lhs = make_node(ParamExpr::Kind::add, lhs, term());
            } else if (eat('-')) {
                lhs = make_node(ParamExpr::Kind::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        for (;;) {
            if (eat('*')) {
                lhs = make_node(ParamExpr::Kind::mul, lhs, factor());
            } else if (eat('/')) {
                lhs = make_node(ParamExpr::Kind::div, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr factor() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '-') {
            ++pos_;
            return make_node(ParamExpr::Kind::negate, factor());
        }
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return integer_literal();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr integer_literal() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        auto n = make_node(ParamExpr::Kind::integer);
        n->value = BigInt(s_.substr(start, pos_ - start));
        return n;
    }

    ExprPtr identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string id = s_.substr(start, pos_ - start);
        if (id == "sqrt") {
            expect('(');
            ExprPtr arg = expr();
            expect(')');
            return make_node(ParamExpr::Kind::sqrt_fn, std::move(arg));
        }
        if (id == "pi" || id == "e" || id == "phi") {
            auto n = make_node(ParamExpr::Kind::constant);
            n->name = id;
            return n;
        }
        throw ParseError("unknown identifier '" + id + "'", start);
    }
};

// Precedence levels for printing: 0 = additive, 1 = multiplicative, 2 = atom.
int precedence(ParamExpr::Kind k) {
    switch (k) {
        case ParamExpr::Kind::add:
        case ParamExpr::Kind::sub: return 0;
        case ParamExpr::Kind::mul:
        case ParamExpr::Kind::div: return 1;
        case ParamExpr::Kind::negate: return 1;
        default: return 2;
    }
}

void print_rec(const ParamExpr& e, int min_prec, std::string& out) {
    const int prec = precedence(e.kind);
    const bool parens = prec < min_prec;
    if (parens) out += '(';
    switch (e.kind) {
        case ParamExpr::Kind::integer: out += e.value.str(); break;
        case ParamExpr::Kind::constant: out += e.name; break;
        case ParamExpr::Kind::sqrt_fn:
            out += "sqrt(";
            print_rec(*e.lhs, 0, out);
            out += ')';
            break;
        case ParamExpr::Kind::negate:
            out += '-';
            print_rec(*e.lhs, 2, out);
            break;
        case ParamExpr::Kind::add:
            print_rec(*e.lhs, 0, out);
            out += '+';
            print_rec(*e.rhs, 1, out);
            break;
        case ParamExpr::Kind::sub:
            print_rec(*e.lhs, 0, out);
            out += '-';
            print_rec(*e.rhs, 1, out);
            break;
        case ParamExpr::Kind::mul:
            print_rec(*e.lhs, 1, out);
            out += '*';
            print_rec(*e.rhs, 2, out);
            break;
        case ParamExpr::Kind::div:
            print_rec(*e.lhs, 1, out);
            out += '/';
            print_rec(*e.rhs, 2, out);
            break;
    }
    if (parens) out += ')';
}

}  // namespace

bool same_structure(const ParamExpr& a, const ParamExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ParamExpr::Kind::integer: return a.value == b.value;
        case ParamExpr::Kind::constant: return a.name == b.name;
        case ParamExpr::Kind::sqrt_fn:
        case ParamExpr::Kind::negate: return same_structure(*a.lhs, *b.lhs);
        default: return same_structure(*a.lhs, *b.lhs) && same_structure(*a.rhs, *b.rhs);
    }
}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}

ExprPtr parse_param(const std::string& text) { return Parser(text).run(); }

std::string print_param(const ParamExpr& e) {
    std::string out;
    print_rec(e, 0, out);
    return out;
}

FixedPoint eval_param(const ParamExpr& e, int frac_bits) {
    switch (e.kind) {
        case ParamExpr::Kind::integer: return FixedPoint(e.value << frac_bits, frac_bits);
        case ParamExpr::Kind::constant: return eval_const(e.name, frac_bits);
        case ParamExpr::Kind::sqrt_fn: {
            FixedPoint v = eval_param(*e.lhs, frac_bits);
            if (v.sign() < 0) throw std::domain_error("sqrt of negative value");
            return fixed_sqrt(v);
        }
        case ParamExpr::Kind::negate: return -eval_param(*e.lhs, frac_bits);
        case ParamExpr::Kind::add: return eval_param(*e.lhs, frac_bits) + eval_param(*e.rhs, frac_bits);
        case ParamExpr::Kind::sub: return eval_param(*e.lhs, frac_bits) - eval_param(*e.rhs, frac_bits);
        case ParamExpr::Kind::mul: return eval_param(*e.lhs, frac_bits) * eval_param(*e.rhs, frac_bits);
        case ParamExpr::Kind::div: {
            FixedPoint num = eval_param(*e.lhs, frac_bits);
            FixedPoint den = eval_param(*e.rhs, frac_bits);
            if (den.is_zero())
                throw std::domain_error("division by zero at working precision in '" +
                                        print_param(*e.rhs) + "'");
            return num / den;
        }
    }
    throw std::logic_error("unreachable expression kind");
}

ParameterSet ParameterSet::from_texts(const std::vector<std::string>& texts, int frac_bits) {
    if (texts.empty()) throw std::invalid_argument("parameter set needs at least one parameter");
    std::vector<Parameter> params;
    params.reserve(texts.size());
    for (const std::string& t : texts) {
        ExprPtr e = parse_param(t);
        FixedPoint v = eval_param(*e, frac_bits);
        params.push_back(Parameter{t, std::move(e), v, reduce(v)});
    }
    for (std::size_t i = 0; i < params.size(); ++i)
        for (std::size_t j = i + 1; j < params.size(); ++j)
            if (params[i].reduced == params[j].reduced)
                throw std::invalid_argument("parameters " + std::to_string(i + 1) + " and " +
                                            std::to_string(j + 1) +
                                            " coincide at working precision");
    return ParameterSet(std::move(params), frac_bits);
}

ParameterSet ParameterSet::from_values(const std::vector<FixedPoint>& values) {
    if (values.empty()) throw std::invalid_argument("parameter set needs at least one parameter");
    const int f = values.front().frac_bits();
    std::vector<std::string> texts;
    texts.reserve(values.size());
    for (const FixedPoint& v : values) {
        if (v.frac_bits() != f)
            throw std::invalid_argument("parameter values must share frac_bits");
        texts.push_back(v.mantissa().str() + "/" + (BigInt(1) << f).str());
    }
    return from_texts(texts, f);
}

const Parameter& ParameterSet::param(int j) const {
    if (j < 1 || j > k()) throw std::out_of_range("parameter index " + std::to_string(j));
    return params_[static_cast<std::size_t>(j - 1)];
}

std::vector<Relation> independence_screen(const ParameterSet& ps, long long coeff_bound,
                                          const FixedPoint& tol) {
    if (coeff_bound < 1) throw std::invalid_argument("coefficient bound must be >= 1");
    if (tol.frac_bits() != ps.frac_bits())
        throw std::invalid_argument("tolerance and parameters must share frac_bits");
    const int k = ps.k();
    const int f = ps.frac_bits();
    const long long M = coeff_bound;
    const BigInt tol_m = tol.mantissa();
    const BigInt one = BigInt(1) << f;

    std::vector<BigInt> m(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) m[static_cast<std::size_t>(j)] = ps.raw(j + 1).mantissa();

    std::vector<long long> n(static_cast<std::size_t>(k), -M);
    BigInt sum = 0;
    for (int j = 0; j < k; ++j) sum -= m[static_cast<std::size_t>(j)] * M;

    std::vector<Relation> out;
    for (;;) {
        // keep only one representative per sign pair: first nonzero positive
        int first = 0;
        while (first < k && n[static_cast<std::size_t>(first)] == 0) ++first;
        if (first < k && n[static_cast<std::size_t>(first)] > 0) {
            // admissible n_0 solve |n_0 * 2^F + sum| <= tol
            BigInt lo = floor_div(-sum - tol_m + one - 1, one);  // ceil((-sum-tol)/2^F)
            BigInt hi = floor_div(-sum + tol_m, one);
            if (lo < -M) lo = -M;
            if (hi > M) hi = M;
            for (BigInt n0 = lo; n0 <= hi; ++n0) {
                Relation r;
                r.reserve(static_cast<std::size_t>(k) + 1);
                r.push_back(n0.convert_to<long long>());
                r.insert(r.end(), n.begin(), n.end());
                out.push_back(std::move(r));
            }
        }
        int j = k - 1;
        while (j >= 0 && n[static_cast<std::size_t>(j)] == M) {
            sum -= m[static_cast<std::size_t>(j)] * (2 * M);
            n[static_cast<std::size_t>(j)] = -M;
            --j;
        }
        if (j < 0) break;
        ++n[static_cast<std::size_t>(j)];
        sum += m[static_cast<std::size_t>(j)];
    }
    return out;
}

FixedPoint default_screen_tol(int frac_bits) {
    return FixedPoint(BigInt(1) << (frac_bits - frac_bits / 2), frac_bits);
}

}  // namespace rotlab
