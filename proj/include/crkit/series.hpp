#pragma once

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "crkit/matrix.hpp"
#include "crkit/modp.hpp"
#include "crkit/poly_io.hpp"

namespace crkit {

/// Power series in `nvars` variables truncated above total degree `order`.
template <class F>
struct TSeries {
    int nvars = 0;
    int order = 0;
    std::map<Exponent, F> terms;

    static TSeries constant(int nvars, int order, const F& c) {
        TSeries s{nvars, order, {}};
        if (!is_zero(c)) s.terms[Exponent(static_cast<std::size_t>(nvars), 0)] = c;
        return s;
    }
    static TSeries variable(int nvars, int order, int k) {
        TSeries s{nvars, order, {}};
        Exponent e(static_cast<std::size_t>(nvars), 0);
        e[static_cast<std::size_t>(k)] = 1;
        if (order >= 1) s.terms[e] = F(1);
        return s;
    }

    F constant_term() const {
        auto it = terms.find(Exponent(static_cast<std::size_t>(nvars), 0));
        return it == terms.end() ? F(0) : it->second;
    }
    int valuation() const {
        int v = std::numeric_limits<int>::max();
        for (const auto& [e, c] : terms) v = std::min(v, static_cast<int>(total_degree(e)));
        return v;
    }
    bool is_zero_series() const { return terms.empty(); }

    void add_term(const Exponent& e, const F& c) {
        if (static_cast<int>(total_degree(e)) > order || is_zero(c)) return;
        auto [it, fresh] = terms.try_emplace(e, c);
        if (!fresh) {
            it->second = it->second + c;
            if (is_zero(it->second)) terms.erase(it);
        }
    }

    friend TSeries operator+(TSeries a, const TSeries& b) {
        for (const auto& [e, c] : b.terms) a.add_term(e, c);
        return a;
    }
    friend TSeries operator-(TSeries a, const TSeries& b) {
        for (const auto& [e, c] : b.terms) a.add_term(e, F(0) - c);
        return a;
    }
    friend TSeries operator*(const TSeries& a, const TSeries& b) {
        TSeries r{a.nvars, std::min(a.order, b.order), {}};
        Exponent e(static_cast<std::size_t>(a.nvars));
        for (const auto& [ea, ca] : a.terms) {
            auto da = total_degree(ea);
            for (const auto& [eb, cb] : b.terms) {
                if (static_cast<int>(da + total_degree(eb)) > r.order) continue;
                for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }
    TSeries scaled(const F& s) const {
        TSeries r{nvars, order, {}};
        for (const auto& [e, c] : terms) r.add_term(e, c * s);
        return r;
    }
    TSeries pow(unsigned k) const {
        TSeries acc = constant(nvars, order, F(1)), base = *this;
        for (; k; k >>= 1) {
            if (k & 1) acc = acc * base;
            if (k > 1) base = base * base;
        }
        return acc;
    }
};

/// Σ g_k u^k for a univariate coefficient list g; u must have no constant term.
template <class F>
TSeries<F> compose_univariate(const std::vector<F>& g, const TSeries<F>& u) {
    if (!is_zero(u.constant_term())) throw std::invalid_argument("inner series must vanish at the origin");
    TSeries<F> r = TSeries<F>::constant(u.nvars, u.order, g.empty() ? F(0) : g[0]);
    TSeries<F> power = TSeries<F>::constant(u.nvars, u.order, F(1));
    int v = u.is_zero_series() ? u.order + 1 : u.valuation();
    for (std::size_t k = 1; k < g.size() && static_cast<int>(k) * v <= u.order; ++k) {
        power = power * u;
        if (!is_zero(g[k])) r = r + power.scaled(g[k]);
    }
    return r;
}

enum class SeriesFn { Sin, Cos, Exp };

template <class F>
std::vector<F> taylor_coefficients(SeriesFn fn, int order) {
    std::vector<F> g(static_cast<std::size_t>(order) + 1, F(0));
    F fact(1);
    for (int k = 0; k <= order; ++k) {
        if (k > 0) fact = fact * F(static_cast<long>(k));
        F inv = F(1) / fact;
        switch (fn) {
            case SeriesFn::Exp: g[k] = inv; break;
            case SeriesFn::Sin:
                if (k % 2 == 1) g[k] = (k / 2) % 2 == 0 ? inv : F(0) - inv;
                break;
            case SeriesFn::Cos:
                if (k % 2 == 0) g[k] = (k / 2) % 2 == 0 ? inv : F(0) - inv;
                break;
        }
    }
    return g;
}

template <class F>
F coefficient_to(const GaussRat& c);
template <>
inline GaussRat coefficient_to<GaussRat>(const GaussRat& c) { return c; }
template <>
inline ModP coefficient_to<ModP>(const GaussRat& c) { return ModP::from(c); }

/// Expression tree for a series component; evaluated at any order over any coefficient field.
/// A Raw leaf carries a fixed truncated series, which caps the order at which the tree is meaningful.
struct SeriesExpr {
    enum class Kind { Const, Var, Raw, Add, Sub, Mul, Neg, Pow, Fn };
    Kind kind = Kind::Const;
    GaussRat value;
    int var = 0;
    unsigned exponent = 0;
    SeriesFn fn = SeriesFn::Sin;
    Poly raw;
    int raw_order = 0;
    std::vector<std::shared_ptr<const SeriesExpr>> args;

    using Ptr = std::shared_ptr<const SeriesExpr>;

    static Ptr constant(const GaussRat& c) {
        auto e = std::make_shared<SeriesExpr>();
        e->kind = Kind::Const;
        e->value = c;
        return e;
    }
    static Ptr variable(int k) {
        auto e = std::make_shared<SeriesExpr>();
        e->kind = Kind::Var;
        e->var = k;
        return e;
    }
    static Ptr raw_series(Poly p, int order) {
        auto e = std::make_shared<SeriesExpr>();
        e->kind = Kind::Raw;
        e->raw = std::move(p);
        e->raw_order = order;
        return e;
    }
    static Ptr binary(Kind k, Ptr a, Ptr b) {
        auto e = std::make_shared<SeriesExpr>();
        e->kind = k;
        e->args = {std::move(a), std::move(b)};
        return e;
    }
    static Ptr negate(Ptr a) {
        auto e = std::make_shared<SeriesExpr>();
        e->kind = Kind::Neg;
        e->args = {std::move(a)};
        return e;
    }
    static Ptr power(Ptr a, unsigned k) {
        auto e = std::make_shared<SeriesExpr>();
        e->kind = Kind::Pow;
        e->exponent = k;
        e->args = {std::move(a)};
        return e;
    }
    static Ptr apply(SeriesFn f, Ptr a) {
        auto e = std::make_shared<SeriesExpr>();
        e->kind = Kind::Fn;
        e->fn = f;
        e->args = {std::move(a)};
        return e;
    }
    static Ptr from_poly(const Poly& p) { return raw_series(p, std::numeric_limits<int>::max()); }

    /// Largest order at which evaluation is exact (raw leaves bound it).
    int max_order() const {
        int m = kind == Kind::Raw ? raw_order : std::numeric_limits<int>::max();
        for (const auto& a : args) m = std::min(m, a->max_order());
        return m;
    }

    template <class F>
    TSeries<F> eval(int nvars, int order) const {
        switch (kind) {
            case Kind::Const: return TSeries<F>::constant(nvars, order, coefficient_to<F>(value));
            case Kind::Var:
                if (var < 0 || var >= nvars) throw std::invalid_argument("series variable out of range");
                return TSeries<F>::variable(nvars, order, var);
            case Kind::Raw: {
                TSeries<F> s{nvars, order, {}};
                for (const auto& [e, c] : raw.terms()) {
                    Exponent f(e.begin(), e.begin() + std::min<std::size_t>(e.size(), static_cast<std::size_t>(nvars)));
                    f.resize(static_cast<std::size_t>(nvars), 0);
                    s.add_term(f, coefficient_to<F>(c));
                }
                return s;
            }
            case Kind::Add: return args[0]->eval<F>(nvars, order) + args[1]->eval<F>(nvars, order);
            case Kind::Sub: return args[0]->eval<F>(nvars, order) - args[1]->eval<F>(nvars, order);
            case Kind::Mul: return args[0]->eval<F>(nvars, order) * args[1]->eval<F>(nvars, order);
            case Kind::Neg: return args[0]->eval<F>(nvars, order).scaled(F(0) - F(1));
            case Kind::Pow: return args[0]->eval<F>(nvars, order).pow(exponent);
            case Kind::Fn: {
                auto inner = args[0]->eval<F>(nvars, order);
                if (!is_zero(inner.constant_term()))
                    throw std::invalid_argument("sin/cos/exp need an argument vanishing at the origin");
                return compose_univariate(taylor_coefficients<F>(fn, order), inner);
            }
        }
        throw std::logic_error("unreachable");
    }

    /// A polynomial written in the expression grammar, with coefficients as (re + im*i).
    static std::string expression_string(const Poly& p) {
        if (p.is_zero()) return "0";
        std::string out;
        for (const auto& [e, c] : p.terms()) {
            if (!out.empty()) out += " + ";
            std::string coef = "(" + c.re().get_str();
            if (sgn(c.im()) != 0 || sgn(c.re()) == 0) coef += " + (" + c.im().get_str() + ")*i";
            out += coef + ")";
            for (std::size_t k = 0; k < e.size(); ++k)
                if (e[k] > 0) out += "*z" + std::to_string(k + 1) + (e[k] > 1 ? "^" + std::to_string(e[k]) : "");
        }
        return out;
    }

    std::string str() const {
        switch (kind) {
            case Kind::Const: return value.str();
            case Kind::Var: return "z" + std::to_string(var + 1);
            case Kind::Raw:
                return raw_order == std::numeric_limits<int>::max() ? "(" + expression_string(raw) + ")"
                                                                     : "series(" + to_string(raw) + ")";
            case Kind::Add: return "(" + args[0]->str() + " + " + args[1]->str() + ")";
            case Kind::Sub: return "(" + args[0]->str() + " - " + args[1]->str() + ")";
            case Kind::Mul: return args[0]->str() + "*" + args[1]->str();
            case Kind::Neg: return "-" + args[0]->str();
            case Kind::Pow: return args[0]->str() + "^" + std::to_string(exponent);
            case Kind::Fn: {
                const char* name = fn == SeriesFn::Sin ? "sin" : fn == SeriesFn::Cos ? "cos" : "exp";
                return std::string(name) + "(" + args[0]->str() + ")";
            }
        }
        return "?";
    }
};

/// Parses expressions such as "z1 + sin(sin(z1))^2", "exp(z2) - 1", "3/2*z1*z2 + i*z3".
/// Builtin shorthands: "sin", "cos", "exp" stand for the function of z1, "iterate:<fn>:<k>" for its k-fold composition,
/// and "polynomial:<poly>" for a polynomial in z1..zn.
class SeriesParser {
public:
    SeriesParser(std::string text, int nvars) : s_(std::move(text)), nvars_(nvars) {}

    SeriesExpr::Ptr parse() {
        if (s_ == "sin" || s_ == "cos" || s_ == "exp") return SeriesExpr::apply(fn_of(s_), SeriesExpr::variable(0));
        if (s_.rfind("iterate:", 0) == 0) {
            auto rest = s_.substr(8);
            auto colon = rest.find(':');
            if (colon == std::string::npos) fail("expected iterate:<fn>:<k>");
            auto name = rest.substr(0, colon);
            int k = std::stoi(rest.substr(colon + 1));
            if (k < 1) fail("iteration count must be >= 1");
            SeriesExpr::Ptr e = SeriesExpr::variable(0);
            for (int j = 0; j < k; ++j) e = SeriesExpr::apply(fn_of(name), e);
            return e;
        }
        if (s_.rfind("polynomial:", 0) == 0) {
            auto ctx = free_context(nvars_);
            return SeriesExpr::from_poly(parse_poly(s_.substr(11), ctx));
        }
        auto e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

    static Ctx free_context(int nvars) {
        std::vector<Variable> v;
        for (int k = 1; k <= nvars; ++k) v.push_back({"z" + std::to_string(k), VarKind::Free, -1});
        return VarContext::make(v);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("series expression, column " + std::to_string(pos_ + 1) + ": " + msg);
    }
    SeriesFn fn_of(const std::string& name) const {
        if (name == "sin") return SeriesFn::Sin;
        if (name == "cos") return SeriesFn::Cos;
        if (name == "exp") return SeriesFn::Exp;
        fail("unknown function '" + name + "'");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    SeriesExpr::Ptr expr() {
        auto e = term();
        for (;;) {
            if (eat('+')) e = SeriesExpr::binary(SeriesExpr::Kind::Add, e, term());
            else if (eat('-')) e = SeriesExpr::binary(SeriesExpr::Kind::Sub, e, term());
            else return e;
        }
    }
    SeriesExpr::Ptr term() {
        auto e = factor();
        for (;;) {
            if (eat('*')) e = SeriesExpr::binary(SeriesExpr::Kind::Mul, e, factor());
            else if (eat('/')) {
                auto d = factor();
                if (d->kind != SeriesExpr::Kind::Const || d->value.is_zero()) fail("division only by nonzero constants");
                e = SeriesExpr::binary(SeriesExpr::Kind::Mul, e, SeriesExpr::constant(GaussRat(1) / d->value));
            } else return e;
        }
    }
    SeriesExpr::Ptr factor() {
        if (eat('-')) return SeriesExpr::negate(factor());
        auto e = primary();
        if (eat('^')) {
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected exponent");
            e = SeriesExpr::power(e, static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start))));
        }
        return e;
    }
    SeriesExpr::Ptr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return SeriesExpr::constant(GaussRat(Rational(mpz_class(s_.substr(start, pos_ - start), 10))));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "i") return SeriesExpr::constant(GaussRat::i());
            if (name == "sin" || name == "cos" || name == "exp") {
                if (!eat('(')) fail("expected '(' after " + name);
                auto arg = expr();
                if (!eat(')')) fail("expected ')'");
                return SeriesExpr::apply(fn_of(name), arg);
            }
            if (name.size() > 1 && name[0] == 'z' && std::all_of(name.begin() + 1, name.end(), ::isdigit)) {
                int k = std::stoi(name.substr(1));
                if (k < 1 || k > nvars_) {
                    pos_ = start;
                    fail("variable " + name + " out of range");
                }
                return SeriesExpr::variable(k - 1);
            }
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    std::string s_;
    int nvars_;
    std::size_t pos_ = 0;
};

inline SeriesExpr::Ptr parse_series(const std::string& text, int nvars) { return SeriesParser(text, nvars).parse(); }

/// A map (f₁,…,f_{n_out}) of n_in variables given by expression trees and a working order N.
struct SeriesMap {
    int n_in = 1;
    int order = 20;
    std::vector<SeriesExpr::Ptr> components;

    int n_out() const { return static_cast<int>(components.size()); }
    int max_order() const {
        int m = std::numeric_limits<int>::max();
        for (const auto& c : components) m = std::min(m, c->max_order());
        return m;
    }
    Ctx context() const { return SeriesParser::free_context(n_in); }

    /// Component k truncated at `at` (default: the working order) as an exact polynomial in z1..z_{n_in}.
    Poly exact(std::size_t k, int at = -1) const {
        int N = at < 0 ? order : at;
        auto s = components.at(k)->eval<GaussRat>(n_in, N);
        auto ctx = context();
        Poly p(ctx);
        for (const auto& [e, c] : s.terms) p.add_term(e, c);
        return p;
    }
};

}  // namespace crkit
