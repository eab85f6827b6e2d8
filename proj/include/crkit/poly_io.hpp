#pragma once

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "crkit/poly.hpp"

namespace crkit {

/// Parse failure with the 1-based column of the offending character.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t column)
        : std::runtime_error(msg + " at column " + std::to_string(column)), column_(column) {}
    std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

namespace detail {

// Recursive-descent parser. A numeric literal "a/b" directly followed by 'i' is the
// single literal (a/b)*i, which is the form the printer emits for imaginary coefficients.
class PolyParser {
public:
    PolyParser(std::string_view text, Ctx ctx) : s_(text), ctx_(std::move(ctx)) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_ + 1); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    Poly expr() {
        Poly acc = term();
        for (;;) {
            if (accept('+')) acc += term();
            else if (accept('-')) acc -= term();
            else return acc;
        }
    }

    Poly term() {
        Poly acc = unary();
        for (;;) {
            if (accept('*')) {
                acc *= unary();
            } else if (peek() == '/') {
                std::size_t at = pos_;
                ++pos_;
                Poly d = unary();
                if (!d.is_constant() || d.is_zero()) {
                    pos_ = at;
                    fail("division only by a nonzero constant");
                }
                acc *= GaussRat(1) / d.constant_term();
            } else {
                return acc;
            }
        }
    }

    Poly unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Poly power() {
        Poly base = atom();
        if (accept('^')) {
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected integer exponent");
            unsigned long e = std::stoul(std::string(s_.substr(start, pos_ - start)));
            if (e > 10000) fail("exponent too large");
            return base.pow(static_cast<unsigned>(e));
        }
        return base;
    }

    Poly atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (!accept(')')) fail("expected ')'");
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return Poly::constant(ctx_, number());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string name(s_.substr(start, pos_ - start));
            if (name == "i") return Poly::constant(ctx_, GaussRat::i());
            auto idx = ctx_->index_of(name);
            if (!idx) {
                pos_ = start;
                fail("unknown variable '" + name + "'");
            }
            return Poly::var(ctx_, static_cast<std::size_t>(*idx));
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    GaussRat number() {
        auto digits = [&]() {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return std::string(s_.substr(start, pos_ - start));
        };
        std::string whole = digits();
        Rational value(mpz_class(whole, 10));
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            std::string frac = digits();
            if (!frac.empty()) {
                mpz_class den(1);
                for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
                value = Rational(mpz_class(whole + frac, 10), den);
                value.canonicalize();
            }
        } else if (pos_ + 1 < s_.size() && s_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
            ++pos_;
            std::string den = digits();
            mpz_class d(den, 10);
            if (d == 0) fail("zero denominator");
            value = Rational(mpz_class(whole, 10), d);
            value.canonicalize();
        }
        if (pos_ < s_.size() && s_[pos_] == 'i' &&
            !(pos_ + 1 < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '_'))) {
            ++pos_;
            return GaussRat(Rational(0), value);
        }
        return GaussRat(value);
    }

    std::string_view s_;
    Ctx ctx_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Poly parse_poly(std::string_view text, const Ctx& ctx) { return detail::PolyParser(text, ctx).parse(); }

inline std::string monomial_str(const Exponent& e, const VarContext& ctx) {
    std::string s;
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] == 0) continue;
        if (!s.empty()) s += "*";
        s += ctx.var(k).name;
        if (e[k] > 1) s += "^" + std::to_string(e[k]);
    }
    return s;
}

/// Canonical text form: terms in descending graded-lex order.
inline std::string to_string(const Poly& p) {
    if (p.is_zero()) return "0";
    std::vector<std::pair<Exponent, GaussRat>> ts(p.terms().begin(), p.terms().end());
    std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return grlex_cmp(a.first, b.first) > 0; });
    std::string out;
    bool first = true;
    for (const auto& [e, c] : ts) {
        std::string mono = monomial_str(e, *p.ctx());
        bool negative = false;
        GaussRat mag = c;
        if (c.is_real() && sgn(c.re()) < 0) negative = true;
        if (c.is_imag() && sgn(c.im()) < 0) negative = true;
        if (negative) mag = -c;
        std::string coef;
        if (mono.empty()) coef = mag.str();
        else if (!mag.is_one()) coef = mag.str() + "*";
        if (first) out += negative ? "-" : "";
        else out += negative ? " - " : " + ";
        out += coef + mono;
        first = false;
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << to_string(p); }

}  // namespace crkit
