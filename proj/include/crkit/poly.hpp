#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "crkit/gauss_rat.hpp"
#include "crkit/var_context.hpp"

namespace crkit {

using Exponent = std::vector<std::uint32_t>;

inline std::uint32_t total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0u); }

/// Graded lexicographic comparison with the declared variable order (index 0 largest).
inline int grlex_cmp(const Exponent& a, const Exponent& b) {
    auto da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
}

inline bool divides(const Exponent& a, const Exponent& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

/// Sparse multivariate polynomial over Q(i). Terms are stored with no zero coefficients;
/// two polynomials over the same context compare structurally.
class Poly {
public:
    using TermMap = std::map<Exponent, GaussRat>;

    Poly() = default;
    explicit Poly(Ctx ctx) : ctx_(std::move(ctx)) {}

    static Poly constant(Ctx ctx, const GaussRat& c) {
        Poly p(std::move(ctx));
        if (!c.is_zero()) p.terms_.emplace(Exponent(p.nvars(), 0), c);
        return p;
    }
    static Poly var(Ctx ctx, std::size_t i, std::uint32_t power = 1) {
        Poly p(std::move(ctx));
        Exponent e(p.nvars(), 0);
        e.at(i) = power;
        p.terms_.emplace(std::move(e), GaussRat(1));
        return p;
    }
    static Poly monomial(Ctx ctx, Exponent e, const GaussRat& c) {
        Poly p(std::move(ctx));
        if (e.size() != p.nvars()) throw std::invalid_argument("exponent length mismatch");
        if (!c.is_zero()) p.terms_.emplace(std::move(e), c);
        return p;
    }

    const Ctx& ctx() const { return ctx_; }
    std::size_t nvars() const { return ctx_ ? ctx_->size() : 0; }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && crkit::total_degree(terms_.begin()->first) == 0); }

    GaussRat constant_term() const {
        auto it = terms_.find(Exponent(nvars(), 0));
        return it == terms_.end() ? GaussRat(0) : it->second;
    }
    GaussRat coeff(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? GaussRat(0) : it->second;
    }

    void add_term(const Exponent& e, const GaussRat& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    std::uint32_t total_degree() const {
        std::uint32_t d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, crkit::total_degree(e));
        return d;
    }
    std::uint32_t degree_in(std::size_t i) const {
        std::uint32_t d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
        return d;
    }
    bool uses_var(std::size_t i) const {
        for (const auto& [e, c] : terms_)
            if (e[i] != 0) return true;
        return false;
    }
    std::vector<bool> support() const {
        std::vector<bool> s(nvars(), false);
        for (const auto& [e, c] : terms_)
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) s[i] = true;
        return s;
    }

    /// Leading term under graded lex; precondition: nonzero.
    std::pair<Exponent, GaussRat> leading_term() const {
        if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
        auto best = terms_.begin();
        for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it)
            if (grlex_cmp(it->first, best->first) > 0) best = it;
        return *best;
    }

    Poly operator-() const {
        Poly r(ctx_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }
    Poly& operator+=(const Poly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    Poly& operator*=(const GaussRat& s) {
        if (s.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const GaussRat& s) { return a *= s; }
    friend Poly operator*(const GaussRat& s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b) { return mul(a, b); }
    Poly& operator*=(const Poly& o) { return *this = mul(*this, o); }

    /// Product truncated to total degree <= max_degree (max_degree < 0: no truncation).
    static Poly mul(const Poly& a, const Poly& b, int max_degree = -1) {
        check_same(a, b);
        Poly r(a.ctx_ ? a.ctx_ : b.ctx_);
        Exponent e(r.nvars());
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                std::uint32_t deg = 0;
                for (std::size_t i = 0; i < e.size(); ++i) {
                    e[i] = ea[i] + eb[i];
                    deg += e[i];
                }
                if (max_degree >= 0 && deg > static_cast<std::uint32_t>(max_degree)) continue;
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }

    Poly pow(unsigned k, int max_degree = -1) const {
        Poly acc = constant(ctx_, GaussRat(1));
        Poly base = *this;
        while (k) {
            if (k & 1u) acc = mul(acc, base, max_degree);
            k >>= 1u;
            if (k) base = mul(base, base, max_degree);
        }
        return acc;
    }

    Poly truncate(int max_degree) const {
        Poly r(ctx_);
        for (const auto& [e, c] : terms_)
            if (crkit::total_degree(e) <= static_cast<std::uint32_t>(max_degree)) r.terms_.emplace(e, c);
        return r;
    }

    Poly derivative(std::size_t i) const {
        Poly r(ctx_);
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Exponent f = e;
            f[i] -= 1;
            r.add_term(f, c * GaussRat(static_cast<long>(e[i])));
        }
        return r;
    }

    /// Simultaneous substitution x_k -> images[k] into a polynomial over target.
    /// Entries left empty keep the variable (requires the variable to exist in target at the same index).
    Poly compose(const std::vector<std::optional<Poly>>& images, const Ctx& target, int max_degree = -1) const {
        if (images.size() != nvars()) throw std::invalid_argument("compose: image count mismatch");
        std::vector<std::vector<Poly>> powers(nvars());
        auto power_of = [&](std::size_t k, std::uint32_t d) -> const Poly& {
            auto& cache = powers[k];
            if (cache.empty()) {
                cache.push_back(constant(target, GaussRat(1)));
                cache.push_back(images[k] ? *images[k] : var(target, k));
            }
            while (cache.size() <= d) cache.push_back(mul(cache.back(), cache[1], max_degree));
            return cache[d];
        };
        Poly r(target);
        for (const auto& [e, c] : terms_) {
            Poly t = constant(target, c);
            for (std::size_t k = 0; k < e.size() && !t.is_zero(); ++k)
                if (e[k]) t = mul(t, power_of(k, e[k]), max_degree);
            r += t;
        }
        return r;
    }

    Poly substitute(std::size_t i, const Poly& image) const {
        std::vector<std::optional<Poly>> imgs(nvars());
        imgs[i] = image;
        return compose(imgs, ctx_);
    }

    /// Substitute constant values for some variables (others kept).
    Poly partial_evaluate(const std::vector<std::optional<GaussRat>>& values) const {
        if (values.size() != nvars()) throw std::invalid_argument("partial_evaluate: size mismatch");
        Poly r(ctx_);
        std::vector<std::vector<GaussRat>> pw(nvars());
        for (const auto& [e, c] : terms_) {
            GaussRat coef = c;
            Exponent f = e;
            for (std::size_t k = 0; k < e.size(); ++k) {
                if (!values[k] || e[k] == 0) continue;
                auto& cache = pw[k];
                if (cache.empty()) cache.push_back(GaussRat(1));
                while (cache.size() <= e[k]) cache.push_back(cache.back() * *values[k]);
                coef *= cache[e[k]];
                f[k] = 0;
            }
            r.add_term(f, coef);
        }
        return r;
    }

    GaussRat evaluate(const std::vector<GaussRat>& point) const {
        if (point.size() != nvars()) throw std::invalid_argument("evaluate: point dimension mismatch");
        std::vector<std::vector<GaussRat>> pw(nvars());
        GaussRat acc(0);
        for (const auto& [e, c] : terms_) {
            GaussRat t = c;
            for (std::size_t k = 0; k < e.size(); ++k) {
                if (e[k] == 0) continue;
                auto& cache = pw[k];
                if (cache.empty()) cache.push_back(GaussRat(1));
                while (cache.size() <= e[k]) cache.push_back(cache.back() * point[k]);
                t *= cache[e[k]];
            }
            acc += t;
        }
        return acc;
    }

    std::complex<double> evaluate(const std::vector<std::complex<double>>& point) const {
        std::complex<double> acc = 0;
        for (const auto& [e, c] : terms_) {
            std::complex<double> t = c.to_complex();
            for (std::size_t k = 0; k < e.size(); ++k)
                for (std::uint32_t j = 0; j < e[k]; ++j) t *= point[k];
            acc += t;
        }
        return acc;
    }

    /// Re-express over a context of possibly different size; index_map[k] is the target index of var k.
    Poly embed(const Ctx& target, const std::vector<int>& index_map) const {
        Poly r(target);
        for (const auto& [e, c] : terms_) {
            Exponent f(target->size(), 0);
            for (std::size_t k = 0; k < e.size(); ++k) {
                if (e[k] == 0) continue;
                if (index_map.at(k) < 0) throw std::invalid_argument("embed: variable has no image");
                f[index_map[k]] += e[k];
            }
            r.add_term(f, c);
        }
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.is_zero() && b.is_zero()) return true;
        return same_context(a.ctx_, b.ctx_) && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

private:
    static void check_same(const Poly& a, const Poly& b) {
        if (a.ctx_ && b.ctx_ && !same_context(a.ctx_, b.ctx_))
            throw std::invalid_argument("polynomials over different variable contexts");
    }
    void adopt(const Poly& o) {
        check_same(*this, o);
        if (!ctx_) ctx_ = o.ctx_;
    }

    Ctx ctx_;
    TermMap terms_;
};

/// Swap each variable with its conjugate partner and conjugate every coefficient.
inline Poly conjugate(const Poly& p) {
    const auto& ctx = *p.ctx();
    Poly r(p.ctx());
    for (const auto& [e, c] : p.terms()) {
        Exponent f(e.size(), 0);
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) continue;
            int partner = ctx.var(k).partner;
            if (partner < 0) throw std::invalid_argument("no conjugate partner for variable " + ctx.var(k).name);
            f[partner] = e[k];
        }
        r.add_term(f, c.conj());
    }
    return r;
}

inline bool is_real(const Poly& p) { return conjugate(p) == p; }

struct DivisionResult {
    Poly quotient;
    Poly remainder;
};

/// Multivariate division of p by q under graded lex. The remainder is zero whenever q divides p.
inline DivisionResult divide(const Poly& p, const Poly& q) {
    if (q.is_zero()) throw std::domain_error("division by zero polynomial");
    auto [lq, cq] = q.leading_term();
    Poly quot(p.ctx()), rem(p.ctx()), work = p;
    while (!work.is_zero()) {
        auto [lw, cw] = work.leading_term();
        if (divides(lq, lw)) {
            Exponent d(lw.size());
            for (std::size_t k = 0; k < d.size(); ++k) d[k] = lw[k] - lq[k];
            Poly t = Poly::monomial(p.ctx(), d, cw / cq);
            quot += t;
            work -= t * q;
        } else {
            rem.add_term(lw, cw);
            work.add_term(lw, -cw);
        }
    }
    return {std::move(quot), std::move(rem)};
}

/// Exact quotient; throws when q does not divide p.
inline Poly exact_divide(const Poly& p, const Poly& q) {
    auto r = divide(p, q);
    if (!r.remainder.is_zero()) throw std::domain_error("inexact polynomial division");
    return std::move(r.quotient);
}

}  // namespace crkit
