#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crkit/poly.hpp"

namespace crkit {

/// Graded lex, or a two-block elimination order: the block variables are compared first
/// (by degree, then lex), the remaining variables break ties with graded lex.
class MonomialOrder {
public:
    static MonomialOrder grlex() { return {}; }
    static MonomialOrder elimination(std::vector<bool> block) {
        MonomialOrder o;
        o.block_ = std::move(block);
        return o;
    }

    bool is_elimination() const { return !block_.empty(); }
    const std::vector<bool>& block() const { return block_; }

    int cmp(const Exponent& a, const Exponent& b) const {
        if (block_.empty()) return grlex_cmp(a, b);
        std::uint32_t da = 0, db = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (block_[i]) {
                da += a[i];
                db += b[i];
            }
        if (da != db) return da < db ? -1 : 1;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (block_[i] && a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        da = db = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!block_[i]) {
                da += a[i];
                db += b[i];
            }
        if (da != db) return da < db ? -1 : 1;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!block_[i] && a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }

    std::string describe() const { return block_.empty() ? "grlex" : "elimination"; }

private:
    std::vector<bool> block_;
};

struct Ideal {
    Ctx ctx;
    std::vector<Poly> gens;
    MonomialOrder order = MonomialOrder::grlex();
    /// false when the generators are a degree-truncated Groebner basis
    bool complete = true;

    bool is_zero_ideal() const {
        return std::all_of(gens.begin(), gens.end(), [](const Poly& p) { return p.is_zero(); });
    }
    bool is_unit() const {
        return std::any_of(gens.begin(), gens.end(), [](const Poly& p) { return !p.is_zero() && p.is_constant(); });
    }
};

enum class Membership { Yes, No, Unknown };

inline const char* to_string(Membership m) {
    switch (m) {
        case Membership::Yes: return "yes";
        case Membership::No: return "no";
        default: return "unknown";
    }
}

namespace detail {

using Term = std::pair<Exponent, GaussRat>;

/// Polynomial as terms sorted by decreasing monomial order.
struct SortedPoly {
    std::vector<Term> terms;
    bool empty() const { return terms.empty(); }
    const Exponent& lm() const { return terms.front().first; }
    const GaussRat& lc() const { return terms.front().second; }
};

inline SortedPoly to_sorted(const Poly& p, const MonomialOrder& ord) {
    SortedPoly s;
    s.terms.assign(p.terms().begin(), p.terms().end());
    std::sort(s.terms.begin(), s.terms.end(), [&](const Term& a, const Term& b) { return ord.cmp(a.first, b.first) > 0; });
    return s;
}

inline Poly from_sorted(const SortedPoly& s, const Ctx& ctx) {
    Poly p(ctx);
    for (const auto& [e, c] : s.terms) p.add_term(e, c);
    return p;
}

inline void make_monic(SortedPoly& p) {
    if (p.empty() || p.lc().is_one()) return;
    GaussRat inv = GaussRat(1) / p.lc();
    for (auto& t : p.terms) t.second *= inv;
}

/// a - c * x^shift * b, merged in order.
inline SortedPoly sub_scaled(const SortedPoly& a, const GaussRat& c, const Exponent& shift, const SortedPoly& b,
                             const MonomialOrder& ord) {
    SortedPoly r;
    r.terms.reserve(a.terms.size() + b.terms.size());
    std::size_t i = 0, j = 0;
    Exponent e(shift.size());
    auto shifted = [&](std::size_t k) {
        for (std::size_t v = 0; v < e.size(); ++v) e[v] = b.terms[k].first[v] + shift[v];
        return e;
    };
    while (i < a.terms.size() || j < b.terms.size()) {
        if (j == b.terms.size()) {
            r.terms.push_back(a.terms[i++]);
            continue;
        }
        Exponent eb = shifted(j);
        int cmpv = i == a.terms.size() ? -1 : ord.cmp(a.terms[i].first, eb);
        if (cmpv > 0) {
            r.terms.push_back(a.terms[i++]);
        } else if (cmpv < 0) {
            r.terms.emplace_back(eb, -(c * b.terms[j].second));
            ++j;
        } else {
            GaussRat v = a.terms[i].second - c * b.terms[j].second;
            if (!v.is_zero()) r.terms.emplace_back(eb, std::move(v));
            ++i;
            ++j;
        }
    }
    return r;
}

inline Exponent lcm_exp(const Exponent& a, const Exponent& b) {
    Exponent e(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) e[k] = std::max(a[k], b[k]);
    return e;
}

inline Exponent diff_exp(const Exponent& a, const Exponent& b) {
    Exponent e(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) e[k] = a[k] - b[k];
    return e;
}

inline bool coprime(const Exponent& a, const Exponent& b) {
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] && b[k]) return false;
    return true;
}

/// Full reduction of p modulo basis (entries may be empty = removed).
inline SortedPoly reduce(SortedPoly p, const std::vector<SortedPoly>& basis, const MonomialOrder& ord) {
    SortedPoly rem;
    while (!p.empty()) {
        bool reduced = false;
        for (const auto& g : basis) {
            if (g.empty() || !divides(g.lm(), p.lm())) continue;
            GaussRat c = p.lc() / g.lc();
            p = sub_scaled(p, c, diff_exp(p.lm(), g.lm()), g, ord);
            reduced = true;
            break;
        }
        if (!reduced) {
            rem.terms.push_back(p.terms.front());
            p.terms.erase(p.terms.begin());
        }
    }
    return rem;
}

}  // namespace detail

/// Degree-capped Buchberger (normal selection strategy, product and chain criteria).
/// Returns the reduced basis; `complete` is false when a pair or a new element exceeded the cap.
inline Ideal groebner(const Ideal& in, int degree_cap, std::size_t max_basis = 4000) {
    using namespace detail;
    const MonomialOrder& ord = in.order;
    Ideal out{in.ctx, {}, ord, true};
    std::vector<SortedPoly> G;
    for (const auto& g : in.gens) {
        if (g.is_zero()) continue;
        if (static_cast<int>(g.total_degree()) > degree_cap)
            throw std::invalid_argument("groebner: degree cap below generator degree");
        auto s = to_sorted(g, ord);
        make_monic(s);
        G.push_back(std::move(s));
    }
    if (G.empty()) return out;

    struct Pair {
        std::size_t i, j;
        Exponent lcm;
        std::uint32_t deg;
    };
    std::vector<Pair> queue;
    std::set<std::pair<std::size_t, std::size_t>> pending;
    auto add_pairs = [&](std::size_t k) {
        for (std::size_t i = 0; i < k; ++i) {
            if (G[i].empty()) continue;
            Exponent l = lcm_exp(G[i].lm(), G[k].lm());
            queue.push_back({i, k, l, total_degree(l)});
            pending.insert({i, k});
        }
    };
    for (std::size_t k = 0; k < G.size(); ++k) add_pairs(k);

    auto unit = [&]() {
        out.gens = {Poly::constant(in.ctx, GaussRat(1))};
        out.complete = true;
        return out;
    };
    for (const auto& g : G)
        if (total_degree(g.lm()) == 0) return unit();

    while (!queue.empty()) {
        auto best = std::min_element(queue.begin(), queue.end(), [&](const Pair& a, const Pair& b) {
            if (a.deg != b.deg) return a.deg < b.deg;
            int c = ord.cmp(a.lcm, b.lcm);
            if (c != 0) return c < 0;
            return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
        });
        Pair pr = *best;
        queue.erase(best);
        pending.erase({pr.i, pr.j});
        if (G[pr.i].empty() || G[pr.j].empty()) continue;
        if (coprime(G[pr.i].lm(), G[pr.j].lm())) continue;
        bool chain = false;
        for (std::size_t k = 0; k < G.size() && !chain; ++k) {
            if (k == pr.i || k == pr.j || G[k].empty()) continue;
            if (!divides(G[k].lm(), pr.lcm)) continue;
            auto key = [](std::size_t a, std::size_t b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); };
            if (!pending.count(key(pr.i, k)) && !pending.count(key(pr.j, k))) chain = true;
        }
        if (chain) continue;
        if (static_cast<int>(pr.deg) > degree_cap) {
            out.complete = false;
            continue;
        }
        const auto& a = G[pr.i];
        const auto& b = G[pr.j];
        SortedPoly s = sub_scaled(SortedPoly{}, GaussRat(-1) / a.lc(), diff_exp(pr.lcm, a.lm()), a, ord);
        s = sub_scaled(s, GaussRat(1) / b.lc(), diff_exp(pr.lcm, b.lm()), b, ord);
        SortedPoly r = reduce(std::move(s), G, ord);
        if (r.empty()) continue;
        make_monic(r);
        std::uint32_t rdeg = 0;
        for (const auto& t : r.terms) rdeg = std::max(rdeg, total_degree(t.first));
        if (static_cast<int>(rdeg) > degree_cap) {
            out.complete = false;
            continue;
        }
        if (total_degree(r.lm()) == 0) return unit();
        if (G.size() >= max_basis) {
            out.complete = false;
            break;
        }
        G.push_back(std::move(r));
        add_pairs(G.size() - 1);
    }

    // minimize
    for (std::size_t i = 0; i < G.size(); ++i) {
        if (G[i].empty()) continue;
        for (std::size_t j = 0; j < G.size(); ++j) {
            if (i == j || G[j].empty()) continue;
            if (divides(G[j].lm(), G[i].lm()) && (G[j].lm() != G[i].lm() || j < i)) {
                G[i].terms.clear();
                break;
            }
        }
    }
    // interreduce tails
    std::vector<SortedPoly> reduced;
    for (std::size_t i = 0; i < G.size(); ++i) {
        if (G[i].empty()) continue;
        std::vector<SortedPoly> others;
        for (std::size_t j = 0; j < G.size(); ++j)
            if (j != i && !G[j].empty()) others.push_back(G[j]);
        SortedPoly head;
        head.terms.push_back(G[i].terms.front());
        SortedPoly tail;
        tail.terms.assign(G[i].terms.begin() + 1, G[i].terms.end());
        SortedPoly t = reduce(std::move(tail), others, ord);
        head.terms.insert(head.terms.end(), t.terms.begin(), t.terms.end());
        reduced.push_back(std::move(head));
    }
    std::sort(reduced.begin(), reduced.end(),
              [&](const SortedPoly& a, const SortedPoly& b) { return ord.cmp(a.lm(), b.lm()) < 0; });
    for (const auto& g : reduced) out.gens.push_back(from_sorted(g, in.ctx));
    return out;
}

/// Normal form of p modulo a Groebner basis (under the basis' order).
inline Poly normal_form(const Poly& p, const Ideal& basis) {
    using namespace detail;
    std::vector<SortedPoly> G;
    for (const auto& g : basis.gens)
        if (!g.is_zero()) G.push_back(to_sorted(g, basis.order));
    return from_sorted(reduce(to_sorted(p, basis.order), G, basis.order), p.ctx() ? p.ctx() : basis.ctx);
}

/// yes iff the normal form vanishes; unknown only when the basis is truncated and the normal form is nonzero.
inline Membership ideal_member(const Poly& p, const Ideal& ideal, int degree_cap) {
    int cap = degree_cap;
    for (const auto& g : ideal.gens) cap = std::max(cap, static_cast<int>(g.total_degree()));
    Ideal gb = groebner(ideal, cap);
    if (normal_form(p, gb).is_zero()) return Membership::Yes;
    return gb.complete ? Membership::No : Membership::Unknown;
}

/// Generators of the ideal intersected with the subring without drop_vars (degree-capped).
inline Ideal eliminate(const Ideal& ideal, const std::vector<int>& drop_vars, int degree_cap) {
    std::vector<bool> block(ideal.ctx->size(), false);
    for (int v : drop_vars) block.at(static_cast<std::size_t>(v)) = true;
    Ideal in = ideal;
    in.order = MonomialOrder::elimination(block);
    int cap = degree_cap;
    for (const auto& g : ideal.gens) cap = std::max(cap, static_cast<int>(g.total_degree()));
    Ideal gb = groebner(in, cap);
    Ideal out{ideal.ctx, {}, MonomialOrder::grlex(), gb.complete};
    for (const auto& g : gb.gens) {
        bool free_of_dropped = true;
        for (int v : drop_vars)
            if (g.uses_var(static_cast<std::size_t>(v))) free_of_dropped = false;
        if (free_of_dropped) out.gens.push_back(g);
    }
    return out;
}

}  // namespace crkit
