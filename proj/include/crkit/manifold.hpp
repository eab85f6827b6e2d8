#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crkit/ideal.hpp"
#include "crkit/matrix.hpp"
#include "crkit/poly_io.hpp"
#include "crkit/random.hpp"

namespace crkit {

using PointC = std::vector<GaussRat>;

/// (p, p̄): the point of the complexification lying over p.
inline PointC complexified_point(const PointC& p) {
    PointC r = p;
    for (const auto& x : p) r.push_back(x.conj());
    return r;
}

/// A point on the complexification, as 2n coordinates (z, ζ).
using ComplexSampler = std::function<std::optional<PointC>(Rng&)>;
/// A point p of the real set (n coordinates); `near` requests a small perturbation of a given point.
using RealSampler = std::function<std::optional<PointC>(Rng&, const PointC* near)>;

struct ImplicitManifold {
    std::string name;
    int n = 0;
    Ctx ctx;
    std::vector<Poly> gens;
    std::optional<PointC> base_point;
    /// false for complex generators of the complexified ideal (graph manifolds)
    bool real_generators = true;
    ComplexSampler complex_sampler;
    RealSampler real_sampler;
};

class GraphManifold {
public:
    GraphManifold() = default;
    GraphManifold(std::string name, int m, int d, std::vector<Poly> q) : name(std::move(name)), m(m), d(d), Q(std::move(q)) {
        if (m < 0 || d < 1) throw std::invalid_argument("graph manifold needs m >= 0 and d >= 1");
        if (static_cast<int>(Q.size()) != d) throw std::invalid_argument("graph manifold needs exactly d equations");
        ctx = Q.front().ctx();
        if (!ctx || static_cast<int>(ctx->size()) != 2 * n()) throw std::invalid_argument("graph manifold: context mismatch");
        for (int l = 0; l < d; ++l) {
            for (std::size_t k = 0; k < ctx->size(); ++k)
                if (Q[l].uses_var(k) && static_cast<int>(k) >= n() + m)
                    throw std::invalid_argument("graph equation " + std::to_string(l + 1) + " involves " + ctx->var(k).name +
                                                "; only z-variables and zb1..zb" + std::to_string(m) + " are allowed");
        }
        base_point = PointC(static_cast<std::size_t>(n()), GaussRat(0));
    }

    std::string name;
    int m = 0, d = 0;
    Ctx ctx;
    std::vector<Poly> Q;
    /// set when Q is a truncated series (output of graph_solve)
    std::optional<int> series_order;
    PointC base_point;
    /// graph_solve provenance: new coordinate k is original coordinate coord_perm[k], shifted by origin
    std::vector<int> coord_perm;
    PointC origin;

    int n() const { return m + d; }
    std::size_t w(int k) const { return static_cast<std::size_t>(k); }
    std::size_t z(int l) const { return static_cast<std::size_t>(m + l); }
    std::size_t zeta_w(int k) const { return static_cast<std::size_t>(n() + k); }
    std::size_t xi(int l) const { return static_cast<std::size_t>(n() + m + l); }

    /// Q̄_l(w, τ): the conjugate system z_l = Q̄_l(w, ζ_w, ξ).
    std::vector<Poly> conj_Q() const {
        std::vector<Poly> r;
        for (const auto& q : Q) r.push_back(conjugate(q));
        return r;
    }
    /// ξ_l − Q_l(ζ_w, t): generators of the complexification.
    std::vector<Poly> complex_gens() const {
        std::vector<Poly> r;
        for (int l = 0; l < d; ++l) r.push_back(Poly::var(ctx, xi(l)) - Q[l]);
        return r;
    }
};

namespace detail {

inline bool jointly_affine(const Poly& p, const std::vector<bool>& chosen) {
    for (const auto& [e, c] : p.terms()) {
        std::uint32_t s = 0;
        for (std::size_t k = 0; k < e.size(); ++k)
            if (chosen[k]) s += e[k];
        if (s > 1) return false;
    }
    return true;
}

/// Greedily picks one variable per equation so the whole system is affine in the picked set.
inline std::vector<std::size_t> choose_affine_unknowns(const std::vector<Poly>& eqs, const std::vector<std::size_t>& candidates,
                                                       std::size_t nvars) {
    std::vector<bool> chosen(nvars, false);
    std::vector<std::size_t> out;
    for (const auto& e : eqs) {
        if (e.is_zero()) continue;
        for (auto v : candidates) {
            if (chosen[v] || !e.uses_var(v)) continue;
            chosen[v] = true;
            bool ok = true;
            for (const auto& f : eqs) ok = ok && jointly_affine(f, chosen);
            if (ok) {
                out.push_back(v);
                break;
            }
            chosen[v] = false;
        }
    }
    return out;
}

/// Fix every variable except `unknowns` to `assignment`, then solve the resulting affine system.
inline std::optional<PointC> linear_sample(const std::vector<Poly>& eqs, const std::vector<std::size_t>& unknowns, PointC assignment) {
    std::size_t nv = assignment.size();
    std::vector<std::optional<GaussRat>> vals(nv);
    std::vector<bool> unknown(nv, false);
    for (auto u : unknowns) unknown[u] = true;
    for (std::size_t k = 0; k < nv; ++k)
        if (!unknown[k]) vals[k] = assignment[k];
    Matrix<GaussRat> a(0, unknowns.size());
    std::vector<GaussRat> b;
    for (const auto& e : eqs) {
        if (e.is_zero()) continue;
        Poly r = e.partial_evaluate(vals);
        std::vector<GaussRat> row(unknowns.size(), GaussRat(0));
        GaussRat rhs(0);
        for (const auto& [ex, c] : r.terms()) {
            if (total_degree(ex) == 0) {
                rhs -= c;
                continue;
            }
            for (std::size_t j = 0; j < unknowns.size(); ++j)
                if (ex[unknowns[j]] == 1) row[j] += c;
        }
        a.append_row(row);
        b.push_back(rhs);
    }
    if (a.rows() == 0) return assignment;
    // unknowns on free columns keep their assigned value
    auto ef = rref(a);
    std::vector<bool> pivot(unknowns.size(), false);
    for (auto c : ef.pivots) pivot[c] = true;
    for (std::size_t j = 0; j < unknowns.size(); ++j) {
        if (pivot[j]) continue;
        for (std::size_t i = 0; i < a.rows(); ++i) b[i] -= a(i, j) * assignment[unknowns[j]];
        for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) = GaussRat(0);
    }
    auto x = solve_linear(a, b);
    if (!x) return std::nullopt;
    for (std::size_t j = 0; j < unknowns.size(); ++j)
        if (pivot[j]) assignment[unknowns[j]] = (*x)[j];
    for (const auto& e : eqs)
        if (!e.evaluate(assignment).is_zero()) return std::nullopt;
    return assignment;
}

inline GaussRat random_small_rational(Rng& rng, long num, long den) {
    return GaussRat(Rational(random_int(rng, -num, num), random_int(rng, 1, den)));
}

}  // namespace detail

/// Real coordinates: x1..xn, y1..yn with z = x + i y.
inline Ctx real_context(int n) {
    std::vector<Variable> v;
    for (int k = 0; k < n; ++k) v.push_back({"x" + std::to_string(k + 1), VarKind::Free, -1});
    for (int k = 0; k < n; ++k) v.push_back({"y" + std::to_string(k + 1), VarKind::Free, -1});
    return VarContext::make(std::move(v));
}

/// Real and imaginary parts of P(x + iy, x − iy) as polynomials with real coefficients.
inline std::pair<Poly, Poly> realify(const Poly& p, int n, const Ctx& rctx) {
    std::vector<std::optional<Poly>> img(2 * n);
    for (int k = 0; k < n; ++k) {
        Poly x = Poly::var(rctx, k), y = Poly::var(rctx, n + k);
        img[k] = x + y * GaussRat::i();
        img[n + k] = x - y * GaussRat::i();
    }
    Poly q = p.compose(img, rctx);
    Poly re(rctx), im(rctx);
    for (const auto& [e, c] : q.terms()) {
        re.add_term(e, GaussRat(c.re()));
        im.add_term(e, GaussRat(c.im()));
    }
    return {re, im};
}

inline std::optional<PointC> default_complex_sample(const ImplicitManifold& M, Rng& rng) {
    std::size_t nv = 2 * static_cast<std::size_t>(M.n);
    std::vector<std::size_t> cand;
    for (std::size_t k = 0; k < nv; ++k) cand.push_back(nv - 1 - k);
    auto unknowns = detail::choose_affine_unknowns(M.gens, cand, nv);
    for (int attempt = 0; attempt < 40; ++attempt) {
        auto pt = detail::linear_sample(M.gens, unknowns, random_gauss_point(rng, nv, 6));
        if (pt) return pt;
    }
    return std::nullopt;
}

inline std::optional<PointC> default_real_sample(const ImplicitManifold& M, Rng& rng, const PointC* near) {
    int n = M.n;
    Ctx rctx = real_context(n);
    std::vector<Poly> eqs;
    for (const auto& g : M.gens) {
        auto [re, im] = realify(g, n, rctx);
        for (Poly* p : {&re, &im})
            if (!p->is_zero() && std::find(eqs.begin(), eqs.end(), *p) == eqs.end()) eqs.push_back(*p);
    }
    std::vector<std::size_t> cand;
    for (std::size_t k = 0; k < 2 * static_cast<std::size_t>(n); ++k) cand.push_back(k);
    auto unknowns = detail::choose_affine_unknowns(eqs, cand, 2 * n);
    for (int attempt = 0; attempt < 60; ++attempt) {
        PointC a(2 * n);
        for (int k = 0; k < 2 * n; ++k) {
            if (near) {
                const GaussRat& c = (*near)[k % n];
                GaussRat base(k < n ? c.re() : c.im());
                long step = random_int(rng, -8, 8);
                a[k] = base + GaussRat(Rational(step == 0 ? 1 : step, 64));
            } else {
                a[k] = detail::random_small_rational(rng, 12, 4);
            }
        }
        auto sol = detail::linear_sample(eqs, unknowns, a);
        if (!sol) continue;
        PointC p(n);
        for (int k = 0; k < n; ++k) p[k] = GaussRat((*sol)[k].re(), (*sol)[n + k].re());
        return p;
    }
    return std::nullopt;
}

inline std::optional<PointC> sample_complexified(const ImplicitManifold& M, Rng& rng) {
    return M.complex_sampler ? M.complex_sampler(rng) : default_complex_sample(M, rng);
}

inline std::optional<PointC> sample_real(const ImplicitManifold& M, Rng& rng, const PointC* near = nullptr) {
    return M.real_sampler ? M.real_sampler(rng, near) : default_real_sample(M, rng, near);
}

/// A generator P with P̄ = −P is replaced by iP, so both {z = ζ} and i(z − ζ) are accepted.
inline ImplicitManifold make_implicit(std::string name, int n, std::vector<Poly> gens, std::optional<PointC> base = std::nullopt) {
    ImplicitManifold M;
    M.name = std::move(name);
    M.n = n;
    M.ctx = VarContext::paired(n);
    bool any = false;
    for (auto& g : gens) {
        if (!same_context(g.ctx(), M.ctx) && !g.is_zero()) throw std::invalid_argument("generator over a foreign context");
        if (!is_real(g)) {
            Poly ig = g * GaussRat::i();
            if (!is_real(ig)) throw std::invalid_argument("generator is not real: " + to_string(g));
            g = ig;
        }
        any = any || !g.is_zero();
    }
    if (!any) throw std::invalid_argument("at least one nonzero generator required");
    M.gens = std::move(gens);
    M.base_point = std::move(base);
    return M;
}

/// The complexified graph system viewed as an (implicit, complex-generator) set.
inline ImplicitManifold as_implicit(const GraphManifold& G) {
    ImplicitManifold M;
    M.name = G.name;
    M.n = G.n();
    M.ctx = G.ctx;
    M.gens = G.complex_gens();
    M.base_point = G.base_point;
    M.real_generators = false;
    GraphManifold copy = G;
    M.complex_sampler = [copy](Rng& rng) -> std::optional<PointC> {
        PointC pt = random_gauss_point(rng, 2 * static_cast<std::size_t>(copy.n()), 6);
        for (int l = 0; l < copy.d; ++l) pt[copy.xi(l)] = GaussRat(0);
        for (int l = 0; l < copy.d; ++l) pt[copy.xi(l)] = copy.Q[l].evaluate(pt);
        return pt;
    };
    return M;
}

inline Matrix<Poly> jacobian(const std::vector<Poly>& gens, const std::vector<std::size_t>& vars) {
    Matrix<Poly> J(gens.size(), vars.size());
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = 0; j < vars.size(); ++j) J(i, j) = gens[i].derivative(vars[j]);
    return J;
}

inline std::vector<std::size_t> range_vars(std::size_t from, std::size_t to) {
    std::vector<std::size_t> v;
    for (std::size_t k = from; k < to; ++k) v.push_back(k);
    return v;
}

inline bool on_manifold(const ImplicitManifold& M, const PointC& p) {
    PointC pc = complexified_point(p);
    for (const auto& g : M.gens)
        if (!g.evaluate(pc).is_zero()) return false;
    return true;
}

struct CodimensionReport {
    int d = 0;
    int real_dim = 0;
    int samples = 0;
    /// ranks differed across samples (a symptom of reducibility or special samples)
    bool rank_fluctuation = false;
};

/// d = generic rank of the σ×2n Jacobian on the complexification.
inline CodimensionReport codimension(const ImplicitManifold& M, std::uint64_t seed, int samples = 6) {
    Rng rng(seed);
    Matrix<Poly> J = jacobian(M.gens, range_vars(0, 2 * M.n));
    CodimensionReport r;
    std::optional<std::size_t> first;
    for (int s = 0; s < samples; ++s) {
        auto pt = sample_complexified(M, rng);
        if (!pt) continue;
        std::size_t rk = rank(evaluate_matrix(J, *pt));
        if (first && *first != rk) r.rank_fluctuation = true;
        if (!first) first = rk;
        r.d = std::max(r.d, static_cast<int>(rk));
        ++r.samples;
    }
    if (r.samples == 0) throw std::runtime_error("no smooth point found");
    r.real_dim = 2 * M.n - r.d;
    return r;
}

inline void require_on(const ImplicitManifold& M, const PointC& p) {
    if (!on_manifold(M, p)) throw std::invalid_argument("point does not lie on " + (M.name.empty() ? std::string("the set") : M.name));
}

inline bool regular_at(const ImplicitManifold& M, const PointC& p, int d) {
    require_on(M, p);
    return static_cast<int>(rank(evaluate_matrix(jacobian(M.gens, range_vars(0, 2 * M.n)), complexified_point(p)))) == d;
}

/// d₁(p): rank of the holomorphic block (∂P_i/∂z_k)(p, p̄).
inline int cr_rank_at(const ImplicitManifold& M, const PointC& p) {
    require_on(M, p);
    return static_cast<int>(rank(evaluate_matrix(jacobian(M.gens, range_vars(0, M.n)), complexified_point(p))));
}

struct CRGenericReport {
    bool cr_generic = false;
    int d1 = 0;
    int perturbed_samples = 0;
    bool probabilistic = true;
};

/// d₁(p) = d, and d₁ is constant at perturbed real samples near p.
inline CRGenericReport cr_generic_at(const ImplicitManifold& M, const PointC& p, int d, std::uint64_t seed, int samples = 8) {
    CRGenericReport r;
    r.d1 = cr_rank_at(M, p);
    r.cr_generic = r.d1 == d && regular_at(M, p, d);
    Rng rng(seed);
    for (int s = 0; s < samples && r.cr_generic; ++s) {
        auto q = sample_real(M, rng, &p);
        if (!q) continue;
        ++r.perturbed_samples;
        if (cr_rank_at(M, *q) != d) r.cr_generic = false;
    }
    return r;
}

inline Ideal complexify(const ImplicitManifold& M) { return Ideal{M.ctx, M.gens}; }

/// Σ^{ic}: holomorphic polynomials in the ideal of Σ^c. `complete` false when truncated.
inline Ideal intrinsic_complexification(const ImplicitManifold& M, int degree_cap) {
    std::vector<int> drop;
    for (int k = 0; k < M.n; ++k) drop.push_back(M.n + k);
    return eliminate(complexify(M), drop, degree_cap);
}

inline Matrix<GaussRat> invert(const Matrix<GaussRat>& a) {
    std::size_t n = a.rows();
    if (a.cols() != n || rank(a) != n) throw std::invalid_argument("matrix is not invertible");
    Matrix<GaussRat> inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<GaussRat> e(n, GaussRat(0));
        e[j] = GaussRat(1);
        auto x = solve_linear(a, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = (*x)[i];
    }
    return inv;
}

inline PointC mat_vec(const Matrix<GaussRat>& a, const PointC& v) {
    PointC r(a.rows(), GaussRat(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
    return r;
}

/// New coordinates z′ with z = A z′ (and ζ = Ā ζ′). Samplers are carried through the change.
inline ImplicitManifold linear_change(const ImplicitManifold& M, const Matrix<GaussRat>& A) {
    int n = M.n;
    std::vector<std::optional<Poly>> img(2 * n);
    for (int i = 0; i < n; ++i) {
        Poly zi(M.ctx), zbi(M.ctx);
        for (int j = 0; j < n; ++j) {
            zi += Poly::var(M.ctx, j) * A(i, j);
            zbi += Poly::var(M.ctx, n + j) * A(i, j).conj();
        }
        img[i] = zi;
        img[n + i] = zbi;
    }
    ImplicitManifold out = M;
    out.gens.clear();
    for (const auto& g : M.gens) out.gens.push_back(g.compose(img, M.ctx));
    Matrix<GaussRat> inv = invert(A);
    auto back = [inv, n](const PointC& p) {
        PointC z(p.begin(), p.begin() + n);
        return mat_vec(inv, z);
    };
    if (M.base_point) out.base_point = back(*M.base_point);
    ImplicitManifold orig = M;
    out.complex_sampler = [orig, inv, n](Rng& rng) -> std::optional<PointC> {
        auto pt = sample_complexified(orig, rng);
        if (!pt) return std::nullopt;
        PointC z(pt->begin(), pt->begin() + n), zb(pt->begin() + n, pt->end());
        Matrix<GaussRat> invc(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) invc(i, j) = inv(i, j).conj();
        PointC r = mat_vec(inv, z);
        PointC rb = mat_vec(invc, zb);
        r.insert(r.end(), rb.begin(), rb.end());
        return r;
    };
    out.real_sampler = [orig, back, A](Rng& rng, const PointC* near) -> std::optional<PointC> {
        std::optional<PointC> q;
        if (near) {
            PointC fwd = mat_vec(A, *near);
            q = sample_real(orig, rng, &fwd);
        } else {
            q = sample_real(orig, rng, nullptr);
        }
        if (!q) return std::nullopt;
        return back(*q);
    };
    return out;
}

/// Change of coordinates preserving the splitting: w = A w′, z = C z′.
inline GraphManifold linear_change(const GraphManifold& G, const Matrix<GaussRat>& A, const Matrix<GaussRat>& C) {
    int m = G.m, d = G.d, n = G.n();
    std::vector<std::optional<Poly>> img(2 * n);
    for (int i = 0; i < m; ++i) {
        Poly wi(G.ctx), zwi(G.ctx);
        for (int j = 0; j < m; ++j) {
            wi += Poly::var(G.ctx, G.w(j)) * A(i, j);
            zwi += Poly::var(G.ctx, G.zeta_w(j)) * A(i, j).conj();
        }
        img[G.w(i)] = wi;
        img[G.zeta_w(i)] = zwi;
    }
    for (int i = 0; i < d; ++i) {
        Poly zi(G.ctx);
        for (int j = 0; j < d; ++j) zi += Poly::var(G.ctx, G.z(j)) * C(i, j);
        img[G.z(i)] = zi;
    }
    Matrix<GaussRat> cbar(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) cbar(i, j) = C(i, j).conj();
    Matrix<GaussRat> cinv = invert(cbar);
    std::vector<Poly> composed;
    for (const auto& q : G.Q) composed.push_back(q.compose(img, G.ctx, G.series_order ? *G.series_order : -1));
    std::vector<Poly> nq;
    for (int l = 0; l < d; ++l) {
        Poly s(G.ctx);
        for (int j = 0; j < d; ++j) s += composed[j] * cinv(l, j);
        nq.push_back(s);
    }
    GraphManifold out(G.name, m, d, nq);
    out.series_order = G.series_order;
    PointC wz(G.base_point.begin(), G.base_point.begin() + m), zz(G.base_point.begin() + m, G.base_point.end());
    PointC bw = mat_vec(invert(A), wz), bz = mat_vec(invert(C), zz);
    out.base_point = bw;
    out.base_point.insert(out.base_point.end(), bz.begin(), bz.end());
    return out;
}

/// z_l − Q̄_l(w, ζ_w, Q(ζ_w, t)) ≡ 0 for every l: the systems ζ_z = Q and z = Q̄ define the same set.
/// Since ξ − Q is a Groebner basis with ξ leading, the normal form is the substitution ξ := Q.
inline bool verify_reality(const GraphManifold& G, int degree_cap = -1) {
    int trunc = G.series_order ? *G.series_order : degree_cap;
    std::vector<std::optional<Poly>> img(2 * G.n());
    for (int l = 0; l < G.d; ++l) img[G.xi(l)] = G.Q[l];
    auto qb = G.conj_Q();
    for (int l = 0; l < G.d; ++l) {
        Poly r = Poly::var(G.ctx, G.z(l)) - qb[l].compose(img, G.ctx, trunc);
        if (trunc >= 0) r = r.truncate(trunc);
        if (!r.is_zero()) return false;
    }
    return true;
}

/// Solve P(t, ζ_w, ξ) = 0 for ξ as a series Q(ζ_w, t) through degree N at the regular CR-generic point p.
inline GraphManifold graph_solve(const ImplicitManifold& M, const PointC& p, int order, int d) {
    require_on(M, p);
    int n = M.n;
    PointC pc = complexified_point(p);
    if (cr_rank_at(M, p) != d) throw std::invalid_argument("not CR-generic here");
    Matrix<GaussRat> B = evaluate_matrix(jacobian(M.gens, range_vars(n, 2 * n)), pc);

    // choose rows and ζ-columns: largest |det|, lexicographically first on ties
    auto subsets = [](std::size_t total, std::size_t k) {
        std::vector<std::vector<std::size_t>> out;
        std::vector<std::size_t> cur;
        std::function<void(std::size_t)> rec = [&](std::size_t start) {
            if (cur.size() == k) {
                out.push_back(cur);
                return;
            }
            for (std::size_t i = start; i < total; ++i) {
                cur.push_back(i);
                rec(i + 1);
                cur.pop_back();
            }
        };
        rec(0);
        return out;
    };
    std::vector<std::size_t> best_rows, best_cols;
    Rational best(0);
    for (const auto& cols : subsets(static_cast<std::size_t>(n), static_cast<std::size_t>(d)))
        for (const auto& rows : subsets(M.gens.size(), static_cast<std::size_t>(d))) {
            Rational v = determinant(B.submatrix(rows, cols)).norm2();
            if (v > best) {
                best = v;
                best_rows = rows;
                best_cols = cols;
            }
        }
    if (best == 0) throw std::invalid_argument("not CR-generic here");

    std::vector<int> perm;
    std::vector<bool> isz(n, false);
    for (auto c : best_cols) isz[c] = true;
    for (int k = 0; k < n; ++k)
        if (!isz[k]) perm.push_back(k);
    for (auto c : best_cols) perm.push_back(static_cast<int>(c));
    int m = n - d;

    Ctx nctx = VarContext::paired(n);
    std::vector<std::optional<Poly>> img(2 * n);
    for (int k = 0; k < n; ++k) {
        int o = perm[k];
        img[o] = Poly::var(nctx, k) + Poly::constant(nctx, p[o]);
        img[n + o] = Poly::var(nctx, n + k) + Poly::constant(nctx, p[o].conj());
    }
    std::vector<Poly> F;
    for (auto r : best_rows) F.push_back(M.gens[r].compose(img, nctx));

    // chord iteration ξ ← ξ − A⁻¹ F(ξ), A = ∂F/∂ξ at 0; each step fixes one more degree
    std::vector<std::size_t> xi_vars;
    for (int l = 0; l < d; ++l) xi_vars.push_back(static_cast<std::size_t>(n + m + l));
    PointC zero(2 * n, GaussRat(0));
    Matrix<GaussRat> Ainv = invert(evaluate_matrix(jacobian(F, xi_vars), zero));
    std::vector<Poly> xi(d, Poly(nctx));
    for (int it = 0; it <= order + 1; ++it) {
        std::vector<std::optional<Poly>> sub(2 * n);
        for (int l = 0; l < d; ++l) sub[xi_vars[l]] = xi[l];
        std::vector<Poly> res;
        for (const auto& f : F) res.push_back(f.compose(sub, nctx, order));
        bool done = std::all_of(res.begin(), res.end(), [](const Poly& r) { return r.is_zero(); });
        if (done) break;
        for (int l = 0; l < d; ++l) {
            Poly upd(nctx);
            for (int j = 0; j < d; ++j) upd += res[j] * Ainv(l, j);
            xi[l] = (xi[l] - upd).truncate(order);
        }
    }
    GraphManifold G(M.name, m, d, xi);
    G.series_order = order;
    G.coord_perm = perm;
    G.origin = p;
    return G;
}

/// Residual of P∘graph through degree N, for the graph produced by graph_solve.
inline std::vector<Poly> graph_residual(const ImplicitManifold& M, const GraphManifold& G) {
    int n = M.n, m = G.m;
    int order = G.series_order ? *G.series_order : -1;
    Ctx nctx = G.ctx;
    std::vector<std::optional<Poly>> img(2 * n);
    for (int k = 0; k < n; ++k) {
        int o = G.coord_perm[k];
        img[o] = Poly::var(nctx, k) + Poly::constant(nctx, G.origin[o]);
        Poly zb = k < m ? Poly::var(nctx, n + k) : G.Q[k - m];
        img[n + o] = zb + Poly::constant(nctx, G.origin[o].conj());
    }
    std::vector<Poly> out;
    for (const auto& g : M.gens) out.push_back(order >= 0 ? g.compose(img, nctx, order).truncate(order) : g.compose(img, nctx));
    return out;
}

}  // namespace crkit
