#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "crkit/manifold.hpp"

namespace crkit {

/// S_q̄ = { z : P_j(z, q̄) = 0 }.
struct SegreVariety {
    Ideal ideal;
    PointC base;
};

inline SegreVariety segre_variety(const ImplicitManifold& M, const PointC& q) {
    std::vector<std::optional<GaussRat>> vals(2 * M.n);
    for (int k = 0; k < M.n; ++k) vals[M.n + k] = q[k].conj();
    SegreVariety S{Ideal{M.ctx, {}}, q};
    for (const auto& g : M.gens) {
        Poly s = g.partial_evaluate(vals);
        if (!s.is_zero()) S.ideal.gens.push_back(s);
    }
    return S;
}

/// Graph form: generators Q_l(q̄_w, t) − q̄_{z,l}.
inline SegreVariety segre_variety(const GraphManifold& G, const PointC& q) {
    auto S = segre_variety(as_implicit(G), q);
    for (auto& g : S.ideal.gens) g = -g;
    return S;
}

/// p ∈ S_q̄.
inline bool segre_contains(const ImplicitManifold& M, const PointC& p, const PointC& q) {
    PointC pt = p;
    for (const auto& x : q) pt.push_back(x.conj());
    for (const auto& g : M.gens)
        if (!g.evaluate(pt).is_zero()) return false;
    return true;
}

inline bool segre_contains(const GraphManifold& G, const PointC& p, const PointC& q) {
    return segre_contains(as_implicit(G), p, q);
}

/// A point q of S_p̄. Graph form uses the conjugate system t_z = Q̄(t_w, p̄); implicit form solves
/// P(q, p̄) = 0 for an affine subset of the z-coordinates.
inline std::optional<PointC> sample_segre_point(const GraphManifold& G, const PointC& p, Rng& rng, long bound = 3) {
    int n = G.n();
    PointC pt(2 * n, GaussRat(0));
    for (int k = 0; k < G.m; ++k) pt[G.w(k)] = random_gauss_int(rng, bound);
    for (int k = 0; k < n; ++k) pt[n + k] = p[k].conj();
    auto qb = G.conj_Q();
    PointC q(n);
    for (int k = 0; k < G.m; ++k) q[k] = pt[G.w(k)];
    for (int l = 0; l < G.d; ++l) q[G.m + l] = qb[l].evaluate(pt);
    return q;
}

inline std::optional<PointC> sample_segre_point(const ImplicitManifold& M, const PointC& p, Rng& rng, long bound = 6) {
    auto S = segre_variety(M, p);
    std::vector<std::size_t> cand;
    for (int k = M.n - 1; k >= 0; --k) cand.push_back(static_cast<std::size_t>(k));
    auto unknowns = detail::choose_affine_unknowns(S.ideal.gens, cand, 2 * M.n);
    for (int attempt = 0; attempt < 40; ++attempt) {
        auto sol = detail::linear_sample(S.ideal.gens, unknowns, random_gauss_point(rng, 2 * M.n, bound));
        if (sol) return PointC(sol->begin(), sol->begin() + M.n);
    }
    return std::nullopt;
}

/// The complexified Segre variety through τ_p: w ↦ (w, Q̄(w, τ_p)), with its tangent m-frame.
struct ComplexSegre {
    std::vector<Poly> param;               // n coordinates as polynomials in the w-variables
    std::vector<std::vector<Poly>> frame;  // frame[k] = ∂ param / ∂w_k
};

inline ComplexSegre complexified_segre(const GraphManifold& G, const PointC& tau) {
    int n = G.n();
    std::vector<std::optional<GaussRat>> vals(2 * n);
    for (int k = 0; k < n; ++k) vals[n + k] = tau[k];
    ComplexSegre S;
    for (int k = 0; k < G.m; ++k) S.param.push_back(Poly::var(G.ctx, G.w(k)));
    for (const auto& qb : G.conj_Q()) S.param.push_back(qb.partial_evaluate(vals));
    for (int k = 0; k < G.m; ++k) {
        std::vector<Poly> col;
        for (const auto& c : S.param) col.push_back(c.derivative(G.w(k)));
        S.frame.push_back(col);
    }
    return S;
}

// ---------------------------------------------------------------- reflections

/// r_{M′}(E′): unknowns are the conjugate coordinates ζ′ = w̄′; generators ρ′_j(e′, ζ′).
struct ReflectionSet {
    Ideal ideal;
    std::vector<PointC> sources;
    /// estimated dimension; nullopt when no sample solution was found
    std::optional<int> dim;
    /// a solution, in ζ′ coordinates (conjugates of the points w′)
    std::vector<PointC> samples;
};

namespace detail {

inline std::vector<Poly> reflection_gens(const ImplicitManifold& M, const std::vector<PointC>& sources) {
    std::vector<Poly> out;
    for (const auto& e : sources) {
        std::vector<std::optional<GaussRat>> vals(2 * M.n);
        for (int k = 0; k < M.n; ++k) vals[k] = e[k];
        for (const auto& g : M.gens) {
            Poly r = g.partial_evaluate(vals);
            if (!r.is_zero() && std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
        }
    }
    return out;
}

inline int local_dim(const std::vector<Poly>& gens, int n, const PointC& zeta) {
    PointC pt(n, GaussRat(0));
    pt.insert(pt.end(), zeta.begin(), zeta.end());
    auto J = jacobian(gens, range_vars(n, 2 * n));
    return n - static_cast<int>(rank(evaluate_matrix(J, pt)));
}

inline bool solves(const std::vector<Poly>& gens, int n, const PointC& zeta) {
    PointC pt(n, GaussRat(0));
    pt.insert(pt.end(), zeta.begin(), zeta.end());
    for (const auto& g : gens)
        if (!g.evaluate(pt).is_zero()) return false;
    return true;
}

/// Solutions in ζ: anchors that solve, then affine solves with the remaining ζ-coordinates random.
inline std::vector<PointC> reflection_solutions(const std::vector<Poly>& gens, int n, const std::vector<PointC>& anchors, Rng& rng,
                                                int wanted) {
    std::vector<PointC> out;
    for (const auto& a : anchors)
        if (solves(gens, n, a)) out.push_back(a);
    std::vector<std::size_t> cand;
    for (int k = 2 * n - 1; k >= n; --k) cand.push_back(static_cast<std::size_t>(k));
    auto unknowns = choose_affine_unknowns(gens, cand, 2 * n);
    for (int attempt = 0; attempt < 4 * wanted && static_cast<int>(out.size()) < wanted; ++attempt) {
        PointC asg(2 * n, GaussRat(0));
        for (int k = n; k < 2 * n; ++k) asg[k] = random_gauss_int(rng, 4);
        auto sol = linear_sample(gens, unknowns, asg);
        if (!sol) continue;
        PointC zeta(sol->begin() + n, sol->end());
        if (std::find(out.begin(), out.end(), zeta) == out.end()) out.push_back(zeta);
    }
    return out;
}

}  // namespace detail

/// First reflection; `anchors` are known solutions in ζ′ coordinates (for instance conj f(z)).
inline ReflectionSet first_reflection(const ImplicitManifold& Mp, const std::vector<PointC>& sources, std::uint64_t seed,
                                      const std::vector<PointC>& anchors = {}) {
    if (sources.empty()) throw std::invalid_argument("first_reflection: empty source set");
    ReflectionSet R;
    R.sources = sources;
    R.ideal = Ideal{Mp.ctx, detail::reflection_gens(Mp, sources)};
    Rng rng(seed);
    R.samples = detail::reflection_solutions(R.ideal.gens, Mp.n, anchors, rng, 4);
    for (const auto& s : R.samples) {
        int dl = detail::local_dim(R.ideal.gens, Mp.n, s);
        R.dim = R.dim ? std::min(*R.dim, dl) : dl;
    }
    return R;
}

inline ReflectionSet first_reflection(const GraphManifold& Gp, const std::vector<PointC>& sources, std::uint64_t seed,
                                      const std::vector<PointC>& anchors = {}) {
    return first_reflection(as_implicit(Gp), sources, seed, anchors);
}

/// Polynomial map (one polynomial per target coordinate in the source z-variables).
using PolyMap = std::vector<Poly>;

inline PointC apply_map(const PolyMap& f, const PointC& z) {
    PointC pt = z;
    pt.resize(f.empty() ? z.size() : f.front().nvars(), GaussRat(0));
    PointC out;
    for (const auto& c : f) out.push_back(c.evaluate(pt));
    return out;
}

struct DoubleReflectionReport {
    std::optional<int> dim;
    std::optional<int> dim_next;
    bool stabilized = false;
    int k = 0;
    bool sampled = true;
    std::optional<int> first_dim;
    std::optional<int> second_dim;
};

/// dim X′ estimate, X′ = r_{M′}(f(S_z̄)) ∩ r²_{M′}(f(S_w̄)), with k and k+1 sampled Segre points.
inline DoubleReflectionReport double_reflection_sample(const PolyMap& f, const GraphManifold& M, const GraphManifold& Mp,
                                                       const PointC& z, const PointC& w, int k, std::uint64_t seed) {
    if (!segre_contains(M, z, w)) throw std::invalid_argument("double reflection: z must lie on S_w̄");
    auto Ip = as_implicit(Mp);
    int np = Mp.n();
    auto conj_pt = [](const PointC& p) {
        PointC r;
        for (const auto& x : p) r.push_back(x.conj());
        return r;
    };
    auto run = [&](int kk, DoubleReflectionReport* detail_out) -> std::optional<int> {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kk)));
        std::vector<PointC> ez, ew;
        ez.push_back(apply_map(f, z));
        ew.push_back(apply_map(f, w));
        for (int s = 0; s < kk; ++s) {
            ez.push_back(apply_map(f, *sample_segre_point(M, z, rng)));
            ew.push_back(apply_map(f, *sample_segre_point(M, w, rng)));
        }
        // r(f(S_z̄)): f(z) is an anchor since f(S_z̄) ⊂ S′ of conj f(z)
        auto R1 = first_reflection(Ip, ez, rng(), {conj_pt(apply_map(f, z))});
        auto S1 = first_reflection(Ip, ew, rng(), {conj_pt(apply_map(f, w))});
        // second reflection: sources are points w′ of the first reflection (conjugate of the ζ′ samples)
        std::vector<PointC> src;
        auto more = detail::reflection_solutions(S1.ideal.gens, np, S1.samples, rng, kk + 1);
        for (const auto& s : more) src.push_back(conj_pt(s));
        if (src.empty()) return std::nullopt;
        auto R2 = first_reflection(Ip, src, rng());
        std::vector<Poly> gens = R1.ideal.gens;
        for (const auto& g : R2.ideal.gens)
            if (std::find(gens.begin(), gens.end(), g) == gens.end()) gens.push_back(g);
        PointC anchor = conj_pt(apply_map(f, z));
        if (detail_out) {
            detail_out->first_dim = R1.dim;
            detail_out->second_dim = R2.dim;
        }
        if (!detail::solves(gens, np, anchor)) return std::nullopt;
        return detail::local_dim(gens, np, anchor);
    };
    DoubleReflectionReport r;
    r.k = k;
    r.dim = run(k, &r);
    r.dim_next = run(k + 1, nullptr);
    r.stabilized = r.dim && r.dim_next && *r.dim == *r.dim_next;
    return r;
}

// ---------------------------------------------------------------- transversality

enum class Transversality { TransversalAt, TransversalIn, NotTransversal };

inline const char* to_string(Transversality t) {
    switch (t) {
        case Transversality::TransversalAt: return "transversal_at";
        case Transversality::TransversalIn: return "transversal_in";
        default: return "not_transversal";
    }
}

struct TransversalityReport {
    Transversality verdict = Transversality::NotTransversal;
    bool certified = false;
    int trials = 0;
    int stacked_rows = 0;
    int rank_in = 0;
    int rank_at = 0;
    /// evaluation point (t then the ζ_j), rows of a nonvanishing n×n minor
    std::vector<GaussRat> witness_point;
    std::vector<std::size_t> witness_rows;
};

/// Stacked tangent frames of d+1 Segre varieties through t, over t and symbolic ζ_1..ζ_{d+1}.
/// Row (j,l) is e_l + ∂_{w_l} Q̄(w, ζ_j, Q(ζ_j, t)); the context appends m free variables per ζ_j.
inline Matrix<Poly> transversality_matrix(const GraphManifold& G, Ctx* ext_out = nullptr) {
    int n = G.n(), m = G.m, d = G.d, k = d + 1;
    std::vector<Variable> vars = G.ctx->vars();
    for (int j = 0; j < k; ++j)
        for (int a = 0; a < m; ++a) vars.push_back({"s" + std::to_string(j + 1) + "_" + std::to_string(a + 1), VarKind::Free, -1});
    Ctx ext = VarContext::make(vars);
    std::vector<int> idmap(2 * n);
    for (int v = 0; v < 2 * n; ++v) idmap[v] = v;
    auto qb = G.conj_Q();
    Matrix<Poly> A(0, n);
    for (int j = 0; j < k; ++j) {
        // ζ_w ↦ s_j, ξ ↦ Q(s_j, t)
        std::vector<std::optional<Poly>> img(ext->size());
        for (int a = 0; a < m; ++a) img[G.zeta_w(a)] = Poly::var(ext, static_cast<std::size_t>(2 * n + j * m + a));
        std::vector<std::optional<Poly>> img_q = img;
        for (int l = 0; l < d; ++l) img[G.xi(l)] = G.Q[l].embed(ext, idmap).compose(img_q, ext);
        for (int l = 0; l < m; ++l) {
            std::vector<Poly> row;
            for (int a = 0; a < m; ++a) row.push_back(Poly::constant(ext, GaussRat(a == l ? 1 : 0)));
            for (int c = 0; c < d; ++c) row.push_back(qb[c].derivative(G.w(l)).embed(ext, idmap).compose(img, ext));
            A.append_row(row);
        }
    }
    if (ext_out) *ext_out = ext;
    return A;
}

inline TransversalityReport segre_transversal(const GraphManifold& G, const PointC& p, std::uint64_t seed, int trials = 8) {
    if (G.series_order) throw std::invalid_argument("segre_transversal needs a polynomial graph, not a truncated series");
    int n = G.n();
    Ctx ext;
    Matrix<Poly> A = transversality_matrix(G, &ext);
    TransversalityReport r;
    r.stacked_rows = static_cast<int>(A.rows());
    Rng rng(seed);
    long bound = 8;
    std::size_t nv = ext->size();
    for (int t = 0; t < trials && r.rank_in < n; ++t, bound *= 2) {
        ++r.trials;
        PointC pt = random_gauss_point(rng, nv, bound);
        auto v = evaluate_matrix(A, pt);
        int rk = static_cast<int>(rank(v));
        if (rk > r.rank_in) r.rank_in = rk;
    }
    if (r.rank_in == n) {
        r.verdict = Transversality::TransversalIn;
        // at p: t := p, ζ_j random
        for (int t = 0; t < trials; ++t) {
            PointC pt = random_gauss_point(rng, nv, 8 << t);
            for (int k = 0; k < n; ++k) pt[k] = p[k];
            auto v = evaluate_matrix(A, pt);
            int rk = static_cast<int>(rank(v));
            r.rank_at = std::max(r.rank_at, rk);
            if (rk == n) {
                r.verdict = Transversality::TransversalAt;
                r.witness_point = pt;
                auto ef = rref([&] {
                    Matrix<GaussRat> tr(v.cols(), v.rows());
                    for (std::size_t i = 0; i < v.rows(); ++i)
                        for (std::size_t j = 0; j < v.cols(); ++j) tr(j, i) = v(i, j);
                    return tr;
                }());
                r.witness_rows = ef.pivots;
                break;
            }
        }
        r.certified = true;  // a nonzero evaluated minor is a proof
        return r;
    }
    r.verdict = Transversality::NotTransversal;
    if (n <= 4) {
        std::size_t exact = exact_rank(A);
        r.certified = static_cast<int>(exact) < n;
        r.rank_in = static_cast<int>(exact);
        if (static_cast<int>(exact) == n) r.verdict = Transversality::TransversalIn;
    }
    return r;
}

}  // namespace crkit

namespace crkit {

/// Implicit form: T_q S_τ = ker ∂_z P(q, τ) with τ on the fiber P(q, τ) = 0. Negatives are probabilistic.
inline TransversalityReport segre_transversal(const ImplicitManifold& M, const PointC& p, std::uint64_t seed, int trials = 8) {
    int n = M.n;
    auto Jz = jacobian(M.gens, range_vars(0, n));
    std::vector<std::size_t> cand;
    for (int k = 2 * n - 1; k >= n; --k) cand.push_back(static_cast<std::size_t>(k));
    Rng rng(seed);
    auto span_at = [&](const PointC& q, int* tries) -> int {
        std::vector<std::optional<GaussRat>> vals(2 * n);
        for (int k = 0; k < n; ++k) vals[k] = q[k];
        std::vector<Poly> fiber;
        for (const auto& g : M.gens) fiber.push_back(g.partial_evaluate(vals));
        auto unknowns = detail::choose_affine_unknowns(fiber, cand, 2 * n);
        Matrix<GaussRat> stacked(0, n);
        int found = 0;
        for (int a = 0; a < 12 * (M.gens.size() + 1) && found < static_cast<int>(M.gens.size()) + 1; ++a) {
            PointC asg = q;
            for (int k = 0; k < n; ++k) asg.push_back(random_gauss_int(rng, 6));
            auto tau = detail::linear_sample(fiber, unknowns, asg);
            ++*tries;
            if (!tau) continue;
            auto B = evaluate_matrix(Jz, *tau);
            for (const auto& v : nullspace(B)) stacked.append_row(v);
            ++found;
        }
        return stacked.rows() == 0 ? 0 : static_cast<int>(rank(stacked));
    };
    TransversalityReport r;
    r.stacked_rows = static_cast<int>((n - M.gens.size()) * (M.gens.size() + 1));
    for (int t = 0; t < trials && r.rank_in < n; ++t) {
        PointC q = random_gauss_point(rng, static_cast<std::size_t>(n), 8);
        r.rank_in = std::max(r.rank_in, span_at(q, &r.trials));
    }
    if (r.rank_in < n) return r;
    r.verdict = Transversality::TransversalIn;
    r.certified = true;
    for (int t = 0; t < trials; ++t) {
        r.rank_at = std::max(r.rank_at, span_at(p, &r.trials));
        if (r.rank_at == n) {
            r.verdict = Transversality::TransversalAt;
            r.witness_point = p;
            break;
        }
    }
    return r;
}

}  // namespace crkit
