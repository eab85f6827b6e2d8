#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crkit/manifold.hpp"
#include "crkit/vector_field.hpp"

namespace crkit {

/// Exact tangency test: X is tangent when X(g) reduces to zero modulo a Groebner basis of the manifold's ideal.
class TangencyTester {
public:
    TangencyTester() = default;
    TangencyTester(Ideal gens, int degree_cap, std::optional<int> series_order = std::nullopt)
        : gens_(gens.gens), series_order_(series_order) {
        int cap = degree_cap;
        for (const auto& g : gens.gens) cap = std::max(cap, static_cast<int>(g.total_degree()));
        basis_ = groebner(gens, cap);
    }

    Membership test(const VectorField& X) const {
        bool unknown = false;
        for (const auto& g : gens_) {
            Poly r = normal_form(X.apply(g), basis_);
            if (series_order_) r = r.truncate(*series_order_ - 1);
            if (r.is_zero()) continue;
            if (!basis_.complete) unknown = true;
            else return Membership::No;
        }
        return unknown ? Membership::Unknown : Membership::Yes;
    }

    const Ideal& basis() const { return basis_; }

private:
    std::vector<Poly> gens_;
    Ideal basis_;
    std::optional<int> series_order_;
};

inline TangencyTester tangency_tester(const GraphManifold& G) {
    std::vector<bool> block(G.ctx->size(), false);
    for (int l = 0; l < G.d; ++l) block[G.xi(l)] = true;
    return TangencyTester(Ideal{G.ctx, G.complex_gens(), MonomialOrder::elimination(block)}, 0, G.series_order);
}

inline TangencyTester tangency_tester(const ImplicitManifold& M, int degree_cap = 8) {
    return TangencyTester(Ideal{M.ctx, M.gens}, degree_cap);
}

struct CRFields {
    std::vector<VectorField> anti;  // basis of T^{0,1}
    std::vector<VectorField> hol;   // conjugates, basis of T^{1,0}
    int m = 0;
};

namespace detail {

inline void require_independent(const std::vector<VectorField>& fs, int m, std::uint64_t seed) {
    if (fs.empty()) {
        if (m != 0) throw std::invalid_argument("not CR-generic");
        return;
    }
    Matrix<Poly> C(fs.size(), fs.front().ctx()->size());
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t k = 0; k < C.cols(); ++k) C(i, k) = fs[i].coeff(k);
    if (static_cast<int>(generic_rank(C, seed, 6).rank) != m) throw std::invalid_argument("not CR-generic");
}

inline std::vector<std::vector<std::size_t>> subsets(std::size_t total, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = from; i < total; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

}  // namespace detail

/// The graph fields 𝓛̲_k = ∂/∂ζ_{w_k} + Σ_l ∂Q_l/∂ζ_{w_k} ∂/∂ξ_l and their conjugates
/// 𝓛_k = ∂/∂w_k + Σ_l ∂Q̄_l/∂w_k ∂/∂z_l.
inline CRFields cr_vector_fields(const GraphManifold& G) {
    CRFields out;
    out.m = G.m;
    for (int k = 0; k < G.m; ++k) {
        std::vector<Poly> c(G.ctx->size(), Poly(G.ctx));
        c[G.zeta_w(k)] = Poly::constant(G.ctx, GaussRat(1));
        for (int l = 0; l < G.d; ++l) c[G.xi(l)] = G.Q[l].derivative(G.zeta_w(k));
        out.anti.emplace_back(G.ctx, c, FieldKind::Antiholomorphic);
        out.hol.push_back(conjugate(out.anti.back()));
    }
    return out;
}

/// Kernel fields of (∂P_i/∂ζ_k) built from cofactors of a d×d minor that does not vanish at the base point.
/// Among such minors the one with the largest |det| there is taken (lexicographically first on ties).
inline CRFields cr_vector_fields(const ImplicitManifold& M, const PointC& p, std::uint64_t seed) {
    int n = M.n;
    int d = codimension(M, seed).d;
    PointC pc = p.size() == static_cast<std::size_t>(2 * n) ? p : complexified_point(p);
    Matrix<Poly> J = jacobian(M.gens, range_vars(n, 2 * n));
    Matrix<GaussRat> B = evaluate_matrix(J, pc);
    if (static_cast<int>(rank(B)) != d) throw std::invalid_argument("not CR-generic");

    std::vector<std::size_t> best_rows, best_cols;
    Rational best(-1);
    for (const auto& rs : detail::subsets(J.rows(), d))
        for (const auto& cs : detail::subsets(n, d)) {
            Rational v = determinant(B.submatrix(rs, cs)).norm2();
            if (v > best) {
                best = v;
                best_rows = rs;
                best_cols = cs;
            }
        }

    Matrix<Poly> Jr = J.submatrix(best_rows, best_cols);
    Poly det = poly_determinant(Jr);
    CRFields out;
    out.m = n - d;
    for (int j = 0; j < n; ++j) {
        if (std::find(best_cols.begin(), best_cols.end(), static_cast<std::size_t>(j)) != best_cols.end()) continue;
        std::vector<Poly> c(M.ctx->size(), Poly(M.ctx));
        c[n + j] = det;
        for (int i = 0; i < d; ++i) {
            Matrix<Poly> Ji = Jr;
            for (int r = 0; r < d; ++r) Ji(r, i) = J(best_rows[r], j);
            c[n + best_cols[i]] = -poly_determinant(Ji);
        }
        out.anti.emplace_back(M.ctx, c, FieldKind::Antiholomorphic);
        out.hol.push_back(conjugate(out.anti.back()));
    }
    detail::require_independent(out.anti, out.m, seed);
    return out;
}

enum class MinimalityVerdict { Minimal, NotMinimal, Unknown };

inline const char* to_string(MinimalityVerdict v) {
    switch (v) {
        case MinimalityVerdict::Minimal: return "minimal";
        case MinimalityVerdict::NotMinimal: return "not_minimal";
        default: return "unknown";
    }
}

struct LieReport {
    int depth_reached = 0;
    int span_rank_at_p = 0;
    int target_rank = 0;
    MinimalityVerdict verdict = MinimalityVerdict::Unknown;
    /// words whose values at p raised the rank, in length-lex order
    std::vector<std::string> bracket_words;
    std::vector<VectorField> bracket_fields;
    /// every word in bracket_words passed the tangency test
    bool tangency_verified = false;
    /// all brackets of the last level vanished, so the generated algebra is finite and fully explored
    bool closed = false;
};

/// Brackets the generators (right-normed words) until the evaluated span at pc reaches target_rank,
/// stays unchanged for two consecutive depths, or depth_cap is hit.
inline LieReport lie_saturation(const std::vector<VectorField>& gens, const std::vector<std::string>& names, const PointC& pc,
                                int target_rank, int depth_cap, const TangencyTester* tester = nullptr) {
    LieReport rep;
    rep.target_rank = target_rank;
    Matrix<GaussRat> span;
    std::size_t rk = 0;
    struct Word {
        std::string name;
        VectorField field;
    };
    std::vector<Word> level;
    auto consider = [&](const std::string& name, const VectorField& f) {
        auto v = f.evaluate(pc);
        Matrix<GaussRat> trial = span;
        trial.append_row(v);
        std::size_t r = rank(trial);
        if (r > rk) {
            span = trial;
            rk = r;
            rep.bracket_words.push_back(name);
            rep.bracket_fields.push_back(f);
            return true;
        }
        return false;
    };
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (gens[i].is_zero()) continue;
        level.push_back({names[i], gens[i]});
        consider(names[i], gens[i]);
    }
    rep.depth_reached = 1;
    int idle = 0;
    while (static_cast<int>(rk) < target_rank) {
        if (level.empty() || idle >= 2) break;
        if (rep.depth_reached >= depth_cap) break;
        std::vector<Word> next;
        bool grew = false;
        for (std::size_t i = 0; i < gens.size(); ++i) {
            if (gens[i].is_zero()) continue;
            for (const auto& w : level) {
                VectorField b = lie_bracket(gens[i], w.field);
                if (b.is_zero()) continue;
                bool dup = false;
                VectorField neg = b * GaussRat(-1);
                for (const auto& o : next)
                    if (o.field == b || o.field == neg) {
                        dup = true;
                        break;
                    }
                if (dup) continue;
                std::string name = "[" + names[i] + "," + w.name + "]";
                if (static_cast<int>(rk) < target_rank && consider(name, b)) grew = true;
                next.push_back({name, b});
            }
        }
        ++rep.depth_reached;
        level = std::move(next);
        idle = grew ? 0 : idle + 1;
    }
    rep.span_rank_at_p = static_cast<int>(rk);
    rep.closed = level.empty();
    if (static_cast<int>(rk) >= target_rank) rep.verdict = MinimalityVerdict::Minimal;
    else if (level.empty() || idle >= 2) rep.verdict = MinimalityVerdict::NotMinimal;
    else rep.verdict = MinimalityVerdict::Unknown;
    if (tester) {
        rep.tangency_verified = true;
        for (const auto& f : rep.bracket_fields)
            if (tester->test(f) != Membership::Yes) rep.tangency_verified = false;
    }
    return rep;
}

namespace detail {

inline std::vector<std::string> field_names(int m) {
    std::vector<std::string> names;
    for (int k = 1; k <= m; ++k) names.push_back("L" + std::to_string(k));
    for (int k = 1; k <= m; ++k) names.push_back("Lb" + std::to_string(k));
    return names;
}

inline std::vector<VectorField> all_fields(const CRFields& f) {
    std::vector<VectorField> g = f.hol;
    g.insert(g.end(), f.anti.begin(), f.anti.end());
    return g;
}

}  // namespace detail

inline LieReport lie_saturation(const GraphManifold& G, const PointC& p, int depth_cap = -1) {
    PointC pc = complexified_point(p);
    for (int l = 0; l < G.d; ++l) {
        Poly r = Poly::var(G.ctx, G.xi(l)) - G.Q[l];
        if (!G.series_order && !r.evaluate(pc).is_zero()) throw std::invalid_argument("point does not lie on " + G.name);
    }
    auto fields = cr_vector_fields(G);
    auto tester = tangency_tester(G);
    int n = G.n();
    return lie_saturation(detail::all_fields(fields), detail::field_names(G.m), pc, 2 * n - G.d, depth_cap < 0 ? 2 * n : depth_cap,
                          &tester);
}

inline LieReport lie_saturation(const ImplicitManifold& M, const PointC& p, std::uint64_t seed, int depth_cap = -1) {
    require_on(M, p);
    auto fields = cr_vector_fields(M, p, seed);
    int d = M.n - fields.m;
    auto tester = tangency_tester(M);
    return lie_saturation(detail::all_fields(fields), detail::field_names(fields.m), complexified_point(p), 2 * M.n - d,
                          depth_cap < 0 ? 2 * M.n : depth_cap, &tester);
}

struct HolFieldsReport {
    int degree_bound = 0;
    std::vector<VectorField> basis;
    int module_rank = 0;
    bool complete = true;
    std::size_t unknowns = 0;
};

namespace detail {

inline std::vector<Exponent> monomials_upto(std::size_t nvars, std::size_t width, int D) {
    std::vector<Exponent> out;
    Exponent e(width, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
        if (k == nvars) {
            out.push_back(e);
            return;
        }
        for (int a = 0; a <= left; ++a) {
            e[k] = static_cast<std::uint32_t>(a);
            rec(k + 1, left - a);
        }
        e[k] = 0;
    };
    rec(0, D);
    std::sort(out.begin(), out.end(), [](const Exponent& a, const Exponent& b) { return grlex_cmp(a, b) < 0; });
    return out;
}

inline HolFieldsReport hol_fields(const Ctx& ctx, int n, const std::vector<Poly>& gens, const Ideal& basis, int D,
                                  std::uint64_t seed) {
    HolFieldsReport rep;
    rep.degree_bound = D;
    rep.complete = basis.complete;
    auto monos = monomials_upto(static_cast<std::size_t>(n), ctx->size(), D);
    std::vector<std::pair<int, Exponent>> unknowns;
    std::vector<std::vector<Poly>> images;  // images[u][i] = NF(z^α ∂P_i/∂z_j)
    for (int j = 0; j < n; ++j)
        for (const auto& a : monos) {
            std::vector<Poly> row;
            Poly za = Poly::monomial(ctx, a, GaussRat(1));
            for (const auto& g : gens) row.push_back(normal_form(za * g.derivative(static_cast<std::size_t>(j)), basis));
            unknowns.emplace_back(j, a);
            images.push_back(std::move(row));
        }
    rep.unknowns = unknowns.size();
    std::map<std::pair<std::size_t, Exponent>, std::size_t> row_of;
    for (const auto& img : images)
        for (std::size_t i = 0; i < img.size(); ++i)
            for (const auto& [e, c] : img[i].terms()) row_of.try_emplace({i, e}, row_of.size());
    Matrix<GaussRat> A(row_of.size(), unknowns.size());
    for (std::size_t u = 0; u < images.size(); ++u)
        for (std::size_t i = 0; i < images[u].size(); ++i)
            for (const auto& [e, c] : images[u][i].terms()) A(row_of.at({i, e}), u) = c;
    for (const auto& v : nullspace(A)) {
        std::vector<Poly> c(ctx->size(), Poly(ctx));
        for (std::size_t u = 0; u < v.size(); ++u)
            if (!v[u].is_zero()) c[static_cast<std::size_t>(unknowns[u].first)] += Poly::monomial(ctx, unknowns[u].second, v[u]);
        rep.basis.emplace_back(ctx, c, FieldKind::Holomorphic);
    }
    if (!rep.basis.empty()) {
        Matrix<Poly> C(rep.basis.size(), static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < rep.basis.size(); ++i)
            for (int k = 0; k < n; ++k) C(i, static_cast<std::size_t>(k)) = rep.basis[i].coeff(static_cast<std::size_t>(k));
        rep.module_rank = static_cast<int>(generic_rank(C, seed, 6).rank);
    }
    return rep;
}

}  // namespace detail

/// Holomorphic polynomial fields Σ a_j(z) ∂/∂z_j, deg a_j ≤ D, tangent to the complexification.
inline HolFieldsReport tangent_hol_fields(const GraphManifold& G, int D, std::uint64_t seed = kDefaultSeed) {
    if (D < 0) throw std::invalid_argument("degree bound must be >= 0");
    auto tester = tangency_tester(G);
    return detail::hol_fields(G.ctx, G.n(), G.complex_gens(), tester.basis(), D, seed);
}

inline HolFieldsReport tangent_hol_fields(const ImplicitManifold& M, int D, std::uint64_t seed = kDefaultSeed) {
    if (D < 0) throw std::invalid_argument("degree bound must be >= 0");
    auto tester = tangency_tester(M);
    return detail::hol_fields(M.ctx, M.n, M.gens, tester.basis(), D, seed);
}

struct KappaReport {
    int kappa = 0;
    int chi = 0;
    /// rows of the 𝓠-Jacobian: the coefficient functions Q_{l,β}(t)
    std::vector<Poly> coefficient_functions;
    Poly witness_minor;
    std::vector<Poly> exceptional_gens;
    bool exceptional_truncated = false;
    /// series input: χ agreed at orders N−1 and N
    bool stabilized = true;
    std::size_t generic_rank_trials = 0;
};

namespace detail {

/// Q_{l,β}(t): the coefficient of ζ_w^β in Q_l.
inline std::vector<Poly> coefficient_functions(const GraphManifold& G, const std::vector<Poly>& Q) {
    std::map<std::pair<int, Exponent>, Poly> parts;
    for (int l = 0; l < G.d; ++l)
        for (const auto& [e, c] : Q[l].terms()) {
            Exponent beta(static_cast<std::size_t>(G.m), 0), rest = e;
            for (int k = 0; k < G.m; ++k) {
                beta[k] = e[G.zeta_w(k)];
                rest[G.zeta_w(k)] = 0;
            }
            auto [it, fresh] = parts.try_emplace({l, beta}, Poly(G.ctx));
            it->second.add_term(rest, c);
        }
    std::vector<Poly> out;
    for (auto& [key, p] : parts)
        if (!p.is_zero()) out.push_back(p);
    return out;
}

inline Matrix<Poly> t_jacobian(const std::vector<Poly>& fs, int n, const Ctx& ctx) {
    Matrix<Poly> J(fs.size(), static_cast<std::size_t>(n), Poly(ctx));
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (int j = 0; j < n; ++j) J(i, static_cast<std::size_t>(j)) = fs[i].derivative(static_cast<std::size_t>(j));
    return J;
}

}  // namespace detail

/// κ = n − χ with χ the rank of the Jacobian of {Q_{l,β}} with respect to t.
inline KappaReport kappa(const GraphManifold& G, std::uint64_t seed, std::size_t max_exceptional = 64) {
    KappaReport rep;
    int n = G.n();
    rep.coefficient_functions = detail::coefficient_functions(G, G.Q);
    Matrix<Poly> J = detail::t_jacobian(rep.coefficient_functions, n, G.ctx);
    std::vector<std::size_t> prs, pcs;
    std::size_t chi = J.rows() ? exact_rank(J, &prs, &pcs) : 0;
    if (J.rows()) {
        auto gr = generic_rank(J, seed, 4);
        rep.generic_rank_trials = gr.trials;
        if (gr.rank != chi) throw std::logic_error("kappa: exact and randomized ranks disagree");
    }
    rep.chi = static_cast<int>(chi);
    rep.kappa = n - rep.chi;
    rep.witness_minor = chi ? poly_determinant(J.submatrix(prs, pcs)) : Poly::constant(G.ctx, GaussRat(1));
    if (chi) {
        for (const auto& rs : detail::subsets(J.rows(), chi)) {
            for (const auto& cs : detail::subsets(static_cast<std::size_t>(n), chi)) {
                Poly m = poly_determinant(J.submatrix(rs, cs));
                if (m.is_zero() || std::find(rep.exceptional_gens.begin(), rep.exceptional_gens.end(), m) != rep.exceptional_gens.end())
                    continue;
                if (rep.exceptional_gens.size() >= max_exceptional) {
                    rep.exceptional_truncated = true;
                    break;
                }
                rep.exceptional_gens.push_back(m);
            }
            if (rep.exceptional_truncated) break;
        }
    }
    if (G.series_order && *G.series_order >= 1) {
        std::vector<Poly> lower;
        for (const auto& q : G.Q) lower.push_back(q.truncate(*G.series_order - 1));
        auto fs = detail::coefficient_functions(G, lower);
        std::size_t chi_lower = fs.empty() ? 0 : exact_rank(detail::t_jacobian(fs, n, G.ctx));
        rep.stabilized = chi_lower == chi;
    }
    return rep;
}

struct StraightenResult {
    GraphManifold reduced;
    /// number of w-directions removed
    int steps = 0;
    int kappa_before = 0;
    int kappa_after = 0;
    /// the w-changes applied, one per step (w = A w′)
    std::vector<Matrix<GaussRat>> changes;
};

namespace detail {

/// Constant v (supported on w) with Σ v_j ∂_j Q_{l,β} ≡ 0 for every coefficient function.
inline std::optional<std::vector<GaussRat>> constant_kernel_vector(const GraphManifold& G) {
    auto fs = coefficient_functions(G, G.Q);
    std::vector<std::vector<GaussRat>> rows;
    for (const auto& f : fs) {
        std::map<Exponent, std::vector<GaussRat>> local;
        for (int k = 0; k < G.m; ++k) {
            Poly df = f.derivative(G.w(k));
            for (const auto& [e, c] : df.terms()) {
                auto [it, fresh] = local.try_emplace(e, std::vector<GaussRat>(static_cast<std::size_t>(G.m), GaussRat(0)));
                it->second[static_cast<std::size_t>(k)] += c;
            }
        }
        for (auto& [e, r] : local) rows.push_back(r);
    }
    if (G.m == 0) return std::nullopt;
    if (rows.empty()) {
        std::vector<GaussRat> e1(static_cast<std::size_t>(G.m), GaussRat(0));
        e1[0] = GaussRat(1);
        return e1;
    }
    Matrix<GaussRat> M(rows.size(), static_cast<std::size_t>(G.m));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int k = 0; k < G.m; ++k) M(i, static_cast<std::size_t>(k)) = rows[i][static_cast<std::size_t>(k)];
    auto ker = nullspace(M);
    if (ker.empty()) return std::nullopt;
    return ker.front();
}

inline std::optional<std::pair<GraphManifold, Matrix<GaussRat>>> straighten_step(const GraphManifold& G) {
    auto v = constant_kernel_vector(G);
    if (!v) return std::nullopt;
    int m = G.m;
    Matrix<GaussRat> A(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) A(static_cast<std::size_t>(i), 0) = (*v)[static_cast<std::size_t>(i)];
    std::size_t col = 1;
    for (int u = 0; u < m && col < static_cast<std::size_t>(m); ++u) {
        Matrix<GaussRat> trial = A;
        trial(static_cast<std::size_t>(u), col) = GaussRat(1);
        Matrix<GaussRat> cols(static_cast<std::size_t>(m), col + 1);
        for (int i = 0; i < m; ++i)
            for (std::size_t j = 0; j <= col; ++j) cols(static_cast<std::size_t>(i), j) = trial(static_cast<std::size_t>(i), j);
        if (rank(cols) == col + 1) {
            A = trial;
            ++col;
        }
    }
    Matrix<GaussRat> C(static_cast<std::size_t>(G.d), static_cast<std::size_t>(G.d));
    for (int i = 0; i < G.d; ++i) C(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = GaussRat(1);
    GraphManifold H = linear_change(G, A, C);
    for (const auto& q : H.Q)
        if (q.uses_var(H.w(0)) || q.uses_var(H.zeta_w(0))) return std::nullopt;
    int n = G.n();
    auto ctx = VarContext::paired(n - 1);
    std::vector<int> index_map(static_cast<std::size_t>(2 * n), -1);
    for (int k = 1; k < n; ++k) index_map[static_cast<std::size_t>(k)] = k - 1;
    for (int k = n + 1; k < 2 * n; ++k) index_map[static_cast<std::size_t>(k)] = k - 2;
    std::vector<Poly> nq;
    for (const auto& q : H.Q) nq.push_back(q.embed(ctx, index_map));
    GraphManifold R(G.name, m - 1, G.d, nq);
    R.series_order = G.series_order;
    R.base_point = PointC(H.base_point.begin() + 1, H.base_point.end());
    return std::make_pair(R, A);
}

}  // namespace detail

/// Splits off w-directions along constant kernel vectors of the 𝓠-Jacobian, as long as one exists.
/// nullopt when not even one direction can be removed this way.
inline std::optional<StraightenResult> straighten_linear(const GraphManifold& G, std::uint64_t seed) {
    StraightenResult res;
    res.kappa_before = kappa(G, seed).kappa;
    if (res.kappa_before < 1) throw std::invalid_argument("straighten requires kappa >= 1");
    GraphManifold cur = G;
    while (cur.m > 0) {
        auto step = detail::straighten_step(cur);
        if (!step) break;
        cur = step->first;
        res.changes.push_back(step->second);
        ++res.steps;
    }
    if (res.steps == 0) return std::nullopt;
    res.reduced = cur;
    res.kappa_after = kappa(cur, seed).kappa;
    return res;
}

}  // namespace crkit
