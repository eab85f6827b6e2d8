#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crkit/cr_fields.hpp"
#include "crkit/series.hpp"

namespace crkit {

/// P(z, x) with P(z, f(z)) ≡ 0 modulo degree residual_order + 1.
struct DependenceCertificate {
    Poly P;  // over z1..z_{n_in}, x1..x_k
    int dz = 0, dx = 0;
    int residual_order = 0;
    std::vector<std::size_t> components;  // x_j stands for component components[j]
};

struct DependenceResult {
    std::optional<DependenceCertificate> certificate;
    /// truncation order of the final linear system
    int order_used = 0;
    std::size_t unknowns = 0;
    /// the requested order gave fewer equations than unknowns for some bound tried
    bool underdetermined_at_requested = false;
    /// nullity did not settle before the order cap; only possible for fixed (raw) series
    bool unstable = false;
};

namespace detail {

inline std::vector<Exponent> exponents_upto(std::size_t nvars, int D) {
    std::vector<Exponent> out;
    Exponent e(nvars, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
        if (k == nvars) {
            out.push_back(e);
            return;
        }
        for (int a = left; a >= 0; --a) {
            e[k] = static_cast<std::uint32_t>(a);
            rec(k + 1, left - a);
        }
        e[k] = 0;
    };
    rec(0, D);
    // by degree; within a degree, larger exponents on earlier variables first
    std::stable_sort(out.begin(), out.end(), [](const Exponent& a, const Exponent& b) { return total_degree(a) < total_degree(b); });
    return out;
}

inline long monomial_count(int nvars, int D) {
    // C(D + nvars, nvars)
    long r = 1;
    for (int k = 1; k <= nvars; ++k) r = r * (D + k) / k;
    return r;
}

struct Column {
    Exponent alpha, beta;
};

inline std::vector<Column> dependence_columns(int n_in, std::size_t k, int dz, int dx) {
    std::vector<Column> cols;
    for (const auto& a : exponents_upto(static_cast<std::size_t>(n_in), dz))
        for (const auto& b : exponents_upto(k, dx)) cols.push_back({a, b});
    std::stable_sort(cols.begin(), cols.end(), [](const Column& x, const Column& y) {
        auto ax = total_degree(x.alpha), ay = total_degree(y.alpha);
        if (ax != ay) return ax < ay;
        return total_degree(x.beta) < total_degree(y.beta);
    });
    return cols;
}

/// Matrix whose column c holds the coefficients of z^α f^β through degree M.
template <class F>
Matrix<F> dependence_matrix(const SeriesMap& f, const std::vector<std::size_t>& subset, const std::vector<Column>& cols, int M) {
    std::vector<TSeries<F>> fs;
    for (auto j : subset) fs.push_back(f.components[j]->eval<F>(f.n_in, M));
    std::map<Exponent, TSeries<F>> powers;
    auto product = [&](const Exponent& beta) -> const TSeries<F>& {
        auto it = powers.find(beta);
        if (it != powers.end()) return it->second;
        TSeries<F> s = TSeries<F>::constant(f.n_in, M, F(1));
        for (std::size_t j = 0; j < beta.size(); ++j)
            if (beta[j]) s = s * fs[j].pow(beta[j]);
        return powers.emplace(beta, std::move(s)).first->second;
    };
    std::map<Exponent, std::size_t> row_of;
    std::vector<std::vector<std::pair<std::size_t, F>>> entries(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& s = product(cols[c].beta);
        auto da = total_degree(cols[c].alpha);
        for (const auto& [e, v] : s.terms) {
            if (static_cast<int>(total_degree(e) + da) > M) continue;
            Exponent g = e;
            for (std::size_t k = 0; k < g.size(); ++k) g[k] += cols[c].alpha[k];
            auto [it, fresh] = row_of.try_emplace(g, row_of.size());
            entries[c].emplace_back(it->second, v);
        }
    }
    Matrix<F> A(row_of.size(), cols.size(), F(0));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (const auto& [r, v] : entries[c]) A(r, c) = v;
    return A;
}

inline Ctx certificate_context(int n_in, std::size_t k) {
    std::vector<Variable> v;
    for (int j = 1; j <= n_in; ++j) v.push_back({"z" + std::to_string(j), VarKind::Free, -1});
    for (std::size_t j = 1; j <= k; ++j) v.push_back({"x" + std::to_string(j), VarKind::Free, -1});
    return VarContext::make(v);
}

/// Exact residual of P(z, f(z)) through degree M.
inline Poly certificate_residual(const DependenceCertificate& cert, const SeriesMap& f, int M) {
    auto ctx = cert.P.ctx();
    std::vector<std::optional<Poly>> img(ctx->size());
    std::vector<int> index_map(static_cast<std::size_t>(f.n_in));
    for (int j = 0; j < f.n_in; ++j) index_map[static_cast<std::size_t>(j)] = j;
    for (std::size_t j = 0; j < cert.components.size(); ++j)
        img[static_cast<std::size_t>(f.n_in) + j] = f.exact(cert.components[j], M).embed(ctx, index_map);
    return cert.P.compose(img, ctx, M).truncate(M);
}

}  // namespace detail

/// Verifies a certificate by substitution through degree M.
inline bool verify_certificate(const DependenceCertificate& cert, const SeriesMap& f, int M) {
    return detail::certificate_residual(cert, f, M).is_zero();
}

/// Searches P ≠ 0 of bidegree ≤ (Dz, Dx) with P(z, f_S(z)) ≡ 0 mod degree N+1, smallest bidegree first.
/// When the components are given by expressions, the truncation order is raised until the system is
/// overdetermined and its nullity is the same at two successive orders, so spurious kernels at low order are discarded.
inline DependenceResult dependence_search(const SeriesMap& f, const std::vector<std::size_t>& subset, int Dz, int Dx, int N,
                                          bool escalate = true) {
    DependenceResult res;
    if (subset.empty()) return res;
    std::size_t k = subset.size();
    int cap = f.max_order();
    std::vector<std::pair<int, int>> bounds;
    for (int s = 1; s <= Dz + Dx; ++s)
        for (int dx = 1; dx <= std::min(s, Dx); ++dx)
            if (s - dx <= Dz) bounds.emplace_back(s - dx, dx);
    for (auto [dz, dx] : bounds) {
        auto cols = detail::dependence_columns(f.n_in, k, dz, dx);
        res.unknowns = cols.size();
        long need = static_cast<long>(cols.size()) + 10;
        if (detail::monomial_count(f.n_in, N) < static_cast<long>(cols.size())) res.underdetermined_at_requested = true;
        int M = N;
        if (escalate)
            while (detail::monomial_count(f.n_in, M) < need && M < cap) ++M;
        M = std::min(M, cap);
        long prev_nullity = -1;
        bool stable = false;
        for (int round = 0; round < 6; ++round) {
            auto A = detail::dependence_matrix<ModP>(f, subset, cols, M);
            long nullity = static_cast<long>(cols.size()) - static_cast<long>(rank(A));
            if (nullity == 0) {
                stable = true;
                prev_nullity = 0;
                break;
            }
            if (nullity == prev_nullity || !escalate) {
                stable = escalate;
                prev_nullity = nullity;
                break;
            }
            prev_nullity = nullity;
            if (2 * M > cap) break;
            M *= 2;
        }
        res.order_used = M;
        if (!stable) res.unstable = true;
        if (prev_nullity == 0) continue;

        auto A = detail::dependence_matrix<GaussRat>(f, subset, cols, M);
        auto ker = nullspace(A);
        if (ker.empty()) continue;
        auto v = ker.front();
        // scale: the last x-involving column carries coefficient 1
        for (std::size_t c = cols.size(); c-- > 0;)
            if (!v[c].is_zero() && total_degree(cols[c].beta) > 0) {
                GaussRat s = GaussRat(1) / v[c];
                for (auto& x : v) x = x * s;
                break;
            }
        DependenceCertificate cert;
        auto ctx = detail::certificate_context(f.n_in, k);
        cert.P = Poly(ctx);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (v[c].is_zero()) continue;
            Exponent e = cols[c].alpha;
            e.insert(e.end(), cols[c].beta.begin(), cols[c].beta.end());
            cert.P.add_term(e, v[c]);
        }
        cert.dz = dz;
        cert.dx = dx;
        cert.residual_order = M;
        cert.components = subset;
        if (!verify_certificate(cert, f, M)) throw std::logic_error("dependence certificate failed re-verification");
        res.certificate = std::move(cert);
        return res;
    }
    return res;
}

struct TrdegReport {
    int estimate = 0;
    std::vector<std::size_t> independent;
    std::vector<std::pair<std::size_t, DependenceCertificate>> dependents;
    int max_order_used = 0;
    bool underdetermined_at_requested = false;
    bool unstable = false;
    std::string label = "dependencies certified; independence relative to the degree bounds";
};

/// Greedy growth in input order: a component joins the independent set when no relation within the bounds is found.
inline TrdegReport trdeg_estimate(const SeriesMap& f, int Dz, int Dx, int N, bool escalate = true) {
    TrdegReport rep;
    for (std::size_t j = 0; j < f.components.size(); ++j) {
        auto subset = rep.independent;
        subset.push_back(j);
        auto r = dependence_search(f, subset, Dz, Dx, N, escalate);
        rep.max_order_used = std::max(rep.max_order_used, r.order_used);
        rep.underdetermined_at_requested = rep.underdetermined_at_requested || r.underdetermined_at_requested;
        // an exactly verified relation does not depend on the escalation settling
        rep.unstable = rep.unstable || (r.unstable && !r.certificate);
        if (r.certificate) rep.dependents.emplace_back(j, std::move(*r.certificate));
        else rep.independent.push_back(j);
    }
    rep.estimate = static_cast<int>(rep.independent.size());
    return rep;
}

/// φ∘f with slot s_k replaced by f_{s_k} + ϖ^{∘(k+1)}(f_{s_0}), ϖ(u) = (sin u)^a.
inline SeriesMap perturbation_builder(const SeriesMap& f, int a, const std::vector<std::size_t>& slots) {
    if (a < 1) throw std::invalid_argument("perturbation exponent a must be >= 1");
    if (slots.empty()) throw std::invalid_argument("at least one straightened slot is needed");
    for (auto s : slots)
        if (s >= f.components.size()) throw std::invalid_argument("slot out of range");
    Poly base = f.exact(slots[0], std::min(f.order, f.max_order()));
    bool nonconstant = false;
    for (const auto& [e, c] : base.terms())
        if (total_degree(e) > 0) nonconstant = true;
    if (!nonconstant) throw std::invalid_argument("f is constant in its first straightened component");
    if (!base.constant_term().is_zero()) throw std::invalid_argument("the first straightened component must vanish at the origin");
    SeriesMap out = f;
    SeriesExpr::Ptr iter = f.components[slots[0]];
    for (std::size_t k = 0; k < slots.size(); ++k) {
        iter = SeriesExpr::power(SeriesExpr::apply(SeriesFn::Sin, iter), static_cast<unsigned>(a));
        out.components[slots[k]] = SeriesExpr::binary(SeriesExpr::Kind::Add, f.components[slots[k]], iter);
    }
    return out;
}

struct MapsIntoReport {
    bool holds = false;
    int order = 0;
    /// residual of each target equation after ξ := Q, truncated at the order
    std::vector<Poly> residuals;
};

/// P′_l(f(t), f̄(τ)) with ξ := Q(ζ_w, t) substituted, through degree N.
inline MapsIntoReport check_maps_into(const SeriesMap& f, const GraphManifold& M, const GraphManifold& Mp, int N) {
    if (f.n_in != M.n()) throw std::invalid_argument("map input dimension does not match the source");
    if (f.n_out() != Mp.n()) throw std::invalid_argument("map output dimension does not match the target");
    for (const auto& x : M.base_point)
        if (!x.is_zero()) throw std::invalid_argument("source base point must be the origin");
    int n = M.n();
    std::vector<int> to_t(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) to_t[static_cast<std::size_t>(k)] = k;
    std::vector<std::optional<Poly>> img(Mp.ctx->size());
    for (int j = 0; j < Mp.n(); ++j) {
        Poly fj = f.exact(static_cast<std::size_t>(j), N);
        if (fj.constant_term() != Mp.base_point[static_cast<std::size_t>(j)])
            throw std::invalid_argument("f does not send the base point to the target base point");
        Poly ft = fj.embed(M.ctx, to_t);
        img[static_cast<std::size_t>(j)] = ft;
        img[static_cast<std::size_t>(Mp.n() + j)] = conjugate(ft);
    }
    std::vector<std::optional<Poly>> graph(M.ctx->size());
    for (int l = 0; l < M.d; ++l) graph[M.xi(l)] = M.Q[l];
    MapsIntoReport rep;
    rep.order = N;
    rep.holds = true;
    for (const auto& P : Mp.complex_gens()) {
        Poly r = P.compose(img, M.ctx, N).compose(graph, M.ctx, N).truncate(N);
        if (!r.is_zero()) rep.holds = false;
        rep.residuals.push_back(r);
    }
    return rep;
}

struct TrdegInequalityReport {
    int estimate = 0;
    int kappa = 0;
    bool holds = false;
    TrdegReport trdeg;
};

inline TrdegInequalityReport trdeg_inequality_check(const SeriesMap& f, const GraphManifold& M, const GraphManifold& Mp, int Dz,
                                                    int Dx, int N, std::uint64_t seed) {
    if (!check_maps_into(f, M, Mp, N).holds) throw std::invalid_argument("containment check failed");
    TrdegInequalityReport rep;
    rep.kappa = kappa(Mp, seed).kappa;
    rep.trdeg = trdeg_estimate(f, Dz, Dx, N);
    rep.estimate = rep.trdeg.estimate;
    rep.holds = rep.estimate <= rep.kappa;
    return rep;
}

}  // namespace crkit
