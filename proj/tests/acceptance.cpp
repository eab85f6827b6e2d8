// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include <array>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "crkit/report.hpp"

using namespace crkit;

namespace {

struct Check {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
};

Matrix<GaussRat> random_invertible(Rng& rng, int k) {
    for (;;) {
        Matrix<GaussRat> A(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) A(i, j) = random_gauss_int(rng, 3);
        if (!determinant(A).is_zero()) return A;
    }
}

GraphManifold random_rigid_graph(Rng& rng, int m, int d, int max_degree) {
    auto ctx = VarContext::paired(m + d);
    int active = static_cast<int>(random_int(rng, 1, m));
    std::vector<Poly> Q;
    for (int l = 0; l < d; ++l) {
        Poly h(ctx);
        for (int t = 0; t < 3; ++t) {
            Exponent e(ctx->size(), 0);
            int deg = static_cast<int>(random_int(rng, 1, max_degree));
            for (int s = 0; s < deg; ++s) {
                int k = static_cast<int>(random_int(rng, 0, active - 1));
                ++e[random_int(rng, 0, 1) ? k : m + d + k];
            }
            h.add_term(e, random_gauss_int(rng, 3));
        }
        Q.push_back(Poly::var(ctx, m + l) - (h + conjugate(h)) * GaussRat::from_ints(0, 2));
    }
    return GraphManifold("rigid", m, d, Q);
}

PolyMap identity_map(const Ctx& ctx, int n) {
    PolyMap f;
    for (int k = 0; k < n; ++k) f.push_back(Poly::var(ctx, k));
    return f;
}

SeriesMap series_map(int n_in, int order, const std::vector<std::string>& comps) {
    SeriesMap f;
    f.n_in = n_in;
    f.order = order;
    for (const auto& c : comps) f.components.push_back(parse_series(c, n_in));
    return f;
}

GaussRat rnd(Rng& rng) { return GaussRat(Rational(random_int(rng, -20, 20), random_int(rng, 1, 6))); }
GaussRat nonzero(Rng& rng) {
    for (;;) {
        GaussRat x = rnd(rng);
        if (!x.is_zero()) return x;
    }
}

Check whitney() {
    Check c;
    auto W = corpus::whitney_tube();
    Rng rng(101);
    // x1 = x2 = 0 with arbitrary imaginary parts and x3
    for (int k = 0; k < 20; ++k) {
        PointC p{GaussRat(Rational(0), rnd(rng).re()), GaussRat(Rational(0), rnd(rng).re()), GaussRat(rnd(rng).re(), rnd(rng).re())};
        c.expect(!regular_at(W, p, 1), "regular at a point with x1 = x2 = 0");
    }
    // x1 != 0 forces x3 = x2^2 / x1^2
    for (int k = 0; k < 20; ++k) {
        Rational x1 = nonzero(rng).re(), x2 = rnd(rng).re();
        PointC p{GaussRat(x1, rnd(rng).re()), GaussRat(x2, rnd(rng).re()), GaussRat(Rational(x2 * x2 / (x1 * x1)), rnd(rng).re())};
        c.expect(regular_at(W, p, 1), "singular at a point with x1 != 0");
    }
    auto tester = tangency_tester(W);
    auto fields = cr_vector_fields(W, *W.base_point, 1);
    c.expect(fields.anti.size() == 2, "expected two antiholomorphic CR fields");
    for (const auto& f : fields.anti) c.expect(tester.test(f) == Membership::Yes, "CR field not tangent");
    auto lie = lie_saturation(W, *W.base_point, 1);
    c.expect(lie.verdict == MinimalityVerdict::Minimal && lie.depth_reached <= 2, "not minimal at depth <= 2");
    c.expect(tangent_hol_fields(W, 3, 1).basis.empty(), "holomorphic tangent fields found at degree 3");
    return c;
}

Check kappa_identity() {
    Check c;
    Rng rng(41);
    std::vector<GraphManifold> all;
    for (const auto& e : corpus::all()) {
        if (auto g = std::get_if<GraphManifold>(&e.manifold)) {
            all.push_back(*g);
        } else {
            // the implicit example enters through its graph expansion at the base point
            const auto& M = std::get<ImplicitManifold>(e.manifold);
            auto G = graph_solve(M, *M.base_point, 4, 1);
            auto k = kappa(G, 1);
            c.expect(k.kappa + k.chi == G.n() && k.kappa <= G.m, e.name + ": identity fails on the graph expansion");
            c.expect(k.kappa == 0, e.name + ": expected kappa 0");
        }
    }
    for (int k = 0; k < 25; ++k) {
        int n = static_cast<int>(random_int(rng, 2, 4));
        int m = static_cast<int>(random_int(rng, 1, n - 1));
        all.push_back(random_rigid_graph(rng, m, n - m, 3));
    }
    for (const auto& G : all) {
        auto r = kappa(G, 2);
        c.expect(r.kappa + r.chi == G.n(), G.name + ": kappa + chi != n");
        c.expect(r.kappa <= G.m, G.name + ": kappa > m");
        for (int t = 0; t < 5; ++t) {
            auto G2 = linear_change(G, random_invertible(rng, G.m), random_invertible(rng, G.d));
            c.expect(kappa(G2, 3).kappa == r.kappa, G.name + ": kappa changed under a linear change");
        }
    }
    return c;
}

Check transversality() {
    Check c;
    auto is_transversal = [](Transversality t) { return t != Transversality::NotTransversal; };
    c.expect(is_transversal(segre_transversal(corpus::heisenberg2(), PointC{0, 0}, 1).verdict), "heisenberg2");
    c.expect(is_transversal(segre_transversal(corpus::c3_remark(), PointC{0, 0, 0}, 1).verdict), "c3_remark");
    auto c4 = segre_transversal(corpus::c4_prop1042(), PointC{0, 0, 0, 0}, 1);
    c.expect(c4.verdict == Transversality::NotTransversal && c4.certified, "c4_prop1042 not certified non-transversal");
    for (const auto& e : corpus::all()) {
        PointC p = report::base_point(e.manifold, 1);
        auto lie = report::lie_at(e.manifold, p, 1);
        int d = std::holds_alternative<GraphManifold>(e.manifold) ? std::get<GraphManifold>(e.manifold).d
                                                                  : codimension(std::get<ImplicitManifold>(e.manifold), 1).d;
        if (d <= 2 && lie.verdict == MinimalityVerdict::Minimal)
            c.expect(is_transversal(report::transversal_of(e.manifold, p, 1).verdict), e.name + ": minimal but not transversal");
    }
    return c;
}

Check orbits() {
    Check c;
    for (const auto& e : corpus::all()) {
        PointC p = report::base_point(e.manifold, 1);
        int symbolic = report::lie_at(e.manifold, p, 1).span_rank_at_p;
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            FlowConfig cfg;
            cfg.svd_tol = 1e-6;
            int numeric = std::holds_alternative<GraphManifold>(e.manifold)
                              ? orbit_dim_numeric(std::get<GraphManifold>(e.manifold), p, cfg, seed).rank
                              : orbit_dim_numeric(std::get<ImplicitManifold>(e.manifold), p, cfg, seed).rank;
            c.expect(numeric == symbolic, e.name + ": numeric " + std::to_string(numeric) + " vs symbolic " + std::to_string(symbolic));
        }
    }
    // d/dx and d/dy + x d/dz
    auto ctx = VarContext::paired(3);
    std::vector<Poly> coeffs{Poly(ctx), Poly::constant(ctx, GaussRat(1)), Poly::var(ctx, 0)};
    coeffs.resize(6, Poly(ctx));
    std::vector<VectorField> gens{VectorField::partial(ctx, 0), VectorField(ctx, coeffs)};
    auto lie = lie_saturation(gens, {"X", "Y"}, PointC(6, GaussRat(0)), 3, 4);
    c.expect(lie.span_rank_at_p == 3, "three-field model: symbolic rank");
    for (std::uint64_t seed : {1u, 2u, 3u})
        c.expect(orbit_dim_numeric(gens, CPoint(6, 0.0), FlowConfig{}, seed).rank == 3, "three-field model: numeric rank");
    return c;
}

Check reciprocity() {
    Check c;
    Rng rng(5);
    for (const auto& e : corpus::all()) {
        auto M = report::implicit_of(e.manifold);
        int independent = 0, incident = 0;
        for (int k = 0; k < 200; ++k) {
            auto p = sample_real(M, rng), q = sample_real(M, rng);
            if (!p || !q) {
                c.expect(false, e.name + ": sampling failed");
                break;
            }
            c.expect(segre_contains(M, *p, *q) == segre_contains(M, *q, *p), e.name + ": reciprocity fails on an independent pair");
            ++independent;
            // pairs with q drawn on S_p̄, where both sides must hold
            auto s = std::holds_alternative<GraphManifold>(e.manifold) ? sample_segre_point(std::get<GraphManifold>(e.manifold), *p, rng)
                                                                       : sample_segre_point(M, *p, rng);
            if (!s) continue;
            c.expect(segre_contains(M, *s, *p) && segre_contains(M, *p, *s), e.name + ": reciprocity fails on an incident pair");
            ++incident;
        }
        c.expect(independent == 200 && incident == 200, e.name + ": fewer than 200 pairs");
    }
    return c;
}

Check transcendence() {
    Check c;
    auto sq = series_map(1, 10, {"z1^2", "z1^3"});
    auto r = dependence_search(sq, {0, 1}, 0, 3, 10);
    c.expect(r.certificate.has_value(), "no relation for (z1^2, z1^3)");
    if (r.certificate) {
        c.expect(r.certificate->P == parse_poly("x1^3 - x2^2", r.certificate->P.ctx()), "relation is " + to_string(r.certificate->P));
        c.expect(verify_certificate(*r.certificate, sq, 10), "relation residual nonzero through order 10");
    }
    std::vector<std::pair<SeriesMap, TrdegReport>> runs;
    auto sinf = series_map(1, 20, {"iterate:sin:1", "iterate:sin:2", "iterate:sin:3"});
    runs.emplace_back(sinf, trdeg_estimate(sinf, 4, 4, 20));
    c.expect(runs.back().second.estimate == 3, "iterated sine estimate " + std::to_string(runs.back().second.estimate));
    runs.emplace_back(sq, trdeg_estimate(sq, 4, 4, 10));
    runs.emplace_back(sq, trdeg_estimate(sq, 0, 3, 10));
    auto mixed = series_map(2, 12, {"sin(z1)", "sin(z1)^2 + z2", "exp(z2) - 1"});
    runs.emplace_back(mixed, trdeg_estimate(mixed, 2, 2, 12));
    for (const auto& [f, rep] : runs)
        for (const auto& [k, cert] : rep.dependents)
            c.expect(verify_certificate(cert, f, cert.residual_order), "certificate " + to_string(cert.P) + " does not re-verify");
    return c;
}

Check inequality() {
    Check c;
    auto H = corpus::heisenberg2();
    auto P = corpus::productC3();
    auto r0 = trdeg_inequality_check(series_map(2, 10, {"z1", "z2"}), H, H, 4, 4, 10, 1);
    c.expect(r0.holds && r0.estimate == 0 && r0.kappa == 0, "identity on heisenberg2");
    auto r1 = trdeg_inequality_check(series_map(2, 10, {"z1", "z1^2 + 3*z1*z2", "z2"}), H, P, 4, 4, 10, 1);
    c.expect(r1.holds && r1.estimate == 0 && r1.kappa == 1, "polynomial map into productC3");
    auto pert = perturbation_builder(series_map(3, 10, {"z1", "z2", "z3"}), 1, {1});
    auto r2 = trdeg_inequality_check(pert, P, P, 4, 4, 10, 1);
    c.expect(r2.holds && r2.estimate == 1 && r2.kappa == 1, "perturbation on productC3 is not sharp");
    return c;
}

Check reflections() {
    Check c;
    auto G = corpus::productC3();
    auto M = as_implicit(G);
    Rng rng(6);
    for (int k = 0; k < 20; ++k) {
        std::vector<PointC> E;
        for (int j = 0; j < 1 + k % 4; ++j) E.push_back(*sample_real(M, rng));
        auto R = first_reflection(G, E, 7);
        for (const auto& g : R.ideal.gens) c.expect(!g.uses_var(G.zeta_w(1)), "generator involves the straightened variable");
    }
    auto dp = double_reflection_sample(identity_map(G.ctx, 3), G, G, PointC{0, 0, 0}, PointC{0, 0, 0}, 3, 11);
    c.expect(dp.dim && *dp.dim >= 1, "productC3 double reflection has dimension 0");
    auto H = corpus::heisenberg2();
    auto dh = double_reflection_sample(identity_map(H.ctx, 2), H, H, PointC{0, 0}, PointC{0, 0}, 3, 11);
    c.expect(dh.dim && *dh.dim == 0, "heisenberg2 double reflection is not a point");
    return c;
}

std::string run_command(const std::string& cmd) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return out;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    pclose(pipe);
    return out;
}

Check determinism() {
    Check c;
    std::string a = corpus_report(kDefaultSeed).body.dump(), b = corpus_report(kDefaultSeed).body.dump();
    c.expect(a == b, "in-process corpus runs differ");
#ifdef CRKIT_CLI_PATH
    std::string cmd = std::string(CRKIT_CLI_PATH) + " corpus --seed 7";
    std::string x = run_command(cmd), y = run_command(cmd);
    c.expect(!x.empty() && x == y, "CLI corpus runs differ");
#endif
    return c;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<Check()> run;
    };
    std::vector<Criterion> criteria{
        {1, "Whitney tube: singular locus, tangency, minimality, no holomorphic fields", whitney},
        {2, "kappa + chi = n, kappa <= m, invariance under linear changes", kappa_identity},
        {3, "Segre-transversality verdicts", transversality},
        {4, "numeric orbit dimension equals symbolic span rank", orbits},
        {5, "Segre reciprocity on 200 pairs per example", reciprocity},
        {6, "dependence certificates and iterated-sine estimate", transcendence},
        {7, "trdeg <= kappa on constructed maps", inequality},
        {8, "product reflection structure and double reflection", reflections},
        {9, "byte-identical corpus reports", determinism},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check c;
        try {
            c = cr.run();
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << cr.id << ": " << cr.title;
        if (!c.ok) {
            std::cout << " (" << c.notes.front();
            if (c.notes.size() > 1) std::cout << "; " << c.notes.size() - 1 << " more";
            std::cout << ")";
            ++failed;
        }
        std::cout << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
