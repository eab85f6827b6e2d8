#include <gtest/gtest.h>

#include "crkit/corpus.hpp"
#include "crkit/cr_fields.hpp"

using namespace crkit;

namespace {

Poly P(const std::string& s, const Ctx& c) { return parse_poly(s, c); }

VectorField field(const Ctx& ctx, const std::vector<std::string>& coeffs) {
    std::vector<Poly> c;
    for (const auto& s : coeffs) c.push_back(P(s, ctx));
    return VectorField(ctx, c);
}

Matrix<GaussRat> identity(int k) {
    Matrix<GaussRat> a(k, k);
    for (int i = 0; i < k; ++i) a(i, i) = GaussRat(1);
    return a;
}

Matrix<GaussRat> random_invertible(Rng& rng, int k) {
    for (;;) {
        Matrix<GaussRat> a(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) a(i, j) = random_gauss_int(rng, 2);
        if (rank(a) == static_cast<std::size_t>(k)) return a;
    }
}

// rigid graph: Q_l = z_l − 2i φ_l(w, ζ_w) with φ_l real, so reality holds by construction
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
        Poly phi = h + conjugate(h);
        Q.push_back(Poly::var(ctx, m + l) - phi * GaussRat::from_ints(0, 2));
    }
    return GraphManifold("rigid", m, d, Q);
}

}  // namespace

TEST(LieBracket, Examples) {
    auto ctx = VarContext::paired(2);
    auto d1 = VectorField::partial(ctx, 0), d2 = VectorField::partial(ctx, 1);
    EXPECT_TRUE(lie_bracket(d1, d2).is_zero());

    auto c3 = VarContext::paired(3);
    // x, y, z as z1, z2, z3
    auto X = VectorField::partial(c3, 0);
    auto Y = field(c3, {"0", "0", "z1", "0", "0", "0"});
    EXPECT_EQ(lie_bracket(X, Y), VectorField::partial(c3, 2));
}

TEST(LieBracket, Antisymmetry) {
    auto W = corpus::whitney_tube();
    auto f = cr_vector_fields(W, PointC{2, 2, 1}, 1);
    for (const auto& a : f.anti)
        for (const auto& b : f.hol) EXPECT_EQ(lie_bracket(a, b), lie_bracket(b, a) * GaussRat(-1));
}

TEST(CRFields, HeisenbergGraph) {
    auto H = corpus::heisenberg2();
    auto f = cr_vector_fields(H);
    ASSERT_EQ(f.anti.size(), 1u);
    EXPECT_EQ(f.anti[0], field(H.ctx, {"0", "0", "1", "-i*z1"}));
    EXPECT_EQ(f.hol[0], field(H.ctx, {"1", "i*zb1", "0", "0"}));
    auto t = tangency_tester(H);
    EXPECT_EQ(t.test(f.anti[0]), Membership::Yes);
    EXPECT_EQ(t.test(f.hol[0]), Membership::Yes);
    EXPECT_EQ(t.test(VectorField::partial(H.ctx, 1)), Membership::No);
}

TEST(CRFields, LeviFlat) {
    auto L = corpus::leviflat();
    auto f = cr_vector_fields(L);
    EXPECT_EQ(f.anti[0], VectorField::partial(L.ctx, 2));
}

TEST(CRFields, WhitneyExplicitFieldsAreTangent) {
    auto W = corpus::whitney_tube();
    auto& c = W.ctx;
    std::string x1 = "((z1+zb1)/2)", x2 = "((z2+zb2)/2)", x3 = "((z3+zb3)/2)";
    auto Lb1 = field(c, {"0", "0", "0", x1, "0", "-2*" + x3});
    auto Lb2 = field(c, {"0", "0", "0", "0", x1 + "^2", "2*" + x2});
    auto t = tangency_tester(W);
    EXPECT_EQ(t.test(Lb1), Membership::Yes);
    EXPECT_EQ(t.test(Lb2), Membership::Yes);
    auto L2 = conjugate(Lb2);
    auto br = lie_bracket(L2, Lb2);
    EXPECT_EQ(br, field(c, {"0", "0", "-" + x1 + "^2", "0", "0", x1 + "^2"}));
    EXPECT_EQ(t.test(br), Membership::Yes);
}

TEST(CRFields, KernelFieldsAreTangentAndIndependent) {
    for (const auto& e : corpus::all()) {
        ImplicitManifold M = std::holds_alternative<GraphManifold>(e.manifold) ? as_implicit(std::get<GraphManifold>(e.manifold))
                                                                                : std::get<ImplicitManifold>(e.manifold);
        auto f = cr_vector_fields(M, *M.base_point, 3);
        auto t = tangency_tester(M);
        for (const auto& X : f.anti) EXPECT_EQ(t.test(X), Membership::Yes) << e.name;
    }
}

TEST(LieSaturation, Examples) {
    auto W = corpus::whitney_tube();
    auto r = lie_saturation(W, PointC{2, 2, 1}, 1);
    EXPECT_EQ(r.verdict, MinimalityVerdict::Minimal);
    EXPECT_LE(r.depth_reached, 2);
    EXPECT_EQ(r.span_rank_at_p, 5);
    EXPECT_TRUE(r.tangency_verified);

    auto lf = lie_saturation(corpus::leviflat(), PointC{0, 0});
    EXPECT_EQ(lf.verdict, MinimalityVerdict::NotMinimal);
    EXPECT_EQ(lf.span_rank_at_p, 2);

    auto c4 = lie_saturation(corpus::c4_prop1042(), PointC{0, 0, 0, 0});
    EXPECT_EQ(c4.verdict, MinimalityVerdict::Minimal);
    EXPECT_TRUE(c4.tangency_verified);

    auto h = lie_saturation(corpus::heisenberg2(), PointC{0, 0});
    EXPECT_EQ(h.verdict, MinimalityVerdict::Minimal);
    EXPECT_EQ(h.depth_reached, 2);
}

TEST(LieSaturation, GraphAndKernelFieldsAgree) {
    for (const auto& e : corpus::all()) {
        auto g = std::get_if<GraphManifold>(&e.manifold);
        if (!g) continue;
        auto a = lie_saturation(*g, g->base_point);
        auto M = as_implicit(*g);
        auto f = cr_vector_fields(M, g->base_point, 5);
        auto t = tangency_tester(*g);
        std::vector<VectorField> gens = f.hol;
        gens.insert(gens.end(), f.anti.begin(), f.anti.end());
        std::vector<std::string> names(gens.size(), "X");
        auto b = lie_saturation(gens, names, complexified_point(g->base_point), 2 * g->n() - g->d, 2 * g->n(), &t);
        EXPECT_EQ(a.verdict, b.verdict) << e.name;
        EXPECT_EQ(a.span_rank_at_p, b.span_rank_at_p) << e.name;
        EXPECT_TRUE(b.tangency_verified) << e.name;
    }
}

TEST(TangentHolFields, Examples) {
    auto W = tangent_hol_fields(corpus::whitney_tube(), 3);
    EXPECT_TRUE(W.basis.empty());

    auto G = corpus::productC3();
    auto pr = tangent_hol_fields(G, 1);
    EXPECT_NE(std::find(pr.basis.begin(), pr.basis.end(), VectorField::partial(G.ctx, 1)), pr.basis.end());
    EXPECT_EQ(pr.module_rank, 1);

    auto L = corpus::leviflat();
    auto lf = tangent_hol_fields(L, 1);
    EXPECT_NE(std::find(lf.basis.begin(), lf.basis.end(), VectorField::partial(L.ctx, 0)), lf.basis.end());

    EXPECT_TRUE(tangent_hol_fields(corpus::heisenberg2(), 3).basis.empty());
    EXPECT_TRUE(tangent_hol_fields(corpus::c4_prop1042(), 3).basis.empty());
}

TEST(TangentHolFields, MonotoneAndMatchesKappa) {
    for (const auto& G : {corpus::productC3(), corpus::leviflat(), corpus::heisenberg2(), corpus::c3_remark()}) {
        std::size_t prev = 0;
        for (int D = 0; D <= 3; ++D) {
            auto r = tangent_hol_fields(G, D);
            EXPECT_GE(r.basis.size(), prev) << G.name;
            prev = r.basis.size();
            if (D >= 1) EXPECT_EQ(r.module_rank, kappa(G, 1).kappa) << G.name;
        }
    }
}

TEST(Kappa, Examples) {
    auto h = kappa(corpus::heisenberg2(), 1);
    EXPECT_EQ(h.kappa, 0);
    EXPECT_EQ(h.chi, 2);
    EXPECT_FALSE(h.witness_minor.is_zero());
    auto p = kappa(corpus::productC3(), 1);
    EXPECT_EQ(p.kappa, 1);
    EXPECT_EQ(p.chi, 2);
    auto c4 = kappa(corpus::c4_prop1042(), 1);
    EXPECT_EQ(c4.kappa, 0);
    EXPECT_EQ(c4.chi, 4);
    EXPECT_EQ(kappa(corpus::leviflat(), 1).kappa, 1);
    EXPECT_EQ(kappa(corpus::c3_remark(), 1).kappa, 0);
}

TEST(Kappa, WitnessMinorIsAmongExceptionalGenerators) {
    auto c4 = kappa(corpus::c4_prop1042(), 1);
    EXPECT_NE(std::find(c4.exceptional_gens.begin(), c4.exceptional_gens.end(), c4.witness_minor), c4.exceptional_gens.end());
}

TEST(Kappa, IdentityAndInvariance) {
    Rng rng(41);
    std::vector<GraphManifold> all;
    for (const auto& e : corpus::all())
        if (auto g = std::get_if<GraphManifold>(&e.manifold)) all.push_back(*g);
    for (int k = 0; k < 25; ++k) {
        int n = static_cast<int>(random_int(rng, 2, 4));
        int m = static_cast<int>(random_int(rng, 1, n - 1));
        all.push_back(random_rigid_graph(rng, m, n - m, 3));
    }
    for (const auto& G : all) {
        ASSERT_TRUE(verify_reality(G)) << G.name;
        auto r = kappa(G, 2);
        EXPECT_EQ(r.kappa + r.chi, G.n());
        EXPECT_LE(r.kappa, G.m);
        for (int t = 0; t < 5; ++t) {
            auto G2 = linear_change(G, random_invertible(rng, G.m), random_invertible(rng, G.d));
            EXPECT_EQ(kappa(G2, 3).kappa, r.kappa) << to_string(G.Q[0]);
        }
    }
}

TEST(Straighten, ProductBecomesHeisenberg) {
    auto G = corpus::productC3();
    auto r = straighten_linear(G, 1);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->steps, 1);
    EXPECT_EQ(r->reduced.n(), 2);
    EXPECT_EQ(r->reduced.Q[0], P("z2 - i*z1*zb1", r->reduced.ctx));
    EXPECT_EQ(r->kappa_before, 1);
    EXPECT_EQ(r->kappa_after, 0);
    EXPECT_THROW(straighten_linear(corpus::heisenberg2(), 1), std::invalid_argument);
}

TEST(Straighten, DisguisedProduct) {
    Rng rng(77);
    for (int k = 0; k < 5; ++k) {
        auto G = linear_change(corpus::productC3(), random_invertible(rng, 2), identity(1));
        auto r = straighten_linear(G, 1);
        ASSERT_TRUE(r);
        EXPECT_EQ(r->reduced.n(), 2);
        EXPECT_EQ(r->kappa_after, r->kappa_before - r->steps);
        EXPECT_EQ(r->kappa_after, 0);
        EXPECT_TRUE(verify_reality(r->reduced));
    }
}
