#include <gtest/gtest.h>

#include "crkit/corpus.hpp"
#include "crkit/segre.hpp"

using namespace crkit;

namespace {

Poly P(const std::string& s, const Ctx& c) { return parse_poly(s, c); }

PolyMap identity_map(const Ctx& ctx, int n) {
    PolyMap f;
    for (int k = 0; k < n; ++k) f.push_back(Poly::var(ctx, k));
    return f;
}

ImplicitManifold implicit_of(const AnyManifold& m) {
    if (auto g = std::get_if<GraphManifold>(&m)) return as_implicit(*g);
    return std::get<ImplicitManifold>(m);
}

}  // namespace

TEST(SegreVariety, Examples) {
    auto H = corpus::heisenberg2();
    auto S = segre_variety(H, PointC{0, 0});
    ASSERT_EQ(S.ideal.gens.size(), 1u);
    EXPECT_EQ(S.ideal.gens[0], P("z2", H.ctx));

    auto L = corpus::leviflat();
    auto SL = segre_variety(L, PointC{GaussRat::from_ints(1, 2), GaussRat::from_ints(3, -1)});
    ASSERT_EQ(SL.ideal.gens.size(), 1u);
    EXPECT_EQ(SL.ideal.gens[0], P("z2 - 3 - i", L.ctx));

    auto W = corpus::whitney_tube();
    auto SW = segre_variety(W, PointC{2, 2, 1});
    ASSERT_EQ(SW.ideal.gens.size(), 1u);
    EXPECT_EQ(SW.ideal.gens[0], P("(z3+1)*(z1+2)^2/8 - (z2+2)^2/4", W.ctx));
}

TEST(SegreContains, Examples) {
    auto H = corpus::heisenberg2();
    EXPECT_TRUE(segre_contains(H, PointC{0, 0}, PointC{0, 0}));
    EXPECT_FALSE(segre_contains(H, PointC{1, GaussRat::i()}, PointC{0, 0}));
    Rng rng(4);
    for (const auto& e : corpus::all()) {
        auto M = implicit_of(e.manifold);
        for (int k = 0; k < 20; ++k) {
            auto p = sample_real(M, rng);
            ASSERT_TRUE(p);
            EXPECT_TRUE(segre_contains(M, *p, *p)) << e.name;
        }
    }
}

TEST(SegreContains, Reciprocity) {
    Rng rng(99);
    for (const auto& e : corpus::all()) {
        auto M = implicit_of(e.manifold);
        int pairs = 0;
        while (pairs < 200) {
            auto p = sample_real(M, rng);
            ASSERT_TRUE(p);
            std::optional<PointC> q;
            if (auto g = std::get_if<GraphManifold>(&e.manifold)) q = sample_segre_point(*g, *p, rng);
            else q = sample_segre_point(M, *p, rng);
            ASSERT_TRUE(q) << e.name;
            // q was drawn on S_p̄; reciprocity predicts p ∈ S_q̄
            EXPECT_TRUE(segre_contains(M, *q, *p)) << e.name;
            EXPECT_TRUE(segre_contains(M, *p, *q)) << e.name;
            ++pairs;
        }
    }
}

TEST(ComplexifiedSegre, Examples) {
    auto H = corpus::heisenberg2();
    auto S0 = complexified_segre(H, PointC{0, 0});
    EXPECT_EQ(S0.param[1], Poly(H.ctx));
    GaussRat z0 = GaussRat::from_ints(2, -1), x0 = GaussRat::from_ints(0, 5);
    auto S = complexified_segre(H, PointC{z0, x0});
    EXPECT_EQ(S.param[0], P("z1", H.ctx));
    EXPECT_EQ(S.param[1], Poly::constant(H.ctx, x0) + P("i*z1", H.ctx) * z0);
    EXPECT_EQ(S.frame[0][0], P("1", H.ctx));

    auto C3 = corpus::c3_remark();
    auto SC = complexified_segre(C3, PointC{0, 0, 0});
    EXPECT_TRUE(SC.param[1].is_zero());
    EXPECT_TRUE(SC.param[2].is_zero());
}

TEST(FirstReflection, Examples) {
    auto L = corpus::leviflat();
    auto R = first_reflection(L, {PointC{1, 2}}, 1);
    ASSERT_TRUE(R.dim);
    EXPECT_EQ(*R.dim, 1);

    auto H = corpus::heisenberg2();
    auto R0 = first_reflection(H, {PointC{0, 0}}, 1);
    ASSERT_TRUE(R0.dim);
    EXPECT_EQ(*R0.dim, 1);

    Rng rng(5);
    auto M = as_implicit(H);
    auto a = *sample_real(M, rng), b = *sample_real(M, rng);
    auto R2 = first_reflection(H, {a, b}, 1);
    ASSERT_TRUE(R2.dim);
    EXPECT_EQ(*R2.dim, 0);
}

TEST(FirstReflection, ProductNeverInvolvesStraightenedVariable) {
    auto G = corpus::productC3();
    auto M = as_implicit(G);
    Rng rng(6);
    for (int k = 0; k < 20; ++k) {
        std::vector<PointC> E;
        for (int j = 0; j < 1 + k % 4; ++j) E.push_back(*sample_real(M, rng));
        auto R = first_reflection(G, E, 7);
        for (const auto& g : R.ideal.gens) EXPECT_FALSE(g.uses_var(G.zeta_w(1)));
    }
}

TEST(DoubleReflection, HeisenbergIdentityIsAPoint) {
    auto H = corpus::heisenberg2();
    auto r = double_reflection_sample(identity_map(H.ctx, 2), H, H, PointC{0, 0}, PointC{0, 0}, 3, 11);
    ASSERT_TRUE(r.dim);
    EXPECT_EQ(*r.dim, 0);
    EXPECT_TRUE(r.stabilized);
}

TEST(DoubleReflection, ProductHasPositiveDimension) {
    auto G = corpus::productC3();
    auto r = double_reflection_sample(identity_map(G.ctx, 3), G, G, PointC{0, 0, 0}, PointC{0, 0, 0}, 3, 11);
    ASSERT_TRUE(r.dim);
    EXPECT_GE(*r.dim, 1);
    EXPECT_TRUE(r.stabilized);
}

TEST(DoubleReflection, ConstantMap) {
    auto H = corpus::heisenberg2();
    PolyMap f = {Poly(H.ctx), Poly(H.ctx)};
    auto r = double_reflection_sample(f, H, H, PointC{0, 0}, PointC{0, 0}, 2, 3);
    auto single = first_reflection(H, {PointC{0, 0}}, 1);
    ASSERT_TRUE(r.first_dim);
    EXPECT_EQ(*r.first_dim, *single.dim);
}

TEST(Transversality, Corpus) {
    auto h = segre_transversal(corpus::heisenberg2(), PointC{0, 0}, 1);
    EXPECT_EQ(h.verdict, Transversality::TransversalAt);
    // at the origin every Segre frame has zero z2-component (∂_w of w²ζ² vanishes at w = 0)
    auto c3 = segre_transversal(corpus::c3_remark(), PointC{0, 0, 0}, 1);
    EXPECT_EQ(c3.verdict, Transversality::TransversalIn);
    EXPECT_EQ(c3.rank_at, 2);
    PointC off{1, GaussRat(Rational(0), Rational(1, 2)), GaussRat(Rational(0), Rational(1, 2))};
    ASSERT_TRUE(on_manifold(as_implicit(corpus::c3_remark()), off));
    EXPECT_EQ(segre_transversal(corpus::c3_remark(), off, 1).verdict, Transversality::TransversalAt);
    auto c4 = segre_transversal(corpus::c4_prop1042(), PointC{0, 0, 0, 0}, 1);
    EXPECT_EQ(c4.verdict, Transversality::NotTransversal);
    EXPECT_TRUE(c4.certified);
    EXPECT_EQ(c4.rank_in, 3);
    auto lf = segre_transversal(corpus::leviflat(), PointC{0, 0}, 1);
    EXPECT_EQ(lf.verdict, Transversality::NotTransversal);
}

TEST(Transversality, InvariantUnderWChanges) {
    Rng rng(31);
    for (const auto& G : {corpus::heisenberg2(), corpus::c3_remark(), corpus::c4_prop1042()}) {
        auto base = segre_transversal(G, G.base_point, 1).verdict;
        for (int k = 0; k < 5; ++k) {
            Matrix<GaussRat> A(1, 1), C(G.d, G.d);
            A(0, 0) = random_gauss_int(rng, 3);
            if (A(0, 0).is_zero()) A(0, 0) = GaussRat(2);
            for (int i = 0; i < G.d; ++i) C(i, i) = GaussRat(1);
            auto G2 = linear_change(G, A, C);
            EXPECT_EQ(segre_transversal(G2, G2.base_point, 2).verdict, base) << G.name;
        }
    }
}

TEST(Transversality, AtImpliesIn) {
    for (const auto& e : corpus::all()) {
        auto g = std::get_if<GraphManifold>(&e.manifold);
        if (!g) continue;
        auto r = segre_transversal(*g, g->base_point, 3);
        if (r.verdict == Transversality::TransversalAt) EXPECT_EQ(r.rank_in, g->n());
    }
}

TEST(Transversality, WhitneyImplicit) {
    auto r = segre_transversal(corpus::whitney_tube(), PointC{2, 2, 1}, 1);
    EXPECT_NE(r.verdict, Transversality::NotTransversal);
    EXPECT_EQ(r.rank_in, 3);
    auto pf = make_implicit("flat", 2, {parse_poly("z2 - zb2", VarContext::paired(2))});
    EXPECT_EQ(segre_transversal(pf, PointC{0, 0}, 1).verdict, Transversality::NotTransversal);
}
