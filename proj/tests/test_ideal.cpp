#include <gtest/gtest.h>

#include "crkit/ideal.hpp"
#include "crkit/poly_io.hpp"
#include "crkit/random.hpp"

using namespace crkit;

namespace {
Poly P(const std::string& s, const Ctx& c) { return parse_poly(s, c); }
Ideal make_ideal(const Ctx& c, std::initializer_list<const char*> gens) {
    Ideal I{c, {}};
    for (auto g : gens) I.gens.push_back(P(g, c));
    return I;
}
}  // namespace

TEST(Groebner, PrincipalAndUnit) {
    auto c = VarContext::paired(3);
    auto g = groebner(make_ideal(c, {"z1"}), 4);
    ASSERT_EQ(g.gens.size(), 1u);
    EXPECT_EQ(g.gens[0], P("z1", c));
    EXPECT_TRUE(g.complete);

    auto u = groebner(make_ideal(c, {"z1", "z1 + 1"}), 4);
    EXPECT_TRUE(u.is_unit());
    EXPECT_TRUE(u.complete);
}

TEST(Groebner, ReducesInputGenerators) {
    auto c = VarContext::paired(2);
    Rng rng(1);
    for (int t = 0; t < 10; ++t) {
        Ideal I{c, {}};
        for (int k = 0; k < 2; ++k) {
            Poly p(c);
            for (int j = 0; j < 3; ++j) {
                Exponent e(4, 0);
                e[random_int(rng, 0, 3)] += static_cast<std::uint32_t>(random_int(rng, 0, 2));
                e[random_int(rng, 0, 3)] += 1;
                p.add_term(e, GaussRat(random_int(rng, -3, 3)));
            }
            I.gens.push_back(p);
        }
        auto gb = groebner(I, 8);
        if (!gb.complete) continue;
        for (const auto& g : I.gens) EXPECT_TRUE(normal_form(g, gb).is_zero());
    }
}

TEST(Groebner, TruncationIsFlagged) {
    auto c = VarContext::paired(3);
    // the twisted cubic needs degree-3 S-polynomials; a cap of 2 cannot finish
    auto I = make_ideal(c, {"z2 - z1^2", "z3 - z1*z2"});
    auto gb = groebner(I, 2);
    EXPECT_FALSE(gb.complete);
    EXPECT_TRUE(groebner(I, 6).complete);
}

TEST(IdealMember, Examples) {
    auto c = VarContext::paired(3);
    EXPECT_EQ(ideal_member(P("z2^2 - z1^4", c), make_ideal(c, {"z2 - z1^2"}), 6), Membership::Yes);
    EXPECT_EQ(ideal_member(P("z1", c), make_ideal(c, {"z2"}), 6), Membership::No);
}

TEST(Eliminate, TwistedCubic) {
    auto c = VarContext::paired(3);
    auto E = eliminate(make_ideal(c, {"z2 - z1^2", "z3 - z1^3"}), {0}, 8);
    EXPECT_TRUE(E.complete);
    EXPECT_EQ(ideal_member(P("z2^3 - z3^2", c), E, 8), Membership::Yes);
    // oracle: every output generator vanishes along t -> (t, t^2, t^3)
    Rng rng(2);
    for (int k = 0; k < 500; ++k) {
        GaussRat t = random_gauss_int(rng, 20);
        std::vector<GaussRat> pt = {t, t * t, t * t * t, GaussRat(0), GaussRat(0), GaussRat(0)};
        for (const auto& g : E.gens) {
            EXPECT_FALSE(g.uses_var(0));
            EXPECT_TRUE(g.evaluate(pt).is_zero());
        }
    }
}

TEST(Eliminate, HyperbolaGivesZeroIdeal) {
    auto c = VarContext::paired(1);
    auto E = eliminate(make_ideal(c, {"z1*zb1 - 1"}), {1}, 6);
    EXPECT_TRUE(E.is_zero_ideal());
    EXPECT_TRUE(E.complete);
}

TEST(IdealMember, YesImpliesVanishingOnSampledZeros) {
    auto c = VarContext::paired(2);
    auto I = make_ideal(c, {"z2 - z1^2", "zb1 - z1 - 1"});
    Rng rng(4);
    std::vector<Poly> candidates = {P("z2*zb1 - z1^3 - z1^2", c), P("zb1^2 - 2*z1 - 1 - z2", c), P("z1*z2", c)};
    for (const auto& p : candidates) {
        auto verdict = ideal_member(p, I, 6);
        if (verdict != Membership::Yes) continue;
        for (int k = 0; k < 50; ++k) {
            GaussRat t = random_gauss_int(rng, 9);
            std::vector<GaussRat> pt = {t, t * t, t + GaussRat(1), GaussRat(0)};
            EXPECT_TRUE(p.evaluate(pt).is_zero());
        }
    }
    EXPECT_EQ(ideal_member(candidates[0], I, 6), Membership::Yes);
    EXPECT_EQ(ideal_member(candidates[1], I, 6), Membership::Yes);
    EXPECT_EQ(ideal_member(candidates[2], I, 6), Membership::No);
}
