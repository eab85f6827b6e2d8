#include <gtest/gtest.h>

#include "crkit/corpus.hpp"
#include "crkit/transcendence.hpp"

using namespace crkit;

namespace {

SeriesMap series_map(int n_in, int order, const std::vector<std::string>& comps) {
    SeriesMap f;
    f.n_in = n_in;
    f.order = order;
    for (const auto& c : comps) f.components.push_back(parse_series(c, n_in));
    return f;
}

Poly cert_poly(const std::string& s, const DependenceCertificate& c) { return parse_poly(s, c.P.ctx()); }

}  // namespace

TEST(Series, SinExpansion) {
    auto f = series_map(1, 7, {"sin"});
    EXPECT_EQ(f.exact(0), parse_poly("z1 - z1^3/6 + z1^5/120 - z1^7/5040", f.context()));
    auto g = series_map(1, 5, {"sin(sin(z1))"});
    EXPECT_EQ(g.exact(0), parse_poly("z1 - z1^3/3 + z1^5/10", g.context()));
    auto e = series_map(2, 3, {"exp(z1 + z2) - 1"});
    EXPECT_EQ(e.exact(0), parse_poly("z1 + z2 + (z1+z2)^2/2 + (z1+z2)^3/6", e.context()));
    auto c = series_map(1, 4, {"cos(z1)"});
    EXPECT_EQ(c.exact(0), parse_poly("1 - z1^2/2 + z1^4/24", c.context()));
}

TEST(Series, ModPAgreesWithExact) {
    auto f = series_map(1, 15, {"iterate:sin:3"});
    auto exact = f.components[0]->eval<GaussRat>(1, 15);
    auto modp = f.components[0]->eval<ModP>(1, 15);
    ASSERT_EQ(exact.terms.size(), modp.terms.size());
    for (const auto& [e, c] : exact.terms) EXPECT_EQ(ModP::from(c), modp.terms.at(e));
}

TEST(Series, ParseErrors) {
    EXPECT_THROW(parse_series("sin(z1", 1), std::invalid_argument);
    EXPECT_THROW(parse_series("z3", 2), std::invalid_argument);
    EXPECT_THROW(parse_series("tan(z1)", 1), std::invalid_argument);
    EXPECT_THROW(series_map(1, 5, {"exp(z1 + 1)"}).exact(0), std::invalid_argument);
}

TEST(ModPField, Arithmetic) {
    ModP a(5), b(-3);
    EXPECT_EQ(a + b, ModP(2));
    EXPECT_EQ(a * a.inverse(), ModP(1));
    ModP i = ModP::from(GaussRat::i());
    EXPECT_EQ(i * i, ModP(-1));
    EXPECT_EQ(ModP::from(GaussRat(Rational(1, 3))) * ModP(3), ModP(1));
}

TEST(DependenceSearch, Examples) {
    auto f = series_map(1, 10, {"z1^2", "z1^3"});
    auto r = dependence_search(f, {0, 1}, 0, 3, 10);
    ASSERT_TRUE(r.certificate);
    EXPECT_EQ(r.certificate->P, cert_poly("x1^3 - x2^2", *r.certificate));
    EXPECT_GE(r.certificate->residual_order, 10);
    EXPECT_TRUE(verify_certificate(*r.certificate, f, 10));

    auto g = series_map(1, 10, {"z1", "1 + z1"});
    auto rg = dependence_search(g, {0, 1}, 1, 1, 10);
    ASSERT_TRUE(rg.certificate);
    EXPECT_EQ(rg.certificate->P, cert_poly("x2 - x1 - 1", *rg.certificate));

    auto s = series_map(1, 20, {"sin"});
    auto rs = dependence_search(s, {0}, 4, 4, 20);
    EXPECT_FALSE(rs.certificate);
    EXPECT_GT(rs.order_used, 20);
}

TEST(DependenceSearch, FixedOrderSeriesStaysAtRequestedOrder) {
    SeriesMap f;
    f.n_in = 1;
    f.order = 20;
    f.components.push_back(SeriesExpr::raw_series(series_map(1, 20, {"sin"}).exact(0), 20));
    auto r = dependence_search(f, {0}, 4, 4, 20);
    EXPECT_TRUE(r.underdetermined_at_requested);
    EXPECT_LE(r.order_used, 20);
    // a kernel exists at this truncation; any certificate still has residual 0 through N
    if (r.certificate) EXPECT_TRUE(verify_certificate(*r.certificate, f, 20));
}

TEST(Trdeg, Examples) {
    auto f = series_map(1, 10, {"z1^2", "z1^3"});
    // over the constants the pair has one independent member; over C(z) both are algebraic
    EXPECT_EQ(trdeg_estimate(f, 0, 3, 10).estimate, 1);
    EXPECT_EQ(trdeg_estimate(f, 4, 4, 10).estimate, 0);
    auto id = series_map(1, 10, {"z1"});
    auto r = trdeg_estimate(id, 4, 4, 10);
    EXPECT_EQ(r.estimate, 0);
    ASSERT_EQ(r.dependents.size(), 1u);
    EXPECT_EQ(r.dependents[0].second.P, cert_poly("x1 - z1", r.dependents[0].second));
}

TEST(Trdeg, IteratedSinFamily) {
    auto f = series_map(1, 20, {"iterate:sin:1", "iterate:sin:2", "iterate:sin:3"});
    auto r = trdeg_estimate(f, 4, 4, 20);
    EXPECT_EQ(r.estimate, 3);
    EXPECT_TRUE(r.underdetermined_at_requested);
}

TEST(Trdeg, PolynomialComponentsAreAlgebraic) {
    auto f = series_map(2, 12, {"z1^2 + z2", "z1*z2 - 3", "i*z2^3"});
    auto r = trdeg_estimate(f, 4, 4, 12);
    EXPECT_EQ(r.estimate, 0);
    for (const auto& [j, c] : r.dependents) EXPECT_TRUE(verify_certificate(c, f, c.residual_order));
}

TEST(Trdeg, PermutationInvariant) {
    auto f = series_map(1, 12, {"z1^2", "sin(z1)", "z1^3"});
    auto g = series_map(1, 12, {"sin(z1)", "z1^3", "z1^2"});
    EXPECT_EQ(trdeg_estimate(f, 3, 3, 12).estimate, trdeg_estimate(g, 3, 3, 12).estimate);
}

TEST(Trdeg, MonotoneInBounds) {
    auto f = series_map(1, 12, {"z1^2", "exp(z1) - 1", "z1^3"});
    int prev = 100;
    for (int D = 1; D <= 4; ++D) {
        int k = trdeg_estimate(f, D, D, 12).estimate;
        EXPECT_LE(k, prev);
        prev = k;
    }
    EXPECT_EQ(prev, 1);
}

TEST(Perturbation, Examples) {
    auto id = series_map(1, 12, {"z1"});
    auto p = perturbation_builder(id, 2, {0});
    EXPECT_EQ(p.exact(0), series_map(1, 12, {"z1 + sin(z1)^2"}).exact(0));

    auto prod = series_map(3, 10, {"z1", "z2", "z3"});
    auto q = perturbation_builder(prod, 1, {1});
    EXPECT_EQ(q.exact(0), prod.exact(0));
    EXPECT_EQ(q.exact(2), prod.exact(2));
    EXPECT_NE(q.exact(1), prod.exact(1));

    auto big = perturbation_builder(id, 12, {0});
    EXPECT_EQ(big.exact(0, 11), id.exact(0, 11));

    EXPECT_THROW(perturbation_builder(series_map(1, 5, {"3"}), 1, {0}), std::invalid_argument);
}

TEST(MapsInto, Examples) {
    auto H = corpus::heisenberg2();
    EXPECT_TRUE(check_maps_into(series_map(2, 8, {"z1", "z2"}), H, H, 8).holds);
    auto P = corpus::productC3();
    EXPECT_TRUE(check_maps_into(series_map(3, 8, {"z1", "z2 + z2^2", "z3"}), P, P, 8).holds);
    auto bad = check_maps_into(series_map(2, 8, {"z1", "z2 + z1"}), H, H, 8);
    EXPECT_FALSE(bad.holds);
    auto pert = perturbation_builder(series_map(3, 10, {"z1", "z2", "z3"}), 2, {1});
    EXPECT_TRUE(check_maps_into(pert, P, P, 10).holds);
}

TEST(TrdegInequality, ConstructedInstances) {
    auto H = corpus::heisenberg2();
    auto r0 = trdeg_inequality_check(series_map(2, 10, {"z1", "z2"}), H, H, 4, 4, 10, 1);
    EXPECT_TRUE(r0.holds);
    EXPECT_EQ(r0.estimate, 0);
    EXPECT_EQ(r0.kappa, 0);

    auto P = corpus::productC3();
    auto r1 = trdeg_inequality_check(series_map(3, 10, {"z1", "z2 + z2^2", "z3"}), P, P, 4, 4, 10, 1);
    EXPECT_TRUE(r1.holds);
    EXPECT_EQ(r1.estimate, 0);
    EXPECT_EQ(r1.kappa, 1);

    auto pert = perturbation_builder(series_map(3, 10, {"z1", "z2", "z3"}), 1, {1});
    auto r2 = trdeg_inequality_check(pert, P, P, 4, 4, 10, 1);
    EXPECT_TRUE(r2.holds);
    EXPECT_EQ(r2.estimate, 1);
    EXPECT_EQ(r2.kappa, 1);

    EXPECT_THROW(trdeg_inequality_check(series_map(2, 8, {"z1", "z2 + z1"}), H, H, 2, 2, 8, 1), std::invalid_argument);
}
