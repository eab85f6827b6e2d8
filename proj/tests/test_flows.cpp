#include <gtest/gtest.h>

#include "crkit/corpus.hpp"
#include "crkit/flows.hpp"

using namespace crkit;

namespace {

VectorField field(const Ctx& ctx, const std::vector<std::string>& coeffs) {
    std::vector<Poly> c;
    for (const auto& s : coeffs) c.push_back(parse_poly(s, ctx));
    return VectorField(ctx, c);
}

double dist(const CPoint& a, const CPoint& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST(Flow, Translation) {
    auto ctx = VarContext::paired(2);
    auto x = flow(VectorField::partial(ctx, 0), CPoint(4, 0.0), 1.0, FlowConfig{});
    EXPECT_LT(dist(x, CPoint{1.0, 0.0, 0.0, 0.0}), 1e-12);
}

TEST(Flow, Exponential) {
    auto ctx = VarContext::paired(1);
    auto X = field(ctx, {"z1", "0"});
    auto x = flow(X, CPoint{1.0, 0.0}, 1.0, FlowConfig{});
    EXPECT_NEAR(std::abs(x[0] - std::exp(1.0)), 0.0, 1e-8);
}

TEST(Flow, LinearModel) {
    auto ctx = VarContext::paired(3);
    auto Y = field(ctx, {"0", "1", "z1", "0", "0", "0"});
    double x0 = 0.7, t = 0.3;
    auto x = flow(Y, CPoint{x0, 0.0, 0.0, 0.0, 0.0, 0.0}, t, FlowConfig{});
    EXPECT_NEAR(std::abs(x[2] - x0 * t), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(x[1] - t), 0.0, 1e-12);
}

TEST(Flow, GroupProperty) {
    auto ctx = VarContext::paired(2);
    auto X = field(ctx, {"z2^2", "-z1", "0", "0"});
    CPoint p{0.3, {0.1, 0.2}, 0.0, 0.0};
    FlowConfig cfg;
    std::complex<double> t1(0.04, 0.02), t2(0.03, -0.05);
    auto a = flow(X, flow(X, p, t1, cfg), t2, cfg);
    auto b = flow(X, p, t1 + t2, cfg);
    EXPECT_LT(dist(a, b), 1e-6);
}

TEST(Flow, StepHalvingConverges) {
    auto ctx = VarContext::paired(1);
    auto X = field(ctx, {"z1^2 + 1", "0"});
    FlowConfig coarse, fine;
    coarse.h = 2e-2;
    fine.h = 1e-2;
    double exact = std::tan(std::atan(0.2) + 0.5);
    double e1 = std::abs(flow(X, CPoint{0.2, 0.0}, 0.5, coarse)[0] - exact);
    double e2 = std::abs(flow(X, CPoint{0.2, 0.0}, 0.5, fine)[0] - exact);
    EXPECT_GT(e1 / e2, 10.0);
}

TEST(Flow, Divergence) {
    auto ctx = VarContext::paired(1);
    auto X = field(ctx, {"z1^3", "0"});
    EXPECT_THROW(flow(X, CPoint{10.0, 0.0}, 1.0, FlowConfig{}), FlowDivergence);
}

TEST(OrbitNumeric, Examples) {
    auto ctx = VarContext::paired(3);
    auto L1 = VectorField::partial(ctx, 0);
    auto L2 = field(ctx, {"0", "1", "z1", "0", "0", "0"});
    EXPECT_EQ(orbit_dim_numeric({L1, L2}, CPoint(6, 0.0), FlowConfig{}, 1).rank, 3);
    auto c2 = VarContext::paired(2);
    EXPECT_EQ(orbit_dim_numeric({VectorField::partial(c2, 0)}, CPoint(4, 0.0), FlowConfig{}, 1).rank, 1);
    EXPECT_EQ(orbit_dim_numeric(corpus::heisenberg2(), PointC{0, 0}, FlowConfig{}, 1).rank, 3);
}

TEST(OrbitNumeric, RankNondecreasingInWordLength) {
    auto r = orbit_dim_numeric(corpus::c3_remark(), PointC{0, 0, 0}, FlowConfig{}, 4);
    int best = 0;
    for (int v : r.rank_by_length) {
        best = std::max(best, v);
        EXPECT_LE(v, r.rank);
    }
    EXPECT_EQ(best, r.rank);
}

TEST(OrbitNumeric, MatchesSymbolicSpanRank) {
    for (const auto& e : corpus::all()) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            int symbolic = 0, numeric = 0;
            if (auto g = std::get_if<GraphManifold>(&e.manifold)) {
                symbolic = lie_saturation(*g, g->base_point).span_rank_at_p;
                numeric = orbit_dim_numeric(*g, g->base_point, FlowConfig{}, seed).rank;
            } else {
                const auto& M = std::get<ImplicitManifold>(e.manifold);
                symbolic = lie_saturation(M, *M.base_point, seed).span_rank_at_p;
                numeric = orbit_dim_numeric(M, *M.base_point, FlowConfig{}, seed).rank;
            }
            EXPECT_EQ(numeric, symbolic) << e.name << " seed " << seed;
        }
    }
}
