#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crkit/manifold.hpp"

namespace crkit {

using AnyManifold = std::variant<GraphManifold, ImplicitManifold>;

inline GraphManifold make_graph(const std::string& name, int m, int d, const std::vector<std::string>& q) {
    Ctx ctx = VarContext::paired(m + d);
    std::vector<Poly> qs;
    for (const auto& s : q) qs.push_back(parse_poly(s, ctx));
    return GraphManifold(name, m, d, qs);
}

/// Recorded outcome of the corpus run at the base point.
struct ExpectedReport {
    int d = 0;
    std::string minimality;
    int orbit_rank = 0;
    /// graph form only
    std::optional<int> kappa, chi;
    std::string transversality;
};

struct CorpusEntry {
    std::string name;
    std::string summary;
    AnyManifold manifold;
    ExpectedReport expected;
};

namespace corpus {

inline GraphManifold heisenberg2() { return make_graph("heisenberg2", 1, 1, {"z2 - i*z1*zb1"}); }

/// Heisenberg times a line: the variable z2 never appears.
inline GraphManifold productC3() { return make_graph("productC3", 2, 1, {"z3 - i*z1*zb1"}); }

inline GraphManifold c3_remark() { return make_graph("c3_remark", 1, 2, {"z2 - i*z1*zb1", "z3 - i*z1^2*zb1^2"}); }

inline GraphManifold c4_prop1042() {
    return make_graph("c4_prop1042", 1, 3, {"z2 - i*z1*zb1", "z3 - i*z1*zb1*(z1^2 + zb1^2)", "z4 - i*z1^3*zb1^3"});
}

inline GraphManifold leviflat() { return make_graph("leviflat", 1, 1, {"z2"}); }

inline ImplicitManifold whitney_tube() {
    Ctx ctx = VarContext::paired(3);
    return make_implicit("whitney_tube", 3, {parse_poly("(z3+zb3)*(z1+zb1)^2/8 - (z2+zb2)^2/4", ctx)},
                         PointC{GaussRat(2), GaussRat(2), GaussRat(1)});
}

inline std::vector<CorpusEntry> all() {
    return {
        {"heisenberg2", "Heisenberg sphere model in C^2", heisenberg2(), {1, "minimal", 3, 0, 2, "transversal_at"}},
        {"productC3", "Heisenberg times a complex line in C^3", productC3(), {1, "minimal", 5, 1, 2, "transversal_at"}},
        {"whitney_tube", "Whitney umbrella tube in C^3", whitney_tube(), {1, "minimal", 5, std::nullopt, std::nullopt, "transversal_at"}},
        {"c3_remark", "codimension-2 model in C^3", c3_remark(), {2, "minimal", 4, 0, 3, "transversal_in"}},
        {"c4_prop1042", "minimal, not Segre-transversal, in C^4", c4_prop1042(), {3, "minimal", 5, 0, 4, "not_transversal"}},
        {"leviflat", "Levi-flat hyperplane in C^2", leviflat(), {1, "not_minimal", 2, 1, 1, "not_transversal"}},
    };
}

}  // namespace corpus
}  // namespace crkit
