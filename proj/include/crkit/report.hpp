#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crkit/corpus.hpp"
#include "crkit/cr_fields.hpp"
#include "crkit/flows.hpp"
#include "crkit/io.hpp"
#include "crkit/segre.hpp"
#include "crkit/transcendence.hpp"

namespace crkit {

/// Process exit statuses.
enum class Status { Ok = 0, Negative = 1, InputError = 2, Capped = 3 };

/// A JSON report body together with the status a check-style invocation should end with.
struct Outcome {
    json body = json::object();
    /// verdict was negative
    bool negative = false;
    /// some computation stopped at a cap or returned unknown
    bool capped = false;
};

namespace report {

inline json str_list(const std::vector<Poly>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back(to_string(p));
    return a;
}

inline ImplicitManifold implicit_of(const AnyManifold& any) {
    if (auto g = std::get_if<GraphManifold>(&any)) return as_implicit(*g);
    return std::get<ImplicitManifold>(any);
}

inline int dimension(const AnyManifold& any) {
    if (auto g = std::get_if<GraphManifold>(&any)) return g->n();
    return std::get<ImplicitManifold>(any).n;
}

inline const std::string& name_of(const AnyManifold& any) {
    if (auto g = std::get_if<GraphManifold>(&any)) return g->name;
    return std::get<ImplicitManifold>(any).name;
}

/// The declared base point, or a seeded real sample when none was given.
inline PointC base_point(const AnyManifold& any, std::uint64_t seed) {
    if (auto g = std::get_if<GraphManifold>(&any)) return g->base_point;
    const auto& M = std::get<ImplicitManifold>(any);
    if (M.base_point) return *M.base_point;
    Rng rng(derive_seed(seed, 11));
    auto p = sample_real(M, rng);
    if (!p) throw std::runtime_error("no point of " + M.name + " could be sampled; supply base_point");
    return *p;
}

inline const GraphManifold& require_graph(const AnyManifold& any, const std::string& what) {
    auto g = std::get_if<GraphManifold>(&any);
    if (!g) throw std::invalid_argument(what + " needs a manifold in graph form");
    return *g;
}

inline LieReport lie_at(const AnyManifold& any, const PointC& p, std::uint64_t seed) {
    if (auto g = std::get_if<GraphManifold>(&any)) return lie_saturation(*g, p);
    return lie_saturation(std::get<ImplicitManifold>(any), p, seed);
}

inline json lie_json(const LieReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["depth_reached"] = r.depth_reached;
    j["span_rank"] = r.span_rank_at_p;
    j["target_rank"] = r.target_rank;
    j["bracket_words"] = r.bracket_words;
    j["tangency_verified"] = r.tangency_verified;
    j["algebra_closed"] = r.closed;
    // a rank reached at the point is exact; a stall is a proof only when the algebra closed
    j["certified"] = r.verdict == MinimalityVerdict::Minimal || (r.verdict == MinimalityVerdict::NotMinimal && r.closed);
    return j;
}

inline json kappa_json(const KappaReport& k) {
    json j;
    j["kappa"] = k.kappa;
    j["chi"] = k.chi;
    j["witness_minor"] = to_string(k.witness_minor);
    j["exceptional_generators"] = str_list(k.exceptional_gens);
    j["exceptional_truncated"] = k.exceptional_truncated;
    j["coefficient_functions"] = k.coefficient_functions.size();
    j["generic_rank_trials"] = k.generic_rank_trials;
    j["stabilized"] = k.stabilized;
    j["certified"] = true;
    return j;
}

inline json transversal_json(const TransversalityReport& t) {
    json j;
    j["verdict"] = to_string(t.verdict);
    j["transversal"] = t.verdict != Transversality::NotTransversal;
    j["certified"] = t.certified;
    j["trials"] = t.trials;
    j["rank_in"] = t.rank_in;
    j["rank_at"] = t.rank_at;
    j["stacked_rows"] = t.stacked_rows;
    if (!t.witness_point.empty()) {
        j["witness_point"] = to_json(t.witness_point);
        j["witness_rows"] = t.witness_rows;
    }
    return j;
}

inline TransversalityReport transversal_of(const AnyManifold& any, const PointC& p, std::uint64_t seed) {
    if (auto g = std::get_if<GraphManifold>(&any)) return segre_transversal(*g, p, seed);
    return segre_transversal(std::get<ImplicitManifold>(any), p, seed);
}

inline json certificate_json(const DependenceCertificate& c, const SeriesMap& f) {
    json j;
    j["relation"] = to_string(c.P);
    j["dz"] = c.dz;
    j["dx"] = c.dx;
    j["components"] = c.components;
    j["residual_order"] = c.residual_order;
    j["verified"] = verify_certificate(c, f, c.residual_order);
    return j;
}

inline json trdeg_json(const TrdegReport& r, const SeriesMap& f) {
    json j;
    j["estimate"] = r.estimate;
    j["independent"] = r.independent;
    j["certificates"] = json::array();
    for (const auto& [k, c] : r.dependents) {
        json cj = certificate_json(c, f);
        cj["component"] = k;
        j["certificates"].push_back(cj);
    }
    j["max_order_used"] = r.max_order_used;
    j["underdetermined_at_requested_order"] = r.underdetermined_at_requested;
    j["unstable"] = r.unstable;
    j["label"] = r.label;
    return j;
}

}  // namespace report

inline Outcome analyze_report(const AnyManifold& any, std::uint64_t seed, int degree) {
    Outcome out;
    json& b = out.body;
    PointC p = report::base_point(any, seed);
    b["name"] = report::name_of(any);
    b["n"] = report::dimension(any);
    b["base_point"] = to_json(p);
    if (auto g = std::get_if<GraphManifold>(&any)) {
        b["form"] = "graph";
        b["codimension"] = {{"d", g->d}, {"certified", true}};
        b["cr_dimension"] = g->m;
        b["regular_at_base"] = true;
        b["cr_generic_at_base"] = {{"value", true}, {"certified", true}};
        b["kappa"] = report::kappa_json(kappa(*g, seed));
    } else {
        const auto& M = std::get<ImplicitManifold>(any);
        b["form"] = "implicit";
        auto cd = codimension(M, seed);
        b["codimension"] = {{"d", cd.d}, {"samples", cd.samples}, {"rank_fluctuation", cd.rank_fluctuation}, {"certified", false}};
        b["cr_dimension"] = M.n - cd.d;
        b["regular_at_base"] = regular_at(M, p, cd.d);
        auto cg = cr_generic_at(M, p, cd.d, derive_seed(seed, 3));
        b["cr_rank_at_base"] = cg.d1;
        b["cr_generic_at_base"] = {{"value", cg.cr_generic}, {"perturbed_samples", cg.perturbed_samples}, {"certified", false}};
        b["kappa"] = nullptr;
    }
    auto lie = report::lie_at(any, p, seed);
    b["minimality_at_base"] = report::lie_json(lie);
    Rng rng(derive_seed(seed, 5));
    auto q = sample_real(report::implicit_of(any), rng);
    if (q) {
        json gj = report::lie_json(report::lie_at(any, *q, seed));
        gj["point"] = to_json(*q);
        b["minimality_generic"] = gj;
    } else {
        b["minimality_generic"] = nullptr;
    }
    HolFieldsReport hol = std::holds_alternative<GraphManifold>(any)
                              ? tangent_hol_fields(std::get<GraphManifold>(any), degree, seed)
                              : tangent_hol_fields(std::get<ImplicitManifold>(any), degree, seed);
    json hj;
    hj["degree_bound"] = hol.degree_bound;
    hj["module_rank"] = hol.module_rank;
    hj["complete"] = hol.complete;
    hj["unknowns"] = hol.unknowns;
    hj["basis"] = json::array();
    for (const auto& v : hol.basis) hj["basis"].push_back(v.str());
    b["holomorphic_fields"] = hj;
    out.negative = lie.verdict == MinimalityVerdict::NotMinimal;
    out.capped = lie.verdict == MinimalityVerdict::Unknown || !hol.complete;
    return out;
}

inline Outcome segre_report(const AnyManifold& any, const std::optional<PointC>& point, int reciprocity_samples, std::uint64_t seed) {
    Outcome out;
    json& b = out.body;
    PointC q = point ? *point : report::base_point(any, seed);
    if (static_cast<int>(q.size()) != report::dimension(any)) throw std::invalid_argument("point has the wrong number of coordinates");
    auto S = std::holds_alternative<GraphManifold>(any) ? segre_variety(std::get<GraphManifold>(any), q)
                                                        : segre_variety(std::get<ImplicitManifold>(any), q);
    b["point"] = to_json(q);
    b["ideal"] = report::str_list(S.ideal.gens);
    if (reciprocity_samples > 0) {
        auto M = report::implicit_of(any);
        Rng rng(derive_seed(seed, 7));
        int checked = 0, incident = 0, failures = 0;
        for (int s = 0; s < reciprocity_samples; ++s) {
            auto p1 = sample_real(M, rng);
            if (!p1) continue;
            std::optional<PointC> p2;
            // alternate between incident pairs and independent pairs
            if (s % 2 == 0) p2 = std::holds_alternative<GraphManifold>(any) ? sample_segre_point(std::get<GraphManifold>(any), *p1, rng)
                                                                            : sample_segre_point(M, *p1, rng);
            else p2 = sample_real(M, rng);
            if (!p2) continue;
            bool a = segre_contains(M, *p2, *p1), c = segre_contains(M, *p1, *p2);
            ++checked;
            if (a && c) ++incident;
            if (a != c) ++failures;
        }
        b["reciprocity"] = {{"samples", checked}, {"incident_pairs", incident}, {"failures", failures}, {"holds", failures == 0}};
        out.negative = failures > 0;
    }
    return out;
}

inline Outcome transversal_report(const AnyManifold& any, std::uint64_t seed) {
    Outcome out;
    PointC p = report::base_point(any, seed);
    auto t = report::transversal_of(any, p, seed);
    out.body = report::transversal_json(t);
    out.body["point"] = to_json(p);
    out.negative = t.verdict == Transversality::NotTransversal;
    return out;
}

inline Outcome kappa_report(const AnyManifold& any, std::uint64_t seed) {
    const auto& G = report::require_graph(any, "kappa");
    Outcome out;
    auto k = kappa(G, seed);
    out.body = report::kappa_json(k);
    out.body["n"] = G.n();
    out.body["m"] = G.m;
    out.body["identity_holds"] = k.kappa + k.chi == G.n() && k.kappa <= G.m;
    return out;
}

inline Outcome straighten_report(const AnyManifold& any, std::uint64_t seed) {
    const auto& G = report::require_graph(any, "straighten");
    Outcome out;
    json& b = out.body;
    int k = kappa(G, seed).kappa;
    b["kappa"] = k;
    if (k < 1) {
        b["reduced"] = nullptr;
        b["steps"] = 0;
        b["reason"] = "kappa is 0, so no product factor exists";
        out.negative = true;
        return out;
    }
    auto r = straighten_linear(G, seed);
    if (!r) {
        b["reduced"] = nullptr;
        b["steps"] = 0;
        b["reason"] = "no constant kernel direction; a nonlinear straightening would be needed";
        out.capped = true;
        return out;
    }
    b["steps"] = r->steps;
    b["kappa_after"] = r->kappa_after;
    b["reduced"] = manifold_to_json(AnyManifold(r->reduced));
    b["changes"] = json::array();
    for (const auto& A : r->changes) {
        json rows = json::array();
        for (std::size_t i = 0; i < A.rows(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < A.cols(); ++j) row.push_back(to_json(A(i, j)));
            rows.push_back(row);
        }
        b["changes"].push_back(rows);
    }
    b["complete"] = r->steps == k;
    out.capped = r->steps < k;
    return out;
}

inline Outcome orbit_report(const AnyManifold& any, std::uint64_t seed, bool numeric) {
    Outcome out;
    json& b = out.body;
    PointC p = report::base_point(any, seed);
    auto lie = report::lie_at(any, p, seed);
    b["point"] = to_json(p);
    b["lie_saturation"] = report::lie_json(lie);
    if (numeric) {
        FlowConfig cfg;
        auto r = std::holds_alternative<GraphManifold>(any) ? orbit_dim_numeric(std::get<GraphManifold>(any), p, cfg, seed)
                                                            : orbit_dim_numeric(std::get<ImplicitManifold>(any), p, cfg, seed);
        b["numeric"] = {{"orbit_dim", r.rank},
                        {"rank_by_length", r.rank_by_length},
                        {"words_tried", r.words_tried},
                        {"delta", r.delta_used},
                        {"svd_tol", cfg.svd_tol},
                        {"certified", false}};
        b["agree"] = r.rank == lie.span_rank_at_p;
    }
    out.negative = lie.verdict == MinimalityVerdict::NotMinimal;
    out.capped = lie.verdict == MinimalityVerdict::Unknown;
    return out;
}

/// Points file: {"sources": [point...], "double"?: {"source": manifold, "map": [poly...], "z": point, "w": point, "k"?: int}}.
inline Outcome reflect_report(const AnyManifold& target, const json& points, std::uint64_t seed) {
    Outcome out;
    json& b = out.body;
    if (!points.is_object()) throw std::invalid_argument("points file must be a JSON object");
    auto Mp = report::implicit_of(target);
    if (points.contains("sources")) {
        std::vector<PointC> src;
        for (const auto& s : points["sources"]) {
            src.push_back(point_from_json(s));
            if (static_cast<int>(src.back().size()) != Mp.n) throw std::invalid_argument("source point has the wrong dimension");
        }
        auto R = first_reflection(Mp, src, seed);
        json fj;
        fj["generators"] = report::str_list(R.ideal.gens);
        fj["dim"] = R.dim ? json(*R.dim) : json(nullptr);
        fj["samples"] = R.samples.size();
        fj["certified"] = false;
        b["first_reflection"] = fj;
        if (!R.dim) out.capped = true;
    }
    if (points.contains("double")) {
        const auto& dj = points["double"];
        const auto& Gp = report::require_graph(target, "double reflection");
        AnyManifold src = manifold_from_json(dj.at("source").dump(), "double.source");
        const auto& G = report::require_graph(src, "double reflection");
        PolyMap f;
        for (const auto& s : dj.at("map")) f.push_back(parse_poly(s.get<std::string>(), G.ctx));
        if (static_cast<int>(f.size()) != Gp.n()) throw std::invalid_argument("map needs one component per target coordinate");
        auto dr = double_reflection_sample(f, G, Gp, point_from_json(dj.at("z")), point_from_json(dj.at("w")), dj.value("k", 2), seed);
        json r;
        r["dim"] = dr.dim ? json(*dr.dim) : json(nullptr);
        r["dim_next"] = dr.dim_next ? json(*dr.dim_next) : json(nullptr);
        r["stabilized"] = dr.stabilized;
        r["k"] = dr.k;
        r["certified"] = false;
        b["double_reflection"] = r;
        if (!dr.stabilized) out.capped = true;
    }
    return out;
}

inline Outcome trdeg_report(const SeriesMap& f, int Dz, int Dx, int N) {
    Outcome out;
    auto r = trdeg_estimate(f, Dz, Dx, N);
    out.body = report::trdeg_json(r, f);
    out.body["bounds"] = {Dz, Dx};
    out.body["order"] = N;
    out.capped = r.unstable;
    return out;
}

inline Outcome maps_into_report(const SeriesMap& f, const AnyManifold& src, const AnyManifold& dst, int N) {
    const auto& M = report::require_graph(src, "maps-into");
    const auto& Mp = report::require_graph(dst, "maps-into");
    Outcome out;
    auto r = check_maps_into(f, M, Mp, N);
    out.body["holds"] = r.holds;
    out.body["order"] = r.order;
    json res = json::array();
    for (const auto& p : r.residuals)
        if (!p.is_zero()) res.push_back(to_string(p));
    out.body["nonzero_residuals"] = res;
    out.body["certified"] = true;
    out.body["label"] = "containment through the truncation order";
    out.negative = !r.holds;
    return out;
}

inline Outcome perturb_report(const SeriesMap& f, int a, const std::vector<std::size_t>& slots) {
    Outcome out;
    auto g = perturbation_builder(f, a, slots);
    out.body["series"] = series_to_json(g);
    out.body["a"] = a;
    out.body["slots"] = slots;
    return out;
}

/// Runs the built-in examples and compares each against its recorded expectation.
inline Outcome corpus_report(std::uint64_t seed) {
    Outcome out;
    json list = json::array();
    bool all = true;
    for (const auto& e : corpus::all()) {
        json obs;
        PointC p = report::base_point(e.manifold, seed);
        auto imp = report::implicit_of(e.manifold);
        if (auto g = std::get_if<GraphManifold>(&e.manifold)) obs["d"] = g->d;
        else obs["d"] = codimension(imp, seed).d;
        auto lie = report::lie_at(e.manifold, p, seed);
        obs["minimality"] = to_string(lie.verdict);
        obs["orbit_rank"] = lie.span_rank_at_p;
        if (auto g = std::get_if<GraphManifold>(&e.manifold)) {
            auto k = kappa(*g, seed);
            obs["kappa"] = k.kappa;
            obs["chi"] = k.chi;
        } else {
            obs["kappa"] = nullptr;
            obs["chi"] = nullptr;
        }
        obs["transversality"] = to_string(report::transversal_of(e.manifold, p, seed).verdict);
        json exp;
        exp["d"] = e.expected.d;
        exp["minimality"] = e.expected.minimality;
        exp["orbit_rank"] = e.expected.orbit_rank;
        exp["kappa"] = e.expected.kappa ? json(*e.expected.kappa) : json(nullptr);
        exp["chi"] = e.expected.chi ? json(*e.expected.chi) : json(nullptr);
        exp["transversality"] = e.expected.transversality;
        bool match = obs == exp;
        all = all && match;
        list.push_back({{"name", e.name}, {"summary", e.summary}, {"observed", obs}, {"expected", exp}, {"match", match}});
    }
    out.body["examples"] = list;
    out.body["all_match"] = all;
    out.negative = !all;
    return out;
}

}  // namespace crkit
