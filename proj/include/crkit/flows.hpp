#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "crkit/cr_fields.hpp"
#include "crkit/random.hpp"

namespace crkit {

using CPoint = std::vector<std::complex<double>>;

struct FlowConfig {
    double h = 1e-3;
    double delta = 0.1;
    /// word length cap; 0 means 3n
    int k_max = 0;
    double svd_tol = 1e-6;
    double fd_step = 1e-5;
    int words_per_length = 4;
    double divergence_bound = 1e6;
};

class FlowDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline CPoint to_cpoint(const PointC& p) {
    CPoint r;
    for (const auto& x : p) r.push_back(x.to_complex());
    return r;
}

/// exp(tX)(p) by RK4 along the segment s ↦ s·t, s ∈ [0, 1].
inline CPoint flow(const VectorField& X, const CPoint& p, std::complex<double> t, const FlowConfig& cfg) {
    if (cfg.h <= 0) throw std::invalid_argument("flow step must be positive");
    int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / cfg.h)));
    std::complex<double> dt = t / static_cast<double>(steps);
    CPoint x = p;
    std::size_t n = x.size();
    auto rhs = [&](const CPoint& y) { return X.evaluate(y); };
    CPoint tmp(n);
    for (int s = 0; s < steps; ++s) {
        auto k1 = rhs(x);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        auto k2 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        auto k3 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
        auto k4 = rhs(tmp);
        double norm = 0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            norm = std::max(norm, std::abs(x[i]));
        }
        if (!std::isfinite(norm) || norm > cfg.divergence_bound) throw FlowDivergence("flow diverged");
    }
    return x;
}

/// Γ(t₁,…,t_k) = exp(t_k X_{i_k}) ∘ … ∘ exp(t₁ X_{i₁})(p).
inline CPoint concatenated_flow(const std::vector<VectorField>& fields, const std::vector<int>& word,
                                const std::vector<std::complex<double>>& times, const CPoint& p, const FlowConfig& cfg) {
    CPoint x = p;
    for (std::size_t j = 0; j < word.size(); ++j) x = flow(fields[static_cast<std::size_t>(word[j])], x, times[j], cfg);
    return x;
}

/// Rank of dΓ at the given times: central differences in each complex time, SVD with a relative threshold.
inline int concatenated_flow_rank(const std::vector<VectorField>& fields, const std::vector<int>& word,
                                  const std::vector<std::complex<double>>& times, const CPoint& p, const FlowConfig& cfg,
                                  std::vector<double>* singular_values = nullptr) {
    Eigen::MatrixXcd D(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(word.size()));
    for (std::size_t j = 0; j < word.size(); ++j) {
        auto plus = times, minus = times;
        plus[j] += cfg.fd_step;
        minus[j] -= cfg.fd_step;
        CPoint a = concatenated_flow(fields, word, plus, p, cfg), b = concatenated_flow(fields, word, minus, p, cfg);
        for (std::size_t i = 0; i < p.size(); ++i)
            D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (a[i] - b[i]) / (2.0 * cfg.fd_step);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
    const auto& s = svd.singularValues();
    if (singular_values) singular_values->assign(s.data(), s.data() + s.size());
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cfg.svd_tol * s(0)) ++r;
    return r;
}

struct OrbitNumericReport {
    int rank = 0;
    /// best rank found for each word length 1..k_max
    std::vector<int> rank_by_length;
    int words_tried = 0;
    double delta_used = 0;
};

/// Maximum rank of concatenated flow maps over random words and small complex times.
inline OrbitNumericReport orbit_dim_numeric(const std::vector<VectorField>& fields, const CPoint& p, FlowConfig cfg,
                                            std::uint64_t seed) {
    if (fields.empty()) throw std::invalid_argument("orbit_dim_numeric needs at least one field");
    int n = static_cast<int>(p.size());
    int k_max = cfg.k_max > 0 ? cfg.k_max : 3 * std::max(1, n / 2);
    for (int attempt = 0; attempt < 4; ++attempt) {
        Rng rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        OrbitNumericReport rep;
        rep.delta_used = cfg.delta;
        try {
            for (int k = 1; k <= k_max; ++k) {
                int best = 0;
                for (int w = 0; w < cfg.words_per_length; ++w) {
                    std::vector<int> word;
                    std::vector<std::complex<double>> times;
                    for (int j = 0; j < k; ++j) {
                        // cycling through the fields first guarantees every field appears in longer words
                        int idx = (w == 0) ? j % static_cast<int>(fields.size())
                                           : static_cast<int>(random_int(rng, 0, static_cast<long>(fields.size()) - 1));
                        word.push_back(idx);
                        std::complex<double> t(unit(rng), unit(rng));
                        times.push_back(t * (cfg.delta / std::sqrt(2.0)));
                    }
                    best = std::max(best, concatenated_flow_rank(fields, word, times, p, cfg));
                    ++rep.words_tried;
                }
                rep.rank_by_length.push_back(best);
                rep.rank = std::max(rep.rank, best);
            }
            return rep;
        } catch (const FlowDivergence&) {
            cfg.delta /= 4;
        }
    }
    throw FlowDivergence("flow diverged at every retried delta");
}

/// CR fields (both types) of a graph manifold at p^c.
inline OrbitNumericReport orbit_dim_numeric(const GraphManifold& G, const PointC& p, const FlowConfig& cfg, std::uint64_t seed) {
    auto f = cr_vector_fields(G);
    std::vector<VectorField> gens = f.hol;
    gens.insert(gens.end(), f.anti.begin(), f.anti.end());
    if (gens.empty()) return {};
    return orbit_dim_numeric(gens, to_cpoint(complexified_point(p)), cfg, seed);
}

inline OrbitNumericReport orbit_dim_numeric(const ImplicitManifold& M, const PointC& p, const FlowConfig& cfg, std::uint64_t seed) {
    auto f = cr_vector_fields(M, p, seed);
    std::vector<VectorField> gens = f.hol;
    gens.insert(gens.end(), f.anti.begin(), f.anti.end());
    if (gens.empty()) return {};
    return orbit_dim_numeric(gens, to_cpoint(complexified_point(p)), cfg, seed);
}

}  // namespace crkit
