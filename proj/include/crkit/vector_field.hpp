#pragma once

#include <complex>
#include <string>
#include <vector>

#include "crkit/poly_io.hpp"

namespace crkit {

enum class FieldKind { Holomorphic, Antiholomorphic, Mixed };

/// Derivation Σ c_k ∂/∂x_k over every variable of its context.
class VectorField {
public:
    VectorField() = default;
    VectorField(Ctx ctx, std::vector<Poly> coeffs, FieldKind kind = FieldKind::Mixed)
        : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)), kind_(kind) {
        if (coeffs_.size() != ctx_->size()) throw std::invalid_argument("vector field needs one coefficient per variable");
        for (auto& c : coeffs_)
            if (!c.ctx()) c = Poly(ctx_);
    }

    static VectorField partial(const Ctx& ctx, std::size_t var) {
        std::vector<Poly> c(ctx->size(), Poly(ctx));
        c[var] = Poly::constant(ctx, GaussRat(1));
        return VectorField(ctx, c, kind_of(*ctx, var));
    }

    const Ctx& ctx() const { return ctx_; }
    const std::vector<Poly>& coeffs() const { return coeffs_; }
    const Poly& coeff(std::size_t k) const { return coeffs_[k]; }
    FieldKind kind() const { return kind_; }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }

    Poly apply(const Poly& p) const {
        Poly r(ctx_);
        for (std::size_t k = 0; k < coeffs_.size(); ++k)
            if (!coeffs_[k].is_zero() && p.uses_var(k)) r += coeffs_[k] * p.derivative(k);
        return r;
    }

    std::vector<GaussRat> evaluate(const std::vector<GaussRat>& pt) const {
        std::vector<GaussRat> v;
        for (const auto& c : coeffs_) v.push_back(c.is_zero() ? GaussRat(0) : c.evaluate(pt));
        return v;
    }

    std::vector<std::complex<double>> evaluate(const std::vector<std::complex<double>>& pt) const {
        std::vector<std::complex<double>> v;
        for (const auto& c : coeffs_) v.push_back(c.is_zero() ? std::complex<double>(0) : c.evaluate(pt));
        return v;
    }

    VectorField operator*(const GaussRat& s) const {
        VectorField r = *this;
        for (auto& c : r.coeffs_) c *= s;
        return r;
    }
    VectorField operator+(const VectorField& o) const {
        VectorField r = *this;
        for (std::size_t k = 0; k < coeffs_.size(); ++k) r.coeffs_[k] += o.coeffs_[k];
        if (o.kind_ != kind_) r.kind_ = FieldKind::Mixed;
        return r;
    }
    friend bool operator==(const VectorField& a, const VectorField& b) { return a.coeffs_ == b.coeffs_; }

    std::string str() const {
        std::string s;
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            if (coeffs_[k].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + to_string(coeffs_[k]) + ")*d/d" + ctx_->var(k).name;
        }
        return s.empty() ? "0" : s;
    }

private:
    static FieldKind kind_of(const VarContext& ctx, std::size_t var) {
        switch (ctx.var(var).kind) {
            case VarKind::Holomorphic: return FieldKind::Holomorphic;
            case VarKind::Antiholomorphic: return FieldKind::Antiholomorphic;
            default: return FieldKind::Mixed;
        }
    }

    Ctx ctx_;
    std::vector<Poly> coeffs_;
    FieldKind kind_ = FieldKind::Mixed;
};

/// [X, Y]_k = X(Y_k) − Y(X_k).
inline VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    if (!same_context(X.ctx(), Y.ctx())) throw std::invalid_argument("lie_bracket: different contexts");
    std::vector<Poly> c;
    for (std::size_t k = 0; k < X.coeffs().size(); ++k) c.push_back(X.apply(Y.coeff(k)) - Y.apply(X.coeff(k)));
    FieldKind kind = X.kind() == Y.kind() ? X.kind() : FieldKind::Mixed;
    return VectorField(X.ctx(), c, kind);
}

/// Conjugate field: coefficient of ∂/∂x̄_k is the conjugate of the coefficient of ∂/∂x_k.
inline VectorField conjugate(const VectorField& X) {
    const auto& ctx = *X.ctx();
    std::vector<Poly> c(ctx.size(), Poly(X.ctx()));
    for (std::size_t k = 0; k < ctx.size(); ++k) {
        if (X.coeff(k).is_zero()) continue;
        int partner = ctx.var(k).partner;
        if (partner < 0) throw std::invalid_argument("no conjugate partner for variable " + ctx.var(k).name);
        c[static_cast<std::size_t>(partner)] = conjugate(X.coeff(k));
    }
    FieldKind kind = X.kind() == FieldKind::Holomorphic       ? FieldKind::Antiholomorphic
                     : X.kind() == FieldKind::Antiholomorphic ? FieldKind::Holomorphic
                                                              : FieldKind::Mixed;
    return VectorField(X.ctx(), c, kind);
}

}  // namespace crkit
