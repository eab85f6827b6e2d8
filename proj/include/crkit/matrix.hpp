#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "crkit/poly.hpp"
#include "crkit/random.hpp"

namespace crkit {

/// Quotient num/den of polynomials. Not kept reduced; equality is cross-multiplicative.
class RatFn {
public:
    RatFn() = default;
    RatFn(Poly num) : num_(std::move(num)), den_(Poly::constant(num_.ctx(), GaussRat(1))) {}  // NOLINT
    RatFn(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
        normalize();
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    friend RatFn operator+(const RatFn& a, const RatFn& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }
    friend RatFn operator-(const RatFn& a, const RatFn& b) {
        if (b.is_zero()) return a;
        if (a.is_zero()) return -b;
        if (a.den_ == b.den_) return {a.num_ - b.num_, a.den_};
        return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
    }
    friend RatFn operator*(const RatFn& a, const RatFn& b) {
        if (a.is_zero() || b.is_zero()) return {};
        return {a.num_ * b.num_, a.den_ * b.den_};
    }
    friend RatFn operator/(const RatFn& a, const RatFn& b) {
        if (b.is_zero()) throw std::domain_error("division by zero rational function");
        if (a.is_zero()) return {};
        return {a.num_ * b.den_, a.den_ * b.num_};
    }
    RatFn operator-() const { return is_zero() ? RatFn() : RatFn(-num_, den_); }

    friend bool operator==(const RatFn& a, const RatFn& b) {
        if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
        return a.num_ * b.den_ == b.num_ * a.den_;
    }

    /// Value at a point; nullopt when the denominator vanishes there.
    std::optional<GaussRat> evaluate(const std::vector<GaussRat>& pt) const {
        GaussRat d = den_.evaluate(pt);
        if (d.is_zero()) return std::nullopt;
        return num_.evaluate(pt) / d;
    }

private:
    void normalize() {
        if (den_.is_constant()) {
            GaussRat c = den_.constant_term();
            if (!c.is_one()) {
                num_ *= GaussRat(1) / c;
                den_ = Poly::constant(den_.ctx(), GaussRat(1));
            }
        }
    }

    Poly num_;
    Poly den_;
};

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T()) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
    }

    Matrix submatrix(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
        Matrix m(rs.size(), cs.size());
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = 0; j < cs.size(); ++j) m(i, j) = (*this)(rs[i], cs[j]);
        return m;
    }

    std::vector<T> row(std::size_t r) const { return {data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_}; }

    void append_row(const std::vector<T>& r) {
        if (rows_ == 0 && cols_ == 0) cols_ = r.size();
        if (r.size() != cols_) throw std::invalid_argument("append_row: width mismatch");
        data_.insert(data_.end(), r.begin(), r.end());
        ++rows_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

// ---- linear algebra over an exact field (GaussRat or a prime field) ----

inline bool is_zero(const GaussRat& x) { return x.is_zero(); }

template <class F>
struct EchelonForm {
    Matrix<F> m;                      // reduced row echelon form
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

template <class F>
EchelonForm<F> rref(Matrix<F> m) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && is_zero(m(p, c))) ++p;
        if (p == m.rows()) continue;
        m.swap_rows(p, r);
        F inv = F(1) / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j) m(r, j) = m(r, j) * inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || is_zero(m(i, c))) continue;
            F f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (!is_zero(m(r, j))) m(i, j) = m(i, j) - f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

template <class F>
std::size_t rank(const Matrix<F>& m) {
    // forward elimination only
    Matrix<F> a = m;
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t p = r;
        while (p < a.rows() && is_zero(a(p, c))) ++p;
        if (p == a.rows()) continue;
        a.swap_rows(p, r);
        F inv = F(1) / a(r, c);
        for (std::size_t i = r + 1; i < a.rows(); ++i) {
            if (is_zero(a(i, c))) continue;
            F f = a(i, c) * inv;
            for (std::size_t j = c; j < a.cols(); ++j)
                if (!is_zero(a(r, j))) a(i, j) = a(i, j) - f * a(r, j);
        }
        ++r;
    }
    return r;
}

/// Basis of the right kernel, one vector per free column in increasing column order.
/// The vector for free column f is supported on f and pivot columns left of f.
template <class F>
std::vector<std::vector<F>> nullspace(const Matrix<F>& m) {
    auto ef = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : ef.pivots) is_pivot[c] = true;
    std::vector<std::vector<F>> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<F> v(m.cols(), F(0));
        v[f] = F(1);
        for (std::size_t r = 0; r < ef.pivots.size(); ++r) v[ef.pivots[r]] = F(0) - ef.m(r, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// One solution of A x = b (free unknowns set to zero); nullopt when inconsistent.
template <class F>
std::optional<std::vector<F>> solve_linear(const Matrix<F>& a, const std::vector<F>& b) {
    Matrix<F> aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    auto ef = rref(std::move(aug));
    std::vector<F> x(a.cols(), F(0));
    for (std::size_t r = 0; r < ef.pivots.size(); ++r) {
        if (ef.pivots[r] == a.cols()) return std::nullopt;
        x[ef.pivots[r]] = ef.m(r, a.cols());
    }
    return x;
}

template <class F>
F determinant(Matrix<F> a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("determinant of non-square matrix");
    F det(1);
    for (std::size_t c = 0; c < a.cols(); ++c) {
        std::size_t p = c;
        while (p < a.rows() && is_zero(a(p, c))) ++p;
        if (p == a.rows()) return F(0);
        if (p != c) {
            a.swap_rows(p, c);
            det = F(0) - det;
        }
        det = det * a(c, c);
        F inv = F(1) / a(c, c);
        for (std::size_t i = c + 1; i < a.rows(); ++i) {
            if (is_zero(a(i, c))) continue;
            F f = a(i, c) * inv;
            for (std::size_t j = c; j < a.cols(); ++j) a(i, j) = a(i, j) - f * a(c, j);
        }
    }
    return det;
}

// ---- polynomial matrices ----

/// Fraction-free (Bareiss) echelon elimination; returns the exact rank over the fraction field.
/// pivot_rows/pivot_cols receive the positions (in the original matrix) of a nonvanishing maximal minor.
inline std::size_t exact_rank(const Matrix<Poly>& m, std::vector<std::size_t>* pivot_rows = nullptr,
                              std::vector<std::size_t>* pivot_cols = nullptr) {
    Matrix<Poly> a = m;
    std::vector<std::size_t> row_of(a.rows());
    for (std::size_t i = 0; i < row_of.size(); ++i) row_of[i] = i;
    Ctx ctx;
    for (std::size_t i = 0; i < a.rows() && !ctx; ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j).ctx()) {
                ctx = a(i, j).ctx();
                break;
            }
    Poly prev = Poly::constant(ctx, GaussRat(1));
    std::size_t r = 0;
    std::vector<std::size_t> prs, pcs;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        // smallest nonzero pivot keeps intermediate expressions small
        std::size_t p = a.rows();
        for (std::size_t i = r; i < a.rows(); ++i) {
            if (a(i, c).is_zero()) continue;
            if (p == a.rows() || a(i, c).size() < a(p, c).size()) p = i;
        }
        if (p == a.rows()) continue;
        a.swap_rows(p, r);
        std::swap(row_of[p], row_of[r]);
        for (std::size_t i = r + 1; i < a.rows(); ++i) {
            for (std::size_t j = c + 1; j < a.cols(); ++j) {
                Poly v = a(r, c) * a(i, j) - a(i, c) * a(r, j);
                a(i, j) = prev.is_constant() ? v * (GaussRat(1) / prev.constant_term()) : exact_divide(v, prev);
            }
            a(i, c) = Poly(ctx);
        }
        prev = a(r, c);
        prs.push_back(row_of[r]);
        pcs.push_back(c);
        ++r;
    }
    if (pivot_rows) {
        std::sort(prs.begin(), prs.end());
        *pivot_rows = prs;
    }
    if (pivot_cols) *pivot_cols = pcs;
    return r;
}

/// Exact determinant of a square polynomial matrix (fraction-free elimination).
inline Poly poly_determinant(const Matrix<Poly>& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
    std::size_t n = m.rows();
    Ctx ctx;
    for (std::size_t i = 0; i < n && !ctx; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m(i, j).ctx()) {
                ctx = m(i, j).ctx();
                break;
            }
    if (n == 0) return Poly::constant(ctx, GaussRat(1));
    Matrix<Poly> a = m;
    Poly prev = Poly::constant(ctx, GaussRat(1));
    GaussRat sign(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a(p, c).is_zero()) ++p;
        if (p == n) return Poly(ctx);
        if (p != c) {
            a.swap_rows(p, c);
            sign = -sign;
        }
        for (std::size_t i = c + 1; i < n; ++i) {
            for (std::size_t j = c + 1; j < n; ++j) {
                Poly v = a(c, c) * a(i, j) - a(i, c) * a(c, j);
                a(i, j) = prev.is_constant() ? v * (GaussRat(1) / prev.constant_term()) : exact_divide(v, prev);
            }
            a(i, c) = Poly(ctx);
        }
        prev = a(c, c);
    }
    return a(n - 1, n - 1) * sign;
}

/// Clear denominators row by row (multiplying a row by a nonzero polynomial keeps the rank).
inline Matrix<Poly> clear_denominators(const Matrix<RatFn>& m) {
    Matrix<Poly> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::vector<Poly> dens;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const Poly& d = m(i, j).den();
            if (d.is_constant()) continue;
            if (std::find(dens.begin(), dens.end(), d) == dens.end()) dens.push_back(d);
        }
        for (std::size_t j = 0; j < m.cols(); ++j) {
            Poly v = m(i, j).num();
            for (const auto& d : dens)
                if (!(d == m(i, j).den())) v = v * d;
            if (!m(i, j).den().is_constant() &&
                std::find(dens.begin(), dens.end(), m(i, j).den()) == dens.end())
                throw std::logic_error("clear_denominators: inconsistent denominators");
            out(i, j) = v;
        }
    }
    return out;
}

template <class T>
Matrix<GaussRat> evaluate_matrix(const Matrix<T>& m, const std::vector<GaussRat>& pt, bool* ok = nullptr);

template <>
inline Matrix<GaussRat> evaluate_matrix(const Matrix<Poly>& m, const std::vector<GaussRat>& pt, bool* ok) {
    Matrix<GaussRat> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).is_zero() ? GaussRat(0) : m(i, j).evaluate(pt);
    if (ok) *ok = true;
    return out;
}

template <>
inline Matrix<GaussRat> evaluate_matrix(const Matrix<RatFn>& m, const std::vector<GaussRat>& pt, bool* ok) {
    Matrix<GaussRat> out(m.rows(), m.cols());
    if (ok) *ok = true;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j).is_zero()) continue;
            auto v = m(i, j).evaluate(pt);
            if (!v) {
                if (ok) *ok = false;
                return out;
            }
            out(i, j) = *v;
        }
    return out;
}

struct GenericRankResult {
    std::size_t rank = 0;
    std::size_t trials = 0;
    /// Schwartz-Zippel bound on the probability that the generic rank exceeds `rank`.
    double failure_bound = 0.0;
};

namespace detail {
inline std::size_t context_size_of(const Matrix<RatFn>& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j).num().ctx()) return m(i, j).num().nvars();
    return 0;
}
inline std::uint32_t max_entry_degree(const Matrix<RatFn>& m) {
    std::uint32_t d = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::uint32_t row = 0;
        for (std::size_t j = 0; j < m.cols(); ++j)
            row = std::max(row, m(i, j).num().total_degree() + m(i, j).den().total_degree());
        d = std::max(d, row);
    }
    return d;
}
}  // namespace detail

/// Randomized generic rank: exact rank at Gaussian-integer points drawn from boxes
/// [-B,B]^2 per coordinate, B doubling per trial. A certified lower bound on the generic rank.
inline GenericRankResult generic_rank(const Matrix<RatFn>& m, std::uint64_t seed, int trials, long initial_bound = 8) {
    if (trials < 1) throw std::invalid_argument("generic_rank: trials must be >= 1");
    Rng rng(seed);
    std::size_t dim = detail::context_size_of(m);
    std::size_t cap = std::min(m.rows(), m.cols());
    GenericRankResult res;
    long bound = initial_bound;
    bool evaluated = false;
    double miss = 1.0;
    for (int t = 0; t < trials; ++t, bound *= 2) {
        Matrix<GaussRat> v;
        bool ok = false;
        for (int attempt = 0; attempt < 16 && !ok; ++attempt) v = evaluate_matrix(m, random_gauss_point(rng, dim, bound), &ok);
        ++res.trials;
        if (!ok) continue;
        evaluated = true;
        res.rank = std::max(res.rank, rank(v));
        double box = std::pow(2.0 * static_cast<double>(bound) + 1.0, 2.0);
        double deg = static_cast<double>(cap) * static_cast<double>(detail::max_entry_degree(m));
        miss *= std::min(1.0, deg / box);
        if (res.rank == cap) break;
    }
    if (!evaluated) throw std::runtime_error("evaluation exhausted");
    res.failure_bound = res.rank == cap ? 0.0 : miss;
    return res;
}

inline Matrix<RatFn> to_ratfn(const Matrix<Poly>& m) {
    Matrix<RatFn> r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = RatFn(m(i, j));
    return r;
}

inline GenericRankResult generic_rank(const Matrix<Poly>& m, std::uint64_t seed, int trials) {
    return generic_rank(to_ratfn(m), seed, trials);
}

/// Exact rank of a rational-function matrix over its fraction field (denominators cleared row-wise).
inline std::size_t exact_rank(const Matrix<RatFn>& m) { return exact_rank(clear_denominators(m)); }

}  // namespace crkit
