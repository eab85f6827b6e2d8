#pragma once

#include <cstdint>
#include <stdexcept>

#include "crkit/gauss_rat.hpp"

namespace crkit {

/// Arithmetic modulo the prime p = 2305843009213693921 (p ≡ 1 mod 4, so i has an image).
class ModP {
public:
    static constexpr std::uint64_t P = 2305843009213693921ull;
    static constexpr std::uint64_t SQRT_MINUS_ONE = 583529827753931384ull;

    ModP() = default;
    ModP(long v) {  // NOLINT(google-explicit-constructor)
        long r = v % static_cast<long>(P);
        v_ = static_cast<std::uint64_t>(r < 0 ? r + static_cast<long>(P) : r);
    }
    static ModP raw(std::uint64_t v) {
        ModP r;
        r.v_ = v % P;
        return r;
    }

    /// Image of a Gaussian rational; throws when a denominator vanishes mod p.
    static ModP from(const GaussRat& x) { return from(x.re()) + from(x.im()) * raw(SQRT_MINUS_ONE); }
    static ModP from(const Rational& q) {
        ModP num = from(q.get_num()), den = from(q.get_den());
        if (den.v_ == 0) throw std::domain_error("denominator divisible by the modulus");
        return num / den;
    }
    static ModP from(const mpz_class& z) {
        mpz_class r;
        mpz_fdiv_r_ui(r.get_mpz_t(), z.get_mpz_t(), P);
        return raw(r.get_ui());
    }

    std::uint64_t value() const { return v_; }
    bool is_zero() const { return v_ == 0; }

    friend ModP operator+(ModP a, ModP b) { return raw(a.v_ + b.v_ >= P ? a.v_ + b.v_ - P : a.v_ + b.v_); }
    friend ModP operator-(ModP a, ModP b) { return raw(a.v_ >= b.v_ ? a.v_ - b.v_ : a.v_ + P - b.v_); }
    friend ModP operator*(ModP a, ModP b) {
        return raw(static_cast<std::uint64_t>(static_cast<unsigned __int128>(a.v_) * b.v_ % P));
    }
    friend ModP operator/(ModP a, ModP b) { return a * b.inverse(); }
    ModP& operator+=(ModP o) { return *this = *this + o; }
    ModP& operator-=(ModP o) { return *this = *this - o; }
    ModP& operator*=(ModP o) { return *this = *this * o; }
    ModP operator-() const { return ModP(0) - *this; }
    friend bool operator==(ModP a, ModP b) { return a.v_ == b.v_; }
    friend bool operator!=(ModP a, ModP b) { return a.v_ != b.v_; }

    ModP pow(std::uint64_t e) const {
        ModP base = *this, acc(1);
        for (; e; e >>= 1, base = base * base)
            if (e & 1) acc = acc * base;
        return acc;
    }
    ModP inverse() const {
        if (v_ == 0) throw std::domain_error("inverse of zero mod p");
        return pow(P - 2);
    }

private:
    std::uint64_t v_ = 0;
};

inline bool is_zero(const ModP& x) { return x.is_zero(); }

}  // namespace crkit
