#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace crkit {

using Rational = mpq_class;

/// Exact element of Q(i): re + im*i with arbitrary precision rational parts.
class GaussRat {
public:
    GaussRat() : re_(0), im_(0) {}
    GaussRat(long v) : re_(v), im_(0) {}  // NOLINT(google-explicit-constructor)
    GaussRat(int v) : re_(v), im_(0) {}   // NOLINT(google-explicit-constructor)
    GaussRat(Rational re) : re_(std::move(re)), im_(0) { re_.canonicalize(); }  // NOLINT
    GaussRat(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussRat i() { return {Rational(0), Rational(1)}; }
    static GaussRat from_ints(long re, long im) { return {Rational(re), Rational(im)}; }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_imag() const { return sgn(re_) == 0; }

    GaussRat conj() const { return {re_, -im_}; }
    Rational norm2() const { return re_ * re_ + im_ * im_; }

    GaussRat operator-() const { return {-re_, -im_}; }

    GaussRat& operator+=(const GaussRat& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussRat& operator-=(const GaussRat& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussRat& operator*=(const GaussRat& o) {
        if (o.is_real()) {
            re_ *= o.re_;
            im_ *= o.re_;
            return *this;
        }
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational s = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(s);
        return *this;
    }
    GaussRat& operator/=(const GaussRat& o) {
        if (o.is_zero()) throw std::domain_error("division by zero in Q(i)");
        if (o.is_real()) {
            re_ /= o.re_;
            im_ /= o.re_;
            return *this;
        }
        Rational n = o.norm2();
        *this *= o.conj();
        re_ /= n;
        im_ /= n;
        return *this;
    }

    friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
    friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
    friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
    friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }

    friend bool operator==(const GaussRat& a, const GaussRat& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

    /// Total order used only for deterministic tie-breaking.
    friend bool operator<(const GaussRat& a, const GaussRat& b) {
        int c = cmp(a.re_, b.re_);
        if (c != 0) return c < 0;
        return cmp(a.im_, b.im_) < 0;
    }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    GaussRat pow(unsigned e) const {
        GaussRat base = *this, acc(1);
        while (e) {
            if (e & 1u) acc *= base;
            e >>= 1u;
            if (e) base *= base;
        }
        return acc;
    }

    /// Printed form used by the polynomial syntax: "3/2", "-1/2i", "(3/2+1/2i)".
    std::string str() const {
        if (is_real()) return re_.get_str();
        if (is_imag()) {
            if (im_ == 1) return "i";
            if (im_ == -1) return "-i";
            return im_.get_str() + "i";
        }
        std::string s = "(" + re_.get_str();
        if (sgn(im_) > 0) s += "+";
        if (im_ == 1) s += "i";
        else if (im_ == -1) s += "-i";
        else s += im_.get_str() + "i";
        return s + ")";
    }

    std::size_t hash() const {
        std::size_t h = std::hash<std::string>{}(re_.get_str());
        return h ^ (std::hash<std::string>{}(im_.get_str()) * 1315423911u);
    }

private:
    Rational re_;
    Rational im_;
};

inline std::ostream& operator<<(std::ostream& os, const GaussRat& g) { return os << g.str(); }

}  // namespace crkit
