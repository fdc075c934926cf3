#pragma once

// Exact scalar fields: rationals and Gaussian rationals, backed by GMP.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace htl {

/// Arbitrary-precision rational, always kept canonical (gcd 1, positive
/// denominator) by mpq_class.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long num, long den) : v_(num, den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        v_.canonicalize();
    }
    explicit Rational(const mpq_class& v) : v_(v) { v_.canonicalize(); }

    /// Parses "p" or "p/q".
    static Rational parse(const std::string& s) {
        mpq_class v;
        if (v.set_str(s, 10) != 0)
            throw std::invalid_argument("Rational: cannot parse '" + s + "'");
        v.canonicalize();
        return Rational(v);
    }

    const mpq_class& raw() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    bool isZero() const { return v_ == 0; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.isZero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }

    Rational inv() const {
        if (isZero()) throw std::domain_error("Rational: inverse of zero");
        return Rational(mpq_class(1 / v_));
    }

    std::string str() const { return v_.get_str(); }

private:
    mpq_class v_;
};

/// Element of Q(i).  Only the operations the residue/parabolic formulas
/// need beyond field arithmetic: conjugation, real part, |.|^2.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(Rational re) : re_(std::move(re)) {}
    GaussianRational(long re) : re_(re) {}
    GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational i() { return GaussianRational(Rational(0), Rational(1)); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool isZero() const { return re_.isZero() && im_.isZero(); }
    bool isReal() const { return im_.isZero(); }

    GaussianRational conj() const { return {re_, -im_}; }
    Rational normSq() const { return re_ * re_ + im_ * im_; }

    GaussianRational operator-() const { return {-re_, -im_}; }
    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_; im_ += o.im_; return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_; im_ -= o.im_; return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r); im_ = std::move(i);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        Rational n = o.normSq();
        if (n.isZero()) throw std::domain_error("GaussianRational: division by zero");
        GaussianRational c = o.conj();
        *this *= c;
        re_ /= n; im_ /= n;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    GaussianRational inv() const {
        Rational n = normSq();
        if (n.isZero()) throw std::domain_error("GaussianRational: inverse of zero");
        GaussianRational c = conj();
        return {c.re() / n, c.im() / n};
    }

    std::string str() const {
        if (im_.isZero()) return re_.str();
        return re_.str() + (im_.sign() < 0 ? "-" : "+") +
               (im_.sign() < 0 ? (-im_).str() : im_.str()) + "i";
    }

private:
    Rational re_;
    Rational im_;
};

// Field concept used by the generic linear algebra: constructible from
// long (0, 1, ...), with isZero(), inv(), exact +,-,*,/ and ==.

} // namespace htl
