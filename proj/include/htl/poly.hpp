#pragma once

// Univariate polynomials, their fraction field, and Laurent polynomials
// over an exact coefficient field.

#include "htl/rational.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace htl {

/// Dense univariate polynomial.  Coefficient vector never has trailing
/// zeros; the zero polynomial is the empty vector.
template <class F>
class Poly {
public:
    Poly() = default;
    Poly(long c) { if (!F(c).isZero()) coef_.push_back(F(c)); }
    explicit Poly(F c) { if (!c.isZero()) coef_.push_back(std::move(c)); }
    explicit Poly(std::vector<F> coef) : coef_(std::move(coef)) { trim(); }

    static Poly monomial(F c, int deg) {
        Poly p;
        if (c.isZero()) return p;
        p.coef_.assign(deg + 1, F(0));
        p.coef_[deg] = std::move(c);
        return p;
    }
    static Poly var() { return monomial(F(1), 1); }

    bool isZero() const { return coef_.empty(); }
    bool isConstant() const { return coef_.size() <= 1; }
    /// Degree; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    const std::vector<F>& coefficients() const { return coef_; }
    F coef(int d) const {
        if (d < 0 || d > degree()) return F(0);
        return coef_[d];
    }
    const F& leading() const {
        if (isZero()) throw std::domain_error("Poly: leading of zero");
        return coef_.back();
    }

    F eval(const F& x) const {
        F acc(0);
        for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Poly operator-() const {
        Poly r = *this;
        for (auto& c : r.coef_) c = -c;
        return r;
    }
    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        r.coef_.resize(std::max(a.coef_.size(), b.coef_.size()), F(0));
        for (size_t i = 0; i < a.coef_.size(); ++i) r.coef_[i] += a.coef_[i];
        for (size_t i = 0; i < b.coef_.size(); ++i) r.coef_[i] += b.coef_[i];
        r.trim();
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.isZero() || b.isZero()) return Poly();
        Poly r;
        r.coef_.assign(a.coef_.size() + b.coef_.size() - 1, F(0));
        for (size_t i = 0; i < a.coef_.size(); ++i)
            for (size_t j = 0; j < b.coef_.size(); ++j)
                r.coef_[i + j] += a.coef_[i] * b.coef_[j];
        r.trim();
        return r;
    }
    Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
    Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }
    Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.coef_ == b.coef_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Euclidean division; returns (quotient, remainder).
    friend std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
        if (b.isZero()) throw std::domain_error("Poly: division by zero");
        Poly q, r = a;
        F lead = b.leading().inv();
        while (!r.isZero() && r.degree() >= b.degree()) {
            int d = r.degree() - b.degree();
            F c = r.leading() * lead;
            Poly t = monomial(c, d);
            q += t;
            r -= t * b;
        }
        return {q, r};
    }
    friend Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).first; }
    friend Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

    /// Exact division; throws if the remainder is nonzero.
    Poly divExact(const Poly& b) const {
        auto [q, r] = divmod(*this, b);
        if (!r.isZero()) throw std::domain_error("Poly: inexact division");
        return q;
    }

    /// Monic gcd.
    friend Poly gcd(Poly a, Poly b) {
        while (!b.isZero()) {
            Poly r = a % b;
            a = std::move(b);
            b = std::move(r);
        }
        if (!a.isZero()) a = a.scaled(a.leading().inv());
        return a;
    }

    Poly scaled(const F& c) const {
        Poly r = *this;
        for (auto& x : r.coef_) x = x * c;
        r.trim();
        return r;
    }

    Poly derivative() const {
        Poly r;
        for (int d = 1; d <= degree(); ++d) r.coef_.push_back(coef_[d] * F(d));
        r.trim();
        return r;
    }

    std::string str(const std::string& var = "x") const {
        if (isZero()) return "0";
        std::string s;
        for (int d = degree(); d >= 0; --d) {
            if (coef_[d].isZero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + coef_[d].str() + ")";
            if (d > 0) s += "*" + var + (d > 1 ? "^" + std::to_string(d) : "");
        }
        return s;
    }

private:
    void trim() {
        while (!coef_.empty() && coef_.back().isZero()) coef_.pop_back();
    }
    std::vector<F> coef_;
};

/// Fraction field F(x).  Normalized: gcd(num, den) = 1, den monic.
template <class F>
class RatFunc {
public:
    RatFunc() : num_(), den_(1) {}
    RatFunc(long c) : num_(c), den_(1) {}
    explicit RatFunc(Poly<F> num) : num_(std::move(num)), den_(1) {}
    RatFunc(Poly<F> num, Poly<F> den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.isZero()) throw std::domain_error("RatFunc: zero denominator");
        normalize();
    }
    static RatFunc var() { return RatFunc(Poly<F>::var()); }

    const Poly<F>& num() const { return num_; }
    const Poly<F>& den() const { return den_; }
    bool isZero() const { return num_.isZero(); }
    bool isPolynomial() const { return den_ == Poly<F>(1); }

    RatFunc operator-() const { RatFunc r = *this; r.num_ = -r.num_; return r; }
    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.isZero()) throw std::domain_error("RatFunc: division by zero");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }
    RatFunc& operator+=(const RatFunc& o) { *this = *this + o; return *this; }
    RatFunc& operator-=(const RatFunc& o) { *this = *this - o; return *this; }
    RatFunc& operator*=(const RatFunc& o) { *this = *this * o; return *this; }
    RatFunc& operator/=(const RatFunc& o) { *this = *this / o; return *this; }

    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    RatFunc inv() const {
        if (isZero()) throw std::domain_error("RatFunc: inverse of zero");
        return RatFunc(den_, num_);
    }

    std::string str(const std::string& var = "x") const {
        if (isPolynomial()) return num_.str(var);
        return "(" + num_.str(var) + ")/(" + den_.str(var) + ")";
    }

private:
    void normalize() {
        if (num_.isZero()) { den_ = Poly<F>(1); return; }
        Poly<F> g = gcd(num_, den_);
        num_ = num_.divExact(g);
        den_ = den_.divExact(g);
        F lead = den_.leading().inv();
        num_ = num_.scaled(lead);
        den_ = den_.scaled(lead);
    }
    Poly<F> num_;
    Poly<F> den_;
};

/// Laurent polynomial: finite map exponent -> nonzero coefficient.
template <class F>
class LaurentPoly {
public:
    LaurentPoly() = default;
    LaurentPoly(long c) { set(0, F(c)); }
    explicit LaurentPoly(F c) { set(0, std::move(c)); }
    static LaurentPoly monomial(F c, int exp) {
        LaurentPoly p;
        p.set(exp, std::move(c));
        return p;
    }
    static LaurentPoly var() { return monomial(F(1), 1); }
    explicit LaurentPoly(const Poly<F>& p, int shift = 0) {
        for (int d = 0; d <= p.degree(); ++d) set(d + shift, p.coef(d));
    }

    bool isZero() const { return terms_.empty(); }
    const std::map<int, F>& terms() const { return terms_; }
    F coef(int exp) const {
        auto it = terms_.find(exp);
        return it == terms_.end() ? F(0) : it->second;
    }
    int minExp() const {
        if (isZero()) throw std::domain_error("LaurentPoly: minExp of zero");
        return terms_.begin()->first;
    }
    int maxExp() const {
        if (isZero()) throw std::domain_error("LaurentPoly: maxExp of zero");
        return terms_.rbegin()->first;
    }
    bool isMonomial() const { return terms_.size() == 1; }

    /// The polynomial p with *this = x^{minExp} * p; shift receives minExp.
    Poly<F> toPoly(int& shift) const {
        if (isZero()) { shift = 0; return Poly<F>(); }
        shift = minExp();
        std::vector<F> c(maxExp() - shift + 1, F(0));
        for (const auto& [e, v] : terms_) c[e - shift] = v;
        return Poly<F>(std::move(c));
    }
    /// Requires all exponents nonnegative.
    Poly<F> toPolyStrict() const {
        if (isZero()) return Poly<F>();
        if (minExp() < 0) throw std::domain_error("LaurentPoly: negative exponent");
        std::vector<F> c(maxExp() + 1, F(0));
        for (const auto& [e, v] : terms_) c[e] = v;
        return Poly<F>(std::move(c));
    }

    /// Substitute x -> x^{-1}.
    LaurentPoly invertVar() const {
        LaurentPoly r;
        for (const auto& [e, v] : terms_) r.set(-e, v);
        return r;
    }

    F eval(const F& x) const {
        F acc(0);
        F ix = x.isZero() ? F(0) : x.inv();
        for (const auto& [e, v] : terms_) {
            F p(1);
            if (e >= 0) for (int k = 0; k < e; ++k) p = p * x;
            else {
                if (x.isZero()) throw std::domain_error("LaurentPoly: pole at 0");
                for (int k = 0; k < -e; ++k) p = p * ix;
            }
            acc += v * p;
        }
        return acc;
    }

    LaurentPoly operator-() const {
        LaurentPoly r = *this;
        for (auto& [e, v] : r.terms_) v = -v;
        return r;
    }
    friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly r = a;
        for (const auto& [e, v] : b.terms_) r.add(e, v);
        return r;
    }
    friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + (-b); }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly r;
        for (const auto& [ea, va] : a.terms_)
            for (const auto& [eb, vb] : b.terms_) r.add(ea + eb, va * vb);
        return r;
    }
    LaurentPoly& operator+=(const LaurentPoly& o) { *this = *this + o; return *this; }
    LaurentPoly& operator-=(const LaurentPoly& o) { *this = *this - o; return *this; }
    LaurentPoly& operator*=(const LaurentPoly& o) { *this = *this * o; return *this; }

    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

    /// Inverse, defined only for monomials.
    LaurentPoly inv() const {
        if (!isMonomial()) throw std::domain_error("LaurentPoly: only monomials are units");
        const auto& [e, v] = *terms_.begin();
        return monomial(v.inv(), -e);
    }

    RatFunc<F> toRatFunc() const {
        if (isZero()) return RatFunc<F>();
        int shift = 0;
        Poly<F> p = toPoly(shift);
        if (shift >= 0) return RatFunc<F>(p * Poly<F>::monomial(F(1), shift));
        return RatFunc<F>(p, Poly<F>::monomial(F(1), -shift));
    }

    std::string str(const std::string& var = "x") const {
        if (isZero()) return "0";
        std::string s;
        for (const auto& [e, v] : terms_) {
            if (!s.empty()) s += " + ";
            s += "(" + v.str() + ")";
            if (e != 0) s += "*" + var + "^" + std::to_string(e);
        }
        return s;
    }

private:
    void set(int exp, F c) {
        if (!c.isZero()) terms_[exp] = std::move(c);
    }
    void add(int exp, const F& c) {
        auto it = terms_.find(exp);
        if (it == terms_.end()) {
            if (!c.isZero()) terms_.emplace(exp, c);
        } else {
            it->second += c;
            if (it->second.isZero()) terms_.erase(it);
        }
    }
    std::map<int, F> terms_;
};

} // namespace htl
