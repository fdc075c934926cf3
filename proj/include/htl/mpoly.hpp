#pragma once

// Sparse multivariate polynomials over the rationals, just enough for
// symbolic ranks over function fields: ring arithmetic plus the exact
// division that fraction-free elimination needs.

#include "htl/matrix.hpp"
#include "htl/rational.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace htl {

/// Multivariate polynomial in a fixed number of variables; terms keyed by
/// exponent vectors.
class MPoly {
public:
    using Exp = std::vector<int>;

    MPoly() : nvars_(0) {}
    MPoly(long c) : nvars_(0) {
        if (c != 0) terms_[{}] = Rational(c);
    }
    explicit MPoly(Rational c, int nvars = 0) : nvars_(nvars) {
        if (!c.isZero()) terms_[Exp(nvars, 0)] = std::move(c);
    }
    static MPoly var(int i, int nvars) {
        MPoly p;
        p.nvars_ = nvars;
        Exp e(nvars, 0);
        e[i] = 1;
        p.terms_[e] = Rational(1);
        return p;
    }

    bool isZero() const { return terms_.empty(); }
    int nvars() const { return nvars_; }
    const std::map<Exp, Rational>& terms() const { return terms_; }
    bool isConstant() const {
        if (terms_.empty()) return true;
        if (terms_.size() > 1) return false;
        for (int e : terms_.begin()->first) if (e) return false;
        return true;
    }
    Rational constantValue() const {
        if (isZero()) return Rational(0);
        return terms_.begin()->second;
    }

    MPoly operator-() const {
        MPoly r = *this;
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }
    friend MPoly operator+(const MPoly& a, const MPoly& b) {
        MPoly r = a.promoted(std::max(a.nvars_, b.nvars_));
        for (const auto& [e, c] : b.promoted(r.nvars_).terms_) r.add(e, c);
        return r;
    }
    friend MPoly operator-(const MPoly& a, const MPoly& b) { return a + (-b); }
    friend MPoly operator*(const MPoly& a, const MPoly& b) {
        int nv = std::max(a.nvars_, b.nvars_);
        MPoly pa = a.promoted(nv), pb = b.promoted(nv);
        MPoly r;
        r.nvars_ = nv;
        for (const auto& [ea, ca] : pa.terms_)
            for (const auto& [eb, cb] : pb.terms_) {
                Exp e(nv);
                for (int i = 0; i < nv; ++i) e[i] = ea[i] + eb[i];
                r.add(e, ca * cb);
            }
        return r;
    }
    MPoly& operator+=(const MPoly& o) { *this = *this + o; return *this; }
    MPoly& operator-=(const MPoly& o) { *this = *this - o; return *this; }
    MPoly& operator*=(const MPoly& o) { *this = *this * o; return *this; }
    friend bool operator==(const MPoly& a, const MPoly& b) {
        int nv = std::max(a.nvars_, b.nvars_);
        return a.promoted(nv).terms_ == b.promoted(nv).terms_;
    }
    friend bool operator!=(const MPoly& a, const MPoly& b) { return !(a == b); }

    /// Exact division by long division in the graded-lex leading term;
    /// throws if the division is not exact.
    MPoly divExact(const MPoly& b) const {
        if (b.isZero()) throw std::domain_error("MPoly: division by zero");
        int nv = std::max(nvars_, b.nvars_);
        MPoly rem = promoted(nv), div = b.promoted(nv), q;
        q.nvars_ = nv;
        auto lead = [](const MPoly& p) {
            auto best = p.terms_.begin();
            for (auto it = p.terms_.begin(); it != p.terms_.end(); ++it)
                if (gradedLexLess(best->first, it->first)) best = it;
            return best;
        };
        while (!rem.isZero()) {
            auto lr = lead(rem);
            auto lb = lead(div);
            Exp e(nv);
            for (int i = 0; i < nv; ++i) {
                e[i] = lr->first[i] - lb->first[i];
                if (e[i] < 0) throw std::domain_error("MPoly: inexact division");
            }
            MPoly t;
            t.nvars_ = nv;
            t.terms_[e] = lr->second / lb->second;
            q += t;
            rem -= t * div;
        }
        return q;
    }

    Rational eval(const std::vector<Rational>& point) const {
        Rational acc(0);
        for (const auto& [e, c] : terms_) {
            Rational m = c;
            for (size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) m *= point[i];
            acc += m;
        }
        return acc;
    }

    std::string str() const {
        if (isZero()) return "0";
        std::string s;
        for (const auto& [e, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += "(" + c.str() + ")";
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i]) s += "*t" + std::to_string(i + 1) +
                               (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
        }
        return s;
    }

private:
    static bool gradedLexLess(const Exp& a, const Exp& b) {
        int da = 0, db = 0;
        for (int x : a) da += x;
        for (int x : b) db += x;
        if (da != db) return da < db;
        return a < b;
    }
    MPoly promoted(int nvars) const {
        if (nvars == nvars_) return *this;
        MPoly r;
        r.nvars_ = nvars;
        for (const auto& [e, c] : terms_) {
            Exp ne = e;
            ne.resize(nvars, 0);
            r.terms_[ne] = c;
        }
        return r;
    }
    void add(const Exp& e, const Rational& c) {
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (!c.isZero()) terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second.isZero()) terms_.erase(it);
        }
    }
    int nvars_;
    std::map<Exp, Rational> terms_;
};

/// Rank over the fraction field Q(t1,...,tn), by fraction-free elimination.
inline int mpolyRank(const Matrix<MPoly>& m) {
    return bareissRank(m, [](const MPoly& a, const MPoly& b) { return a.divExact(b); });
}

} // namespace htl
