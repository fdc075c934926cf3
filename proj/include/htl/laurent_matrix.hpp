#pragma once

// Matrices over the Laurent polynomial ring: conversions to and from the
// rational function field, inversion when the determinant is a monomial,
// variable inversion, evaluation, and denominator clearing for column
// generators.

#include "htl/matrix.hpp"
#include "htl/poly.hpp"
#include "htl/smith.hpp"

#include <stdexcept>
#include <utility>

namespace htl {

template <class F>
using LaurentMatrix = Matrix<LaurentPoly<F>>;

namespace detail {

template <class F>
Matrix<RatFunc<F>> laurentToRatFunc(const LaurentMatrix<F>& m) {
    return m.template map<RatFunc<F>>([](const LaurentPoly<F>& p) { return p.toRatFunc(); });
}

/// Valid only when the denominator is a power of the variable.
template <class F>
LaurentPoly<F> ratFuncToLaurent(const RatFunc<F>& r) {
    if (r.isZero()) return LaurentPoly<F>();
    const Poly<F>& den = r.den();
    for (int d = 0; d < den.degree(); ++d)
        if (!den.coef(d).isZero())
            throw std::domain_error("ratFuncToLaurent: denominator is not a monomial");
    return LaurentPoly<F>(r.num(), -den.degree());
}

template <class F>
LaurentMatrix<F> ratFuncToLaurentMat(const Matrix<RatFunc<F>>& m) {
    return m.template map<LaurentPoly<F>>([](const RatFunc<F>& r) { return ratFuncToLaurent(r); });
}

} // namespace detail

/// Exponent and coefficient of a monomial Laurent polynomial.
template <class F>
std::pair<int, F> monomialData(const LaurentPoly<F>& p) {
    if (!p.isMonomial()) throw std::domain_error("monomialData: not a monomial");
    return {p.minExp(), p.coef(p.minExp())};
}

template <class F>
LaurentPoly<F> laurentDet(const LaurentMatrix<F>& m) {
    if (m.rows() == 0) return LaurentPoly<F>(1);
    return detail::ratFuncToLaurent(det(detail::laurentToRatFunc(m)));
}

template <class F>
LaurentMatrix<F> laurentInverse(const LaurentMatrix<F>& m) {
    return detail::ratFuncToLaurentMat(inverse(detail::laurentToRatFunc(m)));
}

/// Substitute the variable by its inverse in every entry.
template <class F>
LaurentMatrix<F> laurentInvertVar(const LaurentMatrix<F>& m) {
    return m.template map<LaurentPoly<F>>([](const LaurentPoly<F>& p) { return p.invertVar(); });
}

template <class F>
LaurentMatrix<F> laurentFromPoly(const Matrix<Poly<F>>& m) {
    return m.template map<LaurentPoly<F>>([](const Poly<F>& p) { return LaurentPoly<F>(p); });
}

/// Requires every entry to have nonnegative exponents.
template <class F>
Matrix<Poly<F>> laurentToPolyStrict(const LaurentMatrix<F>& m) {
    return m.template map<Poly<F>>([](const LaurentPoly<F>& p) { return p.toPolyStrict(); });
}

template <class F>
Matrix<F> laurentEval(const LaurentMatrix<F>& m, const F& x) {
    return m.template map<F>([&](const LaurentPoly<F>& p) { return p.eval(x); });
}

template <class F>
Matrix<F> polyEval(const Matrix<Poly<F>>& m, const F& x) {
    return m.template map<F>([&](const Poly<F>& p) { return p.eval(x); });
}

/// Scale each column by a power of the variable so its entries become
/// polynomial with a nonzero constant part somewhere.
template <class F>
Matrix<Poly<F>> clearColumnDenominators(const LaurentMatrix<F>& gens) {
    Matrix<Poly<F>> out(gens.rows(), gens.cols());
    for (int j = 0; j < gens.cols(); ++j) {
        int mn = 0;
        bool any = false;
        for (int i = 0; i < gens.rows(); ++i)
            if (!gens.at(i, j).isZero()) {
                mn = any ? std::min(mn, gens.at(i, j).minExp()) : gens.at(i, j).minExp();
                any = true;
            }
        if (!any) continue;
        for (int i = 0; i < gens.rows(); ++i) {
            LaurentPoly<F> shifted =
                gens.at(i, j) * LaurentPoly<F>::monomial(F(1), -mn);
            out.at(i, j) = shifted.toPolyStrict();
        }
    }
    return out;
}

/// Scale each column by the least common denominator of its entries.
template <class F>
Matrix<Poly<F>> clearRatColumns(const Matrix<RatFunc<F>>& m) {
    using P = Poly<F>;
    Matrix<P> out(m.rows(), m.cols());
    for (int j = 0; j < m.cols(); ++j) {
        P common(1);
        for (int i = 0; i < m.rows(); ++i)
            if (!m.at(i, j).isZero()) {
                P g = gcd(common, m.at(i, j).den());
                common = common.divExact(g) * m.at(i, j).den();
            }
        for (int i = 0; i < m.rows(); ++i)
            if (!m.at(i, j).isZero())
                out.at(i, j) = m.at(i, j).num() * common.divExact(m.at(i, j).den());
    }
    return out;
}

} // namespace htl
