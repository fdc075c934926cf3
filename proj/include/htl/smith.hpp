#pragma once

// Smith normal form of matrices over a univariate polynomial ring F[x],
// with unimodular transforms recorded.  Used for subbundle saturation and
// unimodular completions in the Birkhoff factorization.

#include "htl/matrix.hpp"
#include "htl/poly.hpp"

#include <stdexcept>
#include <utility>

namespace htl {

template <class F>
struct SmithResult {
    Matrix<Poly<F>> u;  // rows transform, unimodular
    Matrix<Poly<F>> d;  // diagonal, d_i | d_{i+1}, monic nonzero entries first
    Matrix<Poly<F>> v;  // cols transform, unimodular
};

namespace detail {

template <class F>
void swapRows(Matrix<Poly<F>>& m, int a, int b) {
    for (int j = 0; j < m.cols(); ++j) std::swap(m.at(a, j), m.at(b, j));
}
template <class F>
void swapCols(Matrix<Poly<F>>& m, int a, int b) {
    for (int i = 0; i < m.rows(); ++i) std::swap(m.at(i, a), m.at(i, b));
}
/// row[a] -= q * row[b]
template <class F>
void addRow(Matrix<Poly<F>>& m, int a, int b, const Poly<F>& q) {
    for (int j = 0; j < m.cols(); ++j) m.at(a, j) -= q * m.at(b, j);
}
template <class F>
void addCol(Matrix<Poly<F>>& m, int a, int b, const Poly<F>& q) {
    for (int i = 0; i < m.rows(); ++i) m.at(i, a) -= q * m.at(i, b);
}
template <class F>
void scaleRow(Matrix<Poly<F>>& m, int a, const F& c) {
    for (int j = 0; j < m.cols(); ++j) m.at(a, j) = m.at(a, j).scaled(c);
}

} // namespace detail

/// U*m*V = D with U, V unimodular over F[x].
template <class F>
SmithResult<F> smithForm(const Matrix<Poly<F>>& input) {
    using P = Poly<F>;
    Matrix<P> m = input;
    Matrix<P> u = Matrix<P>::identity(m.rows());
    Matrix<P> v = Matrix<P>::identity(m.cols());
    int n = std::min(m.rows(), m.cols());

    for (int t = 0; t < n; ++t) {
        // Find the minimal-degree nonzero entry in the trailing block.
        int pi = -1, pj = -1;
        for (int i = t; i < m.rows(); ++i)
            for (int j = t; j < m.cols(); ++j)
                if (!m.at(i, j).isZero() &&
                    (pi < 0 || m.at(i, j).degree() < m.at(pi, pj).degree())) {
                    pi = i; pj = j;
                }
        if (pi < 0) break;
        if (pi != t) { detail::swapRows(m, pi, t); detail::swapRows(u, pi, t); }
        if (pj != t) { detail::swapCols(m, pj, t); detail::swapCols(v, pj, t); }

        bool clean = false;
        while (!clean) {
            clean = true;
            for (int i = t + 1; i < m.rows(); ++i) {
                if (m.at(i, t).isZero()) continue;
                P q = m.at(i, t) / m.at(t, t);
                detail::addRow(m, i, t, q);
                detail::addRow(u, i, t, q);
                if (!m.at(i, t).isZero()) {
                    // Remainder has smaller degree; promote it to pivot.
                    detail::swapRows(m, i, t);
                    detail::swapRows(u, i, t);
                    clean = false;
                }
            }
            for (int j = t + 1; j < m.cols(); ++j) {
                if (m.at(t, j).isZero()) continue;
                P q = m.at(t, j) / m.at(t, t);
                detail::addCol(m, j, t, q);
                detail::addCol(v, j, t, q);
                if (!m.at(t, j).isZero()) {
                    detail::swapCols(m, j, t);
                    detail::swapCols(v, j, t);
                    clean = false;
                }
            }
            if (clean) {
                // Divisibility fix-up: fold any non-divisible entry into the
                // pivot row and restart the clearing loop.
                for (int i = t + 1; i < m.rows() && clean; ++i)
                    for (int j = t + 1; j < m.cols() && clean; ++j)
                        if (!(m.at(i, j) % m.at(t, t)).isZero()) {
                            detail::addRow(m, t, i, P(-1));
                            detail::addRow(u, t, i, P(-1));
                            clean = false;
                        }
            }
        }
        // Make the pivot monic.
        F lead = m.at(t, t).leading().inv();
        detail::scaleRow(m, t, lead);
        detail::scaleRow(u, t, lead);
    }
    return {u, m, v};
}

/// Determinant of a polynomial matrix, via elimination in the fraction field.
template <class F>
Poly<F> polyDet(const Matrix<Poly<F>>& m) {
    auto r = m.template map<RatFunc<F>>([](const Poly<F>& p) { return RatFunc<F>(p); });
    RatFunc<F> d = det(r);
    if (!d.isPolynomial()) throw std::logic_error("polyDet: non-polynomial determinant");
    return d.num();
}

/// Inverse of a unimodular polynomial matrix (det a nonzero constant).
template <class F>
Matrix<Poly<F>> unimodularInverse(const Matrix<Poly<F>>& m) {
    using P = Poly<F>;
    auto s = smithForm(m);
    // m = U^{-1} D V^{-1}; unimodularity forces D scalar-diagonal.
    for (int i = 0; i < std::min(m.rows(), m.cols()); ++i)
        if (!s.d.at(i, i).isConstant() || s.d.at(i, i).isZero())
            throw std::domain_error("unimodularInverse: matrix is not unimodular");
    // m^{-1} = V D^{-1} U.
    Matrix<P> dinv = Matrix<P>::identity(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        dinv.at(i, i) = P(s.d.at(i, i).coef(0).inv());
    return s.v * dinv * s.u;
}

/// Completes a full-column-rank r x s polynomial matrix with unit invariant
/// factors to a square unimodular matrix whose first s columns are the input.
template <class F>
Matrix<Poly<F>> unimodularCompletion(const Matrix<Poly<F>>& cols) {
    using P = Poly<F>;
    auto s = smithForm(cols);
    int r = cols.rows(), k = cols.cols();
    for (int i = 0; i < k; ++i)
        if (!s.d.at(i, i).isConstant() || s.d.at(i, i).isZero())
            throw std::domain_error("unimodularCompletion: invariant factors not units");
    // cols = U^{-1} [I;0] V^{-1}.  Take M = U^{-1} * [ [I;0] V^{-1} | [0;I] ]:
    // square, unimodular, first k columns equal cols.
    Matrix<P> uinv = unimodularInverse(s.u);
    Matrix<P> left(r, k);
    Matrix<P> vinv = unimodularInverse(s.v);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) left.at(i, j) = s.d.at(i, i) * vinv.at(i, j);
    Matrix<P> right(r, r - k);
    for (int i = 0; i < r - k; ++i) right.at(k + i, i) = P(1);
    return uinv * hcat(left, right);
}

} // namespace htl
