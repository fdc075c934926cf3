#pragma once

// Concrete model fixtures: the rank-1 parameter dictionary between
// parabolic-weight/eigenvalue data and prolongation/residue data, the
// rank-2 model gluing matrix, its symmetric powers with their standard
// filtration pattern, and the nilpotent morphisms acting on them.

#include "htl/rational.hpp"
#include "htl/twistor.hpp"

#include <stdexcept>
#include <vector>

namespace htl {

struct LParams {
    Rational a;                 // parabolic-side weight
    GaussianRational alpha;     // Higgs eigenvalue
    GaussianRational lambda;
};

struct ResidueData {
    Rational A;                 // parabolic weight of the prolongation
    GaussianRational B;         // residue of the twisted connection
};

inline ResidueData lForward(const LParams& p) {
    GaussianRational la = p.lambda * p.alpha.conj();
    ResidueData r;
    r.A = p.a - Rational(2) * la.re();
    r.B = -p.lambda * p.lambda * p.alpha.conj() + p.alpha +
          p.lambda * GaussianRational(p.a);
    return r;
}

inline LParams lInverse(const ResidueData& r, const GaussianRational& lambda) {
    Rational n2 = lambda.normSq();
    Rational denom = Rational(1) + n2;
    GaussianRational lb = lambda.conj() * r.B;
    LParams p;
    p.lambda = lambda;
    p.a = ((Rational(1) - n2) * r.A + Rational(2) * lb.re()) / denom;
    p.alpha = (r.B - lambda * GaussianRational(r.A)) * GaussianRational(denom).inv();
    return p;
}

/// Rank-2 model gluing [[0, λ], [-λ⁻¹, p]]; unimodular for every p.
template <class F>
TwistorBundle<F> mod2Gluing(const F& p) {
    LaurentMatrix<F> g(2, 2);
    g.at(0, 1) = LaurentPoly<F>::monomial(F(1), 1);
    g.at(1, 0) = LaurentPoly<F>::monomial(F(-1), -1);
    g.at(1, 1) = LaurentPoly<F>(p);
    return {2, g};
}

/// The same gluing as a product of a λ-chart unimodular factor, a constant
/// diagonal, and a μ-chart unimodular factor; requires p ≠ 0 (the product
/// exhibits the bundle as holomorphically trivial).
template <class F>
LaurentMatrix<F> mod2FactorForm(const F& p) {
    if (p.isZero()) throw std::domain_error("mod2FactorForm: parameter must be nonzero");
    F pi = p.inv();
    LaurentMatrix<F> left(2, 2), mid(2, 2), right(2, 2);
    left.at(0, 0) = LaurentPoly<F>(1);
    left.at(0, 1) = LaurentPoly<F>::monomial(pi, 1);
    left.at(1, 1) = LaurentPoly<F>(1);
    mid.at(0, 0) = LaurentPoly<F>(pi);
    mid.at(1, 1) = LaurentPoly<F>(p);
    right.at(0, 0) = LaurentPoly<F>(1);
    right.at(1, 0) = LaurentPoly<F>::monomial(-pi, -1);
    right.at(1, 1) = LaurentPoly<F>(1);
    return left * mid * right;
}

/// l-th symmetric power of a 2x2 matrix in the monomial basis
/// m_k = e1^{l-k} e2^k, k = 0..l.
template <class F>
LaurentMatrix<F> symPower(const LaurentMatrix<F>& m, int l) {
    if (m.rows() != 2 || m.cols() != 2)
        throw std::invalid_argument("symPower: base matrix must be 2x2");
    if (l < 0) throw std::invalid_argument("symPower: negative power");
    LaurentMatrix<F> out(l + 1, l + 1);
    for (int k = 0; k <= l; ++k) {
        // expand (m00 e1 + m10 e2)^{l-k} * (m01 e1 + m11 e2)^k
        std::vector<LaurentPoly<F>> acc{LaurentPoly<F>(1)};
        auto mulLinear = [&](const LaurentPoly<F>& c1, const LaurentPoly<F>& c2) {
            std::vector<LaurentPoly<F>> next(acc.size() + 1);
            for (size_t j = 0; j < acc.size(); ++j) {
                next[j] = next[j] + acc[j] * c1;
                next[j + 1] = next[j + 1] + acc[j] * c2;
            }
            acc = std::move(next);
        };
        for (int t = 0; t < l - k; ++t) mulLinear(m.at(0, 0), m.at(1, 0));
        for (int t = 0; t < k; ++t) mulLinear(m.at(0, 1), m.at(1, 1));
        for (int j = 0; j <= l; ++j) out.at(j, k) = acc[j];
    }
    return out;
}

template <class F>
TwistorBundle<F> modSymGluing(int l, const F& p) {
    return {l + 1, symPower(mod2Gluing(p).gluing, l)};
}

/// Weight of the k-th basis vector m_k of the l-th symmetric power.
inline int modelWeight(int l, int k) { return l - 2 * k; }

/// The standard filtration pattern: step h is spanned by the basis vectors
/// of weight at most h in the λ-chart.
template <class F>
FilteredTwistorBundle<F> modelFiltration(int l, const F& p) {
    TwistorBundle<F> b = modSymGluing(l, p);
    FilteredTwistorBundle<F> out{b, {}};
    for (int h = -l; h <= l; h += 2) {
        Matrix<Poly<F>> cols(l + 1, 0);
        for (int k = 0; k <= l; ++k) {
            if (modelWeight(l, k) > h) continue;
            Matrix<Poly<F>> e(l + 1, 1);
            e.at(k, 0) = Poly<F>(1);
            cols = hcat(cols, e);
        }
        out.steps.emplace(h, saturate(b, laurentFromPoly(cols)));
    }
    return out;
}

/// The nilpotent morphism modSymGluing(l) → modSymGluing(l) ⊗ O(2)
/// induced on the symmetric power by the rank-2 solution e1 ↦ e2 (λ-chart),
/// e2 ↦ -e1 (μ-chart), extended as a derivation.
template <class F>
BundleMorphism<F> modelNilpotent(int l, const F& p) {
    Matrix<Poly<F>> fl(l + 1, l + 1), fm(l + 1, l + 1);
    for (int k = 0; k < l; ++k) fl.at(k + 1, k) = Poly<F>(long(l - k));
    for (int k = 1; k <= l; ++k) fm.at(k - 1, k) = Poly<F>(long(-k));
    BundleMorphism<F> n{2, fl, fm};
    validateMorphism(modSymGluing(l, p), modSymGluing(l, p), n);
    return n;
}

/// Dimension of the space of pairs (F_λ, F_μ) with polynomial entries of
/// degree at most degCap, strictly lowering the standard filtration in both
/// charts, and solving F_λ(λ)·A(λ) = λ²·A(λ)·F_μ(λ⁻¹).  The derivation
/// morphism spans it for small l.
template <class F>
int modelNilpotentSolutionDim(int l, const F& p, int degCap) {
    const LaurentMatrix<F>& a = modSymGluing(l, p).gluing;
    int r = l + 1;
    // unknown layout: λ-chart entries (j > k), then μ-chart entries (j < k),
    // each with degCap + 1 coefficients
    std::vector<std::tuple<bool, int, int>> slots;
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < r; ++k) {
            if (j > k) slots.emplace_back(true, j, k);
            if (j < k) slots.emplace_back(false, j, k);
        }
    int vars = static_cast<int>(slots.size()) * (degCap + 1);
    // residual exponent window of (F_λ·A - λ²·A·F_μ(λ⁻¹))_{j,k}
    int eLo = -l - degCap, eHi = l + degCap + 2;
    int span = eHi - eLo + 1;
    Matrix<F> sys(r * r * span, vars);
    for (size_t s = 0; s < slots.size(); ++s) {
        auto [lamSide, j, i] = slots[s];
        for (int d = 0; d <= degCap; ++d) {
            int col = static_cast<int>(s) * (degCap + 1) + d;
            if (lamSide) {
                // (F_λ)_{j,i} = λ^d contributes λ^d·A_{i,k} to entry (j,k)
                for (int k = 0; k < r; ++k)
                    for (const auto& [e, c] : a.at(i, k).terms()) {
                        int row = (j * r + k) * span + (e + d - eLo);
                        sys.at(row, col) = sys.at(row, col) + c;
                    }
            } else {
                // (F_μ)_{j,i} = μ^d contributes -λ^{2-d}·A_{j',j} to entry (j',i)
                for (int jp = 0; jp < r; ++jp)
                    for (const auto& [e, c] : a.at(jp, j).terms()) {
                        int row = (jp * r + i) * span + (e + 2 - d - eLo);
                        sys.at(row, col) = sys.at(row, col) - c;
                    }
            }
        }
    }
    return kernel(sys).dim();
}

} // namespace htl
