#pragma once

// Vector bundles on the projective line given by Laurent gluing matrices:
// splitting types via section counting, constructive Birkhoff
// factorization, two-chart saturated subbundles, weight filtrations of
// nilpotent bundle morphisms, and mixed-twistor verification.
//
// Conventions.  A bundle of rank r glues two trivializations v (λ-chart)
// and v† (μ-chart, μ = λ⁻¹) by v† = v·A(λ).  A rank-1 gluing c·λ^k has
// degree k.  A section of the n-th twist is a polynomial vector y(μ) with
// A(λ)·y(λ⁻¹)·λ^n polynomial in λ.

#include "htl/laurent_matrix.hpp"
#include "htl/nilpotent.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace htl {

template <class F>
struct TwistorBundle {
    int rank = 0;
    LaurentMatrix<F> gluing;
};

template <class F>
struct BundleValidation {
    int degree = 0;
    F unit = F(1);
};

/// Checks that the determinant is a unit of the Laurent ring and returns
/// its exponent (the total degree) and coefficient.
template <class F>
BundleValidation<F> validate(const TwistorBundle<F>& b) {
    if (b.gluing.rows() != b.rank || b.gluing.cols() != b.rank)
        throw std::invalid_argument("validate: gluing shape mismatch");
    if (b.rank == 0) return {};
    LaurentPoly<F> d = laurentDet(b.gluing);
    if (d.isZero() || !d.isMonomial())
        throw std::domain_error("validate: determinant is not a monomial");
    auto [e, c] = monomialData(d);
    return {e, c};
}

namespace detail {

/// Min/max exponents over the nonzero entries of a gluing matrix.
template <class F>
std::pair<int, int> exponentSpan(const LaurentMatrix<F>& m) {
    int lo = 0, hi = 0;
    bool any = false;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (!m.at(i, j).isZero()) {
                int a = m.at(i, j).minExp(), b = m.at(i, j).maxExp();
                lo = any ? std::min(lo, a) : a;
                hi = any ? std::max(hi, b) : b;
                any = true;
            }
    return {lo, hi};
}

/// Coefficient space of sections of the n-th twist.  Coordinates: unknown
/// y_j = sum_d c_{j,d} mu^d with (j, d) flattened as j*(cap+1)+d; the cap
/// n + m - (r-1)*lo bounds every section degree (from x = A·y(λ⁻¹)·λ^n and
/// y(λ⁻¹) = A⁻¹·x·λ^{-n}, with A⁻¹ = adj(A)/(c·λ^m)).
template <class F>
struct SectionSpace {
    int degCap = -1;
    Subspace<F> coeffs = Subspace<F>::zero(0);
};

template <class F>
SectionSpace<F> sectionSpace(const TwistorBundle<F>& b, int n) {
    SectionSpace<F> out;
    int r = b.rank;
    if (r == 0) return out;
    BundleValidation<F> val = validate(b);
    auto [lo, hi] = exponentSpan(b.gluing);
    int cap = n + val.degree - (r - 1) * lo;
    if (cap < 0 || n + hi < 0) return out;
    out.degCap = cap;
    int vars = r * (cap + 1);
    int negLo = lo - cap + n;
    int constraints = negLo < 0 ? -negLo : 0;
    Matrix<F> sys(r * constraints, vars);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            if (b.gluing.at(i, j).isZero()) continue;
            for (const auto& [e, c] : b.gluing.at(i, j).terms())
                for (int d = 0; d <= cap; ++d) {
                    int exp = e - d + n;   // λ-exponent of c * μ^d-term
                    if (exp >= 0 || exp < negLo) continue;
                    int row = i * constraints + (exp - negLo);
                    sys.at(row, j * (cap + 1) + d) = sys.at(row, j * (cap + 1) + d) + c;
                }
        }
    out.coeffs = constraints == 0 ? Subspace<F>::full(vars) : kernel(sys);
    return out;
}

} // namespace detail

/// Dimension of the space of global sections of the n-th twist.
template <class F>
int h0(const TwistorBundle<F>& b, int n) {
    return detail::sectionSpace(b, n).coeffs.dim();
}

/// The splitting multiset {k_1 >= ... >= k_r}, from the h0 profile:
/// h0(n) - h0(n-1) counts the summands with k_i >= -n.
template <class F>
std::vector<int> splittingType(const TwistorBundle<F>& b) {
    int r = b.rank;
    if (r == 0) return {};
    BundleValidation<F> val = validate(b);
    auto [lo, hi] = detail::exponentSpan(b.gluing);
    int kLo = val.degree - (r - 1) * hi;
    int kHi = hi;
    std::map<int, int> h;
    for (int n = -kHi - 2; n <= -kLo; ++n) h[n] = h0(b, n);
    auto atLeast = [&](int t) { return h.at(-t) - h.at(-t - 1); };
    std::vector<int> type;
    for (int t = kHi; t >= kLo; --t) {
        int mult = atLeast(t) - atLeast(t + 1);
        for (int c = 0; c < mult; ++c) type.push_back(t);
    }
    int sum = 0;
    for (int k : type) sum += k;
    if (static_cast<int>(type.size()) != r || sum != val.degree)
        throw std::logic_error("splittingType: inconsistent h0 profile");
    return type;
}

template <class F>
bool isPure(const TwistorBundle<F>& b, int w) {
    for (int k : splittingType(b))
        if (k != w) return false;
    return true;
}

template <class F>
struct BirkhoffResult {
    Matrix<Poly<F>> p;            // polynomial in λ, unimodular
    std::vector<int> exponents;   // the splitting type, descending
    Matrix<Poly<F>> q;            // polynomial in μ, unimodular
};

namespace detail {

template <class F>
Matrix<Poly<F>> sectionVectorsToPoly(int rank, int cap, const Matrix<F>& coeffCols) {
    Matrix<Poly<F>> out(rank, coeffCols.cols());
    for (int c = 0; c < coeffCols.cols(); ++c)
        for (int j = 0; j < rank; ++j) {
            std::vector<F> coef(cap + 1, F(0));
            for (int d = 0; d <= cap; ++d) coef[d] = coeffCols.at(j * (cap + 1) + d, c);
            out.at(j, c) = Poly<F>(std::move(coef));
        }
    return out;
}

} // namespace detail

/// A = P·diag(λ^{k_i})·Q(μ): constructive factorization by choosing, per
/// splitting index t, sections of the (-t)-th twist whose λ-chart columns
/// stay independent.
template <class F>
BirkhoffResult<F> birkhoff(const TwistorBundle<F>& b, std::uint64_t seed = 31337) {
    int r = b.rank;
    std::vector<int> type = splittingType(b);
    if (r == 0) return {Matrix<Poly<F>>(0, 0), {}, Matrix<Poly<F>>(0, 0)};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> small(-4, 4);
    Matrix<RatFunc<F>> ar = detail::laurentToRatFunc(b.gluing);
    for (int attempt = 0; attempt < 60; ++attempt) {
        // chosen[i]: (k_i, y_i as polynomial column in μ)
        std::vector<std::pair<int, std::vector<Poly<F>>>> chosen;
        for (size_t pos = 0; pos < type.size();) {
            int t = type[pos];
            size_t mult = 0;
            while (pos + mult < type.size() && type[pos + mult] == t) ++mult;
            detail::SectionSpace<F> sp = detail::sectionSpace(b, -t);
            int cap = sp.degCap;
            // coefficient vectors induced by the already-chosen summands
            Matrix<F> induced(r * (cap + 1), 0);
            for (const auto& [tp, y] : chosen)
                for (int c = 0; c <= tp - t; ++c) {
                    Matrix<F> col(r * (cap + 1), 1);
                    for (int j = 0; j < r; ++j)
                        for (int d = 0; d <= y[j].degree(); ++d)
                            col.at(j * (cap + 1) + d + c, 0) = y[j].coef(d);
                    induced = hcat(induced, col);
                }
            Matrix<F> fresh = quotientBasis(sp.coeffs, Subspace<F>::span(induced));
            if (fresh.cols() < static_cast<int>(mult))
                throw std::logic_error("birkhoff: section space too small");
            Matrix<F> picks(r * (cap + 1), static_cast<int>(mult));
            for (size_t c = 0; c < mult; ++c) {
                std::vector<F> v(r * (cap + 1), F(0));
                if (attempt == 0) {
                    v = fresh.columnVec(static_cast<int>(c));
                } else {
                    for (int fc = 0; fc < fresh.cols(); ++fc) {
                        F w(small(rng));
                        for (int i = 0; i < fresh.rows(); ++i) v[i] = v[i] + w * fresh.at(i, fc);
                    }
                }
                picks.setColumn(static_cast<int>(c), v);
            }
            Matrix<Poly<F>> ys = detail::sectionVectorsToPoly(r, cap, picks);
            for (size_t c = 0; c < mult; ++c) {
                std::vector<Poly<F>> y(r);
                for (int j = 0; j < r; ++j) y[j] = ys.at(j, static_cast<int>(c));
                chosen.emplace_back(t, std::move(y));
            }
            pos += mult;
        }
        Matrix<Poly<F>> ymat(r, r);
        for (int c = 0; c < r; ++c)
            for (int j = 0; j < r; ++j) ymat.at(j, c) = chosen[c].second[j];
        Poly<F> dy = polyDet(ymat);
        if (dy.isZero()) continue;
        // x_i = A·y_i(λ⁻¹)·λ^{-k_i} must be polynomial; X unimodular
        LaurentMatrix<F> ylam = laurentInvertVar(laurentFromPoly(ymat));
        LaurentMatrix<F> prod = b.gluing * ylam;
        Matrix<Poly<F>> xmat(r, r);
        bool good = true;
        for (int c = 0; c < r && good; ++c)
            for (int i = 0; i < r; ++i) {
                LaurentPoly<F> e = prod.at(i, c) * LaurentPoly<F>::monomial(F(1), -chosen[c].first);
                if (!e.isZero() && e.minExp() < 0) { good = false; break; }
                xmat.at(i, c) = e.toPolyStrict();
            }
        if (!good) continue;
        Poly<F> dx = polyDet(xmat);
        if (dx.isZero() || !dx.isConstant()) continue;
        BirkhoffResult<F> res{xmat, type, unimodularInverse(ymat)};
        // exact reconstruction check
        LaurentMatrix<F> diag(r, r);
        for (int i = 0; i < r; ++i)
            diag.at(i, i) = LaurentPoly<F>::monomial(F(1), type[i]);
        LaurentMatrix<F> rebuilt =
            laurentFromPoly(res.p) * diag * laurentInvertVar(laurentFromPoly(res.q));
        if (!(rebuilt == b.gluing))
            throw std::logic_error("birkhoff: reconstruction mismatch");
        return res;
    }
    throw std::logic_error("birkhoff: no unimodular section selection found");
}

/// Two-chart saturated presentation of a subbundle: polynomial bases with
/// unit invariant factors in each chart and the Laurent transition T with
/// A·S†(λ⁻¹) = S(λ)·T(λ).  T is the gluing of the subbundle itself.
template <class F>
struct Subbundle {
    int parentRank = 0;
    Matrix<Poly<F>> lambdaBasis;
    Matrix<Poly<F>> muBasis;
    LaurentMatrix<F> transition;

    int rank() const { return lambdaBasis.cols(); }
    TwistorBundle<F> asBundle() const { return {rank(), transition}; }
};

namespace detail {

/// Saturated module basis of the column span of a polynomial matrix.
template <class F>
Matrix<Poly<F>> saturatedBasis(const Matrix<Poly<F>>& gens) {
    auto s = smithForm(gens);
    int rk = 0;
    int n = std::min(gens.rows(), gens.cols());
    for (int i = 0; i < n; ++i)
        if (!s.d.at(i, i).isZero()) ++rk;
    Matrix<Poly<F>> uinv = unimodularInverse(s.u);
    return uinv.subMatrix(0, 0, gens.rows(), rk);
}

/// Polynomial coordinates of cols in a saturated basis; throws if the
/// columns do not lie in the basis span pointwise.
template <class F>
Matrix<Poly<F>> polyCoordinates(const Matrix<Poly<F>>& basis, const Matrix<Poly<F>>& cols) {
    if (basis.cols() == 0) {
        if (!cols.isZero())
            throw std::domain_error("polyCoordinates: columns outside the span");
        return Matrix<Poly<F>>(0, cols.cols());
    }
    auto br = basis.template map<RatFunc<F>>([](const Poly<F>& p) { return RatFunc<F>(p); });
    auto cr = cols.template map<RatFunc<F>>([](const Poly<F>& p) { return RatFunc<F>(p); });
    Matrix<RatFunc<F>> x;
    if (!solve(br, cr, x))
        throw std::domain_error("polyCoordinates: columns outside the span");
    return x.template map<Poly<F>>([](const RatFunc<F>& r) {
        if (!r.isPolynomial())
            throw std::domain_error("polyCoordinates: non-polynomial coordinates");
        return r.num();
    });
}

} // namespace detail

template <class F>
Subbundle<F> saturate(const TwistorBundle<F>& parent, const LaurentMatrix<F>& generators) {
    int r = parent.rank;
    if (generators.rows() != r) throw std::invalid_argument("saturate: row count mismatch");
    Subbundle<F> sub;
    sub.parentRank = r;
    Matrix<Poly<F>> gp = clearColumnDenominators(generators);
    auto gr = gp.template map<RatFunc<F>>([](const Poly<F>& p) { return RatFunc<F>(p); });
    if (rank(gr) == 0) {
        sub.lambdaBasis = Matrix<Poly<F>>(r, 0);
        sub.muBasis = Matrix<Poly<F>>(r, 0);
        sub.transition = LaurentMatrix<F>(0, 0);
        return sub;
    }
    sub.lambdaBasis = detail::saturatedBasis(gp);
    int s = sub.lambdaBasis.cols();
    // μ-chart generators: A⁻¹·S(λ) with λ = μ⁻¹
    LaurentMatrix<F> mgen =
        laurentInvertVar(laurentInverse(parent.gluing) * laurentFromPoly(sub.lambdaBasis));
    sub.muBasis = detail::saturatedBasis(clearColumnDenominators(mgen));
    if (sub.muBasis.cols() != s)
        throw std::domain_error("saturate: chart ranks disagree");
    // transition: S(λ)·T = A·S†(λ⁻¹)
    auto sr = sub.lambdaBasis.template map<RatFunc<F>>(
        [](const Poly<F>& p) { return RatFunc<F>(p); });
    Matrix<RatFunc<F>> rhs = detail::laurentToRatFunc(
        parent.gluing * laurentInvertVar(laurentFromPoly(sub.muBasis)));
    Matrix<RatFunc<F>> t;
    if (!solve(sr, rhs, t)) throw std::domain_error("saturate: charts span different subsheaves");
    sub.transition = detail::ratFuncToLaurentMat(t);
    LaurentPoly<F> dt = laurentDet(sub.transition);
    if (dt.isZero() || !dt.isMonomial())
        throw std::domain_error("saturate: subbundle transition is not invertible");
    return sub;
}

template <class F>
Subbundle<F> fullSubbundle(const TwistorBundle<F>& b) {
    Subbundle<F> sub;
    sub.parentRank = b.rank;
    sub.lambdaBasis = Matrix<Poly<F>>::identity(b.rank);
    sub.muBasis = Matrix<Poly<F>>::identity(b.rank);
    sub.transition = b.gluing;
    return sub;
}

template <class F>
Subbundle<F> zeroSubbundle(const TwistorBundle<F>& b) {
    Subbundle<F> sub;
    sub.parentRank = b.rank;
    sub.lambdaBasis = Matrix<Poly<F>>(b.rank, 0);
    sub.muBasis = Matrix<Poly<F>>(b.rank, 0);
    sub.transition = LaurentMatrix<F>(0, 0);
    return sub;
}

/// Pointwise containment small ⊆ big, both saturated subbundles of the
/// same parent: polynomial coordinates must exist in both charts.
template <class F>
bool subbundleContains(const Subbundle<F>& big, const Subbundle<F>& small) {
    if (big.parentRank != small.parentRank)
        throw std::invalid_argument("subbundleContains: parent mismatch");
    try {
        detail::polyCoordinates(big.lambdaBasis, small.lambdaBasis);
        detail::polyCoordinates(big.muBasis, small.muBasis);
    } catch (const std::domain_error&) {
        return false;
    }
    return true;
}

template <class F>
bool subbundleEqual(const Subbundle<F>& a, const Subbundle<F>& b) {
    return a.rank() == b.rank() && subbundleContains(a, b) && subbundleContains(b, a);
}

/// Re-express child (a subbundle of the common parent, contained in sub)
/// as a subbundle of sub's own bundle.
template <class F>
Subbundle<F> restrictToSub(const Subbundle<F>& sub, const Subbundle<F>& child) {
    Subbundle<F> out;
    out.parentRank = sub.rank();
    out.lambdaBasis = detail::polyCoordinates(sub.lambdaBasis, child.lambdaBasis);
    out.muBasis = detail::polyCoordinates(sub.muBasis, child.muBasis);
    if (out.lambdaBasis.cols() == 0) {
        out.transition = LaurentMatrix<F>(0, 0);
        return out;
    }
    // X·T' = T_sub·X†(λ⁻¹)
    auto xr = out.lambdaBasis.template map<RatFunc<F>>(
        [](const Poly<F>& p) { return RatFunc<F>(p); });
    Matrix<RatFunc<F>> rhs = detail::laurentToRatFunc(
        sub.transition * laurentInvertVar(laurentFromPoly(out.muBasis)));
    Matrix<RatFunc<F>> t;
    if (!solve(xr, rhs, t)) throw std::logic_error("restrictToSub: inconsistent charts");
    out.transition = detail::ratFuncToLaurentMat(t);
    return out;
}

/// Morphism V → V' ⊗ O(twist) in both charts; the gluing compatibility is
/// F_λ(λ)·A(λ) = λ^twist·A'(λ)·F_μ(λ⁻¹).
template <class F>
struct BundleMorphism {
    int twist = 0;
    Matrix<Poly<F>> lambdaRep;
    Matrix<Poly<F>> muRep;
};

template <class F>
void validateMorphism(const TwistorBundle<F>& src, const TwistorBundle<F>& dst,
                      const BundleMorphism<F>& f) {
    if (f.lambdaRep.rows() != dst.rank || f.lambdaRep.cols() != src.rank ||
        f.muRep.rows() != dst.rank || f.muRep.cols() != src.rank)
        throw std::invalid_argument("validateMorphism: shape mismatch");
    LaurentMatrix<F> lhs = laurentFromPoly(f.lambdaRep) * src.gluing;
    LaurentMatrix<F> rhs = dst.gluing * laurentInvertVar(laurentFromPoly(f.muRep));
    for (int i = 0; i < lhs.rows(); ++i)
        for (int j = 0; j < lhs.cols(); ++j)
            if (!(lhs.at(i, j) == rhs.at(i, j) * LaurentPoly<F>::monomial(F(1), f.twist)))
                throw std::invalid_argument("validateMorphism: gluing compatibility fails");
}

namespace detail {

template <class G>
std::vector<int> powerRanks(const Matrix<G>& m) {
    std::vector<int> out;
    Matrix<G> p = m;
    for (int e = 1; e <= m.rows(); ++e) {
        out.push_back(rank(p));
        if (out.back() == 0) break;
        p = p * m;
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

} // namespace detail

template <class F>
struct ConjugacyReport {
    bool constant = true;
    std::vector<int> genericRanks, ranksAtZero, ranksAtInfinity;
};

/// Jordan type (ranks of powers) over the function field versus the two
/// chart origins; interior points are generic by lower semicontinuity.
template <class F>
ConjugacyReport<F> conjugacyConstancy(const BundleMorphism<F>& f) {
    ConjugacyReport<F> rep;
    auto fr = f.lambdaRep.template map<RatFunc<F>>(
        [](const Poly<F>& p) { return RatFunc<F>(p); });
    rep.genericRanks = detail::powerRanks(fr);
    rep.ranksAtZero = detail::powerRanks(polyEval(f.lambdaRep, F(0)));
    rep.ranksAtInfinity = detail::powerRanks(polyEval(f.muRep, F(0)));
    rep.constant = rep.genericRanks == rep.ranksAtZero && rep.genericRanks == rep.ranksAtInfinity;
    return rep;
}

template <class F>
struct FilteredTwistorBundle {
    TwistorBundle<F> bundle;
    std::map<int, Subbundle<F>> steps;
};

/// Weight filtration of a nilpotent morphism, computed over the λ-chart
/// function field and saturated to subbundles in both charts.
template <class F>
FilteredTwistorBundle<F> morphismWeightFiltration(const TwistorBundle<F>& b,
                                                  const BundleMorphism<F>& f) {
    validateMorphism(b, b, f);
    ConjugacyReport<F> rep = conjugacyConstancy(f);
    if (!rep.constant)
        throw std::domain_error("morphismWeightFiltration: Jordan type jumps at a chart origin");
    auto fr = f.lambdaRep.template map<RatFunc<F>>(
        [](const Poly<F>& p) { return RatFunc<F>(p); });
    Filtration<RatFunc<F>> w = weightFiltration(fr);
    FilteredTwistorBundle<F> out{b, {}};
    for (int h : w.jumpWeights()) {
        Matrix<Poly<F>> gens = clearRatColumns(w.at(h).basis());
        out.steps.emplace(h, saturate(b, laurentFromPoly(gens)));
    }
    return out;
}

/// Graded pieces Gr_i as bundles: complete the basis of the previous step
/// inside the current one in both charts; the adapted transition is block
/// triangular and the diagonal block is the quotient gluing.
template <class F>
std::map<int, TwistorBundle<F>> gradedPieces(const FilteredTwistorBundle<F>& f) {
    std::map<int, TwistorBundle<F>> out;
    if (f.steps.empty()) throw std::invalid_argument("gradedPieces: empty filtration");
    if (f.steps.rbegin()->second.rank() != f.bundle.rank)
        throw std::invalid_argument("gradedPieces: top step is not the whole bundle");
    const Subbundle<F>* prev = nullptr;
    for (const auto& [i, sub] : f.steps) {
        if (prev == nullptr || prev->rank() == 0) {
            if (sub.rank() > 0) out.emplace(i, sub.asBundle());
            else out.emplace(i, TwistorBundle<F>{0, LaurentMatrix<F>(0, 0)});
            prev = &sub;
            continue;
        }
        if (!subbundleContains(sub, *prev))
            throw std::invalid_argument("gradedPieces: filtration steps not nested");
        int s = sub.rank(), sp = prev->rank();
        Matrix<Poly<F>> xl = detail::polyCoordinates(sub.lambdaBasis, prev->lambdaBasis);
        Matrix<Poly<F>> xm = detail::polyCoordinates(sub.muBasis, prev->muBasis);
        Matrix<Poly<F>> cl = unimodularCompletion(xl);
        Matrix<Poly<F>> cm = unimodularCompletion(xm);
        LaurentMatrix<F> adapted = laurentFromPoly(unimodularInverse(cl)) * sub.transition *
                                   laurentInvertVar(laurentFromPoly(cm));
        for (int row = sp; row < s; ++row)
            for (int col = 0; col < sp; ++col)
                if (!adapted.at(row, col).isZero())
                    throw std::invalid_argument("gradedPieces: transition not filtration-compatible");
        out.emplace(i, TwistorBundle<F>{s - sp, adapted.subMatrix(sp, sp, s - sp, s - sp)});
        prev = &sub;
    }
    return out;
}

struct MixedCheck {
    bool ok = true;
    int failWeight = 0;
};

/// Each graded piece must be pure of its own weight.
template <class F>
MixedCheck isMixedTwistor(const FilteredTwistorBundle<F>& f) {
    for (const auto& [i, gr] : gradedPieces(f))
        if (gr.rank > 0 && !isPure(gr, i)) return {false, i};
    return {};
}

/// Induced filtration on a subbundle, in the subbundle's own coordinates.
template <class F>
FilteredTwistorBundle<F> inducedFiltration(const FilteredTwistorBundle<F>& f,
                                           const Subbundle<F>& sub);

namespace detail {
template <class F>
Subbundle<F> subbundleIntersect(const TwistorBundle<F>&, const Subbundle<F>&,
                                const Subbundle<F>&);
}

template <class F>
Subbundle<F> subSum(const FilteredTwistorBundle<F>& f, const Subbundle<F>& s1,
                    const Subbundle<F>& s2) {
    if (!isMixedTwistor(inducedFiltration(f, s1)).ok ||
        !isMixedTwistor(inducedFiltration(f, s2)).ok)
        throw std::invalid_argument("subSum: inputs are not sub mixed twistors");
    Subbundle<F> out = saturate(
        f.bundle, laurentFromPoly(hcat(s1.lambdaBasis, s2.lambdaBasis)));
    if (!isMixedTwistor(inducedFiltration(f, out)).ok)
        throw std::logic_error("subSum: result is not a sub mixed twistor");
    return out;
}

template <class F>
Subbundle<F> subIntersect(const FilteredTwistorBundle<F>& f, const Subbundle<F>& s1,
                          const Subbundle<F>& s2) {
    if (!isMixedTwistor(inducedFiltration(f, s1)).ok ||
        !isMixedTwistor(inducedFiltration(f, s2)).ok)
        throw std::invalid_argument("subIntersect: inputs are not sub mixed twistors");
    Subbundle<F> out = detail::subbundleIntersect(f.bundle, s1, s2);
    if (!isMixedTwistor(inducedFiltration(f, out)).ok)
        throw std::logic_error("subIntersect: result is not a sub mixed twistor");
    return out;
}

namespace detail {

/// Intersection via the kernel of [S1 | -S2] over the function field.
template <class F>
Subbundle<F> subbundleIntersect(const TwistorBundle<F>& parent, const Subbundle<F>& s1,
                                const Subbundle<F>& s2) {
    if (s1.rank() == 0 || s2.rank() == 0) return zeroSubbundle(parent);
    Matrix<Poly<F>> neg = s2.lambdaBasis.template map<Poly<F>>(
        [](const Poly<F>& p) { return -p; });
    auto big = hcat(s1.lambdaBasis, neg).template map<RatFunc<F>>(
        [](const Poly<F>& p) { return RatFunc<F>(p); });
    Subspace<RatFunc<F>> ker = kernel(big);
    if (ker.dim() == 0) return zeroSubbundle(parent);
    auto s1r = s1.lambdaBasis.template map<RatFunc<F>>(
        [](const Poly<F>& p) { return RatFunc<F>(p); });
    Matrix<RatFunc<F>> gens =
        s1r * ker.basis().subMatrix(0, 0, s1.rank(), ker.dim());
    return saturate(parent, laurentFromPoly(clearRatColumns(gens)));
}

} // namespace detail

template <class F>
FilteredTwistorBundle<F> inducedFiltration(const FilteredTwistorBundle<F>& f,
                                           const Subbundle<F>& sub) {
    FilteredTwistorBundle<F> out{sub.asBundle(), {}};
    for (const auto& [l, step] : f.steps) {
        Subbundle<F> cut = detail::subbundleIntersect(f.bundle, sub, step);
        out.steps.emplace(l, restrictToSub(sub, cut));
    }
    return out;
}

template <class F>
struct KerImCoker {
    FilteredTwistorBundle<F> ker, im, coker;
};

namespace detail {

/// Quotient of a bundle by a saturated subbundle, with the projection of
/// polynomial generator columns into quotient coordinates.
template <class F>
struct QuotientData {
    TwistorBundle<F> bundle;
    Matrix<Poly<F>> lambdaProjector;   // (r - s) x r, applied after the adapted change
    Matrix<Poly<F>> adaptedInverse;    // C⁻¹ with C = [S | completion]
    Matrix<Poly<F>> muAdaptedInverse;
};

template <class F>
QuotientData<F> quotientBundle(const TwistorBundle<F>& parent, const Subbundle<F>& sub) {
    int r = parent.rank, s = sub.rank();
    QuotientData<F> q;
    if (s == 0) {
        q.bundle = parent;
        q.adaptedInverse = Matrix<Poly<F>>::identity(r);
        q.muAdaptedInverse = Matrix<Poly<F>>::identity(r);
        return q;
    }
    Matrix<Poly<F>> cl =
        s == r ? sub.lambdaBasis : unimodularCompletion(sub.lambdaBasis);
    Matrix<Poly<F>> cm = s == r ? sub.muBasis : unimodularCompletion(sub.muBasis);
    q.adaptedInverse = unimodularInverse(cl);
    q.muAdaptedInverse = unimodularInverse(cm);
    LaurentMatrix<F> adapted = laurentFromPoly(q.adaptedInverse) * parent.gluing *
                               laurentInvertVar(laurentFromPoly(cm));
    for (int row = s; row < r; ++row)
        for (int col = 0; col < s; ++col)
            if (!adapted.at(row, col).isZero())
                throw std::invalid_argument("quotientBundle: subbundle not gluing-stable");
    q.bundle = {r - s, adapted.subMatrix(s, s, r - s, r - s)};
    return q;
}

/// Image of a subbundle of the parent in the quotient, as a subbundle of
/// the quotient bundle.
template <class F>
Subbundle<F> projectToQuotient(const QuotientData<F>& q, int parentRank,
                               const Subbundle<F>& step) {
    int s = parentRank - q.bundle.rank;
    if (step.rank() == 0 || q.bundle.rank == 0) return zeroSubbundle(q.bundle);
    Matrix<Poly<F>> coords = q.adaptedInverse * step.lambdaBasis;
    Matrix<Poly<F>> lower = coords.subMatrix(s, 0, q.bundle.rank, step.rank());
    return saturate(q.bundle, laurentFromPoly(lower));
}

} // namespace detail

/// Kernel, image, and cokernel of a filtration-preserving morphism between
/// mixed twistors, with induced filtrations; verifies rank constancy and
/// the strictness identity f(W_l) = Im f ∩ W_l.
template <class F>
KerImCoker<F> morphismKerImCoker(const FilteredTwistorBundle<F>& src,
                                 const FilteredTwistorBundle<F>& dst,
                                 const BundleMorphism<F>& f) {
    validateMorphism(src.bundle, dst.bundle, f);
    if (!isMixedTwistor(src).ok || !isMixedTwistor(dst).ok)
        throw std::invalid_argument("morphismKerImCoker: sides are not mixed twistors");
    auto fr = f.lambdaRep.template map<RatFunc<F>>(
        [](const Poly<F>& p) { return RatFunc<F>(p); });
    int genericRank = rank(fr);
    if (genericRank != rank(polyEval(f.lambdaRep, F(0))) ||
        genericRank != rank(polyEval(f.muRep, F(0))))
        throw std::domain_error("morphismKerImCoker: rank jumps at a chart origin");

    KerImCoker<F> out;
    // kernel
    Subspace<RatFunc<F>> kerSpace = kernel(fr);
    Subbundle<F> kerSub =
        kerSpace.dim() == 0
            ? zeroSubbundle(src.bundle)
            : saturate(src.bundle, laurentFromPoly(clearRatColumns(kerSpace.basis())));
    out.ker.bundle = kerSub.asBundle();
    for (const auto& [l, step] : src.steps)
        out.ker.steps.emplace(
            l, restrictToSub(kerSub, detail::subbundleIntersect(src.bundle, kerSub, step)));

    // image and strictness
    Subbundle<F> imSub = saturate(dst.bundle, laurentFromPoly(f.lambdaRep));
    out.im.bundle = imSub.asBundle();
    for (const auto& [l, step] : src.steps) {
        Subbundle<F> pushed =
            step.rank() == 0
                ? zeroSubbundle(dst.bundle)
                : saturate(dst.bundle, laurentFromPoly(f.lambdaRep * step.lambdaBasis));
        auto dstStep = dst.steps.find(l);
        if (dstStep != dst.steps.end()) {
            Subbundle<F> cut =
                detail::subbundleIntersect(dst.bundle, imSub, dstStep->second);
            if (!subbundleEqual(pushed, cut))
                throw std::logic_error("morphismKerImCoker: strictness identity fails");
        }
        out.im.steps.emplace(l, restrictToSub(imSub, pushed));
    }

    // cokernel
    detail::QuotientData<F> q = detail::quotientBundle(dst.bundle, imSub);
    out.coker.bundle = q.bundle;
    for (const auto& [l, step] : dst.steps)
        out.coker.steps.emplace(l,
                                detail::projectToQuotient(q, dst.bundle.rank, step));
    return out;
}

struct DegreeBoundVerdict {
    bool hypotheses = true;
    bool gradedInjective = true;
    bool pure = true;
};

/// For a subbundle L with its own filtration inside a mixed twistor:
/// check W_{L,l} ⊆ W_{l+a} and the degree condition on Gr^{W_L}_l, and
/// when both hold, verify graded injectivity and purity of weight l+a.
template <class F>
DegreeBoundVerdict degreeBoundCheck(const FilteredTwistorBundle<F>& f, const Subbundle<F>& L,
                                    const std::map<int, Subbundle<F>>& wl, int a) {
    DegreeBoundVerdict v;
    if (wl.empty() || wl.rbegin()->second.rank() != L.rank())
        throw std::invalid_argument("degreeBoundCheck: filtration does not exhaust L");
    auto stepAtOrBelow = [&](int h) {
        Subbundle<F> target = zeroSubbundle(f.bundle);
        for (const auto& [k, s] : f.steps)
            if (k <= h) target = s;
        return target;
    };
    for (const auto& [l, step] : wl)
        if (!subbundleContains(stepAtOrBelow(l + a), step)) v.hypotheses = false;
    FilteredTwistorBundle<F> lf{L.asBundle(), {}};
    for (const auto& [l, step] : wl) lf.steps.emplace(l, restrictToSub(L, step));
    std::map<int, TwistorBundle<F>> grl = gradedPieces(lf);
    for (const auto& [l, gr] : grl) {
        if (gr.rank == 0) continue;
        if (validate(gr).degree != (l + a) * gr.rank) v.hypotheses = false;
    }
    if (!v.hypotheses) return {false, false, false};
    // conclusion 1: Gr^{W_L}_l injects into Gr_{l+a}, i.e. W_{L,l} meets
    // W_{l+a-1} exactly in W_{L,l-1}
    for (const auto& [l, step] : wl) {
        Subbundle<F> below = zeroSubbundle(f.bundle);
        for (const auto& [h, s] : f.steps)
            if (h <= l + a - 1) below = s;
        Subbundle<F> cut = detail::subbundleIntersect(f.bundle, step, below);
        Subbundle<F> prev = zeroSubbundle(f.bundle);
        for (const auto& [h, s] : wl)
            if (h < l) prev = s;
        if (!subbundleEqual(cut, prev)) v.gradedInjective = false;
    }
    // conclusion 2: purity of the graded pieces of L
    for (const auto& [l, gr] : grl)
        if (gr.rank > 0 && !isPure(gr, l + a)) v.pure = false;
    return v;
}

struct TwistorCompatReport {
    bool hypothesesOk = true;
    bool conclusionOk = true;
    std::string stage;
};

namespace detail {

template <class F>
bool strongAt(const std::vector<Matrix<F>>& maps) {
    if (maps.empty()) return true;
    return isStronglySequentiallyCompatible(CommutingTuple<F>(maps)).ok;
}

template <class F>
bool sequentialAt(const std::vector<Matrix<F>>& maps) {
    if (maps.empty()) return true;
    return isSequentiallyCompatible(CommutingTuple<F>(maps)).ok;
}

} // namespace detail

/// Strong compatibility of the fiber tuples at every point of the line,
/// verified through the mixed-twistor hypotheses: the joint weight
/// filtration is a mixed twistor, each partial sum is a filtered morphism,
/// the full tuple is sequentially compatible pointwise, and the first
/// n - 1 maps are strongly compatible pointwise.  Conclusion: the full
/// tuple is strongly compatible pointwise.  Points: λ ∈ {0, 1, 2}, μ = 0,
/// plus the function field.
template <class F>
TwistorCompatReport strongCompatViaTwistor(const TwistorBundle<F>& b,
                                           const std::vector<BundleMorphism<F>>& morphisms) {
    TwistorCompatReport rep;
    int n = static_cast<int>(morphisms.size());
    if (n == 0) return rep;
    for (const auto& m : morphisms) {
        validateMorphism(b, b, m);
        if (m.twist != 2) throw std::invalid_argument("strongCompatViaTwistor: twist must be 2");
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!(morphisms[i].lambdaRep * morphisms[j].lambdaRep ==
                  morphisms[j].lambdaRep * morphisms[i].lambdaRep)) {
                rep.hypothesesOk = false;
                rep.stage = "commutation";
            }
    if (!rep.hypothesesOk) { rep.conclusionOk = false; return rep; }

    // hypothesis: W(n) is a mixed twistor, and each partial sum preserves it
    BundleMorphism<F> total{2, Matrix<Poly<F>>(b.rank, b.rank), Matrix<Poly<F>>(b.rank, b.rank)};
    for (const auto& m : morphisms) {
        total.lambdaRep = total.lambdaRep + m.lambdaRep;
        total.muRep = total.muRep + m.muRep;
    }
    FilteredTwistorBundle<F> w;
    try {
        w = morphismWeightFiltration(b, total);
    } catch (const std::domain_error&) {
        rep.hypothesesOk = rep.conclusionOk = false;
        rep.stage = "weight filtration constancy";
        return rep;
    }
    if (!isMixedTwistor(w).ok) {
        rep.hypothesesOk = rep.conclusionOk = false;
        rep.stage = "mixed twistor";
        return rep;
    }
    Matrix<Poly<F>> partial(b.rank, b.rank);
    for (int j = 0; j < n && rep.hypothesesOk; ++j) {
        partial = partial + morphisms[j].lambdaRep;
        for (const auto& [h, step] : w.steps) {
            if (step.rank() == 0) continue;
            try {
                detail::polyCoordinates(step.lambdaBasis, partial * step.lambdaBasis);
            } catch (const std::domain_error&) {
                rep.hypothesesOk = false;
                rep.stage = "filtered morphism";
            }
        }
    }
    if (!rep.hypothesesOk) { rep.conclusionOk = false; return rep; }

    auto fibers = [&](int count) {
        std::vector<std::vector<Matrix<F>>> out;
        for (const F& pt : {F(0), F(1), F(2)}) {
            std::vector<Matrix<F>> maps;
            for (int j = 0; j < count; ++j) maps.push_back(polyEval(morphisms[j].lambdaRep, pt));
            out.push_back(std::move(maps));
        }
        std::vector<Matrix<F>> mu;
        for (int j = 0; j < count; ++j) mu.push_back(polyEval(morphisms[j].muRep, F(0)));
        out.push_back(std::move(mu));
        return out;
    };
    auto functionField = [&](int count) {
        std::vector<Matrix<RatFunc<F>>> maps;
        for (int j = 0; j < count; ++j)
            maps.push_back(morphisms[j].lambdaRep.template map<RatFunc<F>>(
                [](const Poly<F>& p) { return RatFunc<F>(p); }));
        return maps;
    };

    for (const auto& maps : fibers(n))
        if (!detail::sequentialAt(maps)) { rep.hypothesesOk = false; rep.stage = "pointwise sequential"; }
    if (rep.hypothesesOk && !detail::sequentialAt(functionField(n))) {
        rep.hypothesesOk = false;
        rep.stage = "pointwise sequential";
    }
    if (rep.hypothesesOk && n >= 2) {
        for (const auto& maps : fibers(n - 1))
            if (!detail::strongAt(maps)) { rep.hypothesesOk = false; rep.stage = "subtuple strength"; }
        if (rep.hypothesesOk && !detail::strongAt(functionField(n - 1))) {
            rep.hypothesesOk = false;
            rep.stage = "subtuple strength";
        }
    }
    if (!rep.hypothesesOk) { rep.conclusionOk = false; return rep; }

    for (const auto& maps : fibers(n))
        if (!detail::strongAt(maps)) { rep.conclusionOk = false; rep.stage = "conclusion"; }
    if (rep.conclusionOk && !detail::strongAt(functionField(n))) {
        rep.conclusionOk = false;
        rep.stage = "conclusion";
    }
    return rep;
}

} // namespace htl
