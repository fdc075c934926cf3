#pragma once

// Weight filtrations of nilpotent endomorphisms and commuting tuples:
// primitive decompositions, sl2 splittings, tensor/sym/wedge product
// filtrations, and the compatibility hierarchy (sequential, level-h,
// bottom, universal-bottom, strong, Hodge type) with splittings/bases.

#include "htl/filtration.hpp"
#include "htl/matrix.hpp"
#include "htl/subspace.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace htl {

/// Smallest k >= 0 with m^k = 0; throws if m is not nilpotent.
template <class F>
int nilpotencyIndex(const Matrix<F>& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("nilpotencyIndex: non-square");
    int d = m.rows();
    if (d == 0) return 0;
    Matrix<F> p = Matrix<F>::identity(d);
    for (int k = 0; k <= d; ++k) {
        if (p.isZero()) return k;
        p = p * m;
    }
    throw std::invalid_argument("nilpotencyIndex: matrix is not nilpotent");
}

template <class F>
struct NilpotentEndo {
    Matrix<F> matrix;
    int nilIndex;
    explicit NilpotentEndo(Matrix<F> m)
        : matrix(std::move(m)), nilIndex(nilpotencyIndex(matrix)) {}
    int dim() const { return matrix.rows(); }
};

/// Ker(n^e), with Ker(n^e) = 0 for e <= 0.
template <class F>
Subspace<F> kernelOfPower(const Matrix<F>& n, int e) {
    if (e <= 0) return Subspace<F>::zero(n.rows());
    return kernel(n.pow(e));
}

namespace detail {

/// Both defining axioms of the weight filtration; throws on violation.
template <class F>
void verifyWeightAxioms(const Matrix<F>& n, const Filtration<F>& w) {
    for (int l = w.bottom(); l <= w.top(); ++l)
        if (!w.at(l - 2).contains(apply(n, w.at(l))))
            throw std::logic_error("weightFiltration: lowering axiom fails");
    int kmax = std::max(-w.bottom(), w.top());
    for (int k = 0; k <= kmax; ++k) {
        int gk = w.gradedDim(k), gmk = w.gradedDim(-k);
        int r = sum(apply(n.pow(k), w.at(k)), w.at(-k - 1)).dim() - w.dim(-k - 1);
        if (gk != gmk || r != gk)
            throw std::logic_error("weightFiltration: graded isomorphism axiom fails");
    }
}

} // namespace detail

/// The unique filtration with N W_l subset W_{l-2} and N^k: Gr_k -> Gr_{-k}
/// an isomorphism, assembled as W_l = sum_j N^j Ker(N^{l+2j+1}) over
/// j >= max(0, -l); the axioms are re-verified before returning.
template <class F>
Filtration<F> weightFiltration(const Matrix<F>& n) {
    int d = n.rows();
    if (d == 0) return Filtration<F>();
    int idx = nilpotencyIndex(n);
    std::vector<Matrix<F>> pw{Matrix<F>::identity(d)};
    for (int k = 1; k < idx; ++k) pw.push_back(pw.back() * n);
    auto kerP = [&](int e) {
        if (e >= idx) return Subspace<F>::full(d);
        return kernelOfPower(n, e);
    };
    int m = idx - 1;
    std::map<int, Subspace<F>> steps;
    for (int l = -m; l <= m; ++l) {
        Subspace<F> s = Subspace<F>::zero(d);
        for (int j = std::max(0, -l); j < idx; ++j)
            s = sum(s, apply(pw[j], kerP(l + 2 * j + 1)));
        steps[l] = s;
    }
    Filtration<F> w = Filtration<F>::fromSteps(d, steps);
    detail::verifyWeightAxioms(n, w);
    return w;
}

template <class F>
Filtration<F> weightFiltration(const NilpotentEndo<F>& n) {
    return weightFiltration(n.matrix);
}

/// sl2 structure adapted to N: semisimple element h with [h, N] = -2N,
/// integer eigenspaces V_a with W_l(N) = direct sum of V_a over a <= l,
/// and the Jordan chain basis realizing the decomposition.
template <class F>
struct Sl2Data {
    Matrix<F> h;
    std::map<int, Subspace<F>> eigenspaces;
    Matrix<F> chainBasis;             // columns: chain vectors, chains contiguous
    std::vector<int> chainWeights;    // eigenvalue of each column
};

template <class F>
Sl2Data<F> sl2Splitting(const Matrix<F>& n) {
    int d = n.rows();
    Sl2Data<F> out{Matrix<F>(d, d), {}, Matrix<F>(d, 0), {}};
    if (d == 0) return out;
    int idx = nilpotencyIndex(n);
    auto kerP = [&](int e) {
        if (e >= idx) return Subspace<F>::full(d);
        return kernelOfPower(n, e);
    };
    std::vector<std::vector<F>> vecs;
    std::vector<int> wts;
    for (int s = idx; s >= 1; --s) {
        // Chain tops of length s: complement of Ker(N^{s-1}) + N Ker(N^{s+1}).
        Subspace<F> covered = sum(kerP(s - 1), apply(n, kerP(s + 1)));
        Matrix<F> tops = quotientBasis(kerP(s), covered);
        for (int c = 0; c < tops.cols(); ++c) {
            Matrix<F> col(d, 1);
            col.setColumn(0, tops.columnVec(c));
            for (int m = 0; m < s; ++m) {
                vecs.push_back(col.columnVec(0));
                wts.push_back(s - 1 - 2 * m);
                col = n * col;
            }
        }
    }
    Matrix<F> b(d, static_cast<int>(vecs.size()));
    for (size_t c = 0; c < vecs.size(); ++c) b.setColumn(static_cast<int>(c), vecs[c]);
    if (b.cols() != d || rank(b) != d)
        throw std::logic_error("sl2Splitting: chain vectors do not form a basis");
    Matrix<F> diag(d, d);
    for (int i = 0; i < d; ++i) diag.at(i, i) = F(wts[i]);
    out.h = b * diag * inverse(b);
    out.chainBasis = b;
    out.chainWeights = wts;
    std::map<int, std::vector<std::vector<F>>> byWeight;
    for (int i = 0; i < d; ++i) byWeight[wts[i]].push_back(vecs[i]);
    for (const auto& [a, vs] : byWeight)
        out.eigenspaces.emplace(a, Subspace<F>::spanVectors(vs, d));

    if (out.h * n - n * out.h != n.scaled(F(-2)))
        throw std::logic_error("sl2Splitting: commutation relation fails");
    Filtration<F> w = weightFiltration(n);
    for (const auto& [l, s] : w.jumps()) {
        Subspace<F> acc = Subspace<F>::zero(d);
        for (const auto& [a, v] : out.eigenspaces)
            if (a <= l) acc = sum(acc, v);
        if (acc != s) throw std::logic_error("sl2Splitting: does not split the weight filtration");
    }
    return out;
}

template <class F>
Sl2Data<F> sl2Splitting(const NilpotentEndo<F>& n) {
    return sl2Splitting(n.matrix);
}

namespace detail {

/// P_{h1} Gr_{h1} = Ker(N^{h1+1}: Gr_{h1} -> Gr_{-h1-2}), in piece coordinates.
template <class F>
Subspace<F> primitivePiece(const Matrix<F>& n, const Filtration<F>& w,
                           const GradedModel<F>& model, int h1, int idx) {
    if (model.pieceDim(h1) == 0) return Subspace<F>::zero(model.pieceDim(h1));
    if (h1 < 0) return Subspace<F>::zero(model.pieceDim(h1));
    Subspace<F> ker = (h1 + 1 >= idx)
                          ? Subspace<F>::full(w.ambientDim())
                          : preimage(n.pow(h1 + 1), w.at(-h1 - 3));
    return model.projectToPiece(h1, intersect(w.at(h1), ker));
}

} // namespace detail

/// Primitive decomposition of Gr^{W(N)}: parts[(l, a)] = P_l Gr_a in
/// piece-a coordinates, with P_l Gr_l the kernel of N^{l+1} at graded
/// level and P_l Gr_{l-2m} its image under N^m.
template <class F>
struct PrimitiveDecomposition {
    Filtration<F> w;
    std::map<std::pair<int, int>, Subspace<F>> parts;
};

template <class F>
PrimitiveDecomposition<F> primitiveDecomposition(const Matrix<F>& n) {
    PrimitiveDecomposition<F> out;
    out.w = weightFiltration(n);
    if (n.rows() == 0) return out;
    int idx = nilpotencyIndex(n);
    GradedModel<F> model(out.w);
    for (int l : model.weights()) {
        if (l < 0) continue;
        Subspace<F> top = detail::primitivePiece(n, out.w, model, l, idx);
        out.parts[{l, l}] = top;
        if (top.dim() == 0) continue;
        Matrix<F> up = model.transversal(l) * top.basis();
        for (int m = 1; 2 * m <= 2 * l; ++m) {
            int a = l - 2 * m;
            out.parts[{l, a}] = model.projectToPiece(a, Subspace<F>::span(n.pow(m) * up));
        }
    }
    for (int a : model.weights()) {
        Subspace<F> acc = Subspace<F>::zero(model.pieceDim(a));
        int total = 0;
        for (const auto& [key, p] : out.parts)
            if (key.second == a) {
                acc = sum(acc, p);
                total += p.dim();
            }
        if (total != model.pieceDim(a) || acc.dim() != total)
            throw std::logic_error("primitiveDecomposition: pieces do not sum to Gr");
    }
    return out;
}

template <class F>
PrimitiveDecomposition<F> primitiveDecomposition(const NilpotentEndo<F>& n) {
    return primitiveDecomposition(n.matrix);
}

enum class ProductKind { Tensor, Sym, Wedge };

namespace detail {

/// Monomial index tuples for the product basis: all tuples (tensor, lex,
/// leftmost index most significant), non-decreasing (sym), or strictly
/// increasing (wedge).
inline std::vector<std::vector<int>> productBasisTuples(int d, int power, ProductKind kind) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int pos) {
        if (pos == power) {
            out.push_back(cur);
            return;
        }
        int start = 0;
        if (pos > 0 && kind == ProductKind::Sym) start = cur.back();
        if (pos > 0 && kind == ProductKind::Wedge) start = cur.back() + 1;
        for (int i = start; i < d; ++i) {
            cur.push_back(i);
            rec(pos + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

/// Sorts t in place; returns the permutation sign, or 0 on a repeat.
inline int sortWithSign(std::vector<int>& t) {
    int sign = 1;
    for (size_t i = 1; i < t.size(); ++i)
        for (size_t j = i; j > 0 && t[j] < t[j - 1]; --j) {
            std::swap(t[j], t[j - 1]);
            sign = -sign;
        }
    for (size_t i = 1; i < t.size(); ++i)
        if (t[i] == t[i - 1]) return 0;
    return sign;
}

/// Product of the given vectors in the monomial basis of the product space.
template <class F>
std::vector<F> productOfVectors(ProductKind kind, const std::vector<std::vector<F>>& xs,
                                const std::map<std::vector<int>, int>& index, int d) {
    int power = static_cast<int>(xs.size());
    std::vector<F> out(index.size(), F(0));
    for (auto& u : productBasisTuples(d, power, ProductKind::Tensor)) {
        F c(1);
        bool zero = false;
        for (int p = 0; p < power; ++p) {
            c = c * xs[p][u[p]];
            if (c.isZero()) { zero = true; break; }
        }
        if (zero) continue;
        std::vector<int> key = u;
        int sign = 1;
        if (kind == ProductKind::Sym) std::sort(key.begin(), key.end());
        if (kind == ProductKind::Wedge) {
            sign = sortWithSign(key);
            if (sign == 0) continue;
        }
        int i = index.at(key);
        out[i] = out[i] + c * F(sign);
    }
    return out;
}

} // namespace detail

/// Derivation-style action sum_p 1 x ... x N x ... x 1 on the chosen
/// product space, in the fixed monomial basis.
template <class F>
NilpotentEndo<F> productEndo(const Matrix<F>& n, int power, ProductKind kind) {
    if (power < 0) throw std::invalid_argument("productEndo: negative power");
    int d = n.rows();
    auto basis = detail::productBasisTuples(d, power, kind);
    std::map<std::vector<int>, int> index;
    for (size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], static_cast<int>(i));
    int D = static_cast<int>(basis.size());
    Matrix<F> m(D, D);
    for (int c = 0; c < D; ++c)
        for (int p = 0; p < power; ++p)
            for (int k = 0; k < d; ++k) {
                const F& coef = n.at(k, basis[c][p]);
                if (coef.isZero()) continue;
                std::vector<int> u = basis[c];
                u[p] = k;
                int sign = 1;
                if (kind == ProductKind::Sym) std::sort(u.begin(), u.end());
                if (kind == ProductKind::Wedge) {
                    sign = detail::sortWithSign(u);
                    if (sign == 0) continue;
                }
                int r = index.at(u);
                m.at(r, c) = m.at(r, c) + coef * F(sign);
            }
    return NilpotentEndo<F>(m);
}

template <class F>
NilpotentEndo<F> productEndo(const NilpotentEndo<F>& n, int power, ProductKind kind) {
    return productEndo(n.matrix, power, kind);
}

/// Weight filtration on the product space by the closed formula (spans of
/// monomials in split eigen-coordinates with total degree <= l), verified
/// against the direct computation on productEndo before returning.
template <class F>
Filtration<F> productWeightFiltration(const Matrix<F>& n, int power, ProductKind kind) {
    Filtration<F> direct = weightFiltration(productEndo(n, power, kind).matrix);
    int d = n.rows();
    if (power == 0 || direct.ambientDim() == 0) {
        Filtration<F> formula = direct.ambientDim() == 0
                                    ? Filtration<F>()
                                    : Filtration<F>::trivial(direct.ambientDim());
        if (formula != direct)
            throw std::logic_error("productWeightFiltration: formula mismatch");
        return direct;
    }
    Sl2Data<F> s = sl2Splitting(n);
    auto basis = detail::productBasisTuples(d, power, kind);
    std::map<std::vector<int>, int> index;
    for (size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], static_cast<int>(i));
    int D = static_cast<int>(basis.size());

    std::map<int, std::vector<std::vector<F>>> byTotal;
    for (auto& pick : detail::productBasisTuples(d, power, kind)) {
        int total = 0;
        std::vector<std::vector<F>> xs;
        for (int p : pick) {
            total += s.chainWeights[p];
            xs.push_back(s.chainBasis.columnVec(p));
        }
        std::vector<F> v = detail::productOfVectors(kind, xs, index, d);
        byTotal[total].push_back(v);
    }
    std::map<int, Subspace<F>> steps;
    std::vector<std::vector<F>> acc;
    for (const auto& [l, vs] : byTotal) {
        acc.insert(acc.end(), vs.begin(), vs.end());
        steps[l] = Subspace<F>::spanVectors(acc, D);
    }
    Filtration<F> formula = Filtration<F>::fromSteps(D, steps);
    if (formula != direct)
        throw std::logic_error("productWeightFiltration: formula mismatch");
    return direct;
}

template <class F>
Filtration<F> productWeightFiltration(const NilpotentEndo<F>& n, int power, ProductKind kind) {
    return productWeightFiltration(n.matrix, power, kind);
}

/// Commuting tuple (N_1,...,N_n) with partial sums N(1..j) and their
/// cached weight filtrations W(j).
template <class F>
class CommutingTuple {
public:
    explicit CommutingTuple(std::vector<Matrix<F>> maps) : maps_(std::move(maps)) {
        for (size_t i = 0; i < maps_.size(); ++i) {
            if (maps_[i].rows() != maps_[i].cols() || maps_[i].rows() != dim())
                throw std::invalid_argument("CommutingTuple: shape mismatch at map " +
                                            std::to_string(i + 1));
            nilpotencyIndex(maps_[i]);
            for (size_t j = 0; j < i; ++j)
                if (maps_[i] * maps_[j] != maps_[j] * maps_[i])
                    throw std::invalid_argument("CommutingTuple: maps " + std::to_string(j + 1) +
                                                " and " + std::to_string(i + 1) +
                                                " do not commute");
        }
    }

    int size() const { return static_cast<int>(maps_.size()); }
    int dim() const { return maps_.empty() ? 0 : maps_[0].rows(); }
    const std::vector<Matrix<F>>& maps() const { return maps_; }

    /// N(1..j) = N_1 + ... + N_j (j is 1-based).
    Matrix<F> partialSum(int j) const {
        if (j < 1 || j > size()) throw std::invalid_argument("CommutingTuple: bad index");
        Matrix<F> s = maps_[0];
        for (int i = 1; i < j; ++i) s = s + maps_[i];
        return s;
    }

    /// Weight filtration of N(1..j), cached.
    const Filtration<F>& w(int j) const {
        auto it = wCache_.find(j);
        if (it == wCache_.end()) it = wCache_.emplace(j, weightFiltration(partialSum(j))).first;
        return it->second;
    }

private:
    std::vector<Matrix<F>> maps_;
    mutable std::map<int, Filtration<F>> wCache_;
};

/// Samples W(sum_{i in I} a_i N_i) over positive coefficient vectors
/// (all-ones, one large-magnitude coefficient per slot, random positive
/// rationals) and reports whether the filtration is constant.
template <class F>
bool coneConstancySampled(const CommutingTuple<F>& t, const std::vector<int>& subset,
                          int samples = 2, std::uint64_t seed = 9001) {
    if (subset.empty() || t.dim() == 0) return true;
    auto combo = [&](const std::vector<F>& a) {
        Matrix<F> m(t.dim(), t.dim());
        for (size_t i = 0; i < subset.size(); ++i) m = m + t.maps()[subset[i]].scaled(a[i]);
        return weightFiltration(m);
    };
    std::vector<F> ones(subset.size(), F(1));
    Filtration<F> ref = combo(ones);
    for (size_t i = 0; i < subset.size(); ++i) {
        std::vector<F> a = ones;
        a[i] = F(1000000);
        if (combo(a) != ref) return false;
    }
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> small(1, 9);
    for (int s = 0; s < samples; ++s) {
        std::vector<F> a;
        for (size_t i = 0; i < subset.size(); ++i)
            a.push_back(F(small(gen)) * F(small(gen)).inv());
        if (combo(a) != ref) return false;
    }
    return true;
}

/// Matrix of the endomorphism induced on graded coordinates by a map
/// preserving the base filtration (block diagonal across pieces).
template <class F>
Matrix<F> inducedOnGraded(const GradedModel<F>& model, const Matrix<F>& m) {
    int D = model.gradedDim();
    Matrix<F> g(D, D);
    for (int a : model.weights()) {
        Matrix<F> mt = m * model.transversal(a);
        int off = model.pieceOffset(a);
        for (int c = 0; c < mt.cols(); ++c) {
            std::vector<F> coords = model.pieceCoords(a, mt.columnVec(c));
            for (size_t r = 0; r < coords.size(); ++r)
                g.at(off + static_cast<int>(r), off + c) = coords[r];
        }
    }
    return g;
}

/// Induced tuple (N_2^{(1)},...,N_n^{(1)}) on the graded space of W(1).
template <class F>
CommutingTuple<F> inducedTuple(const GradedModel<F>& model, const CommutingTuple<F>& t) {
    std::vector<Matrix<F>> maps;
    for (int i = 1; i < t.size(); ++i) maps.push_back(inducedOnGraded(model, t.maps()[i]));
    return CommutingTuple<F>(maps);
}

struct TupleCompatResult {
    bool ok = true;
    std::string stage;           // "cone", "induced:...", "image", "primitive-image"
    std::vector<int> witnessH;   // offending tuple (or subset for "cone")
    int imageDim = 0;
    int targetDim = 0;
};

namespace detail {

/// Per-piece restrictions of the intrinsic weight filtrations of the
/// induced partial sums, as filtrations in piece coordinates.
template <class F>
std::map<int, std::vector<Filtration<F>>> restrictedInducedWeights(
    const GradedModel<F>& model, const CommutingTuple<F>& ind) {
    std::map<int, std::vector<Filtration<F>>> out;
    for (int a : model.weights()) {
        std::vector<Filtration<F>>& v = out[a];
        for (int j = 1; j <= ind.size(); ++j) {
            const Filtration<F>& wg = ind.w(j);
            std::map<int, Subspace<F>> steps;
            for (int l : wg.jumpWeights()) steps[l] = model.restrictToPiece(a, wg.at(l));
            v.push_back(Filtration<F>::fromSteps(model.pieceDim(a), steps));
        }
    }
    return out;
}

/// Quantifier range for the indices h_2..h_n: the realized weight range of
/// all the filtrations in play, padded by its own length.
template <class F>
std::vector<int> upstairsRange(const CommutingTuple<F>& t, const CommutingTuple<F>& ind) {
    int lo = t.w(1).bottom(), hi = t.w(1).top();
    for (int j = 2; j <= t.size(); ++j) {
        lo = std::min({lo, t.w(j).bottom(), ind.w(j - 1).bottom()});
        hi = std::max({hi, t.w(j).top(), ind.w(j - 1).top()});
    }
    int pad = hi - lo + 1;
    std::vector<int> range;
    for (int l = lo - pad; l <= hi + pad; ++l) range.push_back(l);
    return range;
}

template <class F>
TupleCompatResult sequentialCheck(const CommutingTuple<F>& t, std::optional<int> levelCap,
                                  int coneSamples, std::uint64_t seed) {
    TupleCompatResult res;
    const int n = t.size();
    if (n == 0 || t.dim() == 0) return res;

    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> subset;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) subset.push_back(i);
        if (!coneConstancySampled(t, subset, coneSamples, seed)) {
            res.ok = false;
            res.stage = "cone";
            for (int i : subset) res.witnessH.push_back(i + 1);
            return res;
        }
    }
    if (n == 1) return res;

    GradedModel<F> model(t.w(1));
    CommutingTuple<F> ind = inducedTuple(model, t);
    TupleCompatResult sub = sequentialCheck(ind, std::nullopt, coneSamples, seed);
    if (!sub.ok) {
        sub.stage = "induced:" + sub.stage;
        return sub;
    }

    // Restatement check: on every piece, the filtration induced by W(j)
    // coincides with the intrinsic weight filtration of the induced map
    // (the l+a index shift of inducedOnPiece matches the restatement's
    // indexing).  When it holds, the image condition below is literally
    // the restated one; the two verdicts are cross-checked at the end.
    auto restF = restrictedInducedWeights(model, ind);
    bool restatementOk = true;
    for (int a : model.weights())
        for (int j = 2; j <= n && restatementOk; ++j)
            if (model.inducedOnPiece(a, t.w(j)) != restF.at(a)[j - 2]) restatementOk = false;

    std::vector<int> pieces;
    for (int a : model.weights())
        if (!levelCap || a <= *levelCap) pieces.push_back(a);
    std::vector<int> range = upstairsRange(t, ind);

    bool imageOk = true;
    if (!pieces.empty()) {
        std::vector<size_t> idx(n, 0);
        std::vector<size_t> sizes(n, range.size());
        sizes[0] = pieces.size();
        while (imageOk) {
            std::vector<int> h(n);
            h[0] = pieces[idx[0]];
            for (int j = 1; j < n; ++j) h[j] = range[idx[j]];

            Subspace<F> inter = t.w(1).at(h[0]);
            for (int j = 2; j <= n; ++j) inter = intersect(inter, t.w(j).at(h[j - 1]));
            Subspace<F> img = model.projectToPiece(h[0], inter);

            Subspace<F> target = Subspace<F>::full(model.pieceDim(h[0]));
            for (int j = 2; j <= n; ++j)
                target = intersect(target, restF.at(h[0])[j - 2].at(h[j - 1] - h[0]));

            if (img != target) {
                imageOk = false;
                res.witnessH = h;
                res.imageDim = img.dim();
                res.targetDim = target.dim();
                break;
            }
            int carry = n - 1;
            while (carry >= 0 && ++idx[carry] == sizes[carry]) idx[carry--] = 0;
            if (carry < 0) break;
        }
    }

    if (!levelCap && imageOk && !restatementOk)
        throw std::logic_error(
            "sequentialCheck: image condition and its restatement disagree");

    if (!imageOk) {
        res.ok = false;
        res.stage = "image";
    }
    return res;
}

} // namespace detail

template <class F>
TupleCompatResult isSequentiallyCompatible(const CommutingTuple<F>& t, int coneSamples = 2,
                                           std::uint64_t seed = 9001) {
    return detail::sequentialCheck(t, std::nullopt, coneSamples, seed);
}

/// Sequential compatibility with the image condition restricted to pieces
/// h1 <= level (cone constancy and the induced-tuple condition unchanged).
template <class F>
bool isSequentiallyCompatibleAtLevel(const CommutingTuple<F>& t, int level,
                                     int coneSamples = 2, std::uint64_t seed = 9001) {
    return detail::sequentialCheck(t, level, coneSamples, seed).ok;
}

/// Bottom-part compatibility via the single-intersection criterion:
/// W(1)_b cap W(j)_h = Gr_b cap W(induced of N(1..j))_{h-b} for all j, h.
template <class F>
bool isBottomCompatible(const CommutingTuple<F>& t, int coneSamples = 2,
                        std::uint64_t seed = 9001) {
    const int n = t.size();
    if (n == 0 || t.dim() == 0) return true;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> subset;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) subset.push_back(i);
        if (!coneConstancySampled(t, subset, coneSamples, seed)) return false;
    }
    if (n == 1) return true;

    GradedModel<F> model(t.w(1));
    CommutingTuple<F> ind = inducedTuple(model, t);
    if (!detail::sequentialCheck(ind, std::nullopt, coneSamples, seed).ok) return false;

    int b = t.w(1).bottom();
    for (int j = 2; j <= n; ++j) {
        const Filtration<F>& wg = ind.w(j - 1);
        std::vector<int> jw = t.w(j).jumpWeights();
        std::set<int> grid(jw.begin(), jw.end());
        for (int l : wg.jumpWeights()) grid.insert(l + b);
        if (grid.empty()) grid.insert(0);
        grid.insert(*grid.begin() - 1);
        for (int h : grid) {
            Subspace<F> lhs = model.projectToPiece(b, intersect(t.w(1).at(b), t.w(j).at(h)));
            Subspace<F> rhs = model.restrictToPiece(b, wg.at(h - b));
            if (lhs != rhs) return false;
        }
    }
    return true;
}

/// Tuple of the induced maps on the m-th exterior power.
template <class F>
CommutingTuple<F> wedgePowerTuple(const CommutingTuple<F>& t, int m) {
    std::vector<Matrix<F>> maps;
    for (const auto& n : t.maps()) maps.push_back(productEndo(n, m, ProductKind::Wedge).matrix);
    return CommutingTuple<F>(maps);
}

/// Bottom compatibility of every exterior power m <= maxPower;
/// maxPower = dim is exhaustive (higher powers vanish).
template <class F>
bool isUniversallyBottomCompatible(const CommutingTuple<F>& t, int maxPower,
                                   int coneSamples = 2, std::uint64_t seed = 9001) {
    int cap = std::min(maxPower, t.dim());
    for (int m = 0; m <= cap; ++m)
        if (!isBottomCompatible(wedgePowerTuple(t, m), coneSamples, seed)) return false;
    return true;
}

/// Strong compatibility: sequential, plus surjectivity of the primitive
/// projections P pi_h onto P_{h1}Gr_{h1} cap the induced filtrations.
/// The unconditional one-sided inclusion is asserted whenever the tuple
/// is sequentially compatible.
template <class F>
TupleCompatResult isStronglySequentiallyCompatible(const CommutingTuple<F>& t,
                                                   int coneSamples = 2,
                                                   std::uint64_t seed = 9001) {
    TupleCompatResult seq = isSequentiallyCompatible(t, coneSamples, seed);
    if (!seq.ok) {
        seq.stage = "sequential:" + seq.stage;
        return seq;
    }
    const int n = t.size();
    if (n == 0 || t.dim() == 0) return seq;

    const Matrix<F>& n1 = t.maps()[0];
    int idx = nilpotencyIndex(n1);
    GradedModel<F> model(t.w(1));
    CommutingTuple<F> ind(n > 1 ? inducedTuple(model, t)
                                : CommutingTuple<F>(std::vector<Matrix<F>>{}));

    std::map<int, Subspace<F>> prim;
    std::map<int, std::vector<Filtration<F>>> pieceInd;
    for (int a : model.weights()) {
        prim.emplace(a, detail::primitivePiece(n1, t.w(1), model, a, idx));
        std::vector<Filtration<F>>& v = pieceInd[a];
        for (int j = 2; j <= n; ++j) v.push_back(model.inducedOnPiece(a, t.w(j)));
    }
    std::vector<int> range = n > 1 ? detail::upstairsRange(t, ind)
                                   : std::vector<int>{0};

    std::vector<size_t> idxv(n, 0);
    std::vector<size_t> sizes(n, range.size());
    sizes[0] = model.weights().size();
    TupleCompatResult res;
    while (true) {
        std::vector<int> h(n);
        h[0] = model.weights()[idxv[0]];
        for (int j = 1; j < n; ++j) h[j] = range[idxv[j]];

        Subspace<F> dom = intersect(kernelOfPower(n1, h[0] + 1), t.w(1).at(h[0]));
        for (int j = 2; j <= n; ++j) dom = intersect(dom, t.w(j).at(h[j - 1]));
        Subspace<F> img = model.projectToPiece(h[0], dom);

        Subspace<F> target = prim.at(h[0]);
        for (int j = 2; j <= n; ++j)
            target = intersect(target, pieceInd.at(h[0])[j - 2].at(h[j - 1] - h[0]));

        if (!target.contains(img))
            throw std::logic_error(
                "isStronglySequentiallyCompatible: one-sided inclusion violated");
        if (img != target) {
            res.ok = false;
            res.stage = "primitive-image";
            res.witnessH = h;
            res.imageDim = img.dim();
            res.targetDim = target.dim();
            return res;
        }
        int carry = n - 1;
        while (carry >= 0 && ++idxv[carry] == sizes[carry]) idxv[carry--] = 0;
        if (carry < 0) break;
    }
    return res;
}

/// Hodge type: every permutation of the tuple is strongly sequentially
/// compatible.  Capped at n <= 6 (factorial growth).
template <class F>
bool isHodgeType(const CommutingTuple<F>& t, int coneSamples = 2, std::uint64_t seed = 9001) {
    const int n = t.size();
    if (n > 6) throw std::invalid_argument("isHodgeType: supported only for n <= 6");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<Matrix<F>> maps;
        for (int i : perm) maps.push_back(t.maps()[i]);
        if (!isStronglySequentiallyCompatible(CommutingTuple<F>(maps), coneSamples, seed).ok)
            return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return true;
}

namespace detail {

/// Coordinates of s inside big's basis (requires s inside big).
template <class F>
Subspace<F> subCoordinates(const Subspace<F>& big, const Subspace<F>& s) {
    Matrix<F> x;
    if (!solve(big.basis(), s.basis(), x))
        throw std::logic_error("subCoordinates: not contained");
    return Subspace<F>::span(x);
}

} // namespace detail

/// Splitting V = direct sum of P_k U_kappa over primitivity levels k >= 0
/// and increment tuples kappa (so deg^{W(j)} = kappa_1 + ... + kappa_j on
/// the component).
template <class F>
struct StrongSplitting {
    std::map<std::pair<int, std::vector<int>>, Subspace<F>> parts;
};

/// Inductive construction: split each primitive part of Gr^{W(1)} for the
/// restricted induced sequence, lift through the primitive projection into
/// the kernel-and-intersection constraint, and push down with N_1.
template <class F>
StrongSplitting<F> strongSplitting(const CommutingTuple<F>& t, int coneSamples = 2,
                                   std::uint64_t seed = 9001) {
    if (!isStronglySequentiallyCompatible(t, coneSamples, seed).ok)
        throw std::domain_error("strongSplitting: tuple is not strongly sequentially compatible");
    StrongSplitting<F> out;
    const int n = t.size();
    if (n == 0 || t.dim() == 0) return out;

    const Matrix<F>& n1 = t.maps()[0];
    int idx = nilpotencyIndex(n1);
    GradedModel<F> model(t.w(1));
    CommutingTuple<F> ind(n > 1 ? inducedTuple(model, t)
                                : CommutingTuple<F>(std::vector<Matrix<F>>{}));

    for (int h1 : model.weights()) {
        if (h1 < 0) continue;
        Subspace<F> p = detail::primitivePiece(n1, t.w(1), model, h1, idx);
        if (p.dim() == 0) continue;

        Splitting<F> sub;
        if (n == 1) {
            sub.emplace(std::vector<int>{}, Subspace<F>::full(p.dim()));
        } else {
            FiltrationSequence<F> seq;
            for (int j = 2; j <= n; ++j) {
                const Filtration<F>& wg = ind.w(j - 1);
                std::map<int, Subspace<F>> steps;
                for (int l : wg.jumpWeights())
                    steps[l] = detail::subCoordinates(
                        p, intersect(model.restrictToPiece(h1, wg.at(l)), p));
                seq.push_back(Filtration<F>::fromSteps(p.dim(), steps));
            }
            sub = compatibleSplitting(seq);
        }

        for (const auto& [dkey, ucoords] : sub) {
            if (ucoords.dim() == 0) continue;
            Subspace<F> constraint = kernelOfPower(n1, h1 + 1);
            for (int j = 2; j <= n; ++j)
                constraint = intersect(constraint, t.w(j).at(h1 + dkey[j - 2]));
            Matrix<F> z = p.basis() * ucoords.basis();
            std::vector<std::vector<F>> lifted;
            for (int c = 0; c < z.cols(); ++c)
                lifted.push_back(model.lift(h1, z.columnVec(c), constraint));
            Subspace<F> comp = Subspace<F>::spanVectors(lifted, t.dim());

            std::vector<int> key(n);
            key[0] = h1;
            for (int j = 2; j <= n; ++j)
                key[j - 1] = dkey[j - 2] - (j == 2 ? 0 : dkey[j - 3]);
            Subspace<F> cur = comp;
            for (int m = 0; m <= h1; ++m) {
                if (cur.dim() != comp.dim())
                    throw std::logic_error("strongSplitting: chain dimension drop");
                out.parts[{h1, key}] = cur;
                cur = apply(n1, cur);
                key[0] -= 2;
            }
            if (cur.dim() != 0)
                throw std::logic_error("strongSplitting: chain does not terminate");
        }
    }
    return out;
}

/// All defining conditions of the strong splitting: direct-sum identity
/// for every multi-intersection, vanishing outside |kappa_1| <= k with
/// matching parity, and the N_1 shift/kill laws.
template <class F>
bool verifyStrongSplitting(const CommutingTuple<F>& t, const StrongSplitting<F>& s) {
    const int n = t.size();
    int d = t.dim();
    int total = 0;
    for (const auto& [lab, u] : s.parts) total += u.dim();
    if (total != d) return false;
    if (n == 0 || d == 0) return true;

    const Matrix<F>& n1 = t.maps()[0];
    for (const auto& [lab, u] : s.parts) {
        const auto& [k, kap] = lab;
        if (k < 0 || std::abs(kap[0]) > k || (k - kap[0]) % 2 != 0) return false;
        Subspace<F> img = apply(n1, u);
        if (kap[0] == -k) {
            if (img.dim() != 0) return false;
        } else {
            std::vector<int> down = kap;
            down[0] -= 2;
            auto it = s.parts.find({k, down});
            if (it == s.parts.end() || img.dim() != u.dim() || img != it->second) return false;
        }
    }

    auto rho = [](const std::vector<int>& kap, int j) {
        int r = 0;
        for (int i = 0; i < j; ++i) r += kap[i];
        return r;
    };
    std::vector<std::vector<int>> grids(n);
    for (int j = 1; j <= n; ++j) {
        std::vector<int> jw = t.w(j).jumpWeights();
        std::set<int> g(jw.begin(), jw.end());
        for (const auto& [lab, u] : s.parts) g.insert(rho(lab.second, j));
        g.insert(*g.begin() - 1);
        grids[j - 1] = {g.begin(), g.end()};
    }
    std::vector<size_t> idx(n, 0);
    while (true) {
        std::vector<int> h(n);
        for (int j = 0; j < n; ++j) h[j] = grids[j][idx[j]];

        Subspace<F> inter = Subspace<F>::full(d);
        for (int j = 1; j <= n; ++j) inter = intersect(inter, t.w(j).at(h[j - 1]));

        Subspace<F> acc = Subspace<F>::zero(d);
        int dimSum = 0;
        for (const auto& [lab, u] : s.parts) {
            bool in = true;
            for (int j = 1; j <= n && in; ++j)
                if (rho(lab.second, j) > h[j - 1]) in = false;
            if (!in) continue;
            acc = sum(acc, u);
            dimSum += u.dim();
        }
        if (acc != inter || acc.dim() != dimSum) return false;

        int carry = n - 1;
        while (carry >= 0 && ++idx[carry] == grids[carry].size()) idx[carry--] = 0;
        if (carry < 0) break;
    }
    return true;
}

/// Basis adapted to a strong splitting: chain tops per component plus
/// their N_1 orbits, with N_1 v_{k,kappa} = v_{k,kappa - 2 delta_1}.
template <class F>
struct StrongBasis {
    std::vector<std::vector<F>> vectors;
    std::vector<int> level;               // primitivity k
    std::vector<std::vector<int>> key;    // increment tuple kappa
};

template <class F>
StrongBasis<F> strongBasis(const CommutingTuple<F>& t, int coneSamples = 2,
                           std::uint64_t seed = 9001) {
    StrongSplitting<F> s = strongSplitting(t, coneSamples, seed);
    StrongBasis<F> out;
    if (t.size() == 0 || t.dim() == 0) return out;
    const Matrix<F>& n1 = t.maps()[0];
    for (const auto& [lab, u] : s.parts) {
        const auto& [k, kap] = lab;
        if (kap[0] != k) continue;
        for (int c = 0; c < u.dim(); ++c) {
            Matrix<F> col(t.dim(), 1);
            col.setColumn(0, u.basis().columnVec(c));
            std::vector<int> key = kap;
            for (int m = 0; m <= k; ++m) {
                out.vectors.push_back(col.columnVec(0));
                out.level.push_back(k);
                out.key.push_back(key);
                col = n1 * col;
                key[0] -= 2;
            }
        }
    }
    return out;
}

/// Reduction criterion instance check: universal bottom compatibility plus
/// sequential compatibility of (N_1+N_2, N_3, ..., N_n) should imply
/// sequential compatibility of the tuple; returns whether the implication
/// holds on this instance.
template <class F>
bool checkReductionHypotheses(const CommutingTuple<F>& t, int coneSamples = 2,
                              std::uint64_t seed = 9001) {
    if (t.size() < 2)
        throw std::invalid_argument("checkReductionHypotheses: need at least two maps");
    bool hyp1 = isUniversallyBottomCompatible(t, t.dim(), coneSamples, seed);
    std::vector<Matrix<F>> merged;
    merged.push_back(t.maps()[0] + t.maps()[1]);
    for (int i = 2; i < t.size(); ++i) merged.push_back(t.maps()[i]);
    bool hyp2 = isSequentiallyCompatible(CommutingTuple<F>(merged), coneSamples, seed).ok;
    if (!(hyp1 && hyp2)) return true;
    return isSequentiallyCompatible(t, coneSamples, seed).ok;
}

/// Hodge bigrading from a weight grading E_l.  Step 1: V^{p,q} = E_p with
/// p + q = weight.  Step 2: parity families, V^{p,-p} = E_{2p} on even
/// weights and V^{p,q} with p + q = 1, p - q = l on odd weights.
template <class F>
std::map<std::pair<int, int>, Subspace<F>> hodgeBigrading(
    const std::map<int, Subspace<F>>& grading, int step, int weight) {
    int ambient = grading.empty() ? 0 : grading.begin()->second.ambientDim();
    Subspace<F> acc = Subspace<F>::zero(ambient);
    int total = 0;
    for (const auto& [l, e] : grading) {
        acc = sum(acc, e);
        total += e.dim();
    }
    if (acc.dim() != total || total != ambient)
        throw std::invalid_argument("hodgeBigrading: grading is not a direct sum");

    std::map<std::pair<int, int>, Subspace<F>> out;
    if (step == 1) {
        for (const auto& [p, e] : grading) out.emplace(std::make_pair(p, weight - p), e);
    } else if (step == 2) {
        for (const auto& [l, e] : grading) {
            if (l % 2 == 0)
                out.emplace(std::make_pair(l / 2, -l / 2), e);
            else
                out.emplace(std::make_pair((l + 1) / 2, (1 - l) / 2), e);
        }
    } else {
        throw std::invalid_argument("hodgeBigrading: step must be 1 or 2");
    }
    return out;
}

} // namespace htl
