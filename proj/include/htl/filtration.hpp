#pragma once

// Increasing filtrations, induced filtrations on associated graded pieces,
// compatible sequences of filtrations, and compatible splittings/bases.

#include "htl/matrix.hpp"
#include "htl/rational.hpp"
#include "htl/subspace.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace htl {

/// Increasing, exhaustive, separated filtration.  Only the jump weights
/// are stored; below the first jump the filtration is zero, the last jump
/// is the full space.
template <class F>
class Filtration {
public:
    Filtration() : ambient_(0) {}

    static Filtration trivial(int ambientDim, int weight = 0) {
        Filtration w;
        w.ambient_ = ambientDim;
        if (ambientDim > 0) w.jumps_.emplace(weight, Subspace<F>::full(ambientDim));
        return w;
    }

    static Filtration fromSteps(int ambientDim, const std::map<int, Subspace<F>>& steps) {
        Filtration w;
        w.ambient_ = ambientDim;
        Subspace<F> prev = Subspace<F>::zero(ambientDim);
        for (const auto& [l, s] : steps) {
            if (s.ambientDim() != ambientDim)
                throw std::invalid_argument("Filtration: ambient dimension mismatch");
            if (!s.contains(prev))
                throw std::invalid_argument("Filtration: steps are not nested");
            if (s != prev) w.jumps_.emplace(l, s);
            prev = s;
        }
        if (ambientDim > 0 && (w.jumps_.empty() || !w.jumps_.rbegin()->second.isFull()))
            throw std::invalid_argument("Filtration: not exhaustive");
        return w;
    }

    int ambientDim() const { return ambient_; }
    const std::map<int, Subspace<F>>& jumps() const { return jumps_; }
    std::vector<int> jumpWeights() const {
        std::vector<int> w;
        for (const auto& [l, s] : jumps_) w.push_back(l);
        return w;
    }
    /// Bottom number b(W): smallest h with Gr_h nonzero.
    int bottom() const { return jumps_.empty() ? 0 : jumps_.begin()->first; }
    int top() const { return jumps_.empty() ? 0 : jumps_.rbegin()->first; }

    Subspace<F> at(int l) const {
        auto it = jumps_.upper_bound(l);
        if (it == jumps_.begin()) return Subspace<F>::zero(ambient_);
        return std::prev(it)->second;
    }
    int dim(int l) const { return at(l).dim(); }
    int gradedDim(int l) const { return dim(l) - dim(l - 1); }

    /// deg^W(v) = min{h | v in W_h}.
    int degree(const std::vector<F>& v) const {
        bool zero = true;
        for (const auto& x : v) if (!x.isZero()) { zero = false; break; }
        if (zero) throw std::invalid_argument("Filtration: degree of zero vector");
        for (const auto& [l, s] : jumps_)
            if (s.containsVector(v)) return l;
        throw std::logic_error("Filtration: not exhaustive");
    }

    /// W'_l = W_{l-k} (jumps shifted up by k).
    Filtration shifted(int k) const {
        Filtration w;
        w.ambient_ = ambient_;
        for (const auto& [l, s] : jumps_) w.jumps_.emplace(l + k, s);
        return w;
    }

    friend bool operator==(const Filtration& a, const Filtration& b) {
        return a.ambient_ == b.ambient_ && a.jumps_ == b.jumps_;
    }
    friend bool operator!=(const Filtration& a, const Filtration& b) { return !(a == b); }

private:
    int ambient_;
    std::map<int, Subspace<F>> jumps_;
};

template <class F>
using FiltrationSequence = std::vector<Filtration<F>>;

/// Splitting V = ⊕_h U_h indexed by integer tuples.
template <class F>
using Splitting = std::map<std::vector<int>, Subspace<F>>;

/// Concrete model of Gr^W: one transversal per jump weight (first-pivot
/// greedy completion), columns concatenated in weight order give a basis
/// of V; graded coordinates refer to that basis.
template <class F>
class GradedModel {
public:
    explicit GradedModel(Filtration<F> base) : base_(std::move(base)) {
        int ambient = base_.ambientDim();
        Subspace<F> prev = Subspace<F>::zero(ambient);
        int offset = 0;
        for (const auto& [a, s] : base_.jumps()) {
            Matrix<F> t = quotientBasis(s, prev);
            weights_.push_back(a);
            transversals_.push_back(t);
            offsets_.push_back(offset);
            offset += t.cols();
            prev = s;
        }
        totalDim_ = offset;
    }

    const Filtration<F>& base() const { return base_; }
    const std::vector<int>& weights() const { return weights_; }
    int gradedDim() const { return totalDim_; }
    int pieceDim(int a) const {
        int i = indexOf(a);
        return i < 0 ? 0 : transversals_[i].cols();
    }
    int pieceOffset(int a) const { return offsets_[indexOfOrThrow(a)]; }
    const Matrix<F>& transversal(int a) const { return transversals_[indexOfOrThrow(a)]; }

    /// (s ∩ W_a + W_{a-1})/W_{a-1} in piece-a coordinates.
    Subspace<F> projectToPiece(int a, const Subspace<F>& s) const {
        int i = indexOf(a);
        if (i < 0) return Subspace<F>::zero(0);
        const Matrix<F>& t = transversals_[i];
        Subspace<F> below = base_.at(a - 1);
        Subspace<F> inside = intersect(s, base_.at(a));
        Matrix<F> frame = hcat(below.basis(), t);
        Matrix<F> x;
        if (!solve(frame, inside.basis(), x))
            throw std::logic_error("GradedModel: projection failed");
        return Subspace<F>::span(x.subMatrix(below.dim(), 0, t.cols(), x.cols()));
    }

    /// Piece-a coordinates of a vector in W_a (transversal part of the
    /// unique decomposition v = w + t with w in W_{a-1}).
    std::vector<F> pieceCoords(int a, const std::vector<F>& v) const {
        int i = indexOfOrThrow(a);
        const Matrix<F>& t = transversals_[i];
        Subspace<F> below = base_.at(a - 1);
        Matrix<F> col(base_.ambientDim(), 1);
        col.setColumn(0, v);
        Matrix<F> x;
        if (!solve(hcat(below.basis(), t), col, x))
            throw std::invalid_argument("GradedModel: vector not in the filtration step");
        return x.subMatrix(below.dim(), 0, t.cols(), 1).columnVec(0);
    }

    /// Restricts a subspace of the graded coordinate space to piece a.
    Subspace<F> restrictToPiece(int a, const Subspace<F>& s) const {
        int i = indexOfOrThrow(a);
        Subspace<F> cut = intersect(s, embedPiece(a, Subspace<F>::full(transversals_[i].cols())));
        return Subspace<F>::span(
            cut.basis().subMatrix(offsets_[i], 0, transversals_[i].cols(), cut.dim()));
    }

    /// Embeds a piece-a subspace into graded coordinates (dim gradedDim()).
    Subspace<F> embedPiece(int a, const Subspace<F>& s) const {
        int i = indexOfOrThrow(a);
        Matrix<F> m(totalDim_, s.dim());
        for (int c = 0; c < s.dim(); ++c)
            for (int r = 0; r < s.ambientDim(); ++r)
                m.at(offsets_[i] + r, c) = s.basis().at(r, c);
        return Subspace<F>::span(m);
    }

    /// Induced filtration of `other` on piece a (with the index shift:
    /// step l is (other_{l+a} ∩ W_a)/W_{a-1}).
    Filtration<F> inducedOnPiece(int a, const Filtration<F>& other) const {
        int d = pieceDim(a);
        std::map<int, Subspace<F>> steps;
        for (int w : other.jumpWeights())
            steps[w - a] = projectToPiece(a, other.at(w));
        if (steps.empty()) return Filtration<F>::trivial(d);
        return Filtration<F>::fromSteps(d, steps);
    }

    /// Induced filtration of `other` on the whole graded space.
    Filtration<F> induced(const Filtration<F>& other) const {
        std::map<int, Filtration<F>> perPiece;
        std::set<int> levels;
        for (int a : weights_) {
            perPiece.emplace(a, inducedOnPiece(a, other));
            for (int l : perPiece.at(a).jumpWeights()) levels.insert(l);
        }
        std::map<int, Subspace<F>> steps;
        for (int l : levels) {
            Subspace<F> s = Subspace<F>::zero(totalDim_);
            for (int a : weights_) s = sum(s, embedPiece(a, perPiece.at(a).at(l)));
            steps[l] = s;
        }
        if (steps.empty()) return Filtration<F>::trivial(totalDim_);
        return Filtration<F>::fromSteps(totalDim_, steps);
    }

    /// Lifts piece-a coordinates z through the quotient map into W_a,
    /// inside the given constraint subspace.  Throws if impossible.
    std::vector<F> lift(int a, const std::vector<F>& z, const Subspace<F>& constraint) const {
        int i = indexOfOrThrow(a);
        const Matrix<F>& t = transversals_[i];
        Matrix<F> zc(t.cols(), 1);
        zc.setColumn(0, z);
        Matrix<F> v0 = t * zc;
        Subspace<F> below = base_.at(a - 1);
        // v = v0 + B y must lie in constraint: solve [B | C] x = -v0.
        Matrix<F> x;
        if (!solve(hcat(below.basis(), constraint.basis()), v0.scaled(F(-1)), x))
            throw std::domain_error("GradedModel: lift not possible in constraint");
        Matrix<F> y = x.subMatrix(0, 0, below.dim(), 1);
        Matrix<F> v = v0 + below.basis() * y;
        return v.columnVec(0);
    }

private:
    int indexOf(int a) const {
        for (size_t i = 0; i < weights_.size(); ++i)
            if (weights_[i] == a) return static_cast<int>(i);
        return -1;
    }
    int indexOfOrThrow(int a) const {
        int i = indexOf(a);
        if (i < 0) throw std::invalid_argument("GradedModel: no piece at this weight");
        return i;
    }
    Filtration<F> base_;
    std::vector<int> weights_;
    std::vector<Matrix<F>> transversals_;
    std::vector<int> offsets_;
    int totalDim_ = 0;
};

struct CompatibilityResult {
    bool ok = true;
    std::vector<int> witnessH;   // offending tuple, empty when ok
    int imageDim = 0;
    int targetDim = 0;
    int depth = 0;               // recursion depth where the failure occurred
};

namespace detail {

/// Integer grid for the quantifier over one index: all step points of both
/// step functions, padded below and above.
inline std::vector<int> quantifierGrid(const std::vector<int>& a, const std::vector<int>& b) {
    std::set<int> s(a.begin(), a.end());
    s.insert(b.begin(), b.end());
    if (s.empty()) s.insert(0);
    s.insert(*s.begin() - 1);
    s.insert(*s.rbegin() + 1);
    return {s.begin(), s.end()};
}

} // namespace detail

/// Definition of a compatible sequence: the induced sequence on Gr^{(1)}
/// is compatible, and Im(π_h) = Gr^{(1)}_{h1} ∩ ⋂_{j≥2} W^{(1)}(j)_{h_j}
/// for every integer tuple h.  Trivial for n ≤ 2.
template <class F>
CompatibilityResult isCompatibleSequence(const FiltrationSequence<F>& seq) {
    const int n = static_cast<int>(seq.size());
    CompatibilityResult res;
    if (n <= 2) return res;

    GradedModel<F> model(seq[0]);
    FiltrationSequence<F> induced;
    for (int j = 1; j < n; ++j) induced.push_back(model.induced(seq[j]));
    CompatibilityResult sub = isCompatibleSequence(induced);
    if (!sub.ok) {
        sub.depth += 1;
        return sub;
    }

    // Quantifier grids: h1 over the pieces of W(1); h_j over the full
    // realized weight range (padded), since the downstairs step points
    // depend on the piece.
    int lo = seq[0].bottom(), hi = seq[0].top();
    for (int j = 1; j < n; ++j) {
        lo = std::min({lo, seq[j].bottom(), induced[j - 1].bottom()});
        hi = std::max({hi, seq[j].top(), induced[j - 1].top()});
    }
    int pad = hi - lo + 1;
    std::vector<int> range;
    for (int l = lo - pad; l <= hi + pad; ++l) range.push_back(l);
    std::vector<std::vector<int>> grids(n);
    grids[0] = model.weights();
    for (int j = 1; j < n; ++j) grids[j] = range;

    std::map<int, FiltrationSequence<F>> perPiece;
    for (int a : model.weights()) {
        FiltrationSequence<F>& v = perPiece[a];
        for (int j = 1; j < n; ++j) v.push_back(model.inducedOnPiece(a, seq[j]));
    }

    std::vector<size_t> idx(n, 0);
    while (true) {
        std::vector<int> h(n);
        for (int j = 0; j < n; ++j) h[j] = grids[j][idx[j]];

        Subspace<F> inter = seq[0].at(h[0]);
        for (int j = 1; j < n; ++j) inter = intersect(inter, seq[j].at(h[j]));
        Subspace<F> img = model.projectToPiece(h[0], inter);

        // The induced filtration carries the l+a index shift, so the
        // condition at upstairs indices h_j reads off step h_j - h_1.
        Subspace<F> target = Subspace<F>::full(model.pieceDim(h[0]));
        for (int j = 1; j < n; ++j)
            target = intersect(target, perPiece.at(h[0])[j - 1].at(h[j] - h[0]));

        if (img != target) {
            res.ok = false;
            res.witnessH = h;
            res.imageDim = img.dim();
            res.targetDim = target.dim();
            return res;
        }

        int carry = n - 1;
        while (carry >= 0 && ++idx[carry] == grids[carry].size()) idx[carry--] = 0;
        if (carry < 0) break;
    }
    return res;
}

/// Compatible splitting, by the inductive lifting construction: split each
/// graded piece of W(1) for the induced sequence, then lift each component
/// into the corresponding multi-intersection upstairs.
template <class F>
Splitting<F> compatibleSplitting(const FiltrationSequence<F>& seq) {
    const int n = static_cast<int>(seq.size());
    if (n == 0) throw std::invalid_argument("compatibleSplitting: empty sequence");

    GradedModel<F> model(seq[0]);
    Splitting<F> out;
    for (int a : model.weights()) {
        int d = model.pieceDim(a);
        Splitting<F> sub;
        if (n == 1) {
            sub.emplace(std::vector<int>{}, Subspace<F>::full(d));
        } else {
            // Undo the induced index shift so the recursive keys are
            // upstairs degrees directly.
            FiltrationSequence<F> pieceSeq;
            for (int j = 1; j < n; ++j)
                pieceSeq.push_back(model.inducedOnPiece(a, seq[j]).shifted(a));
            sub = compatibleSplitting(pieceSeq);
        }
        for (const auto& [k, u] : sub) {
            if (u.dim() == 0) continue;
            Subspace<F> constraint = Subspace<F>::full(seq[0].ambientDim());
            for (int j = 1; j < n; ++j) constraint = intersect(constraint, seq[j].at(k[j - 1]));
            std::vector<std::vector<F>> lifted;
            for (int c = 0; c < u.dim(); ++c)
                lifted.push_back(model.lift(a, u.basis().columnVec(c), constraint));
            std::vector<int> key;
            key.push_back(a);
            key.insert(key.end(), k.begin(), k.end());
            out.emplace(key, Subspace<F>::spanVectors(lifted, seq[0].ambientDim()));
        }
    }
    return out;
}

/// Defining identity of a compatible splitting:
/// ⋂_j W(j)_{h_j} = ⊕_{k: k_j ≤ h_j ∀j} U_k, over the support grid.
template <class F>
bool verifySplitting(const FiltrationSequence<F>& seq, const Splitting<F>& split) {
    const int n = static_cast<int>(seq.size());
    int ambient = seq.empty() ? 0 : seq[0].ambientDim();
    int total = 0;
    for (const auto& [k, u] : split) total += u.dim();
    if (total != ambient) return false;

    std::vector<std::vector<int>> grids(n);
    for (int j = 0; j < n; ++j)
        grids[j] = detail::quantifierGrid(seq[j].jumpWeights(), {});

    std::vector<size_t> idx(n, 0);
    while (true) {
        std::vector<int> h(n);
        for (int j = 0; j < n; ++j) h[j] = grids[j][idx[j]];

        Subspace<F> inter = Subspace<F>::full(ambient);
        for (int j = 0; j < n; ++j) inter = intersect(inter, seq[j].at(h[j]));

        Subspace<F> acc = Subspace<F>::zero(ambient);
        int dimSum = 0;
        for (const auto& [k, u] : split) {
            bool in = true;
            for (int j = 0; j < n; ++j)
                if (k[j] > h[j]) { in = false; break; }
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

/// A basis compatible with the sequence, one vector group per splitting
/// component, with the component's index tuple as the degree vector.
template <class F>
struct CompatibleBasis {
    std::vector<std::vector<F>> vectors;
    std::vector<std::vector<int>> degrees;  // degrees[i][j] = deg^{W(j+1)}(v_i)
};

template <class F>
CompatibleBasis<F> compatibleBasis(const FiltrationSequence<F>& seq) {
    Splitting<F> split = compatibleSplitting(seq);
    CompatibleBasis<F> out;
    for (const auto& [k, u] : split)
        for (int c = 0; c < u.dim(); ++c) {
            out.vectors.push_back(u.basis().columnVec(c));
            out.degrees.push_back(k);
        }
    return out;
}

/// Norm exponents (k_1,...,k_n): 2 k_1 = deg^{W(1)}(v) and
/// 2 k_j = deg^{W(j)}(v) − deg^{W(j-1)}(v) for j ≥ 2.
template <class F>
std::vector<Rational> normExponents(const std::vector<F>& v, const FiltrationSequence<F>& seq) {
    std::vector<Rational> out;
    int prev = 0;
    for (size_t j = 0; j < seq.size(); ++j) {
        int d = seq[j].degree(v);
        out.push_back(Rational(d - prev, 2));
        prev = d;
    }
    return out;
}

} // namespace htl
