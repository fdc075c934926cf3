#pragma once

// Subspaces of F^n in canonical form (reduced column echelon basis), so
// equality and containment reduce to entry comparison and one rank test.

#include "htl/matrix.hpp"

#include <stdexcept>
#include <vector>

namespace htl {

template <class F>
class Subspace {
public:
    Subspace() : ambient_(0), basis_(0, 0) {}

    static Subspace zero(int ambientDim) {
        Subspace s;
        s.ambient_ = ambientDim;
        s.basis_ = Matrix<F>(ambientDim, 0);
        return s;
    }
    static Subspace full(int ambientDim) {
        Subspace s;
        s.ambient_ = ambientDim;
        s.basis_ = Matrix<F>::identity(ambientDim);
        return s;
    }
    /// Span of the columns of m.
    static Subspace span(const Matrix<F>& m) {
        Subspace s;
        s.ambient_ = m.rows();
        // Column echelon form = transpose of row echelon of the transpose.
        auto r = rref(m.transpose());
        s.basis_ = r.reduced.subMatrix(0, 0, r.rank, m.rows()).transpose();
        return s;
    }
    static Subspace spanVectors(const std::vector<std::vector<F>>& cols, int ambientDim) {
        Matrix<F> m(ambientDim, static_cast<int>(cols.size()));
        for (size_t j = 0; j < cols.size(); ++j) m.setColumn(static_cast<int>(j), cols[j]);
        return span(m);
    }

    int ambientDim() const { return ambient_; }
    int dim() const { return basis_.cols(); }
    const Matrix<F>& basis() const { return basis_; }
    bool isZeroSpace() const { return dim() == 0; }
    bool isFull() const { return dim() == ambient_; }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }
    friend bool operator!=(const Subspace& a, const Subspace& b) { return !(a == b); }

    bool containsVector(const std::vector<F>& v) const {
        Matrix<F> col(ambient_, 1);
        col.setColumn(0, v);
        return rank(hcat(basis_, col)) == dim();
    }
    bool contains(const Subspace& other) const {
        requireSameAmbient(other);
        return rank(hcat(basis_, other.basis_)) == dim();
    }

    friend Subspace sum(const Subspace& a, const Subspace& b) {
        a.requireSameAmbient(b);
        return span(hcat(a.basis_, b.basis_));
    }
    friend Subspace intersect(const Subspace& a, const Subspace& b) {
        a.requireSameAmbient(b);
        // Null space of [A | B] gives coefficient pairs with A x = -B y.
        if (a.isZeroSpace() || b.isZeroSpace()) return zero(a.ambient_);
        Matrix<F> k = kernelBasis(hcat(a.basis_, b.basis_));
        Matrix<F> coefA = k.subMatrix(0, 0, a.dim(), k.cols());
        return span(a.basis_ * coefA);
    }

    /// Columns completing b's basis to a basis of a (requires b ⊆ a).
    /// Greedy over a's canonical basis columns in order.
    friend Matrix<F> quotientBasis(const Subspace& a, const Subspace& b) {
        a.requireSameAmbient(b);
        if (!a.contains(b)) throw std::invalid_argument("quotientBasis: not a subspace of a");
        Matrix<F> acc = b.basis_;
        std::vector<int> chosen;
        for (int j = 0; j < a.dim(); ++j) {
            Matrix<F> cand = hcat(acc, a.basis_.column(j));
            if (rank(cand) > acc.cols()) {
                acc = cand;
                chosen.push_back(j);
            }
        }
        return a.basis_.selectColumns(chosen);
    }

    /// Image of the subspace under a linear map.
    friend Subspace apply(const Matrix<F>& m, const Subspace& s) {
        if (m.cols() != s.ambient_) throw std::invalid_argument("apply: shape mismatch");
        return span(m * s.basis_);
    }

    /// Preimage m^{-1}(s) inside the domain of m.
    friend Subspace preimage(const Matrix<F>& m, const Subspace& s) {
        if (m.rows() != s.ambient_) throw std::invalid_argument("preimage: shape mismatch");
        // x with m x in s  <=>  (x, y) in ker[m | -basis].
        Matrix<F> k = kernelBasis(hcat(m, s.basis_.scaled(F(-1))));
        return span(k.subMatrix(0, 0, m.cols(), k.cols()));
    }

    /// Coordinates of v in this basis; throws if v is outside.
    std::vector<F> coordinates(const std::vector<F>& v) const {
        Matrix<F> col(ambient_, 1);
        col.setColumn(0, v);
        Matrix<F> x;
        if (!solve(basis_, col, x) )
            throw std::invalid_argument("coordinates: vector not in subspace");
        return x.columnVec(0);
    }

private:
    void requireSameAmbient(const Subspace& o) const {
        if (ambient_ != o.ambient_)
            throw std::invalid_argument("Subspace: ambient dimension mismatch");
    }
    int ambient_;
    Matrix<F> basis_;
};

template <class F>
Subspace<F> kernel(const Matrix<F>& m) {
    return Subspace<F>::span(kernelBasis(m));
}

template <class F>
Subspace<F> image(const Matrix<F>& m) {
    return Subspace<F>::span(m);
}

} // namespace htl
