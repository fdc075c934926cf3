#pragma once

// Dense matrices over an exact field, with reduced row echelon form as the
// workhorse for everything downstream (rank, kernel, image, solving).

#include "htl/rational.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace htl {

template <class F>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, F(0)) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative shape");
    }
    Matrix(int rows, int cols, std::vector<F> rowMajor)
        : rows_(rows), cols_(cols), data_(std::move(rowMajor)) {
        if (data_.size() != static_cast<size_t>(rows) * cols)
            throw std::invalid_argument("Matrix: entry count mismatch");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = F(1);
        return m;
    }
    /// Builds from nested initializer-like rows (for tests and fixtures).
    static Matrix fromRows(const std::vector<std::vector<F>>& rows) {
        int r = static_cast<int>(rows.size());
        int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
        Matrix m(r, c);
        for (int i = 0; i < r; ++i) {
            if (static_cast<int>(rows[i].size()) != c)
                throw std::invalid_argument("Matrix: ragged rows");
            for (int j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    F& at(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const F& at(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    bool isZero() const {
        for (const auto& x : data_) if (!x.isZero()) return false;
        return true;
    }
    bool isSquare() const { return rows_ == cols_; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    Matrix operator-() const {
        Matrix r = *this;
        for (auto& x : r.data_) x = -x;
        return r;
    }
    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        a.requireSameShape(b);
        Matrix r = a;
        for (size_t k = 0; k < r.data_.size(); ++k) r.data_[k] += b.data_[k];
        return r;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-b); }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: shape mismatch in product");
        Matrix r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const F& aik = a.at(i, k);
                if (aik.isZero()) continue;
                for (int j = 0; j < b.cols_; ++j) r.at(i, j) += aik * b.at(k, j);
            }
        return r;
    }
    Matrix scaled(const F& c) const {
        Matrix r = *this;
        for (auto& x : r.data_) x = x * c;
        return r;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    Matrix pow(int e) const {
        if (!isSquare()) throw std::invalid_argument("Matrix: pow of non-square");
        Matrix r = identity(rows_);
        for (int k = 0; k < e; ++k) r = r * (*this);
        return r;
    }

    std::vector<F> applyTo(const std::vector<F>& v) const {
        if (static_cast<int>(v.size()) != cols_)
            throw std::invalid_argument("Matrix: vector length mismatch");
        std::vector<F> r(rows_, F(0));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                if (!at(i, j).isZero()) r[i] += at(i, j) * v[j];
        return r;
    }

    Matrix column(int j) const {
        Matrix c(rows_, 1);
        for (int i = 0; i < rows_; ++i) c.at(i, 0) = at(i, j);
        return c;
    }
    std::vector<F> columnVec(int j) const {
        std::vector<F> c(rows_);
        for (int i = 0; i < rows_; ++i) c[i] = at(i, j);
        return c;
    }
    void setColumn(int j, const std::vector<F>& v) {
        for (int i = 0; i < rows_; ++i) at(i, j) = v[i];
    }

    /// Horizontal concatenation [a | b].
    friend Matrix hcat(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_) throw std::invalid_argument("Matrix: hcat row mismatch");
        Matrix r(a.rows_, a.cols_ + b.cols_);
        for (int i = 0; i < a.rows_; ++i) {
            for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
            for (int j = 0; j < b.cols_; ++j) r.at(i, a.cols_ + j) = b.at(i, j);
        }
        return r;
    }
    friend Matrix vcat(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.cols_) throw std::invalid_argument("Matrix: vcat col mismatch");
        Matrix r(a.rows_ + b.rows_, a.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
        for (int i = 0; i < b.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j) r.at(a.rows_ + i, j) = b.at(i, j);
        return r;
    }
    Matrix subMatrix(int r0, int c0, int nr, int nc) const {
        Matrix r(nr, nc);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) r.at(i, j) = at(r0 + i, c0 + j);
        return r;
    }
    Matrix selectColumns(const std::vector<int>& idx) const {
        Matrix r(rows_, static_cast<int>(idx.size()));
        for (int j = 0; j < r.cols_; ++j)
            for (int i = 0; i < rows_; ++i) r.at(i, j) = at(i, idx[j]);
        return r;
    }

    template <class G, class Fn>
    Matrix<G> map(Fn&& fn) const {
        Matrix<G> r(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r.at(i, j) = fn(at(i, j));
        return r;
    }

    std::string str() const {
        std::string s;
        for (int i = 0; i < rows_; ++i) {
            s += "[";
            for (int j = 0; j < cols_; ++j) s += (j ? ", " : "") + at(i, j).str();
            s += "]\n";
        }
        return s;
    }

private:
    void requireSameShape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("Matrix: shape mismatch");
    }
    int rows_;
    int cols_;
    std::vector<F> data_;
};

template <class F>
struct RrefResult {
    Matrix<F> reduced;
    int rank = 0;
    std::vector<int> pivotColumns;
};

/// Reduced row echelon form by exact Gauss-Jordan elimination.
template <class F>
RrefResult<F> rref(Matrix<F> m) {
    RrefResult<F> res;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int pivot = -1;
        for (int i = r; i < m.rows(); ++i)
            if (!m.at(i, c).isZero()) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int j = 0; j < m.cols(); ++j) std::swap(m.at(pivot, j), m.at(r, j));
        F inv = m.at(r, c).inv();
        for (int j = c; j < m.cols(); ++j) m.at(r, j) = m.at(r, j) * inv;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == r || m.at(i, c).isZero()) continue;
            F f = m.at(i, c);
            for (int j = c; j < m.cols(); ++j) m.at(i, j) = m.at(i, j) - f * m.at(r, j);
        }
        res.pivotColumns.push_back(c);
        ++r;
    }
    res.rank = r;
    res.reduced = std::move(m);
    return res;
}

template <class F>
int rank(const Matrix<F>& m) {
    return rref(m).rank;
}

/// Kernel basis, columns of the returned matrix (cols x nullity).
template <class F>
Matrix<F> kernelBasis(const Matrix<F>& m) {
    auto r = rref(m);
    std::vector<bool> isPivot(m.cols(), false);
    for (int c : r.pivotColumns) isPivot[c] = true;
    std::vector<int> freeCols;
    for (int c = 0; c < m.cols(); ++c)
        if (!isPivot[c]) freeCols.push_back(c);
    Matrix<F> k(m.cols(), static_cast<int>(freeCols.size()));
    for (size_t fj = 0; fj < freeCols.size(); ++fj) {
        int fc = freeCols[fj];
        k.at(fc, static_cast<int>(fj)) = F(1);
        for (int p = 0; p < r.rank; ++p)
            k.at(r.pivotColumns[p], static_cast<int>(fj)) = -r.reduced.at(p, fc);
    }
    return k;
}

/// Solves m x = b; returns false if inconsistent.  x has one column per
/// column of b (a particular solution, free variables set to zero).
template <class F>
bool solve(const Matrix<F>& m, const Matrix<F>& b, Matrix<F>& x) {
    auto r = rref(hcat(m, b));
    // A pivot in the appended block means inconsistency.
    for (int c : r.pivotColumns)
        if (c >= m.cols()) return false;
    x = Matrix<F>(m.cols(), b.cols());
    for (size_t p = 0; p < r.pivotColumns.size(); ++p)
        for (int j = 0; j < b.cols(); ++j)
            x.at(r.pivotColumns[p], j) = r.reduced.at(static_cast<int>(p), m.cols() + j);
    return true;
}

/// Determinant by exact elimination.
template <class F>
F det(Matrix<F> m) {
    if (!m.isSquare()) throw std::invalid_argument("det: non-square");
    F d(1);
    int n = m.rows();
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int i = c; i < n; ++i)
            if (!m.at(i, c).isZero()) { pivot = i; break; }
        if (pivot < 0) return F(0);
        if (pivot != c) {
            for (int j = 0; j < n; ++j) std::swap(m.at(pivot, j), m.at(c, j));
            d = -d;
        }
        d = d * m.at(c, c);
        F inv = m.at(c, c).inv();
        for (int i = c + 1; i < n; ++i) {
            if (m.at(i, c).isZero()) continue;
            F f = m.at(i, c) * inv;
            for (int j = c; j < n; ++j) m.at(i, j) = m.at(i, j) - f * m.at(c, j);
        }
    }
    return d;
}

template <class F>
Matrix<F> inverse(const Matrix<F>& m) {
    if (!m.isSquare()) throw std::invalid_argument("inverse: non-square");
    Matrix<F> x;
    if (!solve(m, Matrix<F>::identity(m.rows()), x) || rank(m) != m.rows())
        throw std::domain_error("inverse: singular matrix");
    return x;
}

/// Fraction-free Bareiss elimination rank over an integral domain.  Needs
/// only ring operations and exact division; used as the independent rank
/// oracle and for multivariate polynomial matrices.
template <class R, class ExactDiv>
int bareissRank(Matrix<R> m, ExactDiv&& divExact) {
    int rows = m.rows(), cols = m.cols();
    R prev(1);
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int pivot = -1;
        for (int i = r; i < rows; ++i)
            if (!m.at(i, c).isZero()) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int j = 0; j < cols; ++j) std::swap(m.at(pivot, j), m.at(r, j));
        for (int i = r + 1; i < rows; ++i) {
            for (int j = c + 1; j < cols; ++j)
                m.at(i, j) = divExact(m.at(r, c) * m.at(i, j) - m.at(i, c) * m.at(r, j), prev);
            m.at(i, c) = R(0);
        }
        prev = m.at(r, c);
        ++r;
    }
    return r;
}

using RationalMatrix = Matrix<Rational>;

} // namespace htl
