#pragma once

// Deterministic seeded generation of small exact scalars and structured
// matrices for property tests and sampled checks.

#include "htl/matrix.hpp"
#include "htl/rational.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace htl {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }
    int intIn(int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(eng_);
    }

    Rational smallRational(int span = 5) {
        long num = intIn(-span, span);
        long den = intIn(1, span);
        return Rational(num, den);
    }
    Rational positiveRational(int span = 9) {
        return Rational(intIn(1, span), intIn(1, span));
    }
    GaussianRational gaussianRational(int span = 5) {
        return {smallRational(span), smallRational(span)};
    }

    Matrix<Rational> rationalMatrix(int rows, int cols, int span = 5) {
        Matrix<Rational> m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m.at(i, j) = smallRational(span);
        return m;
    }

    /// Random nilpotent: a strictly upper triangular matrix conjugated by
    /// a random unimodular-ish integer matrix (identity + strict part).
    Matrix<Rational> nilpotentMatrix(int n, int span = 3) {
        Matrix<Rational> u(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (intIn(0, 2) > 0) u.at(i, j) = Rational(intIn(-span, span));
        Matrix<Rational> g = Matrix<Rational>::identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && intIn(0, 1)) g.at(i, j) = Rational(intIn(-2, 2));
        if (rank(g) < n) return u;
        return g * u * inverse(g);
    }

    /// Commuting nilpotent pair: polynomials without constant term in a
    /// common nilpotent seed, or a block Kronecker-sum pair.
    std::pair<Matrix<Rational>, Matrix<Rational>> commutingNilpotentPair(int n, int span = 3) {
        Matrix<Rational> a = nilpotentMatrix(n, span);
        Matrix<Rational> b(n, n);
        Matrix<Rational> p = a;
        for (int d = 1; d < n; ++d) {
            if (intIn(0, 1)) b = b + p.scaled(Rational(intIn(-span, span)));
            p = p * a;
        }
        return {a, b};
    }

private:
    std::mt19937_64 eng_;
};

} // namespace htl
