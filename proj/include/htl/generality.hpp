#pragma once

// Generality of coefficient vectors for commuting tuples: weight
// filtration profiles over function fields, positive-cone constancy with
// a symbolic generic point, the degree-drop property of general vectors,
// and specialization semicontinuity for one-parameter families.

#include "htl/mpoly.hpp"
#include "htl/nilpotent.hpp"
#include "htl/poly.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace htl {

/// Weight filtration dimensions of a nilpotent map over a function field,
/// recovered from the rank sequence of its powers.
struct GenericProfile {
    int ambientDim = 0;
    std::map<int, int> dims;   // weight l -> dim W_l, over the full weight range
};

namespace detail {

/// ranks[k] = rank of the k-th power, ending with 0; the Jordan block
/// multiplicities are second differences of the sequence.
inline GenericProfile profileFromRanks(const std::vector<int>& ranks) {
    GenericProfile p;
    if (ranks.empty() || ranks[0] == 0) return p;
    p.ambientDim = ranks[0];
    auto r = [&](int k) { return k < static_cast<int>(ranks.size()) ? ranks[k] : 0; };
    int idx = 0;
    while (r(idx) != 0) ++idx;
    std::map<int, int> graded;
    for (int s = 1; s <= idx; ++s) {
        int ms = r(s - 1) - 2 * r(s) + r(s + 1);
        if (ms < 0) throw std::logic_error("profileFromRanks: invalid rank sequence");
        for (int w = s - 1; ms > 0 && w >= 1 - s; w -= 2) graded[w] += ms;
    }
    int acc = 0;
    int top = graded.rbegin()->first;
    for (int l = graded.begin()->first; l <= top; ++l) {
        auto it = graded.find(l);
        if (it != graded.end()) acc += it->second;
        p.dims[l] = acc;
    }
    return p;
}

} // namespace detail

/// Dimensions of W(N(t)) over Q(t_1,...,t_n), N(t) = sum t_i N_i, via
/// fraction-free symbolic ranks of the powers.
inline GenericProfile genericProfile(const CommutingTuple<Rational>& t) {
    int d = t.dim();
    if (d == 0) return {};
    int n = t.size();
    Matrix<MPoly> nt(d, d);
    for (int i = 0; i < n; ++i) {
        MPoly ti = MPoly::var(i, n);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                if (!t.maps()[i].at(r, c).isZero())
                    nt.at(r, c) += MPoly(t.maps()[i].at(r, c), n) * ti;
    }
    std::vector<int> ranks{d};
    Matrix<MPoly> p = nt;
    while (ranks.back() != 0) {
        if (static_cast<int>(ranks.size()) > d)
            throw std::logic_error("genericProfile: symbolic combination is not nilpotent");
        ranks.push_back(mpolyRank(p));
        p = p * nt;
    }
    return detail::profileFromRanks(ranks);
}

/// A coefficient vector is general when W(sum a_i N_i) has the generic
/// dimensions at every weight.
inline bool isGeneral(const CommutingTuple<Rational>& t, const std::vector<Rational>& a) {
    if (static_cast<int>(a.size()) != t.size())
        throw std::invalid_argument("isGeneral: coefficient count mismatch");
    if (t.dim() == 0) return true;
    GenericProfile g = genericProfile(t);
    Matrix<Rational> na(t.dim(), t.dim());
    for (int i = 0; i < t.size(); ++i) na = na + t.maps()[i].scaled(a[i]);
    Filtration<Rational> w = weightFiltration(na);
    for (const auto& [l, dim] : g.dims)
        if (w.dim(l) != dim) return false;
    return true;
}

struct ConeCheck {
    bool ok = true;
    std::string witness;
};

/// Constancy of W(sum_{i in I} a_i N_i) over the positive cone: sampled
/// positive coefficient vectors plus the symbolic generic point, all of
/// which must agree.
inline ConeCheck positiveConeConstancy(const CommutingTuple<Rational>& t,
                                       const std::vector<int>& subset, int samples = 3,
                                       std::uint64_t seed = 4242) {
    ConeCheck out;
    if (subset.empty() || t.dim() == 0) return out;
    if (!coneConstancySampled(t, subset, samples, seed)) {
        out.ok = false;
        out.witness = "sampled positive coefficient vectors give different filtrations";
        return out;
    }
    std::vector<Matrix<Rational>> sub;
    for (int i : subset) sub.push_back(t.maps()[i]);
    GenericProfile g = genericProfile(CommutingTuple<Rational>(sub));
    Matrix<Rational> ones(t.dim(), t.dim());
    for (const auto& m : sub) ones = ones + m;
    Filtration<Rational> w = weightFiltration(ones);
    for (const auto& [l, dim] : g.dims)
        if (w.dim(l) != dim) {
            out.ok = false;
            out.witness = "generic point disagrees at weight " + std::to_string(l);
            return out;
        }
    return out;
}

/// N_i W(a)_l inside W(a)_{l-1} for every member and weight; requires a
/// general coefficient vector.
inline bool degreeDropCheck(const CommutingTuple<Rational>& t, const std::vector<Rational>& a) {
    if (!isGeneral(t, a))
        throw std::domain_error("degreeDropCheck: coefficient vector is not general");
    Matrix<Rational> na(t.dim(), t.dim());
    for (int i = 0; i < t.size(); ++i) na = na + t.maps()[i].scaled(a[i]);
    Filtration<Rational> w = weightFiltration(na);
    for (const auto& m : t.maps())
        for (int l : w.jumpWeights())
            if (!w.at(l - 1).contains(apply(m, w.at(l)))) return false;
    return true;
}

/// Specialization semicontinuity of a one-parameter polynomial family:
/// profiles over Q(s) and at s = s0 either agree, or at the first
/// discrepancy weight the generic dimension is strictly larger.
inline bool specializationCheck(const Matrix<Poly<Rational>>& family, const Rational& s0) {
    int d = family.rows();
    if (family.cols() != d) throw std::invalid_argument("specializationCheck: non-square family");
    if (d == 0) return true;
    std::vector<int> ranks{d};
    Matrix<Poly<Rational>> p = family;
    while (ranks.back() != 0) {
        if (static_cast<int>(ranks.size()) > d)
            throw std::invalid_argument("specializationCheck: family is not nilpotent");
        auto f = p.template map<RatFunc<Rational>>(
            [](const Poly<Rational>& q) { return RatFunc<Rational>(q); });
        ranks.push_back(rank(f));
        p = p * family;
    }
    GenericProfile gen = detail::profileFromRanks(ranks);
    Matrix<Rational> at0 =
        family.template map<Rational>([&](const Poly<Rational>& q) { return q.eval(s0); });
    Filtration<Rational> w = weightFiltration(at0);
    for (const auto& [l, dim] : gen.dims) {
        int special = w.dim(l);
        if (special != dim) return dim > special;
    }
    return true;
}

} // namespace htl
