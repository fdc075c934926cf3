#pragma once

// Partial Koszul complex of a commuting nilpotent tuple: terms Im N_J for
// index subsets J, differential sum N_j ^ e_j, the induced weight
// filtration W_h(Im N_J) = N_J(W_h), filtered cohomology, the purity
// criterion, and its reduction to graded vanishing.

#include "htl/nilpotent.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace htl {

namespace detail {

inline std::vector<std::vector<int>> subsetsOfSize(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i <= n - (k - static_cast<int>(cur.size())); ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

/// e_j ^ e_J = sign * e_{J u {j}}; zero when j already occurs.
inline int wedgeSign(int j, const std::vector<int>& subset, std::vector<int>& merged) {
    int before = 0;
    for (int i : subset) {
        if (i == j) return 0;
        if (i < j) ++before;
    }
    merged = subset;
    merged.insert(merged.begin() + before, j);
    return before % 2 == 0 ? 1 : -1;
}

template <class F>
Matrix<F> subsetProduct(const CommutingTuple<F>& t, const std::vector<int>& subset) {
    Matrix<F> m = Matrix<F>::identity(t.dim());
    for (int j : subset) m = m * t.maps()[j];
    return m;
}

} // namespace detail

/// Degree-k term: one block per size-k subset J, in the echelon basis of
/// Im N_J; term coordinates are the concatenation of the blocks.
template <class F>
struct KoszulTerm {
    std::vector<std::vector<int>> subsets;
    std::vector<Subspace<F>> images;
    std::vector<int> offsets;
    int dim = 0;

    int blockIndex(const std::vector<int>& subset) const {
        for (int i = 0; i < static_cast<int>(subsets.size()); ++i)
            if (subsets[i] == subset) return i;
        throw std::invalid_argument("KoszulTerm: unknown index subset");
    }
};

template <class F>
struct KoszulComplex {
    CommutingTuple<F> tuple;
    std::vector<KoszulTerm<F>> terms;         // degrees 0..n
    std::vector<Matrix<F>> differentials;     // differentials[k] : term k -> term k+1
};

template <class F>
KoszulComplex<F> buildKoszul(const CommutingTuple<F>& t) {
    int n = t.size();
    KoszulComplex<F> c{t, {}, {}};
    for (int k = 0; k <= n; ++k) {
        KoszulTerm<F> term;
        term.subsets = detail::subsetsOfSize(n, k);
        for (const auto& subset : term.subsets) {
            term.images.push_back(image(detail::subsetProduct(t, subset)));
            term.offsets.push_back(term.dim);
            term.dim += term.images.back().dim();
        }
        c.terms.push_back(std::move(term));
    }
    for (int k = 0; k < n; ++k) {
        const KoszulTerm<F>& src = c.terms[k];
        const KoszulTerm<F>& dst = c.terms[k + 1];
        Matrix<F> d(dst.dim, src.dim);
        for (int b = 0; b < static_cast<int>(src.subsets.size()); ++b) {
            for (int col = 0; col < src.images[b].dim(); ++col) {
                std::vector<F> v = src.images[b].basis().columnVec(col);
                for (int j = 0; j < n; ++j) {
                    std::vector<int> merged;
                    int sign = detail::wedgeSign(j, src.subsets[b], merged);
                    if (sign == 0) continue;
                    int db = dst.blockIndex(merged);
                    std::vector<F> coords = dst.images[db].coordinates(t.maps()[j].applyTo(v));
                    F s(sign);
                    for (int r = 0; r < static_cast<int>(coords.size()); ++r)
                        d.at(dst.offsets[db] + r, src.offsets[b] + col) =
                            d.at(dst.offsets[db] + r, src.offsets[b] + col) + s * coords[r];
                }
            }
        }
        c.differentials.push_back(std::move(d));
    }
    for (int k = 0; k + 1 < n; ++k)
        if (!(c.differentials[k + 1] * c.differentials[k]).isZero())
            throw std::logic_error("buildKoszul: differential does not square to zero");
    return c;
}

/// The complex with each block Im N_J filtered by N_J(W_h), where W is the
/// weight filtration of the sum of all members.
template <class F>
struct FilteredComplex {
    KoszulComplex<F> complex;
    std::vector<Filtration<F>> filt;          // per degree, on term coordinates
};

template <class F>
FilteredComplex<F> filteredKoszul(const CommutingTuple<F>& t) {
    FilteredComplex<F> fc{buildKoszul(t), {}};
    int n = t.size();
    Filtration<F> w = n > 0 ? t.w(n) : Filtration<F>::trivial(t.dim());
    for (int k = 0; k <= n; ++k) {
        const KoszulTerm<F>& term = fc.complex.terms[k];
        std::map<int, Subspace<F>> steps;
        for (int h : w.jumpWeights()) {
            Matrix<F> cols(term.dim, 0);
            for (int b = 0; b < static_cast<int>(term.subsets.size()); ++b) {
                Matrix<F> nj = detail::subsetProduct(t, term.subsets[b]);
                Subspace<F> piece = apply(nj, w.at(h));
                for (int col = 0; col < piece.dim(); ++col) {
                    std::vector<F> coords = term.images[b].coordinates(piece.basis().columnVec(col));
                    std::vector<F> v(term.dim, F(0));
                    for (int r = 0; r < static_cast<int>(coords.size()); ++r)
                        v[term.offsets[b] + r] = coords[r];
                    cols = hcat(cols, [&] {
                        Matrix<F> one(term.dim, 1);
                        one.setColumn(0, v);
                        return one;
                    }());
                }
            }
            steps[h] = Subspace<F>::span(cols);
        }
        fc.filt.push_back(Filtration<F>::fromSteps(term.dim, steps));
    }
    for (int k = 0; k < n; ++k)
        for (int h : fc.filt[k].jumpWeights())
            if (!fc.filt[k + 1].at(h).contains(apply(fc.complex.differentials[k], fc.filt[k].at(h))))
                throw std::logic_error("filteredKoszul: differential does not preserve the filtration");
    return fc;
}

template <class F>
struct Cohomology {
    int dim = 0;
    Matrix<F> representatives;                // columns in term-k coordinates
};

template <class F>
Cohomology<F> cohomology(const KoszulComplex<F>& c, int k) {
    int n = c.tuple.size();
    if (k < 0 || k > n) throw std::invalid_argument("cohomology: degree out of range");
    Subspace<F> ker = k < n ? kernel(c.differentials[k]) : Subspace<F>::full(c.terms[k].dim);
    Subspace<F> im = k > 0 ? image(c.differentials[k - 1]) : Subspace<F>::zero(c.terms[k].dim);
    Cohomology<F> h;
    h.representatives = quotientBasis(ker, im);
    h.dim = h.representatives.cols();
    return h;
}

/// Dimensions of W_h H^k, the image of Ker d ∩ W_h(term k) in H^k, over
/// the weight range of the term filtration.
template <class F>
std::map<int, int> filteredCohomology(const FilteredComplex<F>& fc, int k) {
    int n = fc.complex.tuple.size();
    if (k < 0 || k > n) throw std::invalid_argument("filteredCohomology: degree out of range");
    Subspace<F> ker = k < n ? kernel(fc.complex.differentials[k])
                            : Subspace<F>::full(fc.complex.terms[k].dim);
    Subspace<F> im = k > 0 ? image(fc.complex.differentials[k - 1])
                           : Subspace<F>::zero(fc.complex.terms[k].dim);
    std::map<int, int> out;
    std::vector<int> jw = fc.filt[k].jumpWeights();
    if (jw.empty()) return out;
    for (int h = jw.front() - 1; h <= jw.back(); ++h) {
        Subspace<F> cut = intersect(ker, fc.filt[k].at(h));
        out[h] = cut.dim() - intersect(cut, im).dim();
    }
    return out;
}

struct PurityResult {
    bool pure = true;
    int failDegree = 0;
    int failWeight = 0;
};

/// Purity: W_k H^k = H^k in every degree k.
template <class F>
PurityResult purityCheck(const FilteredComplex<F>& fc) {
    for (int k = 0; k <= fc.complex.tuple.size(); ++k) {
        int full = cohomology(fc.complex, k).dim;
        std::map<int, int> table = filteredCohomology(fc, k);
        int atK;
        if (table.empty()) atK = 0;
        else if (k < table.begin()->first) atK = 0;
        else if (k > table.rbegin()->first) atK = full;
        else atK = table.at(k);
        if (atK != full) return {false, k, k};
    }
    return {};
}

/// Graded vanishing H^a(Gr_k) = 0 for a < k, computed from a grading of V
/// that splits the weight filtration and is shifted by -2 under every
/// member.  When the vanishing holds, purity of the same complex is
/// asserted.
template <class F>
bool gradedVanishingCheck(const FilteredComplex<F>& fc, const std::map<int, Subspace<F>>& grading) {
    const CommutingTuple<F>& t = fc.complex.tuple;
    int n = t.size();
    int d = t.dim();
    std::map<int, Subspace<F>> steps;
    Subspace<F> acc = Subspace<F>::zero(d);
    int total = 0;
    for (const auto& [h, piece] : grading) {
        Subspace<F> next = sum(acc, piece);
        if (next.dim() != acc.dim() + piece.dim())
            throw std::invalid_argument("gradedVanishingCheck: grading pieces are not independent");
        acc = next;
        total += piece.dim();
        steps[h] = acc;
    }
    Filtration<F> w = n > 0 ? t.w(n) : Filtration<F>::trivial(d);
    if (total != d || !(Filtration<F>::fromSteps(d, steps) == w))
        throw std::invalid_argument("gradedVanishingCheck: grading does not split the filtration");
    for (const auto& m : t.maps())
        for (const auto& [h, piece] : grading) {
            auto below = grading.find(h - 2);
            Subspace<F> target = below != grading.end() ? below->second : Subspace<F>::zero(d);
            if (!target.contains(apply(m, piece)))
                throw std::invalid_argument("gradedVanishingCheck: grading not shifted by the maps");
        }

    bool vanishing = true;
    for (const auto& [gradeWeight, piece] : grading) {
        // graded complex at this weight: blocks N_J(V_k), same differential
        std::vector<KoszulTerm<F>> terms;
        for (int a = 0; a <= n; ++a) {
            KoszulTerm<F> term;
            term.subsets = detail::subsetsOfSize(n, a);
            for (const auto& subset : term.subsets) {
                term.images.push_back(apply(detail::subsetProduct(t, subset), piece));
                term.offsets.push_back(term.dim);
                term.dim += term.images.back().dim();
            }
            terms.push_back(std::move(term));
        }
        std::vector<Matrix<F>> diffs;
        for (int a = 0; a < n; ++a) {
            Matrix<F> dm(terms[a + 1].dim, terms[a].dim);
            for (int b = 0; b < static_cast<int>(terms[a].subsets.size()); ++b)
                for (int col = 0; col < terms[a].images[b].dim(); ++col) {
                    std::vector<F> v = terms[a].images[b].basis().columnVec(col);
                    for (int j = 0; j < n; ++j) {
                        std::vector<int> merged;
                        int sign = detail::wedgeSign(j, terms[a].subsets[b], merged);
                        if (sign == 0) continue;
                        int db = terms[a + 1].blockIndex(merged);
                        std::vector<F> coords =
                            terms[a + 1].images[db].coordinates(t.maps()[j].applyTo(v));
                        F s(sign);
                        for (int r = 0; r < static_cast<int>(coords.size()); ++r)
                            dm.at(terms[a + 1].offsets[db] + r, terms[a].offsets[b] + col) =
                                dm.at(terms[a + 1].offsets[db] + r, terms[a].offsets[b] + col) +
                                s * coords[r];
                    }
                }
            diffs.push_back(std::move(dm));
        }
        for (int a = 0; a + 1 < n; ++a)
            if (!(diffs[a + 1] * diffs[a]).isZero())
                throw std::logic_error("gradedVanishingCheck: graded differential squares to nonzero");
        for (int a = 0; a < gradeWeight && a <= n; ++a) {
            Subspace<F> ker = a < n ? kernel(diffs[a]) : Subspace<F>::full(terms[a].dim);
            Subspace<F> im = a > 0 ? image(diffs[a - 1]) : Subspace<F>::zero(terms[a].dim);
            if (ker.dim() - im.dim() != 0) vanishing = false;
        }
    }
    if (vanishing && !purityCheck(fc).pure)
        throw std::logic_error("gradedVanishingCheck: vanishing holds but purity fails");
    return vanishing;
}

enum class WeightConvention { cks, kk };

/// Reindex the term filtrations: cks shifts by the term degree, kk by a
/// fixed weight; undo reverses either shift.
template <class F>
FilteredComplex<F> reindexFiltration(const FilteredComplex<F>& fc, WeightConvention conv,
                                     int weight = 0, bool undo = false) {
    FilteredComplex<F> out = fc;
    for (int a = 0; a < static_cast<int>(fc.filt.size()); ++a) {
        int s = conv == WeightConvention::cks ? -a : weight;
        out.filt[a] = fc.filt[a].shifted(undo ? -s : s);
    }
    return out;
}

/// Strictness identity N_J(W_k) = Im N_J ∩ W_{k-2|J|} for every nonempty
/// subset; holds for tuples of pure-twistor origin, reported per instance.
template <class F>
bool twistorFiltrationIdentity(const CommutingTuple<F>& t) {
    int n = t.size();
    if (n == 0 || t.dim() == 0) return true;
    Filtration<F> w = t.w(n);
    std::vector<int> jw = w.jumpWeights();
    if (jw.empty()) return true;
    for (int k1 = 1; k1 <= n; ++k1)
        for (const auto& subset : detail::subsetsOfSize(n, k1)) {
            Matrix<F> nj = detail::subsetProduct(t, subset);
            Subspace<F> im = image(nj);
            for (int k = jw.front() - 1; k <= jw.back() + 2 * k1; ++k)
                if (!(apply(nj, w.at(k)) == intersect(im, w.at(k - 2 * k1)))) return false;
        }
    return true;
}

} // namespace htl
