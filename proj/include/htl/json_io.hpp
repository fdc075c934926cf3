#pragma once

// JSON encodings for the exact types: rationals as "p/q" strings, Gaussian
// rationals as {re, im}, matrices as {rows, cols, entries}, Laurent
// polynomials as {"<exponent>": "<scalar>"} objects.  Loaders distinguish
// malformed input (InputError) from mathematically invalid input
// (PreconditionError) so the CLI can map them to distinct exit codes.

#include "htl/models.hpp"
#include "htl/nilpotent.hpp"
#include "htl/twistor.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace htl {

using Json = nlohmann::json;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rational rationalFromJson(const Json& j, const std::string& where) {
    try {
        if (j.is_number_integer()) return Rational(j.get<long>());
        if (j.is_string()) return Rational::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw InputError(where + ": " + e.what());
    }
    throw InputError(where + ": expected a rational as string or integer");
}

inline Json rationalToJson(const Rational& r) { return r.str(); }

inline GaussianRational gaussianFromJson(const Json& j, const std::string& where) {
    if (j.is_string() || j.is_number_integer())
        return GaussianRational(rationalFromJson(j, where));
    if (j.is_object())
        return GaussianRational(rationalFromJson(j.value("re", Json("0")), where + ".re"),
                                rationalFromJson(j.value("im", Json("0")), where + ".im"));
    throw InputError(where + ": expected a Gaussian rational");
}

inline Json gaussianToJson(const GaussianRational& g) {
    return Json{{"re", g.re().str()}, {"im", g.im().str()}};
}

template <class F>
F scalarFromJson(const Json& j, const std::string& where);

template <>
inline Rational scalarFromJson<Rational>(const Json& j, const std::string& where) {
    return rationalFromJson(j, where);
}

template <>
inline GaussianRational scalarFromJson<GaussianRational>(const Json& j,
                                                         const std::string& where) {
    return gaussianFromJson(j, where);
}

template <class F>
Matrix<F> matrixFromJson(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
        !j.contains("entries"))
        throw InputError(where + ": expected {rows, cols, entries}");
    int rows = j.at("rows").get<int>(), cols = j.at("cols").get<int>();
    if (rows < 0 || cols < 0) throw InputError(where + ": negative dimensions");
    const Json& e = j.at("entries");
    if (!e.is_array() || static_cast<int>(e.size()) != rows)
        throw InputError(where + ": entries must have one array per row");
    Matrix<F> m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!e[i].is_array() || static_cast<int>(e[i].size()) != cols)
            throw InputError(where + ": row " + std::to_string(i) + " has wrong length");
        for (int k = 0; k < cols; ++k)
            m.at(i, k) = scalarFromJson<F>(
                e[i][k], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return m;
}

template <class F>
Json matrixToJson(const Matrix<F>& m, Json (*enc)(const F&)) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(enc(m.at(i, j)));
        rows.push_back(row);
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", rows}};
}

inline Json matrixToJson(const Matrix<Rational>& m) {
    return matrixToJson<Rational>(m, &rationalToJson);
}

template <class F>
LaurentPoly<F> laurentFromJson(const Json& j, const std::string& where) {
    if (j.is_string() || j.is_number_integer())
        return LaurentPoly<F>(scalarFromJson<F>(j, where));
    if (!j.is_object()) throw InputError(where + ": expected {\"<exp>\": \"<scalar>\"}");
    LaurentPoly<F> p;
    for (const auto& [key, val] : j.items()) {
        int e;
        try {
            size_t used = 0;
            e = std::stoi(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw InputError(where + ": bad exponent key '" + key + "'");
        }
        F c = scalarFromJson<F>(val, where + "[" + key + "]");
        p = p + LaurentPoly<F>::monomial(c, e);
    }
    return p;
}

template <class F>
Json laurentToJson(const LaurentPoly<F>& p) {
    Json out = Json::object();
    for (const auto& [e, c] : p.terms()) out[std::to_string(e)] = c.str();
    return out;
}

template <class F>
LaurentMatrix<F> laurentMatrixFromJson(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
        !j.contains("entries"))
        throw InputError(where + ": expected {rows, cols, entries}");
    int rows = j.at("rows").get<int>(), cols = j.at("cols").get<int>();
    const Json& e = j.at("entries");
    if (!e.is_array() || static_cast<int>(e.size()) != rows)
        throw InputError(where + ": entries must have one array per row");
    LaurentMatrix<F> m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!e[i].is_array() || static_cast<int>(e[i].size()) != cols)
            throw InputError(where + ": row " + std::to_string(i) + " has wrong length");
        for (int k = 0; k < cols; ++k)
            m.at(i, k) = laurentFromJson<F>(
                e[i][k], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return m;
}

template <class F>
Json laurentMatrixToJson(const LaurentMatrix<F>& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(laurentToJson(m.at(i, j)));
        rows.push_back(row);
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", rows}};
}

template <class F>
Matrix<Poly<F>> polyMatrixFromJson(const Json& j, const std::string& where) {
    LaurentMatrix<F> m = laurentMatrixFromJson<F>(j, where);
    try {
        return laurentToPolyStrict(m);
    } catch (const std::domain_error&) {
        throw InputError(where + ": negative exponent in polynomial matrix");
    }
}

template <class F>
Json polyMatrixToJson(const Matrix<Poly<F>>& m) {
    return laurentMatrixToJson(laurentFromPoly(m));
}

/// Loads a nilpotent matrix; rejects non-square or non-nilpotent input.
inline Matrix<Rational> nilpotentFromJson(const Json& j, const std::string& where) {
    Matrix<Rational> m = matrixFromJson<Rational>(j, where);
    if (m.rows() != m.cols()) throw PreconditionError(where + ": matrix is not square");
    Matrix<Rational> p = Matrix<Rational>::identity(m.rows());
    for (int e = 0; e < m.rows(); ++e) p = p * m;
    if (!p.isZero()) throw PreconditionError(where + ": matrix is not nilpotent");
    return m;
}

/// Loads {"maps": [...]} and validates commutation and nilpotency with the
/// offending indices in the message.
inline CommutingTuple<Rational> tupleFromJson(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("maps") || !j.at("maps").is_array())
        throw InputError(where + ": expected {maps: [...]}");
    std::vector<Matrix<Rational>> maps;
    int idx = 0;
    for (const Json& mj : j.at("maps"))
        maps.push_back(nilpotentFromJson(mj, where + ".maps[" + std::to_string(idx++) + "]"));
    try {
        return CommutingTuple<Rational>(std::move(maps));
    } catch (const std::invalid_argument& e) {
        throw PreconditionError(where + ": " + e.what());
    }
}

template <class F>
TwistorBundle<F> bundleFromJson(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("rank") || !j.contains("gluing"))
        throw InputError(where + ": expected {rank, gluing}");
    TwistorBundle<F> b{j.at("rank").get<int>(),
                       laurentMatrixFromJson<F>(j.at("gluing"), where + ".gluing")};
    try {
        validate(b);
    } catch (const std::exception& e) {
        throw PreconditionError(where + ": " + e.what());
    }
    return b;
}

template <class F>
Json bundleToJson(const TwistorBundle<F>& b) {
    return Json{{"rank", b.rank}, {"gluing", laurentMatrixToJson(b.gluing)}};
}

template <class F>
BundleMorphism<F> morphismFromJson(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("twist") || !j.contains("lambda") || !j.contains("mu"))
        throw InputError(where + ": expected {twist, lambda, mu}");
    return {j.at("twist").get<int>(), polyMatrixFromJson<F>(j.at("lambda"), where + ".lambda"),
            polyMatrixFromJson<F>(j.at("mu"), where + ".mu")};
}

template <class F>
Json morphismToJson(const BundleMorphism<F>& f) {
    return Json{{"twist", f.twist},
                {"lambda", polyMatrixToJson(f.lambdaRep)},
                {"mu", polyMatrixToJson(f.muRep)}};
}

template <class F>
Json filtrationToJson(const Filtration<F>& w, Json (*enc)(const F&)) {
    Json steps = Json::object();
    for (int h : w.jumpWeights())
        steps[std::to_string(h)] = matrixToJson<F>(w.at(h).basis(), enc);
    return Json{{"ambientDim", w.ambientDim()}, {"steps", steps}};
}

} // namespace htl
