// Command-line driver: loads JSON descriptions of matrices, tuples, and
// bundles, runs the library checks, and emits JSON-lines reports (or
// human-readable tables with --human).
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 malformed input,
// 3 precondition violated (non-nilpotent, non-commuting, bad gluing).

#include "CLI11.hpp"

#include "htl/generality.hpp"
#include "htl/json_io.hpp"
#include "htl/koszul.hpp"
#include "htl/models.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace htl;

namespace {

struct Reporter {
    std::string command;
    bool human = false;
    bool failed = false;
    std::vector<std::pair<std::string, Json>> lines;

    void add(const std::string& name, bool pass, Json extra = Json::object()) {
        extra["check"] = name;
        extra["pass"] = pass;
        if (!pass) failed = true;
        lines.emplace_back(name, std::move(extra));
    }

    void info(const std::string& name, Json value) {
        Json j{{"check", name}, {"value", std::move(value)}};
        lines.emplace_back(name, std::move(j));
    }

    int emit() {
        std::sort(lines.begin(), lines.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (human) {
            std::cout << "command: " << command << "\n";
            for (const auto& [name, j] : lines) {
                std::cout << "  " << name << ": ";
                if (j.contains("pass")) std::cout << (j.at("pass").get<bool>() ? "pass" : "FAIL");
                Json rest = j;
                rest.erase("check");
                rest.erase("pass");
                if (!rest.empty()) std::cout << "  " << rest.dump();
                std::cout << "\n";
            }
        } else {
            std::cout << Json{{"command", command}}.dump() << "\n";
            for (const auto& [name, j] : lines) std::cout << j.dump() << "\n";
        }
        return failed ? 1 : 0;
    }
};

Json loadFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
}

std::map<std::string, std::string> parseArgs(const std::vector<std::string>& kvs) {
    std::map<std::string, std::string> out;
    for (const std::string& kv : kvs) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw InputError("expected key=value in --args, got '" + kv + "'");
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return out;
}

std::string argOr(const std::map<std::string, std::string>& args, const std::string& key,
                  const std::string& fallback) {
    auto it = args.find(key);
    return it == args.end() ? fallback : it->second;
}

Json gradedDims(const Filtration<Rational>& w) {
    Json out = Json::object();
    for (int h : w.jumpWeights()) out[std::to_string(h)] = w.dim(h) - w.dim(h - 1);
    return out;
}

int runWfilt(const std::string& input, bool wantSl2, bool wantPrimitive, bool human) {
    Reporter rep{"wfilt", human};
    Matrix<Rational> m = nilpotentFromJson(loadFile(input), "input");
    Filtration<Rational> w = weightFiltration(m);
    rep.info("weights", gradedDims(w));
    if (wantSl2) {
        Sl2Data<Rational> s = sl2Splitting(m);
        Json dims = Json::object();
        for (const auto& [a, v] : s.eigenspaces) dims[std::to_string(a)] = v.dim();
        rep.info("sl2-eigenspaces", dims);
    }
    if (wantPrimitive) {
        PrimitiveDecomposition<Rational> p = primitiveDecomposition(m);
        Json parts = Json::object();
        for (const auto& [key, v] : p.parts)
            parts[std::to_string(key.first) + "," + std::to_string(key.second)] = v.dim();
        rep.info("primitive-parts", parts);
    }
    return rep.emit();
}

int runCompat(const std::string& input, const std::string& mode, int level, bool hasLevel,
              std::uint64_t seed, bool human) {
    Reporter rep{"compat", human};
    CommutingTuple<Rational> t = tupleFromJson(loadFile(input), "input");
    if (mode == "seq") {
        if (hasLevel) {
            rep.add("sequential-at-level", isSequentiallyCompatibleAtLevel(t, level, 2, seed),
                    Json{{"level", level}});
        } else {
            TupleCompatResult r = isSequentiallyCompatible(t, 2, seed);
            rep.add("sequential", r.ok, Json{{"stage", r.stage}, {"witness", r.witnessH}});
        }
    } else if (mode == "strong") {
        TupleCompatResult r = isStronglySequentiallyCompatible(t, 2, seed);
        rep.add("strong", r.ok, Json{{"stage", r.stage}, {"witness", r.witnessH}});
    } else if (mode == "hodge") {
        rep.add("hodge", isHodgeType(t, 2, seed));
    } else if (mode == "bottom") {
        rep.add("bottom", isBottomCompatible(t, 2, seed));
    } else {
        throw InputError("unknown mode '" + mode + "'");
    }
    return rep.emit();
}

int runPurity(const std::string& input, bool graded, const std::string& reindex, int weight,
              bool human) {
    Reporter rep{"purity", human};
    CommutingTuple<Rational> t = tupleFromJson(loadFile(input), "input");
    FilteredComplex<Rational> fc = filteredKoszul(t);
    PurityResult pr = purityCheck(fc);
    rep.add("purity", pr.pure,
            pr.pure ? Json::object()
                    : Json{{"failDegree", pr.failDegree}, {"failWeight", pr.failWeight}});
    Json coh = Json::object();
    for (int k = 0; k <= t.size(); ++k) {
        Json table = Json::object();
        for (const auto& [h, d] : filteredCohomology(fc, k)) table[std::to_string(h)] = d;
        coh[std::to_string(k)] = table;
    }
    rep.info("cohomology", coh);
    if (t.size() == 2)
        rep.add("h2-vanishing", cohomology(fc.complex, 2).dim == 0);
    if (graded) {
        Sl2Data<Rational> s = sl2Splitting(t.partialSum(t.size()));
        rep.add("graded-vanishing", gradedVanishingCheck(fc, s.eigenspaces));
    }
    if (!reindex.empty()) {
        WeightConvention conv =
            reindex == "cks" ? WeightConvention::cks : WeightConvention::kk;
        if (reindex != "cks" && reindex != "kk")
            throw InputError("unknown reindex convention '" + reindex + "'");
        FilteredComplex<Rational> round =
            reindexFiltration(reindexFiltration(fc, conv, weight), conv, weight, true);
        PurityResult pr2 = purityCheck(round);
        rep.add("reindex-roundtrip", pr2.pure == pr.pure);
    }
    return rep.emit();
}

int runTwistor(const std::string& input, const std::string& op, int twist, bool human) {
    Reporter rep{"twistor", human};
    Json j = loadFile(input);
    TwistorBundle<Rational> b = bundleFromJson<Rational>(j, "input");
    if (op == "split") {
        rep.info("splitting", splittingType(b));
    } else if (op == "h0") {
        rep.info("h0", Json{{"twist", twist}, {"dim", h0(b, twist)}});
    } else if (op == "birkhoff") {
        try {
            BirkhoffResult<Rational> r = birkhoff(b);
            rep.add("birkhoff", true,
                    Json{{"exponents", r.exponents}, {"reconstruction", "exact"}});
        } catch (const std::logic_error& e) {
            rep.add("birkhoff", false, Json{{"error", e.what()}});
        }
    } else if (op == "mixed") {
        if (!j.contains("morphism"))
            throw InputError("--op mixed requires a \"morphism\" field in the input");
        BundleMorphism<Rational> f = morphismFromJson<Rational>(j.at("morphism"), "morphism");
        try {
            validateMorphism(b, b, f);
        } catch (const std::invalid_argument& e) {
            throw PreconditionError(e.what());
        }
        try {
            FilteredTwistorBundle<Rational> w = morphismWeightFiltration(b, f);
            MixedCheck mc = isMixedTwistor(w);
            Json ranks = Json::object();
            for (const auto& [h, s] : w.steps) ranks[std::to_string(h)] = s.rank();
            rep.add("mixed", mc.ok,
                    mc.ok ? Json{{"steps", ranks}}
                          : Json{{"steps", ranks}, {"failWeight", mc.failWeight}});
        } catch (const std::domain_error& e) {
            rep.add("mixed", false, Json{{"error", e.what()}});
        }
    } else {
        throw InputError("unknown op '" + op + "'");
    }
    return rep.emit();
}

int runModel(const std::string& name, const std::vector<std::string>& kvs) {
    std::map<std::string, std::string> args = parseArgs(kvs);
    if (name == "mod2" || name == "sym") {
        Rational p = Rational::parse(argOr(args, "p", "3"));
        int l = name == "mod2" ? 1 : std::stoi(argOr(args, "l", "2"));
        if (l < 0) throw InputError("l must be nonnegative");
        TwistorBundle<Rational> b = modSymGluing(l, p);
        Json out = bundleToJson(b);
        out["morphism"] = morphismToJson(modelNilpotent(l, p));
        std::cout << out.dump() << "\n";
        return 0;
    }
    if (name == "lparams") {
        auto rat = [&](const std::string& key) {
            return Rational::parse(argOr(args, key, "0"));
        };
        LParams p{rat("a"), GaussianRational(rat("alpha_re"), rat("alpha_im")),
                  GaussianRational(rat("lambda_re"), rat("lambda_im"))};
        ResidueData r = lForward(p);
        Json out{{"params",
                  Json{{"a", p.a.str()},
                       {"alpha", gaussianToJson(p.alpha)},
                       {"lambda", gaussianToJson(p.lambda)}}},
                 {"residue", Json{{"A", r.A.str()}, {"B", gaussianToJson(r.B)}}}};
        std::cout << out.dump() << "\n";
        return 0;
    }
    throw InputError("unknown model '" + name + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact checks for weight filtrations and twistor gluing data"};
    app.require_subcommand(1);

    std::uint64_t seed = 9001;
    if (const char* env = std::getenv("HTL_SEED")) seed = std::strtoull(env, nullptr, 10);
    app.add_option("--seed", seed, "seed for randomized checks");
    bool human = false;
    app.add_flag("--human", human, "human-readable tables instead of JSON lines");

    std::string input, mode = "seq", op = "split", reindex, modelName;
    int level = 0, twist = 0, weight = 0;
    bool wantSl2 = false, wantPrimitive = false, graded = false;
    std::vector<std::string> modelArgs;

    app.fallthrough();
    CLI::App* wfilt = app.add_subcommand("wfilt", "weight filtration of a nilpotent matrix");
    wfilt->add_option("--input", input)->required();
    wfilt->add_flag("--sl2", wantSl2);
    wfilt->add_flag("--primitive", wantPrimitive);

    CLI::App* compat = app.add_subcommand("compat", "compatibility checks for tuples");
    compat->add_option("--input", input)->required();
    compat->add_option("--mode", mode)->check(CLI::IsMember({"seq", "strong", "hodge", "bottom"}));
    CLI::Option* levelOpt = compat->add_option("--level", level);

    CLI::App* purity = app.add_subcommand("purity", "Koszul purity of a tuple");
    purity->add_option("--input", input)->required();
    purity->add_flag("--graded", graded);
    purity->add_option("--reindex", reindex)->check(CLI::IsMember({"cks", "kk"}));
    purity->add_option("--weight", weight);

    CLI::App* twistor = app.add_subcommand("twistor", "operations on gluing matrices");
    twistor->add_option("--input", input)->required();
    twistor->add_option("--op", op)->check(CLI::IsMember({"split", "h0", "birkhoff", "mixed"}));
    twistor->add_option("--twist", twist);

    CLI::App* model = app.add_subcommand("model", "emit a model fixture as JSON");
    model->add_option("--name", modelName)->required()
        ->check(CLI::IsMember({"mod2", "sym", "lparams"}));
    model->add_option("--args", modelArgs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (wfilt->parsed()) return runWfilt(input, wantSl2, wantPrimitive, human);
        if (compat->parsed())
            return runCompat(input, mode, level, levelOpt->count() > 0, seed, human);
        if (purity->parsed()) return runPurity(input, graded, reindex, weight, human);
        if (twistor->parsed()) return runTwistor(input, op, twist, human);
        if (model->parsed()) return runModel(modelName, modelArgs);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
