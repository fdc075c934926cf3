#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "htl/json_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <string>

using namespace htl;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

std::string cliPath() {
    const char* p = std::getenv("HTL_CLI");
    REQUIRE(p != nullptr);
    return p;
}

RunResult run(const std::string& args) {
    std::string cmd = "\"" + cliPath() + "\" " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string writeTemp(const std::string& name, const std::string& content) {
    std::string path = std::string("cli_fixture_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

/// The JSON line whose "check" field matches, parsed.
Json findCheck(const std::string& out, const std::string& name) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line);
        if (j.contains("check") && j.at("check") == name) return j;
    }
    FAIL("no line with check '" << name << "' in output:\n" << out);
    return {};
}

std::string tensorPairJson() {
    Matrix<Rational> n1(4, 4), n2(4, 4);
    n1.at(0, 2) = n1.at(1, 3) = Rational(1);   // J2 (x) I
    n2.at(0, 1) = n2.at(2, 3) = Rational(1);   // I (x) J2
    return Json{{"maps", Json::array({matrixToJson(n1), matrixToJson(n2)})}}.dump();
}

} // namespace

TEST_CASE("wfilt reports graded weight dimensions") {
    std::string zero = writeTemp(
        "zero.json", matrixToJson(Matrix<Rational>(3, 3)).dump());
    RunResult r = run("wfilt --input " + zero);
    CHECK(r.code == 0);
    CHECK(findCheck(r.out, "weights").at("value") == Json{{"0", 3}});

    Matrix<Rational> j2(2, 2);
    j2.at(0, 1) = Rational(1);
    std::string j2f = writeTemp("j2.json", matrixToJson(j2).dump());
    RunResult r2 = run("wfilt --input " + j2f + " --sl2 --primitive");
    CHECK(r2.code == 0);
    CHECK(findCheck(r2.out, "weights").at("value") == Json{{"-1", 1}, {"1", 1}});
    CHECK(findCheck(r2.out, "sl2-eigenspaces").at("value") == Json{{"-1", 1}, {"1", 1}});
}

TEST_CASE("wfilt exit codes for bad input") {
    Matrix<Rational> notNil = Matrix<Rational>::identity(2);
    std::string f = writeTemp("notnil.json", matrixToJson(notNil).dump());
    CHECK(run("wfilt --input " + f).code == 3);

    std::string garbage = writeTemp("garbage.json", "{not json");
    CHECK(run("wfilt --input " + garbage).code == 2);
    CHECK(run("wfilt --input does_not_exist.json").code == 2);
    CHECK(run("wfilt").code == 2);
    CHECK(run("nonsense-subcommand").code == 2);
}

TEST_CASE("compat verdicts and witnesses") {
    std::string pair = writeTemp("pair.json", tensorPairJson());
    for (const std::string& mode : {"seq", "strong", "hodge", "bottom"})
        CHECK(run("compat --input " + pair + " --mode " + mode).code == 0);
    CHECK(run("compat --input " + pair + " --mode seq --level 0").code == 0);

    // single map: every mode passes
    Matrix<Rational> j3(3, 3);
    j3.at(0, 1) = j3.at(1, 2) = Rational(1);
    std::string single = writeTemp(
        "single.json", Json{{"maps", Json::array({matrixToJson(j3)})}}.dump());
    for (const std::string& mode : {"seq", "strong", "hodge", "bottom"})
        CHECK(run("compat --input " + single + " --mode " + mode).code == 0);

    // non-commuting input is a precondition error
    Matrix<Rational> a(2, 2), b(2, 2);
    a.at(0, 1) = Rational(1);
    b.at(1, 0) = Rational(1);
    std::string bad = writeTemp(
        "noncomm.json", Json{{"maps", Json::array({matrixToJson(a), matrixToJson(b)})}}.dump());
    CHECK(run("compat --input " + bad + " --mode seq").code == 3);
}

TEST_CASE("compat flags a failing fixture with a witness") {
    // search for a strongly-incompatible commuting pair, as in the library
    // tests: strictly upper a, b from its commutant, random conjugation
    std::mt19937_64 rng(20240823);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::string fixture;
    for (int trial = 0; trial < 4000 && fixture.empty(); ++trial) {
        int d = 4;
        Matrix<Rational> a(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) a.at(i, j) = Rational(coef(rng));
        std::vector<std::pair<int, int>> pos;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) pos.emplace_back(i, j);
        Matrix<Rational> comm(d * d, static_cast<int>(pos.size()));
        for (size_t v = 0; v < pos.size(); ++v) {
            Matrix<Rational> e(d, d);
            e.at(pos[v].first, pos[v].second) = Rational(1);
            Matrix<Rational> c = a * e - e * a;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    comm.at(i * d + j, static_cast<int>(v)) = c.at(i, j);
        }
        Subspace<Rational> ker = kernel(comm);
        Matrix<Rational> b(d, d);
        for (int k = 0; k < ker.dim(); ++k) {
            Rational c = Rational(coef(rng));
            for (size_t v = 0; v < pos.size(); ++v)
                b.at(pos[v].first, pos[v].second) =
                    b.at(pos[v].first, pos[v].second) +
                    c * ker.basis().at(static_cast<int>(v), k);
        }
        if (b.isZero()) continue;
        CommutingTuple<Rational> t({a, b});
        if (isStronglySequentiallyCompatible(t).ok) continue;
        fixture = Json{{"maps", Json::array({matrixToJson(a), matrixToJson(b)})}}.dump();
    }
    REQUIRE(!fixture.empty());
    std::string f = writeTemp("failing.json", fixture);
    RunResult r = run("compat --input " + f + " --mode strong");
    CHECK(r.code == 1);
    Json verdict = findCheck(r.out, "strong");
    CHECK(verdict.at("pass") == false);
    CHECK(verdict.at("stage").get<std::string>() != "");
}

TEST_CASE("purity subcommand") {
    std::string pair = writeTemp("pair2.json", tensorPairJson());
    RunResult r = run("purity --input " + pair + " --graded --reindex kk --weight 0");
    CHECK(r.code == 0);
    CHECK(findCheck(r.out, "purity").at("pass") == true);
    CHECK(findCheck(r.out, "h2-vanishing").at("pass") == true);
    CHECK(findCheck(r.out, "graded-vanishing").at("pass") == true);
    CHECK(findCheck(r.out, "reindex-roundtrip").at("pass") == true);

    RunResult r2 = run("purity --input " + pair + " --reindex cks");
    CHECK(r2.code == 0);
    CHECK(findCheck(r2.out, "reindex-roundtrip").at("pass") == true);
}

TEST_CASE("model fixtures pipe into twistor operations") {
    RunResult mod2 = run("model --name mod2 --args p=3");
    REQUIRE(mod2.code == 0);
    std::string bundle = writeTemp("mod2.json", mod2.out);

    RunResult split = run("twistor --input " + bundle + " --op split");
    CHECK(split.code == 0);
    CHECK(findCheck(split.out, "splitting").at("value") == Json::array({0, 0}));

    RunResult mixed = run("twistor --input " + bundle + " --op mixed");
    CHECK(mixed.code == 0);
    CHECK(findCheck(mixed.out, "mixed").at("pass") == true);
    CHECK(findCheck(mixed.out, "mixed").at("steps") == Json{{"-1", 1}, {"1", 2}});

    // p = 0 degenerates to the split form
    RunResult mod2z = run("model --name mod2 --args p=0");
    REQUIRE(mod2z.code == 0);
    std::string zbundle = writeTemp("mod2z.json", mod2z.out);
    RunResult zsplit = run("twistor --input " + zbundle + " --op split");
    CHECK(findCheck(zsplit.out, "splitting").at("value") == Json::array({1, -1}));

    RunResult sym = run("model --name sym --args l=2 p=3");
    REQUIRE(sym.code == 0);
    std::string sbundle = writeTemp("sym2.json", sym.out);
    RunResult bk = run("twistor --input " + sbundle + " --op birkhoff");
    CHECK(bk.code == 0);
    CHECK(findCheck(bk.out, "birkhoff").at("reconstruction") == "exact");
    RunResult smixed = run("twistor --input " + sbundle + " --op mixed");
    CHECK(findCheck(smixed.out, "mixed").at("pass") == true);

    RunResult lp = run("model --name lparams --args a=2 alpha_re=1 lambda_re=1");
    REQUIRE(lp.code == 0);
    Json j = Json::parse(lp.out);
    CHECK(j.at("residue").at("A") == "0");
    CHECK(j.at("residue").at("B").at("re") == "2");
}

TEST_CASE("twistor h0 and precondition errors") {
    TwistorBundle<Rational> triv{2, LaurentMatrix<Rational>(2, 2)};
    triv.gluing.at(0, 0) = LaurentPoly<Rational>(1);
    triv.gluing.at(1, 1) = LaurentPoly<Rational>(1);
    std::string f = writeTemp("triv.json", bundleToJson(triv).dump());
    RunResult r = run("twistor --input " + f + " --op h0 --twist 0");
    CHECK(r.code == 0);
    CHECK(findCheck(r.out, "h0").at("value").at("dim") == 2);

    // singular gluing is a precondition error
    TwistorBundle<Rational> sing{2, LaurentMatrix<Rational>(2, 2)};
    sing.gluing.at(0, 0) = LaurentPoly<Rational>(1);
    std::string sf = writeTemp("sing.json", bundleToJson(sing).dump());
    CHECK(run("twistor --input " + sf + " --op split").code == 3);
}

TEST_CASE("reports are deterministic for a fixed seed") {
    std::string pair = writeTemp("pair3.json", tensorPairJson());
    RunResult a = run("compat --input " + pair + " --mode strong --seed 42");
    RunResult b = run("compat --input " + pair + " --mode strong --seed 42");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);

    // HTL_SEED is honored as the default
    std::string cmd = "HTL_SEED=42 \"" + cliPath() + "\" compat --input " + pair +
                      " --mode strong 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
    pclose(pipe);
    CHECK(out == a.out);
}
