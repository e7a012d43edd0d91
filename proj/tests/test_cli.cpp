#include "oracles.hpp"

#include "vcsp/cli.hpp"
#include "vcsp/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vcsp;
namespace fs = std::filesystem;

namespace {

// Fixtures are copied so that the classification cache never lands in the
// source tree.
struct Workspace {
    fs::path dir;

    Workspace()
    {
        static int counter = 0;
        dir = fs::temp_directory_path() / ("vcsp_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(dir);
        fs::create_directories(dir);
        for (const auto& e : fs::directory_iterator(VCSP_TEST_DATA))
            if (e.path().extension() != ".classification.json") fs::copy_file(e.path(), dir / e.path().filename());
    }
    ~Workspace() { fs::remove_all(dir); }

    std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("classify exit codes")
    {
        Workspace ws;
        CHECK(run({"classify", ws("equality.json")}).code == kExitNpHard);
        CHECK(run({"classify", ws("absdiff3.json")}).code == kExitTractable);
        CHECK(run({"classify", ws("absdiff2.json")}).code == kExitTractable);
        CHECK(run({"classify", ws("one_infinite.json")}).code == kExitNpHard);
        CHECK(run({"classify", ws("unary_only.json")}).code == kExitTractable);

        auto broken = run({"classify", ws("truncated.json")});
        CHECK(broken.code == kExitError);
        CHECK(broken.err.find("malformed JSON") != std::string::npos);

        CHECK(run({"classify", ws("missing.json")}).code == kExitError);
        CHECK(run({"frobnicate"}).code == kExitError);

        std::ofstream(ws("crisp.json")) << R"({"domain": 2, "functions": [{"name": "ne", "arity": 2, "table": ["inf", 0, 0, "inf"]}]})";
        CHECK(run({"classify", ws("crisp.json")}).code == kExitGeneral);
    }

    TEST_CASE("classify text and json reports")
    {
        Workspace ws;
        auto text = run({"classify", ws("absdiff3.json"), "--no-timings"});
        CHECK(text.out.find("TRACTABLE") != std::string::npos);

        auto a = run({"classify", ws("equality.json"), "--json", "--no-timings"});
        auto b = run({"classify", ws("equality.json"), "--json", "--no-timings"});
        CHECK(a.out == b.out);
        const Json j = Json::parse(a.out);
        CHECK(j.at("verdict") == "NP_HARD");
        CHECK(j.contains("witness"));
        CHECK_FALSE(j.contains("classify_us"));

        const ReportDocument r = report_from_json(j);
        CHECK(report_from_json(report_to_json(r)) == r);
        CHECK(report_to_json(r) == j);

        auto ad = Json::parse(run({"classify", ws("absdiff3.json"), "--json", "--no-timings"}).out);
        CHECK(ad.at("certificate").at("order") == Json::array({0, 1, 2}));
    }

    TEST_CASE("languages round-trip through JSON")
    {
        for (const char* name : {"equality.json", "absdiff3.json", "one_infinite.json", "unary_only.json"}) {
            const Language lang = parse_language(slurp(std::string(VCSP_TEST_DATA) + "/" + name));
            const Json j = language_to_json(lang);
            CHECK(language_to_json(parse_language(j.dump())) == j);
        }
        std::mt19937_64 rng(211);
        for (int round = 0; round < 30; ++round) {
            Language lang{3, {oracle::random_function(rng, "f", 2, 3, 5, 0.2)}};
            lang.functions[0].table[0] = Cost(Rational(5, 6));
            const Language back = parse_language(language_to_json(lang).dump());
            CHECK(back.functions[0].table == lang.functions[0].table);
        }
    }

    TEST_CASE("parse errors name the location")
    {
        try {
            parse_language(R"({"domain": 2, "functions": [{"name": "f", "arity": 2, "table": [0, 1, "x", 0]}]})");
            FAIL("expected an error");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("functions[0].table[2]") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_language(R"({"domain": 2, "functions": [{"name": "f", "arity": 2, "table": [0, 1, -1, 0]}]})"),
                        InputError);
        CHECK_THROWS_AS(parse_language("{"), InputError);
    }

    TEST_CASE("solve")
    {
        Workspace ws;
        auto chain = run({"solve", ws("absdiff3.json"), ws("absdiff3_chain.json"), "--json", "--no-cache"});
        REQUIRE(chain.code == kExitTractable);
        const Json c = Json::parse(chain.out);
        CHECK(c.at("method") == "min_cut");
        CHECK(c.at("cost") == "2");
        CHECK(c.at("assignment") == Json::array({0, 0, 0, 2}));

        auto cycle = run({"solve", ws("equality.json"), ws("equality_6.json"), "--json", "--no-cache"});
        REQUIRE(cycle.code == kExitTractable);
        const Json e = Json::parse(cycle.out);
        CHECK(e.at("method") == "brute_force");
        CHECK(e.at("cost") == "0");

        CHECK(run({"solve", ws("absdiff3.json"), ws("infeasible.json"), "--no-cache"}).code == kExitInfeasible);
        CHECK(run({"solve", ws("equality.json"), ws("equality_6.json"), "--no-cache", "--brute-force-cap", "10"}).code == kExitError);
    }

    TEST_CASE("classification cache")
    {
        Workspace ws;
        const std::string cache = ws("absdiff3.json") + ".classification.json";
        auto first = run({"solve", ws("absdiff3.json"), ws("absdiff3_chain.json")});
        CHECK(first.code == kExitTractable);
        REQUIRE(fs::exists(cache));
        const Json stored = Json::parse(slurp(cache));
        CHECK(stored.at("report").at("verdict") == "TRACTABLE");

        auto second = run({"solve", ws("absdiff3.json"), ws("absdiff3_chain.json")});
        CHECK(second.out == first.out);

        // A different configuration misses the cache and overwrites it.
        run({"solve", ws("absdiff3.json"), ws("absdiff3_chain.json"), "--pool-depth", "0"});
        CHECK(Json::parse(slurp(cache)).at("key") != stored.at("key"));

        fs::remove(cache);
        run({"solve", ws("absdiff3.json"), ws("absdiff3_chain.json"), "--no-cache"});
        CHECK_FALSE(fs::exists(cache));
    }

    TEST_CASE("graph")
    {
        Workspace ws;
        auto s = run({"graph", ws("absdiff2.json"), "--summary"});
        CHECK(s.code == kExitTractable);
        CHECK(s.out.find("nodes: 2") != std::string::npos);
        CHECK(s.out.find("edges: 1") != std::string::npos);

        auto dot = run({"graph", ws("equality.json"), "--out", ws("eq.dot")});
        CHECK(dot.code == kExitTractable);
        CHECK(slurp(ws("eq.dot")).find("graph") != std::string::npos);
    }

    TEST_CASE("reduce")
    {
        Workspace ws;
        auto k3 = run({"reduce", ws("equality.json"), ws("k3.txt"), "--verify"});
        CHECK(k3.code == kExitTractable);
        CHECK(k3.err.find("verify: ok") != std::string::npos);
        const Json j = Json::parse(k3.out);
        CHECK(j.at("decoder").at("quantity") == "max-cut");

        auto p3 = run({"reduce", ws("one_infinite.json"), ws("p3.txt"), "--kind", "mis", "--verify"});
        CHECK(p3.code == kExitTractable);
        CHECK(p3.err.find("verify: ok") != std::string::npos);

        CHECK(run({"reduce", ws("absdiff3.json"), ws("k3.txt")}).code == kExitNoWitness);
        CHECK(run({"reduce", ws("equality.json"), ws("k3.txt"), "--kind", "mis"}).code == kExitNoWitness);
        CHECK(run({"reduce", ws("equality.json"), ws("k3.txt"), "--kind", "cut"}).code == kExitError);
    }

    TEST_CASE("emitted reductions solve and decode")
    {
        Workspace ws;
        std::ofstream(ws("c5.txt")) << "0 1\n1 2\n2 3\n3 4\n4 0\n";
        auto r = run({"reduce", ws("equality.json"), ws("c5.txt"), "--out", ws("c5.json")});
        REQUIRE(r.code == kExitTractable);
        REQUIRE(fs::exists(ws("c5.json.decoder.json")));
        const AffineDecoder dec = decoder_from_json(Json::parse(slurp(ws("c5.json.decoder.json"))));

        auto s = run({"solve", ws("equality.json"), ws("c5.json"), "--json", "--no-cache"});
        REQUIRE(s.code == kExitTractable);
        const Rational opt = parse_rational(Json::parse(s.out).at("cost").get<std::string>());
        CHECK(dec.decode(opt) == 4);
    }
}
