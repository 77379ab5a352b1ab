#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "taylam/expansion.hpp"
#include "taylam/rigid.hpp"
#include "taylam/syntax.hpp"

using json = nlohmann::json;
using namespace taylam;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(TAYLAM_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buffer{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::size_t n = fread(buffer.data(), 1, buffer.size(), pipe)) output.append(buffer.data(), n);
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, output};
}

} // namespace

TEST_CASE("analyze finds the empty-bag head witness and exits zero") {
    auto r = run_cli("analyze --property head \"x ((\\x. x x) (\\x. x x))\" --max-size 6");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("witness: <x>()") != std::string::npos);
}

TEST_CASE("fuel exhaustion exits with the unknown code") {
    auto r = run_cli("reduce --strategy head \"(\\x. x x) (\\x. x x)\" --fuel 5 --trace");
    REQUIRE(r.exit_code == 2);
    // The five steps reproduce the term verbatim.
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = r.output.find("(\\x. x x) (\\x. x x)", pos)) != std::string::npos) {
        ++count;
        ++pos;
    }
    REQUIRE(count == 6);
}

TEST_CASE("the confluence-failure report shows both runs") {
    auto r = run_cli("laws --law rigid-confluence-failure");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("pass") != std::string::npos);
    REQUIRE(r.output.find("rearrange-first") != std::string::npos);
    REQUIRE(r.output.find("reduce-first") != std::string::npos);
    REQUIRE(r.output.find("\n    0\n") != std::string::npos);
}

TEST_CASE("parse and usage errors exit with code one") {
    REQUIRE(run_cli("parse \"(\\x. x\"").exit_code == 1);
    REQUIRE(run_cli("parse").exit_code == 1);
    REQUIRE(run_cli("reduce --strategy d-head \"x\"").exit_code == 1);
    REQUIRE(run_cli("analyze --property nonsense \"x\"").exit_code == 1);
    REQUIRE(run_cli("laws --law no-such-law").exit_code == 1);
    REQUIRE(run_cli("frobnicate").exit_code == 1);
    REQUIRE(run_cli("analyze --property head \"x\" --max-size 0").exit_code == 1);
    REQUIRE(run_cli("expand \"x\" --max-count 0").exit_code == 1);
}

TEST_CASE("json analyze output is one document whose witness reparses") {
    auto r = run_cli("analyze --property beta \"(\\x. y) ((\\x. x) z)\" --json --trace");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.output);
    REQUIRE(doc["property"] == "beta");
    REQUIRE(doc["outcome"] == "yes");
    REQUIRE(doc.contains("budget"));
    REQUIRE(doc.contains("reason"));
    RigidTerm witness = parse_rigid_term(doc["witness"].get<std::string>());
    REQUIRE(is_rigid_approximant(witness, parse_term("(\\x. y) ((\\x. x) z)")));
    REQUIRE(is_positive_rigid(r_normal_form(witness)));
    REQUIRE_FALSE(doc["trace"].empty());
    for (const auto& line : doc["trace"]) parse_rigid_term(line.get<std::string>());
}

TEST_CASE("identical argv and seed give byte-identical output") {
    auto a = run_cli("laws --law commh --cases 40 --seed 11 --max-size 8 --json");
    auto b = run_cli("laws --law commh --cases 40 --seed 11 --max-size 8 --json");
    REQUIRE(a.exit_code == b.exit_code);
    REQUIRE(a.output == b.output);
}

TEST_CASE("rigid and multiset reduce strategies") {
    auto r = run_cli("reduce --strategy r-beta \"<\\x. <x>(x)>(\\x. <x>(x))\"");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output == "0\n");
    auto d = run_cli("reduce --strategy d-beta \"<\\x. <x>[x]>[\\y. y, z]\" --trace");
    REQUIRE(d.exit_code == 0);
    REQUIRE(d.output.find("z + <z>[\\x. x]") != std::string::npos);
    auto s = run_cli("reduce --strategy d-sigma1 \"<<\\x. s>[t]>[q]\"");
    REQUIRE(s.exit_code == 0);
    REQUIRE(s.output == "<\\x. <s>[q]>[t]\n");
}

TEST_CASE("expansion listing is line oriented and reparses") {
    auto r = run_cli("expand \"x y\" --max-size 4");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output == "<x>()\n<x>(y)\n<x>(y, y)\n");
    auto t = run_cli("expand \"x y\" --kind taylor --max-size 4 --json");
    REQUIRE(t.exit_code == 0);
    json doc = json::parse(t.output);
    REQUIRE(doc["count"] == 3);
    for (const auto& line : doc["terms"]) parse_res_term(line.get<std::string>());
}

TEST_CASE("terms can come from a file") {
    std::string path = "/tmp/taylam_cli_term.txt";
    {
        FILE* f = fopen(path.c_str(), "w");
        REQUIRE(f != nullptr);
        fputs("(\\x. x) y\n", f);
        fclose(f);
    }
    auto r = run_cli("reduce --strategy beta --file " + path);
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output == "y\n");
}

TEST_CASE("render normalizes spacing") {
    auto r = run_cli("render \"\\x.x\"");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output == "\\x. x\n");
    auto rr = run_cli("render --lang rigid \"<x>(y,y)\"");
    REQUIRE(rr.exit_code == 0);
    REQUIRE(rr.output == "<x>(y, y)\n");
}
