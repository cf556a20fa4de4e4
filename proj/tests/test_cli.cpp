#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

  std::string const samples = FRACIDEAL_SAMPLES;

  struct Run {
    int         code;
    std::string out;
    std::string err;
  };

  Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "fracideal");
    std::vector<char const*> argv;
    for (auto const& a : args) {
      argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    int code = fracideal::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  std::string sample(std::string const& name) { return samples + "/" + name; }

}  // namespace

TEST_CASE("ideal classify on the Puiseux maximal ideal", "[cli]") {
  auto r = run({"ideal", "classify", sample("puiseux_P.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "REGULAR_NOT_INVERTIBLE\n");
  CHECK(run({"ideal", "classify", sample("puiseux_half.json")}).out == "INVERTIBLE\n");
  CHECK(run({"ideal", "classify", sample("cantor_point.json")}).out == "NOT_REGULAR\n");
}

TEST_CASE("fn add of zero with zero", "[cli]") {
  auto r = run({"fn", "add", sample("zero.json"), sample("zero.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "level 0 {}\n");
  auto j = run({"--format", "json", "fn", "add", sample("zero.json"), sample("zero.json")});
  auto parsed = fracideal::io::json::parse(j.out);
  CHECK(parsed["cells"].empty());
  CHECK(parsed["exceptional"].empty());
}

TEST_CASE("check roundtrip suite", "[cli]") {
  auto r = run({"check", "--suite", "roundtrip", "--seed", "7", "--cases", "500"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS roundtrip[puiseux]: 500/500 passed") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  // identical reports across runs
  CHECK(run({"check", "--suite", "roundtrip", "--seed", "7", "--cases", "500"}).out == r.out);
  auto other = run({"--format", "json", "check", "--suite", "usc", "--seed", "3", "--cases", "50"});
  CHECK(other.code == 0);
  CHECK(fracideal::io::json::parse(other.out)["passed"] == 200);
}

TEST_CASE("exit codes", "[cli]") {
  CHECK(run({}).code == 1);
  CHECK(run({"ideal", "frobnicate"}).code == 1);
  CHECK(run({"fn", "validate", sample("missing.json")}).code == 1);
  CHECK(run({"ideal", "mul", sample("puiseux_P.json"), sample("cantor_point.json")}).code == 1);
  CHECK(run({"check", "--suite", "nonexistent"}).code == 1);

  auto inv = run({"ideal", "inverse", sample("puiseux_P.json")});
  CHECK(inv.code == 2);
  CHECK(inv.err.find("not invertible") != std::string::npos);
  CHECK(run({"ideal", "witness", sample("cantor_point.json")}).code == 2);
  auto opaque = run({"fn", "validate", sample("opaque_fn.json")});
  CHECK(opaque.code == 2);
  CHECK(opaque.out.find("b[0]") != std::string::npos);
}

TEST_CASE("remaining subcommands", "[cli]") {
  CHECK(run({"fn", "validate", sample("mixed_ideal.json")}).out.rfind("USC_B", 0) == 0);
  CHECK(run({"fn", "eval", sample("cantor_point.json"), "--path", "[]"}).out == "(1,0)\n");
  CHECK(run({"fn", "eval", sample("cantor_point.json"), "--path", "[0, 1]"}).out == "(0,0)\n");
  CHECK(run({"ideal", "contains", sample("cantor_point.json"), sample("cantor_element.json")}).out
        == "true\n");
  CHECK(run({"ideal", "intersect", sample("puiseux_P.json"), "--level", "1"}).out
        == "level 1 {P[0]:1/2}\n");
  CHECK(run({"ideal", "inverse", sample("puiseux_half.json")}).out == "level 0 {P[]:(-1/2,0)}\n");
  CHECK(run({"ideal", "witness", sample("puiseux_P.json")}).out == "level 0 {P[]:(0,1)}\n");
  CHECK(run({"class", "eq", sample("zp_third.json"), sample("zp_third_shifted.json")}).out
        == "EQUIVALENT\n");
  CHECK(run({"class", "eq", sample("zp_third.json"), sample("zp_fifth.json")}).out.rfind("NOT_EQUIVALENT", 0)
        == 0);
  CHECK(run({"class", "canon", sample("zp_third_shifted.json")}).out.find("1/3 mod Z[1/2]")
        != std::string::npos);
  CHECK(run({"class", "clifford", "builtin:puiseux"}).out == "true\n");
  CHECK(run({"class", "clifford", "builtin:cantor"}).out == "false\n");
  CHECK(run({"class", "clifford", sample("opaque_tower.json")}).out == "unknown\n");
  CHECK(run({"class", "summands", "builtin:zp_like"}).out.find("{0} ⊔ R/Z[1/2]") != std::string::npos);
  CHECK(run({"tower", "validate", sample("mixed_tower.json")}).code == 0);
  CHECK(run({"tower", "show", "builtin:cantor", "--depth", "2"}).out.find("c[1,1]") != std::string::npos);
  CHECK(run({"galois", "act", sample("cantor_swap.json"), sample("cantor_cells.json")}).out
        == "level 1 {c[0]:(2,0), c[1]:(1,0)}\n");
  CHECK(run({"galois", "orbit", sample("cantor_cells.json"), sample("cantor_swap.json")}).out.rfind(
            "orbit size 2", 0)
        == 0);
  CHECK(run({"galois", "orbit", sample("cantor_cells.json"), sample("cantor_swap.json"), "--bound", "1"})
            .code
        == 2);
}
