#include <catch_amalgamated.hpp>

#include "fracideal/check/generators.hpp"
#include "fracideal/io.hpp"
#include "helpers.hpp"

using namespace fracideal;
using fixtures::node;
using fixtures::q;
using fixtures::rt;
using io::json;

namespace {

  std::string const samples = FRACIDEAL_SAMPLES;

  ErrorKind kind_of(auto&& fn) {
    try {
      fn();
    } catch (Error const& e) {
      return e.kind();
    }
    return ErrorKind::invariant_failure;
  }

}  // namespace

TEST_CASE("scalars", "[io]") {
  CHECK(io::rational_from_json(json::parse("[6, -4]"), "x") == q(-3, 2));
  CHECK(io::rational_from_json(json::parse("\"5/10\""), "x") == q(1, 2));
  CHECK(io::rational_from_json(json(7), "x") == 7);
  CHECK(io::rtilde_from_json(json::parse("[2, 4, 1]"), "x") == rt(1, 2, 1));
  CHECK(io::rtilde_to_json(rt(-5, 7, 0)) == json::parse("[-5, 7, 0]"));
  CHECK(kind_of([] { (void)io::rtilde_from_json(json::parse("[1, 2, 3]"), "x"); })
        == ErrorKind::invalid_input);
  CHECK(kind_of([] { (void)io::rational_from_json(json::parse("[1, 0]"), "x"); })
        == ErrorKind::invalid_input);
  CHECK(kind_of([] { (void)io::labels_from_json(json::parse("[0, -1]"), "x"); })
        == ErrorKind::invalid_input);

  // integers beyond int64 travel as strings
  Integer big = factorial(25);
  CHECK(io::integer_to_json(big).is_string());
  CHECK(io::integer_from_json(io::integer_to_json(big), "n") == big);
}

TEST_CASE("towers round-trip", "[io]") {
  auto mixed = io::tower_from_json(io::read_json_file(samples + "/mixed_tower.json"));
  REQUIRE(mixed.fibers().size() == 3);
  CHECK(mixed.fiber("q").cantor_arity() == 3);
  CHECK(ramification(mixed, node("r", {0, 0})) == 4);
  for (auto const& t : {builtin::puiseux(), builtin::cantor(), builtin::cantor_ramified(),
                        builtin::zp_like(3), mixed}) {
    json  j    = io::tower_to_json(t);
    Tower back = io::tower_from_json(j);
    CHECK(io::tower_to_json(back) == j);
    CHECK(level_nodes(back, 3).size() == level_nodes(t, 3).size());
  }
  CHECK(io::builtin_tower("zp_like:5").has_value());
  CHECK_FALSE(io::builtin_tower("nope").has_value());
}

TEST_CASE("malformed towers", "[io]") {
  auto bad = [](char const* text) {
    return kind_of([&] { (void)io::tower_from_json(json::parse(text)); });
  };
  CHECK(bad(R"({})") == ErrorKind::malformed_tower);
  CHECK(bad(R"({"base_primes": [{"label": "a"}]})") == ErrorKind::malformed_tower);
  CHECK(bad(R"({"base_primes": [{"label": "a", "kind": "weird"}]})") == ErrorKind::malformed_tower);
  CHECK(bad(R"({"base_primes": [{"label": "a", "kind": "explicit"}]})") == ErrorKind::malformed_tower);
  CHECK(bad(R"({"base_primes": [{"label": "a", "kind": "explicit",
               "tree": {"e": 1, "children": [{"e": 3, "children": [{"e": 4}]}]}}]})")
        == ErrorKind::malformed_tower);
  // declared metadata must match what the generator produces
  CHECK(bad(R"({"base_primes": [{"label": "a", "kind": "cantor",
               "metadata": {"behavior": "finite_fiber", "bound": 1}}]})")
        == ErrorKind::malformed_tower);
  CHECK(bad(R"({"base_primes": [{"label": "a", "kind": "puiseux"},
                                {"label": "a", "kind": "cantor"}]})")
        == ErrorKind::malformed_tower);
}

TEST_CASE("paths and nodes", "[io]") {
  auto C  = builtin::cantor();
  auto p  = io::path_from_json(json::parse(R"({"prefix": [1], "continuation": {"periodic": [0, 1]}})"), C);
  CHECK(p == PrimePath("c", {1}, {0, 1}));
  CHECK(io::path_from_json(io::path_to_json(p), C) == p);
  CHECK(io::parse_path_arg("[1, 0]", C) == PrimePath("c", {1}));
  CHECK(kind_of([&] { (void)io::parse_path_arg("[1", C); }) == ErrorKind::invalid_input);
  CHECK(kind_of([&] {
          (void)io::path_from_json(json::parse(R"({"prefix": [], "continuation": "weird"})"), C);
        })
        == ErrorKind::invalid_input);
  auto Z = builtin::zp_like(2);
  CHECK(kind_of([&] { (void)io::node_from_json(json::parse("[0]"), Z); }) == ErrorKind::invalid_input);
  CHECK(io::node_from_json(json::parse(R"({"base": "3", "labels": [0, 1]})"), Z) == node("3", {0, 1}));
}

TEST_CASE("functions and ideals round-trip", "[io][property]") {
  check::Rng rng(20261014, 51);
  for (auto const& T : {fixtures::puiseux(), fixtures::cantor(), fixtures::zp_like(),
                        fixtures::cantor_ramified()}) {
    for (int i = 0; i < 100; ++i) {
      auto f    = check::random_function(rng, T, static_cast<check::Mode>(rng.uniform(0, 2)));
      json j    = io::function_to_json(f, "t");
      auto back = io::function_from_json(json::parse(j.dump()), T);
      REQUIRE(back == f);

      auto E  = check::random_exponents(rng, T, static_cast<std::size_t>(rng.uniform(0, 3)));
      auto I  = from_exponents(E);
      auto I2 = io::ideal_from_json(json::parse(io::ideal_to_json(I, "t").dump()), T);
      REQUIRE(I2 == I);
      REQUIRE(I2.provenance() == I.provenance());
    }
  }
}

TEST_CASE("ideal payloads are checked", "[io]") {
  auto P = fixtures::puiseux();
  // provenance that does not induce the function
  auto bad = json::parse(R"({"level": 0, "cells": [{"node": [], "value": [1, 1, 0]}],
                             "exponents": {"level": 0, "exponents": [{"node": [], "value": 2}]}})");
  CHECK(kind_of([&] { (void)io::ideal_from_json(bad, P); }) == ErrorKind::invalid_input);
  auto dup = json::parse(R"({"level": 0, "cells": [{"node": [], "value": [1, 1, 0]},
                                                   {"node": [], "value": [2, 1, 0]}]})");
  CHECK(kind_of([&] { (void)io::function_from_json(dup, P); }) == ErrorKind::invalid_input);
  auto grid = json::parse(R"({"exponents": {"level": 0, "exponents": [{"node": [], "value": [1, 2]}]}})");
  CHECK(kind_of([&] { (void)io::ideal_from_json(grid, P); }) == ErrorKind::invalid_input);
}

TEST_CASE("automorphisms round-trip", "[io][property]") {
  check::Rng rng(20261014, 52);
  auto       C = fixtures::cantor_ramified();
  for (int i = 0; i < 100; ++i) {
    auto s    = check::random_automorphism(rng, C);
    auto back = io::automorphism_from_json(json::parse(io::automorphism_to_json(s, "t").dump()), C);
    for (auto const& n : level_nodes(*C, 4)) {
      REQUIRE(back.apply(n) == s.apply(n));
    }
  }
  auto bad = json::parse(R"({"fibers": [{"levels": [[{"node": [0], "perm": [1, 0]}]]}]})");
  CHECK(kind_of([&] { (void)io::automorphism_from_json(bad, C); }) == ErrorKind::invalid_input);
}

TEST_CASE("workspace keeps a single tower", "[io]") {
  io::Workspace ws;
  auto          I = ws.ideal(samples + "/puiseux_P.json");
  auto          Z = ws.ideal(samples + "/zero.json");
  CHECK(I.fn().tower_ptr() == Z.fn().tower_ptr());
  CHECK(kind_of([&] { (void)ws.ideal(samples + "/cantor_point.json"); }) == ErrorKind::tower_mismatch);

  io::Workspace ws2;
  auto          m = ws2.function(samples + "/mixed_ideal.json");
  CHECK(m.tower().name() == "mixed");
  CHECK(validate(m).classification == Classification::usc_b);
  CHECK(kind_of([&] { (void)ws2.function(samples + "/missing.json"); }) == ErrorKind::invalid_input);
}
