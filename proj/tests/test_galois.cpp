#include <catch_amalgamated.hpp>

#include "fracideal/check/generators.hpp"
#include "fracideal/check/oracles.hpp"
#include "helpers.hpp"

using namespace fracideal;
using fixtures::node;
using fixtures::q;
using fixtures::rt;

namespace {

  TowerAutomorphism swap_root(TowerPtr const& C) {
    Portrait p;
    p.nodes[{}] = {1, 0};
    return TowerAutomorphism(C, {{"c", p}});
  }

  TowerAutomorphism swap_level(TowerPtr const& C, std::size_t level) {
    Portrait p;
    p.levels[level] = {1, 0};
    return TowerAutomorphism(C, {{"c", p}});
  }

  ErrorKind kind_of(auto&& fn) {
    try {
      fn();
    } catch (Error const& e) {
      return e.kind();
    }
    return ErrorKind::invariant_failure;
  }

}  // namespace

TEST_CASE("act_on_function: reference examples", "[galois]") {
  auto C = fixtures::cantor();
  UscFunction f(C, 1, {{node("c", {0}), rt(1, 1, 0)}, {node("c", {1}), rt(2, 1, 0)}}, {});
  CHECK(act_on_function(TowerAutomorphism::identity(C), f) == canonicalize(f));

  auto g = act_on_function(swap_root(C), f);
  CHECK(g.cells() == UscFunction::Cells{{node("c", {0}), rt(2, 1, 0)}, {node("c", {1}), rt(1, 1, 0)}});

  UscFunction p(C, 0, {}, {{PrimePath("c", {0}), rt(1, 1, 0)}});
  auto        moved = act_on_function(swap_root(C), p);
  CHECK(moved.exceptional() == UscFunction::Points{{PrimePath("c", {1}), rt(1, 1, 0)}});
}

TEST_CASE("deep rules move periodic continuations", "[galois]") {
  auto C = fixtures::cantor();
  // swapping at every node of level 2 moves [0]+(0)* to [0,0,1]+(0)*
  auto        s = swap_level(C, 2);
  PrimePath   P("c", {});
  CHECK(s.apply(P) == PrimePath("c", {0, 0, 1}));
  CHECK(s.apply(PrimePath("c", {}, {0, 1})) == PrimePath("c", {0, 1, 1}, {1, 0}));
  CHECK(check::preimage(s, s.apply(P)) == P);
}

TEST_CASE("act_on_ideal and equivariance: reference examples", "[galois]") {
  auto C = fixtures::cantor();
  auto I = from_exponents(LevelExponentIdeal(C, 1, {{node("c", {0}), q(1)}}));
  CHECK(act_on_ideal(TowerAutomorphism::identity(C), I) == I);
  auto J = act_on_ideal(swap_root(C), I);
  REQUIRE(J.provenance());
  CHECK(J.provenance()->exponents() == LevelExponentIdeal::Map{{node("c", {1}), q(1)}});
  CHECK(check_equivariance(swap_root(C), I));
}

TEST_CASE("composition is the action law", "[galois]") {
  auto C = fixtures::cantor();
  auto s = swap_root(C);
  auto t = swap_level(C, 1);
  UscFunction f(C, 2, {{node("c", {0, 1}), rt(1, 1, 0)}, {node("c", {1, 1}), rt(3, 1, 0)}},
                {{PrimePath("c", {0, 0}, {1}), rt(2, 1, 0)}});
  CHECK(act_on_function(compose(s, t), f) == act_on_function(s, act_on_function(t, f)));
  CHECK(act_on_function(compose(s, inverse(s)), f) == canonicalize(f));
  CHECK(act_on_function(compose(inverse(t), t), f) == canonicalize(f));
}

TEST_CASE("orbit: reference examples", "[galois]") {
  auto C = fixtures::cantor();
  auto s = swap_root(C);
  CHECK(orbit(fixtures::constant(C, rt(1, 1, 0)), {s}, 8).size() == 1);

  UscFunction f(C, 1, {{node("c", {0}), rt(1, 1, 0)}}, {});
  CHECK(orbit(f, {s}, 8).size() == 2);

  // two commuting involutions acting on a level-2 function with trivial
  // stabilizer: the orbit is the whole group of order 4
  auto        a = swap_level(C, 0);
  auto        b = swap_level(C, 1);
  UscFunction g(C, 2, {{node("c", {0, 0}), rt(1, 1, 0)}}, {});
  auto        o = orbit(g, {a, b}, 16);
  CHECK(o.size() == 4);
  CHECK(4 % o.size() == 0);
  CHECK(act_on_function(compose(a, b), g) == act_on_function(compose(b, a), g));

  CHECK(kind_of([&] { (void)orbit(g, {a, b}, 3); }) == ErrorKind::bound_exceeded);
  CHECK(kind_of([&] { (void)orbit(g, {a}, 0); }) == ErrorKind::invalid_input);
}

TEST_CASE("automorphisms must preserve the tree", "[galois]") {
  // siblings with different e cannot be swapped
  ExplicitTree t{1, {ExplicitTree{2, {}}, ExplicitTree{1, {}}}};
  auto X = std::make_shared<Tower const>(
      Tower("x", {Fiber::explicit_tree("b", t, Metadata::finite_fiber(2))}));
  Portrait p;
  p.nodes[{}] = {1, 0};
  CHECK(kind_of([&] { (void)TowerAutomorphism(X, {{"b", p}}); }) == ErrorKind::invalid_input);

  auto     C = fixtures::cantor();
  Portrait bad;
  bad.nodes[{}] = {0, 0};
  CHECK(kind_of([&] { (void)TowerAutomorphism(C, {{"c", bad}}); }) == ErrorKind::invalid_input);
  Portrait wrong_size;
  wrong_size.nodes[{}] = {2, 0, 1};
  CHECK(kind_of([&] { (void)TowerAutomorphism(C, {{"c", wrong_size}}); }) == ErrorKind::invalid_input);
  Portrait no_node;
  no_node.nodes[{3}] = {1, 0};
  CHECK(kind_of([&] { (void)TowerAutomorphism(C, {{"c", no_node}}); }) == ErrorKind::invalid_input);
  CHECK(kind_of([&] { (void)TowerAutomorphism(C, {{"d", p}}); }) == ErrorKind::invalid_input);
}

TEST_CASE("action properties on random automorphisms", "[galois][property]") {
  check::Rng rng(20261014, 41);
  for (auto const& T : {fixtures::cantor(), fixtures::cantor_ramified()}) {
    for (int i = 0; i < 150; ++i) {
      auto s = check::random_automorphism(rng, T);
      auto t = check::random_automorphism(rng, T);
      auto f = check::random_function(rng, T, static_cast<check::Mode>(rng.uniform(0, 2)));
      auto g = check::random_function(rng, T, static_cast<check::Mode>(rng.uniform(0, 2)));
      if (!validate(f).valid() || !validate(g).valid()) {
        continue;
      }
      auto sf = act_on_function(s, f);
      REQUIRE(act_on_function(s, add(f, g)) == add(sf, act_on_function(s, g)));
      REQUIRE(validate(sf).classification == validate(f).classification);
      REQUIRE(act_on_function(compose(s, t), f) == act_on_function(s, act_on_function(t, f)));
      REQUIRE(act_on_function(inverse(s), sf) == canonicalize(f));
      // pointwise: (σf)(σP) = f(P)
      for (auto const& P : check::probe_points({&f}, f.level())) {
        REQUIRE(evaluate(sf, s.apply(P)) == evaluate(f, P));
        REQUIRE(check::preimage(s, s.apply(P)) == P);
      }
      FractionalIdeal I(f), J(g);
      if (class_eq(I, J) == ClassEq::equivalent) {
        REQUIRE(class_eq(act_on_ideal(s, I), act_on_ideal(s, J)) == ClassEq::equivalent);
      }
      auto E = check::random_exponents(rng, T, static_cast<std::size_t>(rng.uniform(0, 3)));
      REQUIRE(check_equivariance(s, from_exponents(E)));
      REQUIRE(check_equivariance(s, I));
    }
  }
}
