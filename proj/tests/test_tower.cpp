#include <catch_amalgamated.hpp>

#include "fracideal/check/generators.hpp"
#include "helpers.hpp"

using namespace fracideal;
using fixtures::node;
using fixtures::q;

TEST_CASE("built-in trees branch as declared", "[tower]") {
  auto P = builtin::puiseux();
  auto root = fiber_node(P, node("P"));
  auto kids = children(P, root);
  REQUIRE(kids.size() == 1);
  CHECK(kids[0].e == 2);

  auto C = builtin::cantor();
  auto ck = children(C, fiber_node(C, node("c", {0, 1})));
  REQUIRE(ck.size() == 2);
  CHECK(ck[0].e == 1);
  CHECK(ck[1].e == 1);

  auto Z = builtin::zp_like(2);
  for (std::size_t n = 0; n < 6; ++n) {
    auto v  = fiber_node(Z, node("2", Labels(n, 0)));
    auto zk = children(Z, v);
    REQUIRE(zk.size() == 1);
    CHECK(zk[0].e == ipow(Integer(2), n + 1));
  }
}

TEST_CASE("puiseux ramification is (n+1)!", "[tower]") {
  auto P = builtin::puiseux();
  for (std::size_t n = 0; n < 8; ++n) {
    CHECK(ramification(P, node("P", Labels(n, 0))) == factorial(n + 1));
  }
}

TEST_CASE("resolve follows the path to the requested depth", "[tower]") {
  auto P = builtin::puiseux();
  auto r = resolve(P, PrimePath("P", {}), 3);
  CHECK(r.id == node("P", {0, 0, 0}));
  CHECK(r.e == 24);

  auto C = builtin::cantor();
  CHECK(resolve(C, PrimePath("c", {1}), 2).id == node("c", {1, 0}));

  auto Z = builtin::zp_like(2);
  CHECK(resolve(Z, PrimePath("3", {}, {0}), 4).id == node("3", {0, 0, 0, 0}));
  CHECK(resolve(C, PrimePath("c", {}, {1, 0}), 3).id == node("c", {1, 0, 1}));
}

TEST_CASE("resolve rejects paths that leave the tree", "[tower]") {
  auto Z = builtin::zp_like(2);
  // the ramified prime never splits
  CHECK_THROWS_AS(resolve(Z, PrimePath("2", {1}), 2), Error);
  // "3" splits 1 then 2 ways: label 1 is impossible at depth 0
  CHECK_THROWS_AS(resolve(Z, PrimePath("3", {1}), 2), Error);
  CHECK_NOTHROW(resolve(Z, PrimePath("3", {0, 1}), 3));
  // after the schedule ends only label 0 continues
  CHECK_THROWS_AS(resolve(Z, PrimePath("3", {0, 1}, {1}), 3), Error);
  CHECK_THROWS_AS(check_path(builtin::cantor(), PrimePath("c", {2})), Error);
}

TEST_CASE("paths are normalized to a unique representation", "[tower]") {
  PrimePath a("c", {1, 0, 1}, {0, 1});
  PrimePath b("c", {}, {1, 0, 1, 0});
  CHECK(a == b);
  CHECK(a.prefix().empty());
  CHECK(a.cycle() == Labels{1, 0});
  CHECK(PrimePath("c", {0, 0, 0}) == PrimePath("c", {}));
  CHECK(PrimePath("c", {1, 0}) != PrimePath("c", {1}, {1}));
  CHECK_THROWS_AS(PrimePath("c", {}, {}), Error);
}

TEST_CASE("value groups of the built-in towers", "[tower]") {
  auto P = value_group(builtin::puiseux(), PrimePath("P", {}));
  CHECK(P.group.kind() == GroupShape::Kind::rationals);
  CHECK_FALSE(P.discrete());

  auto C = value_group(builtin::cantor(), PrimePath("c", {1}, {0, 1}));
  CHECK(C.discrete());
  CHECK(C.group == GroupShape::discrete(1));

  auto Z = value_group(builtin::zp_like(2), PrimePath("2", {}));
  CHECK(Z.group == GroupShape::localized(1, 2));
  CHECK(Z.contains(q(3, 8)));
  CHECK_FALSE(Z.contains(q(1, 3)));

  auto Zs = value_group(builtin::zp_like(2), PrimePath("5", {1}));
  CHECK(Zs.group == GroupShape::discrete(1));

  auto R = value_group(builtin::cantor_ramified(), PrimePath("c", {0, 1}));
  CHECK(R.group == GroupShape::localized(1, 2));
}

TEST_CASE("coset representatives", "[tower]") {
  auto Z2 = GroupShape::localized(1, 2);
  CHECK(Z2.coset_representative(q(11, 24)) == q(1, 3));
  CHECK(Z2.coset_representative(q(3, 8)) == 0);
  CHECK(Z2.contains(q(11, 24) - q(1, 3)));
  auto D = GroupShape::discrete(3);
  CHECK(D.coset_representative(q(5, 6)) == q(1, 6));
  CHECK(GroupShape::rationals().coset_representative(q(7, 9)) == 0);
}

TEST_CASE("finite character from metadata", "[tower]") {
  CHECK(is_finite_character(builtin::puiseux()) == std::optional<bool>(true));
  CHECK(is_finite_character(builtin::cantor()) == std::optional<bool>(false));
  CHECK(is_finite_character(builtin::zp_like(2)) == std::optional<bool>(true));
  CHECK(fiber_is_finite(builtin::zp_like(2), "7") == std::optional<bool>(true));

  ExplicitTree t{1, {ExplicitTree{2, {}}, ExplicitTree{1, {}}}};
  Tower        opaque("x", {Fiber::explicit_tree("b", t, Metadata{})});
  CHECK_FALSE(is_finite_character(opaque).has_value());
  // the listed part is still answered, beyond it is not
  CHECK(arity(opaque, node("b")) == 2);
  CHECK(ramification(opaque, node("b", {0})) == 2);
  CHECK_THROWS_AS(arity(opaque, node("b", {0})), Error);
  try {
    (void)arity(opaque, node("b", {0}));
  } catch (Error const& e) {
    CHECK(e.kind() == ErrorKind::undetermined);
  }
  CHECK_FALSE(point_count(opaque, node("b")).known());
}

TEST_CASE("explicit trees continue as their metadata declares", "[tower]") {
  ExplicitTree t{1, {ExplicitTree{2, {}}, ExplicitTree{1, {}}}};
  Tower chains("x", {Fiber::explicit_tree("b", t, Metadata::finite_fiber(2))});
  CHECK(arity(chains, node("b", {0, 0, 0})) == 1);
  CHECK(ramification(chains, node("b", {0, 0, 0})) == 2);
  CHECK(point_count(chains, node("b")).n == 2);

  Tower split("y", {Fiber::explicit_tree("b", t, Metadata::complete_splitting(3))});
  CHECK(arity(split, node("b", {1})) == 3);
  CHECK(point_count(split, node("b")).kind == PointCount::Kind::infinite);
  CHECK(is_finite_character(split) == std::optional<bool>(false));

  Tower ram("z", {Fiber::explicit_tree("b", t, Metadata::chain_totally_ramified(3))});
  CHECK(ramification(ram, node("b", {0, 0})) == 6);
  CHECK(ramification(ram, node("b", {1, 0, 0})) == 9);
}

TEST_CASE("malformed trees are rejected at load", "[tower]") {
  auto make = [](ExplicitTree t) {
    return Fiber::explicit_tree("b", std::move(t), Metadata::finite_fiber(4));
  };
  auto kind_of = [&](ExplicitTree t) {
    try {
      (void)make(std::move(t));
    } catch (Error const& e) {
      return e.kind();
    }
    return ErrorKind::invariant_failure;
  };
  // root must be unramified
  CHECK(kind_of(ExplicitTree{2, {}}) == ErrorKind::malformed_tower);
  // e(parent) must divide e(child)
  CHECK(kind_of(ExplicitTree{1, {ExplicitTree{2, {ExplicitTree{3, {}}}}}})
        == ErrorKind::malformed_tower);
  // leaves must share one depth
  CHECK(kind_of(ExplicitTree{1, {ExplicitTree{1, {ExplicitTree{1, {}}}}, ExplicitTree{1, {}}}})
        == ErrorKind::malformed_tower);
  CHECK_THROWS_AS(Fiber::cantor("c", 1), Error);
  CHECK_THROWS_AS(Fiber::zp_like("3", 2, false, {2, 0}), Error);
  CHECK_THROWS_AS(Tower("t", {Fiber::cantor("c"), Fiber::cantor("c")}), Error);
  CHECK_THROWS_AS(Tower("t", {}), Error);
}

TEST_CASE("isolation of boundary points", "[tower]") {
  auto Z = builtin::zp_like(2);
  CHECK(isolation_depth(Z, PrimePath("2", {})) == std::optional<std::size_t>(0));
  CHECK(isolation_depth(Z, PrimePath("7", {1, 0, 1})) == std::optional<std::size_t>(3));
  CHECK(isolation_depth(Z, PrimePath("5", {1})) == std::optional<std::size_t>(1));
  CHECK_FALSE(isolation_depth(builtin::cantor(), PrimePath("c", {})).has_value());
  CHECK(point_count(Z, node("7")).n == 4);
  CHECK(point_count(Z, node("3")).n == 2);
}

TEST_CASE("structural properties on random nodes", "[tower][property]") {
  check::Rng rng(20261014, 1);
  std::vector<Tower> towers{builtin::puiseux(), builtin::cantor(),
                            builtin::cantor_ramified(), builtin::zp_like(2),
                            builtin::zp_like(3)};
  for (auto const& T : towers) {
    for (int i = 0; i < 200; ++i) {
      auto depth = static_cast<std::size_t>(rng.uniform(0, 5));
      NodeId v   = check::random_node(rng, T, depth);
      // compactness proxy: finitely many, at least one, child
      auto kids = children(T, fiber_node(T, v));
      REQUIRE_FALSE(kids.empty());
      for (auto const& c : kids) {
        // going-up: e is monotone by divisibility
        REQUIRE(c.e % ramification(T, v) == 0);
      }
      // the level partitions: descendants of distinct siblings are disjoint
      // and together give all descendants of the parent
      std::size_t total = descendants(T, v, depth + 2).size();
      std::size_t sum   = 0;
      for (auto const& c : kids) {
        sum += descendants(T, c.id, depth + 2).size();
      }
      REQUIRE(sum == total);
    }
  }
}

TEST_CASE("infinite fibers have no isolated points", "[tower][property]") {
  check::Rng rng(20261014, 2);
  for (auto const& T : {builtin::cantor(), builtin::cantor_ramified()}) {
    for (int i = 0; i < 100; ++i) {
      NodeId    v = check::random_node(rng, T, static_cast<std::size_t>(rng.uniform(0, 4)));
      PrimePath P = check::random_path(rng, T, v);
      CHECK_FALSE(isolation_depth(T, P).has_value());
      CHECK(point_count(T, v).kind == PointCount::Kind::infinite);
    }
  }
  // finite fibers: every point is isolated at some depth
  auto Z = builtin::zp_like(2);
  for (int i = 0; i < 100; ++i) {
    NodeId    v = check::random_node(rng, Z, static_cast<std::size_t>(rng.uniform(0, 4)));
    PrimePath P = check::random_path(rng, Z, v);
    CHECK(isolation_depth(Z, P).has_value());
  }
}
