#include <catch_amalgamated.hpp>

#include <vector>

#include "helpers.hpp"

using namespace fracideal;
using fixtures::q;
using fixtures::rt;

TEST_CASE("compare orders by magnitude, then flag", "[rtilde]") {
  CHECK(compare(rt(1, 1, 0), rt(1, 1, 1)) == Ordering::lt);
  CHECK(compare(rt(0, 1, 0), rt(0, 1, 0)) == Ordering::eq);
  CHECK(compare(rt(3, 2, 1), rt(2, 1, 0)) == Ordering::lt);
  CHECK(compare(rt(2, 1, 0), rt(3, 2, 1)) == Ordering::gt);
  CHECK(compare(rt(-1, 3, 1), rt(-1, 3, 0)) == Ordering::gt);
}

TEST_CASE("addition takes the larger flag", "[rtilde]") {
  CHECK(add(rt(1, 1, 0), rt(1, 2, 1)) == rt(3, 2, 1));
  CHECK(add(rt(2, 3, 1), rt(-2, 3, 1)) == rt(0, 1, 1));
  CHECK(add(rt(1, 6, 0), rt(1, 3, 0)) == rt(1, 2, 0));
}

TEST_CASE("involution negates the magnitude only", "[rtilde]") {
  CHECK(involute(rt(5, 7, 1)) == rt(-5, 7, 1));
  CHECK(involute(rt(0, 1, 0)) == rt(0, 1, 0));
  CHECK(add(involute(rt(3, 1, 0)), rt(3, 1, 0)) == RTilde::zero());
  // flag 1 elements have no inverse: a + ι(a) keeps the flag
  CHECK(add(involute(rt(3, 1, 1)), rt(3, 1, 1)) == rt(0, 1, 1));
}

TEST_CASE("magnitudes are stored reduced", "[rtilde]") {
  RTilde a(q(6, 8), true);
  CHECK(num(a.magnitude()) == 3);
  CHECK(den(a.magnitude()) == 4);
  CHECK(a == rt(3, 4, 1));
  CHECK(a.str() == "(3/4,1)");
  CHECK(RTilde(q(-4, -2), false).str() == "(2,0)");
}

TEST_CASE("an inverse exists exactly for flag 0", "[rtilde]") {
  // exhaustive over a small grid: x + y = 0 has a solution y iff flag(x) = 0
  std::vector<RTilde> grid;
  for (int n = -4; n <= 4; ++n) {
    for (int d : {1, 2, 3}) {
      grid.emplace_back(q(n, d), false);
      grid.emplace_back(q(n, d), true);
    }
  }
  for (auto const& x : grid) {
    bool found = false;
    for (auto const& y : grid) {
      found = found || (x + y).is_zero();
    }
    CHECK(found == x.is_unit());
  }
}

TEST_CASE("ordered monoid laws hold exhaustively on a grid", "[rtilde][property]") {
  std::vector<RTilde> grid;
  for (int n = -3; n <= 3; ++n) {
    for (int d : {1, 2, 3, 4}) {
      if (n % d == 0 && d != 1) {
        continue;
      }
      grid.emplace_back(q(n, d), false);
      grid.emplace_back(q(n, d), true);
    }
  }
  std::size_t checked = 0;
  for (auto const& a : grid) {
    CHECK(a + RTilde::zero() == a);
    CHECK(involute(involute(a)) == a);
    for (auto const& b : grid) {
      CHECK(a + b == b + a);
      CHECK(involute(a + b) == involute(a) + involute(b));
      for (auto const& c : grid) {
        REQUIRE((a + b) + c == a + (b + c));
        if (a <= b) {
          REQUIRE(a + c <= b + c);
        }
        ++checked;
      }
    }
  }
  CHECK(checked == grid.size() * grid.size() * grid.size());
}

TEST_CASE("the order is total and antisymmetric", "[rtilde][property]") {
  std::vector<RTilde> grid;
  for (int n = -2; n <= 2; ++n) {
    grid.emplace_back(q(n, 2), false);
    grid.emplace_back(q(n, 2), true);
  }
  for (auto const& a : grid) {
    for (auto const& b : grid) {
      bool lt = a < b, gt = b < a, eq = a == b;
      CHECK(int(lt) + int(gt) + int(eq) == 1);
    }
  }
}
