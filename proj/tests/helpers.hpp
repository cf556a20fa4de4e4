#pragma once

#include <memory>

#include "fracideal/fracideal.hpp"

namespace fixtures {

  using namespace fracideal;

  inline TowerPtr puiseux() { return std::make_shared<Tower const>(builtin::puiseux()); }
  inline TowerPtr cantor() { return std::make_shared<Tower const>(builtin::cantor()); }
  inline TowerPtr cantor_ramified() {
    return std::make_shared<Tower const>(builtin::cantor_ramified());
  }
  inline TowerPtr zp_like() { return std::make_shared<Tower const>(builtin::zp_like(2)); }

  inline Rational q(long long a, long long b = 1) { return make_rational(Integer(a), Integer(b)); }
  inline RTilde   rt(long long a, long long b, int flag) { return RTilde(q(a, b), flag == 1); }
  inline NodeId   node(std::string base, Labels labels = {}) {
    return NodeId{std::move(base), std::move(labels)};
  }

  //! Constant cell on a whole single-fiber tower.
  inline UscFunction constant(TowerPtr const& t, RTilde v) {
    return UscFunction(t, 0, {{node(t->fibers().front().label()), v}}, {});
  }

}  // namespace fixtures
