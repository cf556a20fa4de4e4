#pragma once

// Fractional ideals of the integral closure, each stored as its function
// f~_I. Elements only appear as valuation vectors queried against an ideal.
// Principal ideals are not modeled, so nothing here sees the Picard group.

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "error.hpp"
#include "rational.hpp"
#include "tower.hpp"
#include "uscfn.hpp"

namespace fracideal {

  //! Prime factorization of an ideal of o_{M_n}: exponent per level-n prime,
  //! each in (1/e)Z. Zero exponents are not stored.
  class LevelExponentIdeal {
   public:
    using Map = std::map<NodeId, Rational>;

    LevelExponentIdeal(TowerPtr tower, std::size_t level, Map exponents)
        : _tower(std::move(tower)), _level(level) {
      for (auto& [node, a] : exponents) {
        if (node.level() != level) {
          throw Error(ErrorKind::invalid_input,
                      "exponent node " + node.str() + " is not at level "
                          + std::to_string(level));
        }
        Integer e = ramification(*_tower, node);
        if (!in_grid(a, e)) {
          throw Error(ErrorKind::invalid_input,
                      "exponent " + to_string(a) + " at " + node.str()
                          + " is not in (1/" + e.str() + ")Z");
        }
        if (a != 0) {
          _exponents.emplace(node, a);
        }
      }
    }

    [[nodiscard]] TowerPtr const& tower_ptr() const noexcept { return _tower; }
    [[nodiscard]] std::size_t level() const noexcept { return _level; }
    [[nodiscard]] Map const& exponents() const noexcept { return _exponents; }

    [[nodiscard]] Rational at(NodeId const& node) const {
      auto it = _exponents.find(node);
      return it == _exponents.end() ? Rational(0) : it->second;
    }

    friend bool operator==(LevelExponentIdeal const& a,
                           LevelExponentIdeal const& b) {
      return a._level == b._level && a._exponents == b._exponents;
    }

    [[nodiscard]] std::string str() const {
      std::string out = "level " + std::to_string(_level) + " {";
      bool        first = true;
      for (auto const& [n, a] : _exponents) {
        out += (first ? "" : ", ") + n.str() + ":" + to_string(a);
        first = false;
      }
      return out + "}";
    }

   private:
    TowerPtr    _tower;
    std::size_t _level;
    Map         _exponents;
  };

  //! The same ideal factored at a finer level: each prime's exponent passes
  //! to every prime above it.
  inline LevelExponentIdeal transport(LevelExponentIdeal const& E,
                                      std::size_t               level) {
    if (level < E.level()) {
      throw Error(ErrorKind::invalid_input, "cannot transport to a lower level");
    }
    LevelExponentIdeal::Map out;
    for (auto const& [node, a] : E.exponents()) {
      for (auto& d : descendants(*E.tower_ptr(), node, level)) {
        out.emplace(std::move(d), a);
      }
    }
    return LevelExponentIdeal(E.tower_ptr(), level, std::move(out));
  }

  //! Valuation vector of an element of M_n^x: v_P(x) per level-n prime,
  //! zero where unlisted.
  class ElementVector {
   public:
    using Map = std::map<NodeId, Rational>;

    ElementVector(TowerPtr tower, std::size_t level, Map values)
        : _tower(std::move(tower)), _level(level) {
      for (auto& [node, a] : values) {
        if (node.level() != level) {
          throw Error(ErrorKind::invalid_input,
                      "element node " + node.str() + " is not at level "
                          + std::to_string(level));
        }
        Integer e = ramification(*_tower, node);
        if (!in_grid(a, e)) {
          throw Error(ErrorKind::invalid_input,
                      "valuation " + to_string(a) + " at " + node.str()
                          + " is not in (1/" + e.str() + ")Z");
        }
        if (a != 0) {
          _values.emplace(node, a);
        }
      }
    }

    [[nodiscard]] TowerPtr const& tower_ptr() const noexcept { return _tower; }
    [[nodiscard]] std::size_t level() const noexcept { return _level; }
    [[nodiscard]] Map const& values() const noexcept { return _values; }

    //! v at any node of depth >= level().
    [[nodiscard]] Rational at(NodeId const& node) const {
      auto it = _values.find(node.ancestor(_level));
      return it == _values.end() ? Rational(0) : it->second;
    }

   private:
    TowerPtr    _tower;
    std::size_t _level;
    Map         _values;
  };

  enum class IdealClass { invertible, regular_not_invertible, not_regular };

  inline char const* to_string(IdealClass c) {
    switch (c) {
      case IdealClass::invertible: return "INVERTIBLE";
      case IdealClass::regular_not_invertible: return "REGULAR_NOT_INVERTIBLE";
      case IdealClass::not_regular: return "NOT_REGULAR";
    }
    return "?";
  }

  class FractionalIdeal {
   public:
    //! Accepts any function in S^u_{0,b}(V~); stores its canonical form.
    explicit FractionalIdeal(
        UscFunction const&                fn,
        std::optional<LevelExponentIdeal> provenance = std::nullopt)
        : _fn(canonicalize(fn)), _provenance(std::move(provenance)) {
      _validation = validate(_fn);
      if (!_validation.valid()) {
        throw Error(_validation.violation == Violation::undetermined
                        ? ErrorKind::undetermined
                        : ErrorKind::invalid_input,
                    "not the function of a fractional ideal: "
                        + _validation.reason);
      }
    }

    [[nodiscard]] UscFunction const& fn() const noexcept { return _fn; }
    [[nodiscard]] Tower const& tower() const noexcept { return _fn.tower(); }
    [[nodiscard]] std::optional<LevelExponentIdeal> const&
    provenance() const noexcept {
      return _provenance;
    }
    [[nodiscard]] Classification classification() const noexcept {
      return _validation.classification;
    }

    //! Ideals are equal exactly when their functions are.
    friend bool operator==(FractionalIdeal const& a, FractionalIdeal const& b) {
      return a._fn == b._fn;
    }

   private:
    UscFunction                       _fn;
    std::optional<LevelExponentIdeal> _provenance;
    Validation                        _validation;
  };

  inline FractionalIdeal unit_ideal(TowerPtr tower) {
    return FractionalIdeal(UscFunction::zero(std::move(tower)));
  }

  inline FractionalIdeal from_exponents(LevelExponentIdeal const& E) {
    UscFunction::Cells cells;
    for (auto const& [node, a] : E.exponents()) {
      cells.emplace(node, RTilde(a, false));
    }
    return FractionalIdeal(
        UscFunction(E.tower_ptr(), E.level(), std::move(cells), {}), E);
  }

  inline FractionalIdeal multiply(FractionalIdeal const& I,
                                  FractionalIdeal const& J) {
    UscFunction                       fn = add(I.fn(), J.fn());
    std::optional<LevelExponentIdeal> prov;
    if (I.provenance() && J.provenance()) {
      std::size_t level
          = std::max(I.provenance()->level(), J.provenance()->level());
      auto a = transport(*I.provenance(), level);
      auto b = transport(*J.provenance(), level);
      auto sum = a.exponents();
      for (auto const& [node, x] : b.exponents()) {
        sum[node] += x;
      }
      prov = LevelExponentIdeal(I.fn().tower_ptr(), level, std::move(sum));
    }
    return FractionalIdeal(fn, std::move(prov));
  }

  inline IdealClass classify(FractionalIdeal const& I) {
    switch (I.classification()) {
      case Classification::val_ref: return IdealClass::invertible;
      case Classification::usc_ref: return IdealClass::regular_not_invertible;
      default: return IdealClass::not_regular;
    }
  }

  inline FractionalIdeal inverse(FractionalIdeal const& I) {
    if (classify(I) != IdealClass::invertible) {
      throw Error(ErrorKind::not_invertible,
                  std::string("ideal is ") + to_string(classify(I)));
    }
    std::optional<LevelExponentIdeal> prov;
    if (I.provenance()) {
      auto neg = I.provenance()->exponents();
      for (auto& [node, a] : neg) {
        a = -a;
      }
      prov = LevelExponentIdeal(I.fn().tower_ptr(), I.provenance()->level(),
                                std::move(neg));
    }
    return FractionalIdeal(involute(I.fn()), std::move(prov));
  }

  //! J with I·J·I = I, namely the ideal of ι∘f~_I.
  inline FractionalIdeal regular_witness(FractionalIdeal const& I) {
    if (classify(I) == IdealClass::not_regular) {
      throw Error(ErrorKind::not_regular,
                  "ideal is not regular: its function is not reflexible");
    }
    FractionalIdeal J(involute(I.fn()));
    if (!(multiply(multiply(I, J), I) == I)) {
      throw Error(ErrorKind::invariant_failure,
                  "witness check failed: I*J*I differs from I");
    }
    return J;
  }

  inline bool is_idempotent(FractionalIdeal const& I) {
    for (auto const& [node, v] : I.fn().cells()) {
      if (v.magnitude() != 0) {
        return false;
      }
    }
    for (auto const& [path, v] : I.fn().exceptional()) {
      if (v.magnitude() != 0) {
        return false;
      }
    }
    return true;
  }

  //! v >=' (beta, t): v >= beta for t = 0, v > beta for t = 1.
  inline bool dominates(Rational const& v, RTilde const& bound) {
    return bound.flag() ? v > bound.magnitude() : v >= bound.magnitude();
  }

  inline bool contains(FractionalIdeal const& I, ElementVector const& x) {
    if (x.tower_ptr() != I.fn().tower_ptr()) {
      throw Error(ErrorKind::tower_mismatch, "element lives on another tower");
    }
    std::size_t level = std::max(I.fn().level(), x.level());
    UscFunction f     = refine(I.fn(), level);
    for (auto const& [node, v] : f.cells()) {
      if (!dominates(x.at(node), v)) {
        return false;
      }
    }
    // cells without a listed value are (0,0)
    for (auto const& [node, a] : x.values()) {
      if (a < 0) {
        for (auto const& d : descendants(f.tower(), node, level)) {
          if (f.cells().count(d) == 0) {
            return false;
          }
        }
      }
    }
    for (auto const& [path, v] : f.exceptional()) {
      if (!dominates(x.at(path.node_at(level)), v)) {
        return false;
      }
    }
    return true;
  }

  namespace detail {

    inline Integer count_descendants(Tower const&  tower,
                                     NodeId const& node,
                                     std::size_t   depth) {
      if (node.level() == depth) {
        return 1;
      }
      Integer total = 0;
      for (std::size_t i = 0; i < arity(tower, node); ++i) {
        total += count_descendants(tower, node.child(static_cast<Label>(i)),
                                   depth);
      }
      return total;
    }

  }  // namespace detail

  //! I ∩ M_n as exponents at level n. With `literal`, a flag-1 value anywhere
  //! below a node makes the threshold strict for every value there; by
  //! default strictness is decided value by value.
  inline LevelExponentIdeal intersect_level(FractionalIdeal const& I,
                                            std::size_t            n,
                                            bool literal = false) {
    Tower const& tower = I.tower();
    std::size_t  level = std::max(n, I.fn().level());
    UscFunction  f     = refine(I.fn(), level);

    std::map<NodeId, std::vector<RTilde>> below;
    std::map<NodeId, std::size_t>         listed;
    for (auto const& [node, v] : f.cells()) {
      NodeId a = node.ancestor(n);
      below[a].push_back(v);
      ++listed[a];
    }
    for (auto const& [path, v] : f.exceptional()) {
      below[path.node_at(n)].push_back(v);
    }
    LevelExponentIdeal::Map out;
    for (auto& [node, values] : below) {
      if (Integer(listed[node]) < detail::count_descendants(tower, node, level)) {
        values.push_back(RTilde::zero());
      }
      Integer e          = ramification(tower, node);
      bool    any_strict = false;
      for (auto const& v : values) {
        any_strict = any_strict || v.flag();
      }
      std::optional<Rational> alpha;
      for (auto const& v : values) {
        bool     strict = literal ? any_strict : v.flag();
        Rational a      = ceil_to_grid(v.magnitude(), e, strict);
        if (!alpha || a > *alpha) {
          alpha = a;
        }
      }
      out.emplace(node, *alpha);
    }
    return LevelExponentIdeal(I.fn().tower_ptr(), n, std::move(out));
  }

}  // namespace fracideal
