#pragma once

// Finitely presented upper R~-semicontinuous functions on m-Spec.
//
// A function is a finite clopen partition at one level (the listed level-n
// cells; unlisted cells are (0,0)) together with finitely many exceptional
// boundary points carrying their own value. This class is closed under
// addition, and upper semicontinuity reduces to the pointwise condition
// cell value <= exceptional value at each exceptional point, because
// exceptional points are closed and can be separated from one another.
// General semicontinuous functions are not finitely describable and are not
// representable here.

#include <compare>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rtilde.hpp"
#include "tower.hpp"

namespace fracideal {

  using TowerPtr = std::shared_ptr<Tower const>;

  class UscFunction {
   public:
    using Cells  = std::map<NodeId, RTilde>;
    using Points = std::map<PrimePath, RTilde>;

    //! Checks structure only: every cell is a valid node at `level` and every
    //! exceptional path is consistent with the tree.
    UscFunction(TowerPtr tower, std::size_t level, Cells cells, Points points)
        : _tower(std::move(tower)),
          _level(level),
          _cells(std::move(cells)),
          _points(std::move(points)) {
      if (!_tower) {
        throw Error(ErrorKind::invalid_input, "function without a tower");
      }
      for (auto const& [node, v] : _cells) {
        if (node.level() != _level) {
          throw Error(ErrorKind::invalid_input,
                      "cell " + node.str() + " is not at level "
                          + std::to_string(_level));
        }
        check_node(*_tower, node);
      }
      for (auto const& [path, v] : _points) {
        check_path(*_tower, path);
      }
    }

    static UscFunction zero(TowerPtr tower) {
      return UscFunction(std::move(tower), 0, {}, {});
    }

    [[nodiscard]] Tower const& tower() const noexcept { return *_tower; }
    [[nodiscard]] TowerPtr const& tower_ptr() const noexcept { return _tower; }
    [[nodiscard]] std::size_t level() const noexcept { return _level; }
    [[nodiscard]] Cells const& cells() const noexcept { return _cells; }
    [[nodiscard]] Points const& exceptional() const noexcept {
      return _points;
    }

    //! Value of the level-n cell `node` (zero when unlisted).
    [[nodiscard]] RTilde cell_value(NodeId const& node) const {
      auto it = _cells.find(node);
      return it == _cells.end() ? RTilde::zero() : it->second;
    }

    //! Value of the level-n cell the path passes through.
    [[nodiscard]] RTilde cell_value(PrimePath const& path) const {
      return cell_value(path.node_at(_level));
    }

    [[nodiscard]] bool is_zero() const {
      return _cells.empty() && _points.empty();
    }

    //! Structural equality; meaningful on canonical forms.
    friend bool operator==(UscFunction const& a, UscFunction const& b) {
      return a._level == b._level && a._cells == b._cells
             && a._points == b._points;
    }

    friend std::strong_ordering operator<=>(UscFunction const& a,
                                            UscFunction const& b) {
      if (auto c = a._level <=> b._level; c != 0) {
        return c;
      }
      if (auto c = a._cells <=> b._cells; c != 0) {
        return c;
      }
      return a._points <=> b._points;
    }

    [[nodiscard]] std::string str() const {
      std::string out = "level " + std::to_string(_level) + " {";
      bool        first = true;
      for (auto const& [n, v] : _cells) {
        out += (first ? "" : ", ") + n.str() + ":" + v.str();
        first = false;
      }
      out += "}";
      if (!_points.empty()) {
        out += " exceptional {";
        first = true;
        for (auto const& [p, v] : _points) {
          out += (first ? "" : ", ") + p.str() + ":" + v.str();
          first = false;
        }
        out += "}";
      }
      return out;
    }

   private:
    TowerPtr    _tower;
    std::size_t _level;
    Cells       _cells;
    Points      _points;
  };

  inline void require_same_tower(UscFunction const& f, UscFunction const& g) {
    if (f.tower_ptr() != g.tower_ptr()) {
      throw Error(ErrorKind::tower_mismatch,
                  "functions live on different towers ("
                      + f.tower().name() + " vs " + g.tower().name() + ")");
    }
  }

  //! The same function with cells at a finer level.
  inline UscFunction refine(UscFunction const& f, std::size_t level) {
    if (level < f.level()) {
      throw Error(ErrorKind::invalid_input,
                  "cannot refine from level " + std::to_string(f.level())
                      + " down to " + std::to_string(level));
    }
    if (level == f.level()) {
      return f;
    }
    UscFunction::Cells cells;
    for (auto const& [node, v] : f.cells()) {
      for (auto& d : descendants(f.tower(), node, level)) {
        cells.emplace(std::move(d), v);
      }
    }
    return UscFunction(f.tower_ptr(), level, std::move(cells), f.exceptional());
  }

  inline RTilde evaluate(UscFunction const& f, PrimePath const& path) {
    check_path(f.tower(), path);
    auto it = f.exceptional().find(path);
    if (it != f.exceptional().end()) {
      return it->second;
    }
    return f.cell_value(path);
  }

  //! The unique representation of f: isolated exceptional points absorbed
  //! into cells, redundant exceptional points and zero cells dropped, and
  //! sibling cells with equal values merged upward as far as possible.
  inline UscFunction canonicalize(UscFunction const& f) {
    Tower const& tower  = f.tower();
    std::size_t  target = f.level();
    std::vector<PrimePath> isolated;
    for (auto const& [path, v] : f.exceptional()) {
      if (auto d = isolation_depth(tower, path)) {
        isolated.push_back(path);
        target = std::max(target, *d);
      }
    }
    UscFunction        g      = refine(f, target);
    UscFunction::Cells cells  = g.cells();
    UscFunction::Points points = g.exceptional();
    for (auto const& path : isolated) {
      cells[path.node_at(target)] = points.at(path);
      points.erase(path);
    }
    for (auto it = points.begin(); it != points.end();) {
      auto c = cells.find(it->first.node_at(target));
      RTilde cell = c == cells.end() ? RTilde::zero() : c->second;
      it          = it->second == cell ? points.erase(it) : std::next(it);
    }
    std::erase_if(cells, [](auto const& kv) { return kv.second.is_zero(); });

    std::size_t level = target;
    while (level > 0) {
      std::map<NodeId, std::pair<std::size_t, RTilde>> parents;
      bool                                              mergeable = true;
      for (auto const& [node, v] : cells) {
        auto [it, inserted]
            = parents.emplace(node.ancestor(level - 1), std::make_pair(0, v));
        if (!inserted && it->second.second != v) {
          mergeable = false;
          break;
        }
        ++it->second.first;
      }
      if (mergeable) {
        for (auto const& [parent, entry] : parents) {
          if (entry.first != arity(tower, parent)) {
            mergeable = false;
            break;
          }
        }
      }
      if (!mergeable) {
        break;
      }
      UscFunction::Cells merged;
      for (auto const& [parent, entry] : parents) {
        merged.emplace(parent, entry.second);
      }
      cells = std::move(merged);
      --level;
    }
    return UscFunction(f.tower_ptr(), level, std::move(cells), std::move(points));
  }

  //! Pointwise R~-sum.
  inline UscFunction add(UscFunction const& f, UscFunction const& g) {
    require_same_tower(f, g);
    std::size_t        level = std::max(f.level(), g.level());
    UscFunction        rf    = refine(f, level);
    UscFunction        rg    = refine(g, level);
    UscFunction::Cells cells = rf.cells();
    for (auto const& [node, v] : rg.cells()) {
      auto [it, inserted] = cells.emplace(node, v);
      if (!inserted) {
        it->second += v;
      }
    }
    UscFunction::Points points;
    for (auto const* h : {&rf, &rg}) {
      for (auto const& [path, v] : h->exceptional()) {
        if (points.count(path) == 0) {
          points.emplace(path, evaluate(rf, path) + evaluate(rg, path));
        }
      }
    }
    return canonicalize(
        UscFunction(f.tower_ptr(), level, std::move(cells), std::move(points)));
  }

  //! ι∘f. The result need not be semicontinuous.
  inline UscFunction involute(UscFunction const& f) {
    UscFunction::Cells cells;
    for (auto const& [node, v] : f.cells()) {
      cells.emplace(node, v.involute());
    }
    UscFunction::Points points;
    for (auto const& [path, v] : f.exceptional()) {
      points.emplace(path, v.involute());
    }
    return canonicalize(
        UscFunction(f.tower_ptr(), f.level(), std::move(cells), std::move(points)));
  }

  //! n·f for n >= 1.
  inline UscFunction multiple(UscFunction const& f, std::size_t n) {
    UscFunction acc = canonicalize(f);
    for (std::size_t i = 1; i < n; ++i) {
      acc = add(acc, f);
    }
    return acc;
  }

  ////////////////////////////////////////////////////////////////////////
  // Classification
  ////////////////////////////////////////////////////////////////////////

  //! Membership chain S^u_{0,b}(V~) ⊇ S^u_{0,ref}(V~) ⊇ S^u_{0,ref}(val).
  enum class Classification { invalid, usc_b, usc_ref, val_ref };

  inline char const* to_string(Classification c) {
    switch (c) {
      case Classification::invalid: return "INVALID";
      case Classification::usc_b: return "USC_B";
      case Classification::usc_ref: return "USC_REF";
      case Classification::val_ref: return "VAL_REF";
    }
    return "?";
  }

  //! Which invariant a function violates.
  enum class Violation { none, structure, value_group, semicontinuity, undetermined };

  struct Validation {
    Classification classification = Classification::invalid;
    Violation      violation      = Violation::none;
    std::string    reason;

    [[nodiscard]] bool valid() const {
      return classification != Classification::invalid;
    }
  };

  namespace detail {

    inline Validation invalid(Violation v, std::string reason) {
      return Validation{Classification::invalid, v, std::move(reason)};
    }

    inline std::string shapes_str(std::vector<GroupShape> const& shapes) {
      std::string out;
      for (std::size_t i = 0; i < shapes.size(); ++i) {
        out += (i ? ", " : "") + shapes[i].str();
      }
      return out;
    }

  }  // namespace detail

  //! Classifies f; INVALID results name the violated invariant and the
  //! offending node or path.
  inline Validation validate(UscFunction const& f) {
    UscFunction g = f;
    try {
      g = canonicalize(f);
    } catch (Error const& e) {
      return detail::invalid(e.kind() == ErrorKind::undetermined
                                 ? Violation::undetermined
                                 : Violation::structure,
                             e.what());
    }
    Tower const& tower = g.tower();

    for (auto const& [node, v] : g.cells()) {
      auto groups = groups_below(tower, node);
      if (!groups) {
        return detail::invalid(Violation::undetermined,
                               "value group below " + node.str()
                                   + " is undeclared (metadata missing)");
      }
      for (auto const& G : *groups) {
        if (v.flag() && !G.dense()) {
          return detail::invalid(
              Violation::value_group,
              "flag-1 value " + v.str() + " on cell " + node.str()
                  + " where the value group " + G.str() + " is discrete");
        }
        if (!v.flag() && !G.contains(v.magnitude())) {
          return detail::invalid(Violation::value_group,
                                 "value outside val: " + v.str() + " on cell "
                                     + node.str() + " (value groups "
                                     + detail::shapes_str(*groups) + ")");
        }
      }
    }

    bool reflexible = true;
    for (auto const& [path, v] : g.exceptional()) {
      ValueGroupDescriptor G = [&] {
        try {
          return value_group(tower, path);
        } catch (Error const&) {
          return ValueGroupDescriptor{GroupShape::discrete(1), ""};
        }
      }();
      if (v.flag() && !G.group.dense()) {
        return detail::invalid(Violation::value_group,
                               "flag-1 value " + v.str() + " at point "
                                   + path.str() + " where the value group "
                                   + G.group.str() + " is discrete");
      }
      if (!v.flag() && !G.contains(v.magnitude())) {
        return detail::invalid(Violation::value_group,
                               "value outside val: " + v.str() + " at point "
                                   + path.str() + " (value group "
                                   + G.group.str() + ")");
      }
      RTilde cell = g.cell_value(path);
      if (!(cell <= v)) {
        return detail::invalid(Violation::semicontinuity,
                               "not upper semicontinuous at " + path.str()
                                   + ": value " + v.str()
                                   + " lies below the surrounding cell value "
                                   + cell.str());
      }
      if (!(v.flag() && !cell.flag() && v.magnitude() == cell.magnitude())) {
        reflexible = false;
      }
    }

    if (!reflexible) {
      return Validation{Classification::usc_b, Violation::none, {}};
    }
    bool flags_zero = g.exceptional().empty();
    for (auto const& [node, v] : g.cells()) {
      flags_zero = flags_zero && !v.flag();
    }
    return Validation{flags_zero ? Classification::val_ref
                                 : Classification::usc_ref,
                      Violation::none,
                      {}};
  }

}  // namespace fracideal
