#pragma once

// Ideal classes modulo the Picard group. Two ideals are equivalent when their
// functions differ by a locally constant val-valued function, so a class is
// determined by the flag pattern plus the magnitudes modulo the local value
// groups.

#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "ideal.hpp"
#include "tower.hpp"
#include "uscfn.hpp"

namespace fracideal {

  enum class ClassEq { equivalent, not_equivalent, undecided };

  inline char const* to_string(ClassEq c) {
    switch (c) {
      case ClassEq::equivalent: return "EQUIVALENT";
      case ClassEq::not_equivalent: return "NOT_EQUIVALENT";
      case ClassEq::undecided: return "UNDECIDED";
    }
    return "?";
  }

  struct ClassEqResult {
    ClassEq     result = ClassEq::undecided;
    std::string reason;
  };

  inline ClassEqResult class_eq_explained(UscFunction const& f0,
                                          UscFunction const& g0) {
    require_same_tower(f0, g0);
    try {
      UscFunction f     = canonicalize(f0);
      UscFunction g     = canonicalize(g0);
      std::size_t level = std::max(f.level(), g.level());
      f                 = refine(f, level);
      g                 = refine(g, level);
      Tower const& tower = f.tower();

      std::map<NodeId, Rational> diff;
      auto                       cell_keys = f.cells();
      for (auto const& [node, v] : g.cells()) {
        cell_keys.emplace(node, v);
      }
      for (auto const& [node, unused] : cell_keys) {
        RTilde a = f.cell_value(node);
        RTilde b = g.cell_value(node);
        if (a.flag() != b.flag()) {
          return {ClassEq::not_equivalent, "flags differ on cell " + node.str()};
        }
        diff.emplace(node, a.magnitude() - b.magnitude());
      }
      auto points = f.exceptional();
      for (auto const& [path, v] : g.exceptional()) {
        points.emplace(path, v);
      }
      for (auto const& [path, unused] : points) {
        RTilde a = evaluate(f, path);
        RTilde b = evaluate(g, path);
        if (a.flag() != b.flag()) {
          return {ClassEq::not_equivalent, "flags differ at " + path.str()};
        }
        NodeId   node = path.node_at(level);
        auto     it   = diff.find(node);
        Rational d    = it == diff.end() ? Rational(0) : it->second;
        if (a.magnitude() - b.magnitude() != d) {
          return {ClassEq::not_equivalent,
                  "magnitude difference jumps at " + path.str()};
        }
      }
      for (auto const& [node, d] : diff) {
        if (d == 0) {
          continue;
        }
        auto groups = groups_below(tower, node);
        if (!groups) {
          return {ClassEq::undecided,
                  "value groups below " + node.str() + " are undeclared"};
        }
        for (auto const& G : *groups) {
          if (!G.contains(d)) {
            return {ClassEq::not_equivalent,
                    "difference " + to_string(d) + " on " + node.str()
                        + " is not in " + G.str()};
          }
        }
      }
      return {ClassEq::equivalent, {}};
    } catch (Error const& e) {
      if (e.kind() == ErrorKind::undetermined) {
        return {ClassEq::undecided, e.what()};
      }
      throw;
    }
  }

  inline ClassEq class_eq(FractionalIdeal const& I, FractionalIdeal const& J) {
    return class_eq_explained(I.fn(), J.fn()).result;
  }

  struct ClassDescriptor {
    struct Residue {
      std::string where;  // node or path
      GroupShape  group;
      Rational    residue;
    };

    //! Canonical representative of the class; equal representatives mean
    //! equal classes unless the descriptor is comparison-only.
    UscFunction          representative;
    std::vector<Residue> residues;
    bool                 comparison_only = false;
    std::string          note;

    [[nodiscard]] std::vector<std::string> flag_pattern() const {
      std::vector<std::string> out;
      for (auto const& [node, v] : representative.cells()) {
        if (v.flag()) {
          out.push_back(node.str());
        }
      }
      for (auto const& [path, v] : representative.exceptional()) {
        if (v.flag()) {
          out.push_back(path.str());
        }
      }
      return out;
    }

    [[nodiscard]] bool trivial() const { return representative.is_zero(); }

    friend bool operator==(ClassDescriptor const& a, ClassDescriptor const& b) {
      return !a.comparison_only && !b.comparison_only
             && a.representative == b.representative;
    }
  };

  //! Subtracts the val-valued part cell by cell: flag-0 cells become 0 and
  //! flag-1 magnitudes are reduced to their coset representative. Jumps at
  //! exceptional points are class invariants and are kept.
  inline ClassDescriptor class_descriptor(FractionalIdeal const& I) {
    UscFunction const& f0    = I.fn();
    Tower const&       tower = f0.tower();
    std::size_t        level = f0.level();
    for (auto const& [node, v] : f0.cells()) {
      level = std::max(level, tower.fiber(node.base).stable_depth());
    }
    for (auto const& [path, v] : f0.exceptional()) {
      level = std::max(level, tower.fiber(path.base()).stable_depth());
    }
    UscFunction f = refine(f0, level);

    ClassDescriptor     out{UscFunction::zero(f.tower_ptr()), {}, false, {}};
    UscFunction::Cells  cells;
    std::map<NodeId, Rational> shift;  // new magnitude minus old, per cell
    for (auto const& [node, v] : f.cells()) {
      if (!v.flag()) {
        shift.emplace(node, -v.magnitude());
        continue;
      }
      std::optional<std::vector<GroupShape>> groups;
      try {
        groups = groups_below(tower, node);
      } catch (Error const& e) {
        if (e.kind() != ErrorKind::undetermined) {
          throw;
        }
      }
      if (!groups || groups->size() != 1) {
        out.comparison_only = true;
        out.note = "no coset normal form below " + node.str();
        out.representative = f0;
        out.residues.clear();
        return out;
      }
      Rational r = groups->front().coset_representative(v.magnitude());
      out.residues.push_back({node.str(), groups->front(), r});
      cells.emplace(node, RTilde(r, true));
      shift.emplace(node, r - v.magnitude());
    }
    UscFunction::Points points;
    for (auto const& [path, v] : f.exceptional()) {
      NodeId   node = path.node_at(level);
      auto     it   = shift.find(node);
      Rational s    = it == shift.end() ? Rational(0) : it->second;
      points.emplace(path, RTilde(v.magnitude() + s, v.flag()));
    }
    out.representative = canonicalize(
        UscFunction(f.tower_ptr(), level, std::move(cells), std::move(points)));
    return out;
  }

  inline std::optional<bool> is_clifford(Tower const& tower) {
    return is_finite_character(tower);
  }

  //! One row per base prime: which {0} ⊔ R/v(L^x) summands it contributes.
  struct SummandRow {
    std::string                            base;
    PointCount                             points;
    std::optional<std::vector<GroupShape>> groups;  // nullopt: undeclared

    //! true when some point has a dense value group; nullopt when unknown.
    [[nodiscard]] std::optional<bool> contributes() const {
      if (!groups) {
        return std::nullopt;
      }
      for (auto const& G : *groups) {
        if (G.dense()) {
          return true;
        }
      }
      return false;
    }

    [[nodiscard]] std::string summand() const {
      if (!groups) {
        return "unknown";
      }
      std::string out;
      for (auto const& G : *groups) {
        if (G.dense()) {
          out += (out.empty() ? "" : ", ") + std::string("{0} ⊔ R/") + G.str();
        }
      }
      return out.empty() ? "none" : out;
    }
  };

  struct SummandReport {
    std::vector<SummandRow> rows;

    //! Reg Cl = Pic exactly when no value group is dense.
    [[nodiscard]] std::optional<bool> regular_classes_are_pic() const {
      bool unknown = false;
      for (auto const& row : rows) {
        auto c = row.contributes();
        if (!c) {
          unknown = true;
        } else if (*c) {
          return false;
        }
      }
      return unknown ? std::nullopt : std::optional<bool>(true);
    }
  };

  inline SummandReport summand_report(Tower const& tower) {
    SummandReport report;
    for (auto const& fiber : tower.fibers()) {
      NodeId     root{fiber.label(), {}};
      SummandRow row{fiber.label(), PointCount{}, std::nullopt};
      try {
        row.points = point_count(tower, root);
      } catch (Error const& e) {
        if (e.kind() != ErrorKind::undetermined) {
          throw;
        }
      }
      try {
        row.groups = groups_below(tower, root);
      } catch (Error const& e) {
        if (e.kind() != ErrorKind::undetermined) {
          throw;
        }
      }
      report.rows.push_back(std::move(row));
    }
    return report;
  }

}  // namespace fracideal
