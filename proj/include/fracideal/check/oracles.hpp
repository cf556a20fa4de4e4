#pragma once

// Definition-level checks used to validate the library. They work on raw
// (not canonicalized) representations and look at neighbourhoods directly
// instead of going through the criteria the library implements.

#include <optional>
#include <set>
#include <vector>

#include "../galois.hpp"
#include "../ideal.hpp"
#include "../tower.hpp"
#include "../uscfn.hpp"

namespace fracideal::check {

  //! Raw value of f at a point: its exceptional value, else its cell value.
  inline RTilde raw_value(UscFunction const& f, PrimePath const& p) {
    auto it = f.exceptional().find(p);
    return it != f.exceptional().end() ? it->second : f.cell_value(p);
  }

  //! Values taken by f on the basic open set `node`.
  inline std::vector<RTilde> values_on(UscFunction const& f, NodeId const& node) {
    Tower const&        tower = f.tower();
    std::vector<RTilde> out;
    std::vector<NodeId> cells;
    if (node.level() >= f.level()) {
      cells.push_back(node);
    } else {
      cells = descendants(tower, node, f.level());
    }
    for (auto const& c : cells) {
      std::size_t inside = 0;
      for (auto const& [p, v] : f.exceptional()) {
        if (p.passes_through(c)) {
          out.push_back(v);
          ++inside;
        }
      }
      PointCount n = point_count(tower, c);
      if (!n.is_finite() || n.n > inside) {
        out.push_back(f.cell_value(c.ancestor(f.level())));
      }
    }
    return out;
  }

  //! The depth from which x's basic neighbourhood contains no other
  //! exceptional point of f.
  inline std::size_t separation_depth(UscFunction const& f, PrimePath const& x) {
    std::size_t d = 0;
    for (auto const& [p, v] : f.exceptional()) {
      if (!(p == x)) {
        d = std::max(d, *x.divergence_depth(p));
      }
    }
    return d;
  }

  //! Upper semicontinuity by definition: at every point x some basic
  //! neighbourhood of depth <= max(depth, separation) has all values <= f(x).
  //! Points outside the exceptional set always have a neighbourhood inside
  //! one cell avoiding every exceptional point, so only exceptional points
  //! need a search.
  inline bool brute_force_usc_check(UscFunction const& f, std::size_t depth) {
    for (auto const& [x, fx] : f.exceptional()) {
      std::size_t limit = std::max(depth, separation_depth(f, x));
      bool        ok    = false;
      for (std::size_t d = 0; d <= limit && !ok; ++d) {
        ok = true;
        for (auto const& v : values_on(f, x.node_at(d))) {
          ok = ok && v <= fx;
        }
      }
      if (!ok) {
        return false;
      }
    }
    return true;
  }

  //! Local criterion for reflexibility: around each point the magnitude is
  //! constant, and if the point's flag is 0 then so are all nearby flags.
  inline bool reflexibility_criterion(UscFunction const& f, std::size_t depth) {
    for (auto const& [x, fx] : f.exceptional()) {
      std::size_t limit = std::max(depth, separation_depth(f, x));
      bool        ok    = false;
      for (std::size_t d = 0; d <= limit && !ok; ++d) {
        ok = true;
        for (auto const& v : values_on(f, x.node_at(d))) {
          ok = ok && v.magnitude() == fx.magnitude() && (fx.flag() || !v.flag());
        }
      }
      if (!ok) {
        return false;
      }
    }
    return true;
  }

  //! Points of `node` with canonical continuations below it, skipping those
  //! in `avoid`; at most `want` of them.
  inline std::vector<PrimePath> generic_points(Tower const& tower, NodeId const& node,
                                               std::set<PrimePath> const& avoid,
                                               std::size_t want = 1) {
    std::vector<PrimePath> out;
    std::vector<NodeId>    frontier{node};
    for (std::size_t extra = 0; extra <= 4 && out.size() < want; ++extra) {
      std::vector<NodeId> next;
      for (auto const& n : frontier) {
        PrimePath p(n.base, n.labels);
        if (avoid.count(p) == 0 && std::find(out.begin(), out.end(), p) == out.end()) {
          out.push_back(p);
          if (out.size() == want) {
            break;
          }
        }
        for (std::size_t i = 0; i < arity(tower, n); ++i) {
          next.push_back(n.child(static_cast<Label>(i)));
        }
      }
      frontier = std::move(next);
    }
    return out;
  }

  //! Points at which agreement of two functions of level <= `level` implies
  //! equality: every exceptional point of either, and one other point per
  //! level-`level` node whenever such a point exists.
  inline std::vector<PrimePath> probe_points(std::vector<UscFunction const*> const& fs,
                                             std::size_t level) {
    Tower const&        tower = fs.front()->tower();
    std::set<PrimePath> special;
    for (auto const* f : fs) {
      for (auto const& [p, v] : f->exceptional()) {
        special.insert(p);
      }
    }
    std::vector<PrimePath> out(special.begin(), special.end());
    for (auto const& node : level_nodes(tower, level)) {
      for (auto& p : generic_points(tower, node, special)) {
        out.push_back(std::move(p));
      }
    }
    return out;
  }

  inline std::size_t common_level(std::vector<UscFunction const*> const& fs) {
    std::size_t level = 0;
    for (auto const* f : fs) {
      level = std::max(level, f->level());
    }
    return level;
  }

  //! The point Q with sigma(Q) = P, found label by label.
  inline PrimePath preimage(TowerAutomorphism const& sigma, PrimePath const& P) {
    std::size_t len = std::max(P.prefix().size(), sigma.depth(P.base()));
    auto [prefix, cycle] = P.unrolled(len);
    NodeId q{P.base(), {}};
    for (Label target : prefix) {
      std::size_t a     = arity(sigma.tower(), q);
      bool        found = false;
      for (std::size_t l = 0; l < a && !found; ++l) {
        if (sigma.image_label(q, static_cast<Label>(l)) == target) {
          q     = q.child(static_cast<Label>(l));
          found = true;
        }
      }
      if (!found) {
        throw Error(ErrorKind::invalid_input, "automorphism is not surjective");
      }
    }
    return PrimePath(P.base(), q.labels, cycle);
  }

  //! Smallest k/e with k in [lo, hi] such that I contains the element whose
  //! valuation is k/e at `node` and `big` at every other level-n prime
  //! (binary search, then the two neighbours are re-checked).
  inline std::optional<Rational> alpha_by_membership(FractionalIdeal const& I,
                                                     NodeId const&          node,
                                                     long long lo, long long hi,
                                                     Rational const& big) {
    Tower const& tower = I.tower();
    Integer      e     = ramification(tower, node);
    std::size_t  n     = node.level();
    auto         nodes = level_nodes(tower, n);
    auto accepts = [&](long long k) {
      ElementVector::Map values;
      for (auto const& m : nodes) {
        values[m] = m == node ? make_rational(Integer(k), e) : big;
      }
      return contains(I, ElementVector(I.fn().tower_ptr(), n, std::move(values)));
    };
    if (!accepts(hi) || accepts(lo)) {
      return std::nullopt;
    }
    long long a = lo;  // rejected
    long long b = hi;  // accepted
    while (b - a > 1) {
      long long mid = a + (b - a) / 2;
      (accepts(mid) ? b : a) = mid;
    }
    if (accepts(b - 1) || !accepts(b) || !accepts(b + 1)) {
      return std::nullopt;
    }
    return make_rational(Integer(b), e);
  }

}  // namespace fracideal::check
