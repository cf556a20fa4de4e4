#pragma once

// Seeded random inputs for the property suites.
//
// The engine is std::mt19937_64 and every draw goes through Rng::uniform,
// which reduces a 64-bit output modulo the range size. Nothing depends on
// std::uniform_int_distribution, so a given seed yields the same cases with
// any standard library.
//
// Ranges (see also README):
//   level            uniform in [0, 4]
//   listed cells     uniform in [0, min(16, #level-n nodes)], distinct nodes
//   flag-0 magnitude k / e(node), k uniform in [-12, 12]
//   flag-1 magnitude k / d, k in [-12, 12], d in [1, 8]; only on nodes whose
//                    whole boundary has a dense value group, with chance 1/2
//   exceptional pts  uniform in [0, 3]; prefix = a listed-level node extended
//                    by [0, 2] random labels (at least to the stable depth),
//                    cycle of length 1 or 2 with random labels
//   jumps            k / e(point at depth level+2), k in [0, 12]

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "../ideal.hpp"
#include "../galois.hpp"
#include "../tower.hpp"
#include "../uscfn.hpp"

namespace fracideal::check {

  class Rng {
   public:
    explicit Rng(std::uint64_t seed) : _engine(seed) {}

    //! Independent stream for (seed, stream id).
    Rng(std::uint64_t seed, std::uint64_t stream)
        : _engine(seed * 0x9E3779B97F4A7C15ULL + stream * 0xBF58476D1CE4E5B9ULL
                  + 1) {}

    std::uint64_t next() { return _engine(); }

    //! Uniform integer in [lo, hi].
    long long uniform(long long lo, long long hi) {
      auto span = static_cast<std::uint64_t>(hi - lo) + 1;
      return lo + static_cast<long long>(next() % span);
    }

    bool chance(unsigned num, unsigned den) { return next() % den < num; }

    template <typename T>
    T const& pick(std::vector<T> const& v) {
      return v[static_cast<std::size_t>(uniform(0, static_cast<long long>(v.size()) - 1))];
    }

   private:
    std::mt19937_64 _engine;
  };

  struct Limits {
    std::size_t max_level  = 4;
    std::size_t max_cells  = 16;
    std::size_t max_points = 3;
    long long   numerator  = 12;
    long long   flag_den   = 8;
  };

  enum class Mode {
    val_ref,  // no flags, no exceptional points
    ref,      // reflexible: exceptional values (c, 1) over flag-0 cells c
    usc_b,    // any u.s.c. jumps
  };

  inline NodeId random_node(Rng& rng, Tower const& tower, std::size_t level) {
    NodeId node{rng.pick(tower.fibers()).label(), {}};
    while (node.level() < level) {
      auto a = static_cast<long long>(arity(tower, node));
      node   = node.child(static_cast<Label>(rng.uniform(0, a - 1)));
    }
    return node;
  }

  inline NodeId random_node_below(Rng& rng, Tower const& tower, NodeId node,
                                  std::size_t level) {
    while (node.level() < level) {
      auto a = static_cast<long long>(arity(tower, node));
      node   = node.child(static_cast<Label>(rng.uniform(0, a - 1)));
    }
    return node;
  }

  //! A boundary point below `through`.
  inline PrimePath random_path(Rng& rng, Tower const& tower, NodeId const& through) {
    Fiber const& f      = tower.fiber(through.base);
    std::size_t  length = std::max(through.level() + static_cast<std::size_t>(rng.uniform(0, 2)),
                                   f.stable_depth());
    NodeId node = through;
    while (node.level() < length) {
      auto a = static_cast<long long>(arity(tower, node));
      node   = node.child(static_cast<Label>(rng.uniform(0, a - 1)));
    }
    auto   a = static_cast<long long>(arity(tower, node));
    Labels cycle;
    auto   len = rng.uniform(1, 2);
    for (long long i = 0; i < len; ++i) {
      cycle.push_back(static_cast<Label>(rng.uniform(0, a - 1)));
    }
    return PrimePath(node.base, node.labels, cycle);
  }

  inline bool dense_below(Tower const& tower, NodeId const& node) {
    auto groups = groups_below(tower, node);
    if (!groups) {
      return false;
    }
    for (auto const& G : *groups) {
      if (!G.dense()) {
        return false;
      }
    }
    return true;
  }

  inline Rational grid_value(Rng& rng, Integer const& e, long long range) {
    return make_rational(Integer(rng.uniform(-range, range)), e);
  }

  inline RTilde random_cell_value(Rng& rng, Tower const& tower, NodeId const& node,
                                  Mode mode, Limits const& lim) {
    if (mode != Mode::val_ref && dense_below(tower, node) && rng.chance(1, 2)) {
      return RTilde(make_rational(Integer(rng.uniform(-lim.numerator, lim.numerator)),
                                  Integer(rng.uniform(1, lim.flag_den))),
                    true);
    }
    return RTilde(grid_value(rng, ramification(tower, node), lim.numerator), false);
  }

  //! A valid u.s.c. value at `path` over the cell value `cell`.
  inline std::optional<RTilde> random_point_value(Rng& rng, Tower const& tower,
                                                  PrimePath const& path,
                                                  RTilde const& cell, std::size_t level,
                                                  Mode mode, Limits const& lim) {
    bool dense = value_group(tower, path).group.dense();
    if (mode == Mode::ref) {
      if (cell.flag() || !dense) {
        return std::nullopt;
      }
      return RTilde(cell.magnitude(), true);
    }
    Integer  e    = ramification(tower, path.node_at(level + 2));
    Rational jump = make_rational(Integer(rng.uniform(0, lim.numerator)), e);
    bool     flag = dense && rng.chance(1, 2);
    Rational base = cell.magnitude();
    if (cell.flag() && !flag) {
      // a flag-0 value must sit in the group and strictly above the cell
      base = ceil_to_grid(cell.magnitude(), e, true);
    }
    RTilde v(base + jump, flag);
    if (v < cell) {
      v = RTilde(v.magnitude(), true);
    }
    return v;
  }

  inline UscFunction random_function(Rng& rng, TowerPtr const& tower, Mode mode,
                                     Limits const& lim = {}) {
    Tower const& T     = *tower;
    auto         level = static_cast<std::size_t>(rng.uniform(0, static_cast<long long>(lim.max_level)));
    std::size_t  total = level_nodes(T, level).size();
    auto         want  = static_cast<std::size_t>(
        rng.uniform(0, static_cast<long long>(std::min(lim.max_cells, total))));
    UscFunction::Cells cells;
    for (std::size_t attempt = 0; cells.size() < want && attempt < 4 * want + 4; ++attempt) {
      NodeId node = random_node(rng, T, level);
      if (cells.count(node) == 0) {
        cells.emplace(node, random_cell_value(rng, T, node, mode, lim));
      }
    }
    UscFunction::Points points;
    if (mode != Mode::val_ref) {
      auto n = rng.uniform(0, static_cast<long long>(lim.max_points));
      for (long long i = 0; i < n; ++i) {
        NodeId    node = random_node(rng, T, level);
        PrimePath path = random_path(rng, T, node);
        auto      it   = cells.find(node);
        RTilde    cell = it == cells.end() ? RTilde::zero() : it->second;
        if (auto v = random_point_value(rng, T, path, cell, level, mode, lim)) {
          points.emplace(path, *v);
        }
      }
    }
    return UscFunction(tower, level, std::move(cells), std::move(points));
  }

  //! Pushes one exceptional value strictly below its cell while keeping it in
  //! the value group (a flag-0 grid value), adding a point if there is none.
  inline UscFunction break_semicontinuity(Rng& rng, UscFunction const& f) {
    Tower const&        T      = f.tower();
    UscFunction::Points points = f.exceptional();
    PrimePath           path;
    if (points.empty() || rng.chance(1, 4)) {
      path = random_path(rng, T, random_node(rng, T, f.level()));
    } else {
      auto it = points.begin();
      std::advance(it, rng.uniform(0, static_cast<long long>(points.size()) - 1));
      path = it->first;
    }
    RTilde   cell = f.cell_value(path);
    Integer  e    = ramification(T, path.node_at(f.level() + 2));
    Rational v    = floor_to_grid(cell.magnitude(), e, true)
                 - make_rational(Integer(rng.uniform(0, 3)), e);
    points[path] = RTilde(v, false);
    return UscFunction(f.tower_ptr(), f.level(), f.cells(), std::move(points));
  }

  //! A random automorphism of a tower whose fibers have constant arity
  //! (cantor-type), described to depth at most `max_depth`.
  inline TowerAutomorphism random_automorphism(Rng& rng, TowerPtr const& tower,
                                               std::size_t max_depth = 3) {
    std::map<std::string, Portrait> portraits;
    for (auto const& fiber : tower->fibers()) {
      Portrait p;
      auto     depth = static_cast<std::size_t>(rng.uniform(1, static_cast<long long>(max_depth)));
      std::vector<NodeId> frontier{NodeId{fiber.label(), {}}};
      for (std::size_t d = 0; d < depth; ++d) {
        std::vector<NodeId> next;
        bool                whole_level = rng.chance(1, 5);
        Permutation         level_perm;
        for (auto const& node : frontier) {
          std::size_t a = arity(*tower, node);
          Permutation perm(a);
          for (std::size_t i = 0; i < a; ++i) {
            perm[i] = static_cast<Label>(i);
          }
          for (std::size_t i = a; i > 1; --i) {
            std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform(0, static_cast<long long>(i) - 1))]);
          }
          if (whole_level) {
            if (level_perm.empty()) {
              level_perm = perm;
              p.levels[d] = perm;
            }
          } else if (rng.chance(1, 2)) {
            p.nodes[node.labels] = perm;
          }
          for (std::size_t i = 0; i < a; ++i) {
            next.push_back(node.child(static_cast<Label>(i)));
          }
        }
        frontier = std::move(next);
      }
      portraits.emplace(fiber.label(), std::move(p));
    }
    return TowerAutomorphism(tower, std::move(portraits));
  }

  inline LevelExponentIdeal random_exponents(Rng& rng, TowerPtr const& tower,
                                             std::size_t level, Limits const& lim = {}) {
    LevelExponentIdeal::Map map;
    std::size_t             total = level_nodes(*tower, level).size();
    auto want = static_cast<std::size_t>(rng.uniform(0, static_cast<long long>(std::min(lim.max_cells, total))));
    for (std::size_t i = 0; i < want; ++i) {
      NodeId node = random_node(rng, *tower, level);
      map[node]   = grid_value(rng, ramification(*tower, node), lim.numerator);
    }
    return LevelExponentIdeal(tower, level, std::move(map));
  }

}  // namespace fracideal::check
