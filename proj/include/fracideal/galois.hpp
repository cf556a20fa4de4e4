#pragma once

// Tree automorphisms acting on the prime trees, and the induced actions on
// functions and ideals. An automorphism is given by its portrait: for each
// node, the permutation it induces on that node's children. Nodes without a
// rule (in particular everything beyond the described depth) get the
// identity permutation, so eventually periodic paths go to eventually
// periodic paths.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "ideal.hpp"
#include "tower.hpp"
#include "uscfn.hpp"

namespace fracideal {

  using Permutation = std::vector<Label>;

  inline bool is_identity(Permutation const& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] != i) {
        return false;
      }
    }
    return true;
  }

  //! Rules for one fiber: per-node permutations, and whole-level defaults
  //! used at nodes of that level without their own rule.
  struct Portrait {
    std::map<Labels, Permutation>      nodes;
    std::map<std::size_t, Permutation> levels;

    //! One more than the deepest level carrying a rule.
    [[nodiscard]] std::size_t depth() const {
      std::size_t d = 0;
      for (auto const& [labels, p] : nodes) {
        d = std::max(d, labels.size() + 1);
      }
      for (auto const& [lvl, p] : levels) {
        d = std::max(d, lvl + 1);
      }
      return d;
    }

    [[nodiscard]] Permutation const* rule(Labels const& at) const {
      if (auto it = nodes.find(at); it != nodes.end()) {
        return &it->second;
      }
      if (auto it = levels.find(at.size()); it != levels.end()) {
        return &it->second;
      }
      return nullptr;
    }
  };

  class TowerAutomorphism {
   public:
    TowerAutomorphism(TowerPtr tower, std::map<std::string, Portrait> portraits)
        : _tower(std::move(tower)), _portraits(std::move(portraits)) {
      if (!_tower) {
        throw Error(ErrorKind::invalid_input, "automorphism without a tower");
      }
      check();
    }

    static TowerAutomorphism identity(TowerPtr tower) {
      return TowerAutomorphism(std::move(tower), {});
    }

    [[nodiscard]] TowerPtr const& tower_ptr() const noexcept { return _tower; }
    [[nodiscard]] Tower const& tower() const noexcept { return *_tower; }
    [[nodiscard]] std::map<std::string, Portrait> const& portraits() const {
      return _portraits;
    }

    [[nodiscard]] std::size_t depth(std::string const& base) const {
      auto it = _portraits.find(base);
      return it == _portraits.end() ? 0 : it->second.depth();
    }

    //! Image of child i of `node` under the permutation at `node`.
    [[nodiscard]] Label image_label(NodeId const& node, Label i) const {
      auto it = _portraits.find(node.base);
      if (it == _portraits.end()) {
        return i;
      }
      Permutation const* p = it->second.rule(node.labels);
      return p == nullptr ? i : (*p)[i];
    }

    [[nodiscard]] NodeId apply(NodeId const& node) const {
      NodeId out{node.base, {}};
      NodeId at{node.base, {}};
      for (Label l : node.labels) {
        out.labels.push_back(image_label(at, l));
        at.labels.push_back(l);
      }
      return out;
    }

    [[nodiscard]] PrimePath apply(PrimePath const& path) const {
      std::size_t depth_needed = std::max(depth(path.base()), path.prefix().size());
      auto [prefix, cycle]     = path.unrolled(depth_needed);
      NodeId image = apply(NodeId{path.base(), prefix});
      return PrimePath(path.base(), image.labels, cycle);
    }

    //! Permutation induced at `node` (identity when no rule applies).
    [[nodiscard]] Permutation permutation_at(NodeId const& node) const {
      std::size_t n = arity(*_tower, node);
      Permutation out(n);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = image_label(node, static_cast<Label>(i));
      }
      return out;
    }

   private:
    // Both trees below a node and its image must agree in e and branching up
    // to the depth where the rules stop and the fiber becomes uniform.
    void check() {
      for (auto const& [base, portrait] : _portraits) {
        if (!_tower->has(base)) {
          throw Error(ErrorKind::invalid_input,
                      "automorphism refers to unknown base prime " + base);
        }
        Fiber const& fib   = _tower->fiber(base);
        std::size_t  limit = std::max(portrait.depth(), fib.stable_depth()) + 1;
        for (auto const& [labels, p] : portrait.nodes) {
          check_node(*_tower, NodeId{base, labels});
        }
        std::vector<NodeId> frontier{NodeId{base, {}}};
        for (std::size_t d = 0; d < limit; ++d) {
          std::vector<NodeId> next;
          for (auto const& node : frontier) {
            std::size_t        n = arity(*_tower, node);
            Permutation const* p = portrait.rule(node.labels);
            if (p != nullptr) {
              std::vector<bool> seen(n, false);
              if (p->size() != n) {
                throw Error(ErrorKind::invalid_input,
                            "permutation at " + node.str() + " has "
                                + std::to_string(p->size())
                                + " entries, node has "
                                + std::to_string(n) + " children");
              }
              for (Label x : *p) {
                if (x >= n || seen[x]) {
                  throw Error(ErrorKind::invalid_input,
                              "not a permutation at " + node.str());
                }
                seen[x] = true;
              }
            }
            NodeId image = apply(node);
            if (ramification(*_tower, image) != ramification(*_tower, node)
                || arity(*_tower, image) != n) {
              throw Error(ErrorKind::invalid_input,
                          "automorphism does not preserve the tree: "
                              + node.str() + " maps to " + image.str()
                              + " with different e or branching");
            }
            for (std::size_t i = 0; i < n; ++i) {
              next.push_back(node.child(static_cast<Label>(i)));
            }
          }
          frontier = std::move(next);
        }
      }
    }

    TowerPtr                        _tower;
    std::map<std::string, Portrait> _portraits;
  };

  namespace detail {

    template <typename F>
    void for_nodes_above(Tower const& tower, std::string const& base,
                         std::size_t depth, F&& fn) {
      std::vector<NodeId> frontier{NodeId{base, {}}};
      for (std::size_t d = 0; d < depth; ++d) {
        std::vector<NodeId> next;
        for (auto const& node : frontier) {
          fn(node);
          for (std::size_t i = 0; i < arity(tower, node); ++i) {
            next.push_back(node.child(static_cast<Label>(i)));
          }
        }
        frontier = std::move(next);
      }
    }

    inline std::set<std::string> bases(TowerAutomorphism const& a,
                                       TowerAutomorphism const& b) {
      std::set<std::string> out;
      for (auto const& [base, p] : a.portraits()) {
        out.insert(base);
      }
      for (auto const& [base, p] : b.portraits()) {
        out.insert(base);
      }
      return out;
    }

  }  // namespace detail

  //! σ∘τ (τ applied first).
  inline TowerAutomorphism compose(TowerAutomorphism const& sigma,
                                   TowerAutomorphism const& tau) {
    if (sigma.tower_ptr() != tau.tower_ptr()) {
      throw Error(ErrorKind::tower_mismatch, "automorphisms of different towers");
    }
    std::map<std::string, Portrait> out;
    for (auto const& base : detail::bases(sigma, tau)) {
      Portrait    p;
      std::size_t d = std::max(sigma.depth(base), tau.depth(base));
      detail::for_nodes_above(sigma.tower(), base, d, [&](NodeId const& node) {
        NodeId      t_node = tau.apply(node);
        std::size_t n      = arity(sigma.tower(), node);
        Permutation perm(n);
        for (std::size_t i = 0; i < n; ++i) {
          perm[i] = sigma.image_label(
              t_node, tau.image_label(node, static_cast<Label>(i)));
        }
        if (!is_identity(perm)) {
          p.nodes.emplace(node.labels, std::move(perm));
        }
      });
      if (!p.nodes.empty()) {
        out.emplace(base, std::move(p));
      }
    }
    return TowerAutomorphism(sigma.tower_ptr(), std::move(out));
  }

  inline TowerAutomorphism inverse(TowerAutomorphism const& sigma) {
    std::map<std::string, Portrait> out;
    for (auto const& [base, portrait] : sigma.portraits()) {
      Portrait p;
      detail::for_nodes_above(
          sigma.tower(), base, portrait.depth(), [&](NodeId const& node) {
            Permutation fwd = sigma.permutation_at(node);
            Permutation inv(fwd.size());
            for (std::size_t i = 0; i < fwd.size(); ++i) {
              inv[fwd[i]] = static_cast<Label>(i);
            }
            if (!is_identity(inv)) {
              p.nodes.emplace(sigma.apply(node).labels, std::move(inv));
            }
          });
      if (!p.nodes.empty()) {
        out.emplace(base, std::move(p));
      }
    }
    return TowerAutomorphism(sigma.tower_ptr(), std::move(out));
  }

  //! σf: the value carried by a cell or point moves to its image, so that
  //! (σf)(σ(P)) = f(P).
  inline UscFunction act_on_function(TowerAutomorphism const& sigma,
                                     UscFunction const&       f) {
    if (sigma.tower_ptr() != f.tower_ptr()) {
      throw Error(ErrorKind::tower_mismatch,
                  "automorphism and function live on different towers");
    }
    UscFunction::Cells cells;
    for (auto const& [node, v] : f.cells()) {
      cells.emplace(sigma.apply(node), v);
    }
    UscFunction::Points points;
    for (auto const& [path, v] : f.exceptional()) {
      points.emplace(sigma.apply(path), v);
    }
    return canonicalize(
        UscFunction(f.tower_ptr(), f.level(), std::move(cells), std::move(points)));
  }

  inline LevelExponentIdeal act_on_exponents(TowerAutomorphism const& sigma,
                                             LevelExponentIdeal const& E) {
    LevelExponentIdeal::Map out;
    for (auto const& [node, a] : E.exponents()) {
      out.emplace(sigma.apply(node), a);
    }
    return LevelExponentIdeal(E.tower_ptr(), E.level(), std::move(out));
  }

  inline FractionalIdeal act_on_ideal(TowerAutomorphism const& sigma,
                                      FractionalIdeal const&   I) {
    std::optional<LevelExponentIdeal> prov;
    if (I.provenance()) {
      prov = act_on_exponents(sigma, *I.provenance());
    }
    return FractionalIdeal(act_on_function(sigma, I.fn()), std::move(prov));
  }

  //! Compares σ acting on the function with two independent routes: the
  //! exponents moved by σ (when provenance exists), and pointwise transport
  //! (σf)(σP) = f(P) at every listed cell and exceptional point.
  inline bool check_equivariance(TowerAutomorphism const& sigma,
                                 FractionalIdeal const&   I) {
    UscFunction moved = act_on_function(sigma, I.fn());
    if (I.provenance()) {
      if (!(from_exponents(act_on_exponents(sigma, *I.provenance())).fn()
            == moved)) {
        return false;
      }
    }
    std::vector<PrimePath> probes;
    for (auto const& [node, v] : I.fn().cells()) {
      probes.emplace_back(node.base, node.labels);
    }
    for (auto const& [path, v] : I.fn().exceptional()) {
      probes.push_back(path);
    }
    for (auto const& fiber : I.tower().fibers()) {
      probes.emplace_back(fiber.label(), Labels{});
    }
    for (auto const& P : probes) {
      if (evaluate(moved, sigma.apply(P)) != evaluate(I.fn(), P)) {
        return false;
      }
    }
    return true;
  }

  //! Closure of {f} under the generators; throws once more than `bound`
  //! distinct functions appear.
  inline std::set<UscFunction> orbit(UscFunction const&                    f,
                                     std::vector<TowerAutomorphism> const& gens,
                                     std::size_t                           bound) {
    if (bound < 1) {
      throw Error(ErrorKind::invalid_input, "orbit bound must be at least 1");
    }
    std::set<UscFunction>   seen{canonicalize(f)};
    std::deque<UscFunction> queue{*seen.begin()};
    while (!queue.empty()) {
      UscFunction g = queue.front();
      queue.pop_front();
      for (auto const& s : gens) {
        UscFunction h = act_on_function(s, g);
        if (seen.insert(h).second) {
          if (seen.size() > bound) {
            throw Error(ErrorKind::bound_exceeded,
                        "orbit has more than " + std::to_string(bound)
                            + " elements");
          }
          queue.push_back(std::move(h));
        }
      }
    }
    return seen;
  }

}  // namespace fracideal
