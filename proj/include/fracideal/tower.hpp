#pragma once

// Abstract towers o ⊂ o_{M_1} ⊂ o_{M_2} ⊂ ...: one finitely branching prime
// tree per base prime, each node carrying its reduced ramification index e.
// Boundary paths of the trees are the maximal ideals of the integral
// closure, and the depth-d nodes are the basic open sets U(A) at level d.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rational.hpp"
#include "value_group.hpp"

namespace fracideal {

  using Label  = std::uint32_t;
  using Labels = std::vector<Label>;

  inline std::string labels_str(Labels const& labels) {
    std::string out = "[";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      out += (i ? "," : "") + std::to_string(labels[i]);
    }
    return out + "]";
  }

  //! A prime of o_{M_n}: base prime plus the child indices leading to it.
  struct NodeId {
    std::string base;
    Labels      labels;

    [[nodiscard]] std::size_t level() const noexcept { return labels.size(); }

    [[nodiscard]] NodeId child(Label i) const {
      NodeId c = *this;
      c.labels.push_back(i);
      return c;
    }

    [[nodiscard]] NodeId ancestor(std::size_t lvl) const {
      return NodeId{base, Labels(labels.begin(), labels.begin() + lvl)};
    }

    [[nodiscard]] bool is_ancestor_of(NodeId const& other) const {
      return base == other.base && labels.size() <= other.labels.size()
             && std::equal(labels.begin(), labels.end(), other.labels.begin());
    }

    [[nodiscard]] std::string str() const { return base + labels_str(labels); }

    friend auto operator<=>(NodeId const&, NodeId const&) = default;
    friend bool operator==(NodeId const&, NodeId const&)  = default;
  };

  //! A boundary point: an eventually periodic infinite path. The
  //! representation is normalized on construction (primitive cycle, shortest
  //! prefix), so equal points compare equal.
  class PrimePath {
   public:
    PrimePath() = default;

    PrimePath(std::string base, Labels prefix, Labels cycle = {0})
        : _base(std::move(base)),
          _prefix(std::move(prefix)),
          _cycle(std::move(cycle)) {
      normalize();
    }

    [[nodiscard]] std::string const& base() const noexcept { return _base; }
    [[nodiscard]] Labels const& prefix() const noexcept { return _prefix; }
    [[nodiscard]] Labels const& cycle() const noexcept { return _cycle; }

    [[nodiscard]] bool is_canonical() const {
      return _cycle.size() == 1 && _cycle[0] == 0;
    }

    [[nodiscard]] Label label_at(std::size_t depth) const {
      if (depth < _prefix.size()) {
        return _prefix[depth];
      }
      return _cycle[(depth - _prefix.size()) % _cycle.size()];
    }

    //! The depth-d node this path passes through.
    [[nodiscard]] NodeId node_at(std::size_t depth) const {
      NodeId n{_base, {}};
      n.labels.reserve(depth);
      for (std::size_t d = 0; d < depth; ++d) {
        n.labels.push_back(label_at(d));
      }
      return n;
    }

    [[nodiscard]] bool passes_through(NodeId const& node) const {
      if (node.base != _base) {
        return false;
      }
      for (std::size_t d = 0; d < node.labels.size(); ++d) {
        if (node.labels[d] != label_at(d)) {
          return false;
        }
      }
      return true;
    }

    //! First depth at which the two paths pass through different nodes, or
    //! nullopt when they are the same point (or live in different fibers, in
    //! which case they differ already at depth 0).
    [[nodiscard]] std::optional<std::size_t>
    divergence_depth(PrimePath const& other) const {
      if (_base != other._base) {
        return 0;
      }
      if (*this == other) {
        return std::nullopt;
      }
      std::size_t bound = std::max(_prefix.size(), other._prefix.size())
                          + _cycle.size() * other._cycle.size() + 1;
      for (std::size_t d = 0; d < bound; ++d) {
        if (label_at(d) != other.label_at(d)) {
          return d + 1;
        }
      }
      return std::nullopt;
    }

    //! The same point written with a prefix of exactly `len` labels (no
    //! normalization); the returned cycle is the matching rotation.
    [[nodiscard]] std::pair<Labels, Labels> unrolled(std::size_t len) const {
      Labels prefix;
      for (std::size_t d = 0; d < std::max(len, _prefix.size()); ++d) {
        prefix.push_back(label_at(d));
      }
      Labels cycle;
      for (std::size_t i = 0; i < _cycle.size(); ++i) {
        cycle.push_back(label_at(prefix.size() + i));
      }
      return {prefix, cycle};
    }

    [[nodiscard]] std::string str() const {
      std::string out = _base + ":" + labels_str(_prefix);
      if (!is_canonical()) {
        out += "+(" + labels_str(_cycle) + ")*";
      }
      return out;
    }

    friend auto operator<=>(PrimePath const&, PrimePath const&) = default;
    friend bool operator==(PrimePath const&, PrimePath const&)  = default;

   private:
    void normalize() {
      if (_cycle.empty()) {
        throw Error(ErrorKind::invalid_input,
                    "periodic continuation must be nonempty at path "
                        + _base + labels_str(_prefix));
      }
      // primitive root of the cycle
      std::size_t n = _cycle.size();
      for (std::size_t period = 1; period <= n; ++period) {
        if (n % period != 0) {
          continue;
        }
        bool ok = true;
        for (std::size_t i = period; i < n && ok; ++i) {
          ok = _cycle[i] == _cycle[i - period];
        }
        if (ok) {
          _cycle.resize(period);
          break;
        }
      }
      // absorb the tail of the prefix into the cycle
      while (!_prefix.empty() && _prefix.back() == _cycle.back()) {
        _prefix.pop_back();
        std::rotate(_cycle.rbegin(), _cycle.rbegin() + 1, _cycle.rend());
      }
    }

    std::string _base;
    Labels      _prefix;
    Labels      _cycle = {0};
  };

  //! Declared eventual behavior of a fiber. Global questions (is the fiber
  //! finite? what lies beyond an explicit horizon?) are answered from this
  //! declaration only.
  struct Metadata {
    enum class Behavior {
      finite_fiber,
      chain_totally_ramified,
      complete_splitting,
      explicit_horizon,
      undeclared,
    };

    Behavior    behavior = Behavior::undeclared;
    std::size_t bound    = 0;  // finite_fiber
    Integer     p        = 0;  // chain_totally_ramified
    std::size_t arity    = 2;  // complete_splitting
    std::size_t depth    = 0;  // explicit_horizon

    static Metadata finite_fiber(std::size_t bound) {
      Metadata m;
      m.behavior = Behavior::finite_fiber;
      m.bound    = bound;
      return m;
    }
    static Metadata chain_totally_ramified(Integer p) {
      Metadata m;
      m.behavior = Behavior::chain_totally_ramified;
      m.p        = std::move(p);
      return m;
    }
    static Metadata complete_splitting(std::size_t arity) {
      Metadata m;
      m.behavior = Behavior::complete_splitting;
      m.arity    = arity;
      return m;
    }
    static Metadata explicit_horizon(std::size_t depth) {
      Metadata m;
      m.behavior = Behavior::explicit_horizon;
      m.depth    = depth;
      return m;
    }

    //! Finite fiber? nullopt when nothing usable is declared.
    [[nodiscard]] std::optional<bool> finite() const {
      switch (behavior) {
        case Behavior::finite_fiber:
        case Behavior::chain_totally_ramified: return true;
        case Behavior::complete_splitting: return false;
        default: return std::nullopt;
      }
    }

    friend bool operator==(Metadata const&, Metadata const&) = default;
  };

  inline char const* to_string(Metadata::Behavior b) {
    switch (b) {
      case Metadata::Behavior::finite_fiber: return "finite_fiber";
      case Metadata::Behavior::chain_totally_ramified:
        return "chain_totally_ramified";
      case Metadata::Behavior::complete_splitting: return "complete_splitting";
      case Metadata::Behavior::explicit_horizon: return "explicit_horizon";
      case Metadata::Behavior::undeclared: return "undeclared";
    }
    return "?";
  }

  //! A finite tree given node by node, used by the `explicit` fiber kind.
  struct ExplicitTree {
    Integer                   e = 1;
    std::vector<ExplicitTree> children;
  };

  //! The prime tree above one base prime.
  class Fiber {
   public:
    enum class Kind { puiseux, cantor, zp_like, explicit_tree };

    //! Chain tree with e_n = (n+1)!: level n is C((T^{1/(n+1)!})).
    static Fiber puiseux(std::string label) {
      Fiber f(std::move(label), Kind::puiseux);
      f._metadata = Metadata::finite_fiber(1);
      return f;
    }

    //! Complete `arity`-fold splitting at every level; unramified unless
    //! `ramify` >= 2, in which case e_n = ramify^n.
    static Fiber cantor(std::string label,
                        std::size_t arity  = 2,
                        Integer     ramify = 0) {
      if (arity < 2) {
        throw Error(ErrorKind::malformed_tower,
                    "cantor fiber " + label + " needs arity >= 2");
      }
      if (ramify == 1 || ramify < 0) {
        throw Error(ErrorKind::malformed_tower,
                    "cantor fiber " + label + ": ramify must be 0 or >= 2");
      }
      Fiber f(std::move(label), Kind::cantor);
      f._arity    = arity;
      f._p        = std::move(ramify);
      f._metadata = Metadata::complete_splitting(arity);
      return f;
    }

    //! A prime of a Z_p-like tower: totally ramified (e_n = p^n) when
    //! `ramified`, and splitting into split_schedule[n] primes at level n,
    //! with no splitting after the schedule ends.
    static Fiber zp_like(std::string              label,
                         Integer                  p,
                         bool                     ramified,
                         std::vector<std::size_t> split_schedule) {
      if (p < 2) {
        throw Error(ErrorKind::malformed_tower,
                    "zp_like fiber " + label + " needs p >= 2");
      }
      std::size_t points = 1;
      for (auto s : split_schedule) {
        if (s < 1) {
          throw Error(ErrorKind::malformed_tower,
                      "zp_like fiber " + label
                          + ": split_schedule entries must be >= 1");
        }
        points *= s;
      }
      Fiber f(std::move(label), Kind::zp_like);
      f._p        = std::move(p);
      f._ramified = ramified;
      f._schedule = std::move(split_schedule);
      bool trivial = points == 1;
      f._metadata  = ramified && trivial ? Metadata::chain_totally_ramified(f._p)
                                         : Metadata::finite_fiber(points);
      return f;
    }

    //! A finite tree, continued past its leaves as the metadata declares:
    //! finite_fiber continues by chains with constant e,
    //! chain_totally_ramified multiplies e by p per level, complete_splitting
    //! splits each leaf `arity` ways, and anything else leaves the tree
    //! undetermined past the horizon.
    static Fiber explicit_tree(std::string  label,
                               ExplicitTree tree,
                               Metadata     metadata) {
      Fiber f(std::move(label), Kind::explicit_tree);
      f._metadata = std::move(metadata);
      if (tree.e != 1) {
        throw Error(ErrorKind::malformed_tower,
                    "explicit fiber " + f._label
                        + ": root must have e = 1 (normalization v(K^x) = Z)");
      }
      std::optional<std::size_t> horizon;
      f.flatten(tree, Labels{}, horizon);
      f._horizon       = *horizon;
      std::size_t leaves = 0;
      for (auto const& [labels, info] : f._nodes) {
        leaves += labels.size() == f._horizon ? 1 : 0;
      }
      switch (f._metadata.behavior) {
        case Metadata::Behavior::finite_fiber:
          if (f._metadata.bound < leaves) {
            throw Error(ErrorKind::malformed_tower,
                        "explicit fiber " + f._label + ": declared bound "
                            + std::to_string(f._metadata.bound) + " < "
                            + std::to_string(leaves) + " listed leaves");
          }
          break;
        case Metadata::Behavior::chain_totally_ramified:
          if (f._metadata.p < 2) {
            throw Error(ErrorKind::malformed_tower,
                        "explicit fiber " + f._label + ": p must be >= 2");
          }
          break;
        case Metadata::Behavior::complete_splitting:
          if (f._metadata.arity < 2) {
            throw Error(ErrorKind::malformed_tower,
                        "explicit fiber " + f._label + ": arity must be >= 2");
          }
          break;
        case Metadata::Behavior::explicit_horizon:
          if (f._metadata.depth != f._horizon) {
            throw Error(ErrorKind::malformed_tower,
                        "explicit fiber " + f._label
                            + ": declared horizon does not match tree depth");
          }
          break;
        case Metadata::Behavior::undeclared: break;
      }
      return f;
    }

    [[nodiscard]] std::string const& label() const noexcept { return _label; }
    [[nodiscard]] Kind kind() const noexcept { return _kind; }
    [[nodiscard]] Metadata const& metadata() const noexcept {
      return _metadata;
    }

    // Parameters, for serialization and display.
    [[nodiscard]] std::size_t cantor_arity() const noexcept { return _arity; }
    [[nodiscard]] Integer const& p() const noexcept { return _p; }
    [[nodiscard]] bool ramified() const noexcept { return _ramified; }
    [[nodiscard]] std::vector<std::size_t> const& split_schedule() const {
      return _schedule;
    }
    [[nodiscard]] std::size_t horizon() const noexcept { return _horizon; }
    [[nodiscard]] ExplicitTree explicit_tree_data() const {
      return rebuild(Labels{});
    }

    //! True when the structure past the listed tree is not declared.
    [[nodiscard]] bool opaque() const noexcept {
      return _kind == Kind::explicit_tree
             && _metadata.finite() == std::nullopt;
    }

    //! Number of children of the node at `labels` (labels assumed valid).
    [[nodiscard]] std::size_t arity(Labels const& labels) const {
      std::size_t n = labels.size();
      switch (_kind) {
        case Kind::puiseux: return 1;
        case Kind::cantor: return _arity;
        case Kind::zp_like: return n < _schedule.size() ? _schedule[n] : 1;
        case Kind::explicit_tree: {
          if (n < _horizon) {
            return lookup(labels).arity;
          }
          switch (_metadata.behavior) {
            case Metadata::Behavior::finite_fiber:
            case Metadata::Behavior::chain_totally_ramified: return 1;
            case Metadata::Behavior::complete_splitting: return _metadata.arity;
            default:
              throw Error(ErrorKind::undetermined,
                          "fiber " + _label + " is undeclared beyond depth "
                              + std::to_string(_horizon) + " (node "
                              + _label + labels_str(labels) + ")");
          }
        }
      }
      return 0;
    }

    //! Reduced ramification index at the node (labels assumed valid).
    [[nodiscard]] Integer e(Labels const& labels) const {
      std::size_t n = labels.size();
      switch (_kind) {
        case Kind::puiseux: return factorial(n + 1);
        case Kind::cantor: return _p >= 2 ? ipow(_p, n) : Integer(1);
        case Kind::zp_like: return _ramified ? ipow(_p, n) : Integer(1);
        case Kind::explicit_tree: {
          if (n <= _horizon) {
            return lookup(labels).e;
          }
          Integer leaf_e = lookup(Labels(labels.begin(),
                                         labels.begin() + _horizon))
                               .e;
          if (_metadata.behavior
              == Metadata::Behavior::chain_totally_ramified) {
            return leaf_e * ipow(_metadata.p, n - _horizon);
          }
          if (opaque()) {
            throw Error(ErrorKind::undetermined,
                        "fiber " + _label + " is undeclared beyond depth "
                            + std::to_string(_horizon));
          }
          return leaf_e;
        }
      }
      return 1;
    }

    //! From this depth on, every subtree is uniform: arity constant along
    //! paths and one value group for all its boundary points.
    [[nodiscard]] std::size_t stable_depth() const noexcept {
      switch (_kind) {
        case Kind::zp_like: return _schedule.size();
        case Kind::explicit_tree: return _horizon;
        default: return 0;
      }
    }

    //! The value group of every boundary point below a node at depth
    //! >= stable_depth().
    [[nodiscard]] std::optional<GroupShape>
    uniform_group(Labels const& labels) const {
      switch (_kind) {
        case Kind::puiseux: return GroupShape::rationals();
        case Kind::cantor:
          return _p >= 2 ? GroupShape::localized(1, _p) : GroupShape::discrete(1);
        case Kind::zp_like:
          return _ramified ? GroupShape::localized(1, _p)
                           : GroupShape::discrete(1);
        case Kind::explicit_tree: {
          Integer leaf_e
              = lookup(Labels(labels.begin(), labels.begin() + _horizon)).e;
          switch (_metadata.behavior) {
            case Metadata::Behavior::finite_fiber:
            case Metadata::Behavior::complete_splitting:
              return GroupShape::discrete(leaf_e);
            case Metadata::Behavior::chain_totally_ramified:
              return GroupShape::localized(leaf_e, _metadata.p);
            default: return std::nullopt;
          }
        }
      }
      return std::nullopt;
    }

    //! Whether the subtree below a node at depth >= stable_depth() is a chain
    //! (a single boundary point).
    [[nodiscard]] std::optional<bool>
    uniform_chain(Labels const& labels) const {
      switch (_kind) {
        case Kind::puiseux: return true;
        case Kind::cantor: return false;
        case Kind::zp_like: return true;
        case Kind::explicit_tree:
          if (opaque()) {
            return std::nullopt;
          }
          return _metadata.behavior != Metadata::Behavior::complete_splitting;
      }
      (void) labels;
      return std::nullopt;
    }

    [[nodiscard]] std::string e_rule() const {
      switch (_kind) {
        case Kind::puiseux: return "e_n = (n+1)!";
        case Kind::cantor:
          return _p >= 2 ? "e_n = " + _p.str() + "^n" : "e_n = 1";
        case Kind::zp_like:
          return _ramified ? "e_n = " + _p.str() + "^n" : "e_n = 1";
        case Kind::explicit_tree:
          switch (_metadata.behavior) {
            case Metadata::Behavior::chain_totally_ramified:
              return "listed to depth " + std::to_string(_horizon)
                     + ", then e multiplied by " + _metadata.p.str()
                     + " per level";
            case Metadata::Behavior::finite_fiber:
            case Metadata::Behavior::complete_splitting:
              return "listed to depth " + std::to_string(_horizon)
                     + ", then constant";
            default:
              return "listed to depth " + std::to_string(_horizon)
                     + ", undeclared beyond";
          }
      }
      return "?";
    }

   private:
    struct NodeInfo {
      Integer     e;
      std::size_t arity;
    };

    Fiber(std::string label, Kind kind)
        : _label(std::move(label)), _kind(kind) {}

    void flatten(ExplicitTree const&         t,
                 Labels const&               at,
                 std::optional<std::size_t>& horizon) {
      if (t.e < 1) {
        throw Error(ErrorKind::malformed_tower,
                    "explicit fiber " + _label + ": e must be >= 1 at "
                        + labels_str(at));
      }
      _nodes[at] = NodeInfo{t.e, t.children.size()};
      if (t.children.empty()) {
        if (horizon && *horizon != at.size()) {
          throw Error(ErrorKind::malformed_tower,
                      "explicit fiber " + _label
                          + ": all leaves must lie at the same depth ("
                          + labels_str(at) + ")");
        }
        horizon = at.size();
        return;
      }
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        auto const& c = t.children[i];
        if (c.e % t.e != 0) {
          throw Error(ErrorKind::malformed_tower,
                      "explicit fiber " + _label
                          + ": e(parent) must divide e(child) at "
                          + labels_str(at) + " child "
                          + std::to_string(i));
        }
        Labels next = at;
        next.push_back(static_cast<Label>(i));
        flatten(c, next, horizon);
      }
    }

    [[nodiscard]] NodeInfo const& lookup(Labels const& labels) const {
      auto it = _nodes.find(labels);
      if (it == _nodes.end()) {
        throw Error(ErrorKind::invalid_input,
                    "no node " + _label + labels_str(labels));
      }
      return it->second;
    }

    [[nodiscard]] ExplicitTree rebuild(Labels const& at) const {
      auto const&  info = lookup(at);
      ExplicitTree t;
      t.e = info.e;
      if (at.size() < _horizon) {
        for (std::size_t i = 0; i < info.arity; ++i) {
          Labels next = at;
          next.push_back(static_cast<Label>(i));
          t.children.push_back(rebuild(next));
        }
      }
      return t;
    }

    std::string              _label;
    Kind                     _kind;
    Metadata                 _metadata;
    std::size_t              _arity    = 2;
    Integer                  _p        = 0;
    bool                     _ramified = false;
    std::vector<std::size_t> _schedule;
    std::size_t              _horizon = 0;
    std::map<Labels, NodeInfo> _nodes;
  };

  inline char const* to_string(Fiber::Kind k) {
    switch (k) {
      case Fiber::Kind::puiseux: return "puiseux";
      case Fiber::Kind::cantor: return "cantor";
      case Fiber::Kind::zp_like: return "zp_like";
      case Fiber::Kind::explicit_tree: return "explicit";
    }
    return "?";
  }

  //! The whole tower: finitely many base primes, each with its fiber.
  //! Immutable after construction.
  class Tower {
   public:
    Tower() = default;
    Tower(std::string name, std::vector<Fiber> fibers)
        : _name(std::move(name)), _fibers(std::move(fibers)) {
      if (_fibers.empty()) {
        throw Error(ErrorKind::malformed_tower, "tower has no base primes");
      }
      for (std::size_t i = 0; i < _fibers.size(); ++i) {
        auto [it, inserted] = _index.emplace(_fibers[i].label(), i);
        if (!inserted) {
          throw Error(ErrorKind::malformed_tower,
                      "duplicate base prime label " + _fibers[i].label());
        }
      }
    }

    [[nodiscard]] std::string const& name() const noexcept { return _name; }
    [[nodiscard]] std::vector<Fiber> const& fibers() const noexcept {
      return _fibers;
    }

    [[nodiscard]] bool has(std::string const& label) const {
      return _index.count(label) != 0;
    }

    [[nodiscard]] Fiber const& fiber(std::string const& label) const {
      auto it = _index.find(label);
      if (it == _index.end()) {
        throw Error(ErrorKind::invalid_input, "unknown base prime " + label);
      }
      return _fibers[it->second];
    }

   private:
    std::string                        _name;
    std::vector<Fiber>                 _fibers;
    std::map<std::string, std::size_t> _index;
  };

  //! A node together with its ramification index.
  struct FiberNode {
    NodeId  id;
    Integer e;

    friend bool operator==(FiberNode const&, FiberNode const&) = default;
  };

  ////////////////////////////////////////////////////////////////////////
  // Node and path services
  ////////////////////////////////////////////////////////////////////////

  //! Throws unless every label is below the arity of its parent.
  inline void check_node(Tower const& tower, NodeId const& node) {
    Fiber const& f = tower.fiber(node.base);
    Labels       at;
    for (Label l : node.labels) {
      std::size_t a = f.arity(at);
      if (l >= a) {
        throw Error(ErrorKind::invalid_input,
                    "node " + node.str() + " does not exist: label "
                        + std::to_string(l) + " at " + labels_str(at)
                        + " exceeds arity " + std::to_string(a));
      }
      at.push_back(l);
    }
  }

  inline bool is_valid_node(Tower const& tower, NodeId const& node) {
    try {
      check_node(tower, node);
      return true;
    } catch (Error const&) {
      return false;
    }
  }

  inline FiberNode fiber_node(Tower const& tower, NodeId const& node) {
    check_node(tower, node);
    return FiberNode{node, tower.fiber(node.base).e(node.labels)};
  }

  inline std::size_t arity(Tower const& tower, NodeId const& node) {
    return tower.fiber(node.base).arity(node.labels);
  }

  inline Integer ramification(Tower const& tower, NodeId const& node) {
    return tower.fiber(node.base).e(node.labels);
  }

  //! children(node): nonempty, finite, e(node) | e(child).
  inline std::vector<FiberNode> children(Tower const&     tower,
                                         FiberNode const& node) {
    Fiber const&           f = tower.fiber(node.id.base);
    std::size_t            a = f.arity(node.id.labels);
    std::vector<FiberNode> out;
    out.reserve(a);
    for (std::size_t i = 0; i < a; ++i) {
      NodeId  c = node.id.child(static_cast<Label>(i));
      Integer e = f.e(c.labels);
      if (e % node.e != 0) {
        throw Error(ErrorKind::malformed_tower,
                    "e(parent) does not divide e(child) at " + c.str());
      }
      out.push_back(FiberNode{std::move(c), std::move(e)});
    }
    if (out.empty()) {
      throw Error(ErrorKind::malformed_tower,
                  "node " + node.id.str() + " has no children");
    }
    return out;
  }

  inline std::vector<NodeId> roots(Tower const& tower) {
    std::vector<NodeId> out;
    for (auto const& f : tower.fibers()) {
      out.push_back(NodeId{f.label(), {}});
    }
    return out;
  }

  //! All descendants of `node` at absolute depth `depth` (>= node level).
  inline std::vector<NodeId> descendants(Tower const&  tower,
                                         NodeId const& node,
                                         std::size_t   depth) {
    std::vector<NodeId> layer{node};
    Fiber const&        f = tower.fiber(node.base);
    for (std::size_t d = node.level(); d < depth; ++d) {
      std::vector<NodeId> next;
      for (auto const& n : layer) {
        std::size_t a = f.arity(n.labels);
        for (std::size_t i = 0; i < a; ++i) {
          next.push_back(n.child(static_cast<Label>(i)));
        }
      }
      layer = std::move(next);
    }
    return layer;
  }

  //! All nodes of the tower at a given depth.
  inline std::vector<NodeId> level_nodes(Tower const& tower, std::size_t depth) {
    std::vector<NodeId> out;
    for (auto const& r : roots(tower)) {
      auto d = descendants(tower, r, depth);
      out.insert(out.end(), d.begin(), d.end());
    }
    return out;
  }

  //! Throws unless the path is consistent with the branching at every depth.
  inline void check_path(Tower const& tower, PrimePath const& path) {
    Fiber const& f     = tower.fiber(path.base());
    std::size_t  check = std::max(path.prefix().size(), f.stable_depth())
                        + path.cycle().size();
    Labels at;
    for (std::size_t d = 0; d < check; ++d) {
      Label       l = path.label_at(d);
      std::size_t a = f.arity(at);
      if (l >= a) {
        throw Error(ErrorKind::invalid_input,
                    "path " + path.str() + " is inconsistent with the tree: "
                        + "label " + std::to_string(l) + " at depth "
                        + std::to_string(d) + " exceeds arity "
                        + std::to_string(a));
      }
      at.push_back(l);
    }
  }

  inline FiberNode resolve(Tower const&     tower,
                           PrimePath const& path,
                           std::size_t      depth) {
    check_path(tower, path);
    return fiber_node(tower, path.node_at(depth));
  }

  //! v_P(L^x) for the point `path`.
  inline ValueGroupDescriptor value_group(Tower const&     tower,
                                          PrimePath const& path) {
    check_path(tower, path);
    Fiber const& f     = tower.fiber(path.base());
    auto         shape = f.uniform_group(path.node_at(f.stable_depth()).labels);
    if (!shape) {
      throw Error(ErrorKind::undetermined,
                  "value group of " + path.str()
                      + " needs metadata for base prime " + f.label());
    }
    return ValueGroupDescriptor{*shape, f.e_rule()};
  }

  //! Cardinality of the set of boundary points below a node.
  struct PointCount {
    enum class Kind { finite, infinite, unknown };
    Kind        kind = Kind::unknown;
    std::size_t n    = 0;

    [[nodiscard]] bool known() const { return kind != Kind::unknown; }
    [[nodiscard]] bool is_finite() const { return kind == Kind::finite; }
    [[nodiscard]] std::string str() const {
      switch (kind) {
        case Kind::finite: return std::to_string(n);
        case Kind::infinite: return "inf";
        case Kind::unknown: return "unknown";
      }
      return "?";
    }
  };

  inline PointCount point_count(Tower const& tower, NodeId const& node) {
    Fiber const& f      = tower.fiber(node.base);
    std::size_t  stable = std::max(f.stable_depth(), node.level());
    PointCount   total{PointCount::Kind::finite, 0};
    for (auto const& d : descendants(tower, node, stable)) {
      auto chain = f.uniform_chain(d.labels);
      if (!chain) {
        return PointCount{};
      }
      if (!*chain) {
        total = PointCount{PointCount::Kind::infinite, 0};
      } else if (total.is_finite()) {
        ++total.n;
      }
    }
    return total;
  }

  //! Value groups occurring below a node (deduplicated), or nullopt if
  //! undetermined.
  inline std::optional<std::vector<GroupShape>>
  groups_below(Tower const& tower, NodeId const& node) {
    Fiber const&            f      = tower.fiber(node.base);
    std::size_t             stable = std::max(f.stable_depth(), node.level());
    std::vector<GroupShape> out;
    for (auto const& d : descendants(tower, node, stable)) {
      auto g = f.uniform_group(d.labels);
      if (!g) {
        return std::nullopt;
      }
      if (std::find(out.begin(), out.end(), *g) == out.end()) {
        out.push_back(*g);
      }
    }
    return out;
  }

  //! Smallest depth d at which the node of `path` has the path as its only
  //! boundary point; nullopt if the point is not isolated.
  inline std::optional<std::size_t> isolation_depth(Tower const&     tower,
                                                    PrimePath const& path) {
    Fiber const& f     = tower.fiber(path.base());
    std::size_t  limit = std::max(f.stable_depth(), path.prefix().size());
    for (std::size_t d = 0; d <= limit; ++d) {
      PointCount c = point_count(tower, path.node_at(d));
      if (!c.known()) {
        throw Error(ErrorKind::undetermined,
                    "cannot decide whether " + path.str()
                        + " is isolated: metadata missing for base prime "
                        + f.label());
      }
      if (c.is_finite() && c.n == 1) {
        return d;
      }
      if (c.kind == PointCount::Kind::infinite && d >= f.stable_depth()) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  inline std::optional<bool> fiber_is_finite(Tower const&       tower,
                                             std::string const& label) {
    return tower.fiber(label).metadata().finite();
  }

  //! Finite character, i.e. discreteness of m-Spec: every fiber finite.
  inline std::optional<bool> is_finite_character(Tower const& tower) {
    bool unknown = false;
    for (auto const& f : tower.fibers()) {
      auto fin = f.metadata().finite();
      if (!fin) {
        unknown = true;
      } else if (!*fin) {
        return false;
      }
    }
    if (unknown) {
      return std::nullopt;
    }
    return true;
  }

  ////////////////////////////////////////////////////////////////////////
  // Built-in towers
  ////////////////////////////////////////////////////////////////////////

  namespace builtin {

    inline Tower puiseux() {
      return Tower("puiseux", {Fiber::puiseux("P")});
    }

    inline Tower cantor() { return Tower("cantor", {Fiber::cantor("c")}); }

    //! Complete binary splitting with e_n = 2^n: infinite fiber and dense
    //! value group at every point.
    inline Tower cantor_ramified() {
      return Tower("cantor_ramified", {Fiber::cantor("c", 2, 2)});
    }

    //! A Z_p-like tower: `p` totally ramified, the other listed primes
    //! unramified, each splitting completely for finitely many levels.
    inline Tower zp_like(Integer p = 2) {
      std::vector<Fiber> fibers{Fiber::zp_like(p.str(), p, true, {})};
      std::vector<std::vector<std::size_t>> schedules{{1, 2}, {2}, {2, 1, 2}};
      std::size_t next = 0;
      for (int l : {3, 5, 7, 11}) {
        if (next == schedules.size()) {
          break;
        }
        if (Integer(l) == p) {
          continue;
        }
        fibers.push_back(
            Fiber::zp_like(std::to_string(l), p, false, schedules[next++]));
      }
      return Tower("zp_like", std::move(fibers));
    }

  }  // namespace builtin

}  // namespace fracideal
