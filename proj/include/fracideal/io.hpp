#pragma once

// JSON reading and writing for towers, functions, ideals and automorphisms.
//
// Files refer to their tower with "tower": either "builtin:NAME" (puiseux,
// cantor, cantor_ramified, zp_like, zp_like:P) or a path relative to the
// referencing file, or an inline tower object. A Workspace loads every tower
// once, so objects read from different files share the same tower exactly
// when they name the same tower.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "galois.hpp"
#include "ideal.hpp"
#include "rational.hpp"
#include "rtilde.hpp"
#include "tower.hpp"
#include "uscfn.hpp"

namespace fracideal::io {

  using json = nlohmann::json;

  ////////////////////////////////////////////////////////////////////////
  // Scalars
  ////////////////////////////////////////////////////////////////////////

  inline Integer integer_from_json(json const& j, std::string const& what) {
    if (j.is_number_integer()) {
      return Integer(j.get<long long>());
    }
    if (j.is_string()) {
      try {
        return Integer(j.get<std::string>());
      } catch (std::exception const&) {
      }
    }
    throw Error(ErrorKind::invalid_input, what + ": expected an integer, got "
                                              + j.dump());
  }

  inline json integer_to_json(Integer const& n) {
    if (fits_int64(n)) {
      return json(static_cast<long long>(n));
    }
    return json(n.str());
  }

  //! [num, den], a bare integer, or a string "a/b".
  inline Rational rational_from_json(json const& j, std::string const& what) {
    if (j.is_array() && j.size() == 2) {
      Integer d = integer_from_json(j[1], what);
      if (d == 0) {
        throw Error(ErrorKind::invalid_input, what + ": zero denominator");
      }
      return make_rational(integer_from_json(j[0], what), d);
    }
    if (j.is_string()) {
      auto s     = j.get<std::string>();
      auto slash = s.find('/');
      if (slash != std::string::npos) {
        return rational_from_json(
            json::array({s.substr(0, slash), s.substr(slash + 1)}), what);
      }
    }
    return Rational(integer_from_json(j, what));
  }

  inline json rational_to_json(Rational const& q) {
    return json::array({integer_to_json(num(q)), integer_to_json(den(q))});
  }

  //! [num, den, flag] with flag 0 or 1.
  inline RTilde rtilde_from_json(json const& j, std::string const& what) {
    if (!j.is_array() || j.size() != 3) {
      throw Error(ErrorKind::invalid_input,
                  what + ": R~ value must be [num, den, flag], got " + j.dump());
    }
    Integer flag = integer_from_json(j[2], what);
    if (flag != 0 && flag != 1) {
      throw Error(ErrorKind::invalid_input, what + ": flag must be 0 or 1");
    }
    return RTilde(rational_from_json(json::array({j[0], j[1]}), what),
                  flag == 1);
  }

  inline json rtilde_to_json(RTilde const& v) {
    return json::array({integer_to_json(num(v.magnitude())),
                        integer_to_json(den(v.magnitude())),
                        v.flag() ? 1 : 0});
  }

  inline Labels labels_from_json(json const& j, std::string const& what) {
    if (!j.is_array()) {
      throw Error(ErrorKind::invalid_input, what + ": expected a label list");
    }
    Labels out;
    for (auto const& x : j) {
      if (!x.is_number_integer() || x.get<long long>() < 0) {
        throw Error(ErrorKind::invalid_input,
                    what + ": labels must be nonnegative integers");
      }
      out.push_back(static_cast<Label>(x.get<long long>()));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Towers
  ////////////////////////////////////////////////////////////////////////

  inline Metadata metadata_from_json(json const& j, std::string const& label) {
    if (!j.is_object() || !j.contains("behavior")) {
      throw Error(ErrorKind::malformed_tower,
                  "metadata of " + label + " needs a \"behavior\" field");
    }
    auto b = j["behavior"].get<std::string>();
    if (b == "finite_fiber") {
      return Metadata::finite_fiber(j.value("bound", std::size_t{0}));
    }
    if (b == "chain_totally_ramified") {
      return Metadata::chain_totally_ramified(
          integer_from_json(j.at("p"), "metadata p of " + label));
    }
    if (b == "complete_splitting") {
      return Metadata::complete_splitting(j.value("arity", std::size_t{2}));
    }
    if (b == "explicit_horizon") {
      return Metadata::explicit_horizon(j.at("depth").get<std::size_t>());
    }
    if (b == "undeclared") {
      return Metadata{};
    }
    throw Error(ErrorKind::malformed_tower,
                "unknown metadata behavior \"" + b + "\" for " + label);
  }

  inline json metadata_to_json(Metadata const& m) {
    json j;
    j["behavior"] = to_string(m.behavior);
    switch (m.behavior) {
      case Metadata::Behavior::finite_fiber: j["bound"] = m.bound; break;
      case Metadata::Behavior::chain_totally_ramified:
        j["p"] = integer_to_json(m.p);
        break;
      case Metadata::Behavior::complete_splitting: j["arity"] = m.arity; break;
      case Metadata::Behavior::explicit_horizon: j["depth"] = m.depth; break;
      case Metadata::Behavior::undeclared: break;
    }
    return j;
  }

  inline ExplicitTree explicit_tree_from_json(json const& j) {
    ExplicitTree t;
    if (!j.is_object()) {
      throw Error(ErrorKind::malformed_tower, "explicit tree node must be an object");
    }
    t.e = j.contains("e") ? integer_from_json(j["e"], "tree e") : Integer(1);
    if (j.contains("children")) {
      for (auto const& c : j["children"]) {
        t.children.push_back(explicit_tree_from_json(c));
      }
    }
    return t;
  }

  inline json explicit_tree_to_json(ExplicitTree const& t) {
    json j;
    j["e"] = integer_to_json(t.e);
    if (!t.children.empty()) {
      j["children"] = json::array();
      for (auto const& c : t.children) {
        j["children"].push_back(explicit_tree_to_json(c));
      }
    }
    return j;
  }

  inline bool same_metadata(Metadata const& a, Metadata const& b) {
    if (a.behavior != b.behavior) {
      return false;
    }
    switch (a.behavior) {
      case Metadata::Behavior::finite_fiber: return a.bound == b.bound;
      case Metadata::Behavior::chain_totally_ramified: return a.p == b.p;
      case Metadata::Behavior::complete_splitting: return a.arity == b.arity;
      case Metadata::Behavior::explicit_horizon: return a.depth == b.depth;
      case Metadata::Behavior::undeclared: return true;
    }
    return false;
  }

  inline Fiber fiber_from_json(json const& j) {
    if (!j.is_object() || !j.contains("label") || !j.contains("kind")) {
      throw Error(ErrorKind::malformed_tower,
                  "each base prime needs \"label\" and \"kind\"");
    }
    auto        label  = j["label"].get<std::string>();
    auto        kind   = j["kind"].get<std::string>();
    json const  params = j.value("params", json::object());
    std::optional<Metadata> declared;
    if (j.contains("metadata")) {
      declared = metadata_from_json(j["metadata"], label);
    }
    auto built = [&]() -> Fiber {
      if (kind == "puiseux") {
        return Fiber::puiseux(label);
      }
      if (kind == "cantor") {
        return Fiber::cantor(label, params.value("arity", std::size_t{2}),
                             params.contains("ramify")
                                 ? integer_from_json(params["ramify"], "ramify")
                                 : Integer(0));
      }
      if (kind == "zp_like") {
        std::vector<std::size_t> schedule;
        if (params.contains("split_schedule")) {
          schedule = params["split_schedule"].get<std::vector<std::size_t>>();
        }
        return Fiber::zp_like(
            label, integer_from_json(params.value("p", json(2)), "p"),
            params.value("ramified", false), schedule);
      }
      if (kind == "explicit") {
        json tree = params.contains("tree") ? params["tree"] : j.value("tree", json());
        if (tree.is_null()) {
          throw Error(ErrorKind::malformed_tower,
                      "explicit fiber " + label + " needs a \"tree\"");
        }
        return Fiber::explicit_tree(label, explicit_tree_from_json(tree),
                                    declared.value_or(Metadata{}));
      }
      throw Error(ErrorKind::malformed_tower,
                  "unknown fiber kind \"" + kind + "\" for " + label);
    }();
    if (declared && kind != "explicit"
        && !same_metadata(*declared, built.metadata())) {
      throw Error(ErrorKind::malformed_tower,
                  "declared metadata of " + label
                      + " contradicts its generator (generator implies "
                      + metadata_to_json(built.metadata()).dump() + ")");
    }
    return built;
  }

  inline json fiber_to_json(Fiber const& f) {
    json j;
    j["label"] = f.label();
    json params = json::object();
    switch (f.kind()) {
      case Fiber::Kind::puiseux: j["kind"] = "puiseux"; break;
      case Fiber::Kind::cantor:
        j["kind"]       = "cantor";
        params["arity"] = f.cantor_arity();
        if (f.p() != 0) {
          params["ramify"] = integer_to_json(f.p());
        }
        break;
      case Fiber::Kind::zp_like:
        j["kind"]                = "zp_like";
        params["p"]              = integer_to_json(f.p());
        params["ramified"]       = f.ramified();
        params["split_schedule"] = f.split_schedule();
        break;
      case Fiber::Kind::explicit_tree:
        j["kind"]      = "explicit";
        params["tree"] = explicit_tree_to_json(f.explicit_tree_data());
        break;
    }
    j["params"]   = params;
    j["metadata"] = metadata_to_json(f.metadata());
    return j;
  }

  inline Tower tower_from_json(json const& j, std::string name = "tower") {
    if (!j.is_object() || !j.contains("base_primes")
        || !j["base_primes"].is_array()) {
      throw Error(ErrorKind::malformed_tower,
                  "tower file needs a \"base_primes\" list");
    }
    std::vector<Fiber> fibers;
    for (auto const& b : j["base_primes"]) {
      fibers.push_back(fiber_from_json(b));
    }
    return Tower(j.value("name", name), std::move(fibers));
  }

  inline json tower_to_json(Tower const& t) {
    json j;
    j["name"]        = t.name();
    j["base_primes"] = json::array();
    for (auto const& f : t.fibers()) {
      j["base_primes"].push_back(fiber_to_json(f));
    }
    return j;
  }

  inline std::optional<Tower> builtin_tower(std::string const& name) {
    if (name == "puiseux") {
      return builtin::puiseux();
    }
    if (name == "cantor") {
      return builtin::cantor();
    }
    if (name == "cantor_ramified") {
      return builtin::cantor_ramified();
    }
    if (name == "zp_like") {
      return builtin::zp_like(2);
    }
    if (name.rfind("zp_like:", 0) == 0) {
      return builtin::zp_like(Integer(name.substr(8)));
    }
    return std::nullopt;
  }

  ////////////////////////////////////////////////////////////////////////
  // Nodes and paths
  ////////////////////////////////////////////////////////////////////////

  //! {"base": b, "labels": [...]}, or a bare label list on a tower with a
  //! single base prime.
  inline NodeId node_from_json(json const& j, Tower const& tower) {
    if (j.is_array()) {
      if (tower.fibers().size() != 1) {
        throw Error(ErrorKind::invalid_input,
                    "bare label list " + j.dump()
                        + " needs a base prime: tower has several");
      }
      return NodeId{tower.fibers().front().label(), labels_from_json(j, "node")};
    }
    if (!j.is_object() || !j.contains("base")) {
      throw Error(ErrorKind::invalid_input, "malformed node " + j.dump());
    }
    return NodeId{j["base"].get<std::string>(),
                  labels_from_json(j.value("labels", json::array()), "node")};
  }

  inline json node_to_json(NodeId const& n) {
    return json{{"base", n.base}, {"labels", n.labels}};
  }

  inline PrimePath path_from_json(json const& j, Tower const& tower) {
    if (!j.is_object()) {
      throw Error(ErrorKind::invalid_input, "malformed path " + j.dump());
    }
    std::string base;
    if (j.contains("base")) {
      base = j["base"].get<std::string>();
    } else if (tower.fibers().size() == 1) {
      base = tower.fibers().front().label();
    } else {
      throw Error(ErrorKind::invalid_input,
                  "path " + j.dump() + " needs a base prime");
    }
    Labels prefix = labels_from_json(j.value("prefix", json::array()), "path");
    Labels cycle{0};
    if (j.contains("continuation")) {
      auto const& c = j["continuation"];
      if (c.is_string() && c.get<std::string>() == "canonical") {
      } else if (c.is_object() && c.contains("periodic")) {
        cycle = labels_from_json(c["periodic"], "periodic word");
      } else {
        throw Error(ErrorKind::invalid_input,
                    "continuation must be \"canonical\" or {\"periodic\": [...]}");
      }
    }
    return PrimePath(base, prefix, cycle);
  }

  inline json path_to_json(PrimePath const& p) {
    json j{{"base", p.base()}, {"prefix", p.prefix()}};
    if (p.is_canonical()) {
      j["continuation"] = "canonical";
    } else {
      j["continuation"] = json{{"periodic", p.cycle()}};
    }
    return j;
  }

  inline PrimePath parse_path_arg(std::string const& s, Tower const& tower) {
    json j;
    try {
      j = json::parse(s);
    } catch (json::exception const& e) {
      throw Error(ErrorKind::invalid_input,
                  "path argument is not JSON: " + std::string(e.what()));
    }
    if (j.is_array()) {
      j = json{{"prefix", j}};
    }
    return path_from_json(j, tower);
  }

  ////////////////////////////////////////////////////////////////////////
  // Functions, ideals, automorphisms
  ////////////////////////////////////////////////////////////////////////

  inline UscFunction function_from_json(json const& j, TowerPtr tower) {
    if (!j.is_object()) {
      throw Error(ErrorKind::invalid_input, "function payload must be an object");
    }
    std::size_t        level = j.value("level", std::size_t{0});
    UscFunction::Cells cells;
    for (auto const& c : j.value("cells", json::array())) {
      NodeId node = node_from_json(c.at("node"), *tower);
      if (!cells.emplace(node, rtilde_from_json(c.at("value"), "cell " + node.str()))
               .second) {
        throw Error(ErrorKind::invalid_input, "cell " + node.str() + " listed twice");
      }
    }
    UscFunction::Points points;
    for (auto const& p : j.value("exceptional", json::array())) {
      PrimePath path = path_from_json(p.at("path"), *tower);
      if (!points.emplace(path, rtilde_from_json(p.at("value"), "point " + path.str()))
               .second) {
        throw Error(ErrorKind::invalid_input,
                    "exceptional point " + path.str() + " listed twice");
      }
    }
    return UscFunction(std::move(tower), level, std::move(cells), std::move(points));
  }

  inline json function_to_json(UscFunction const& f, std::string const& tower_ref) {
    json j;
    j["tower"] = tower_ref;
    j["level"] = f.level();
    j["cells"] = json::array();
    for (auto const& [node, v] : f.cells()) {
      j["cells"].push_back(json{{"node", node_to_json(node)}, {"value", rtilde_to_json(v)}});
    }
    j["exceptional"] = json::array();
    for (auto const& [path, v] : f.exceptional()) {
      j["exceptional"].push_back(
          json{{"path", path_to_json(path)}, {"value", rtilde_to_json(v)}});
    }
    return j;
  }

  inline LevelExponentIdeal exponents_from_json(json const& j, TowerPtr tower) {
    LevelExponentIdeal::Map map;
    for (auto const& e : j.value("exponents", json::array())) {
      NodeId node = node_from_json(e.at("node"), *tower);
      map[node]   = rational_from_json(e.at("value"), "exponent at " + node.str());
    }
    return LevelExponentIdeal(tower, j.value("level", std::size_t{0}), std::move(map));
  }

  inline json exponents_to_json(LevelExponentIdeal const& E) {
    json j;
    j["level"]     = E.level();
    j["exponents"] = json::array();
    for (auto const& [node, a] : E.exponents()) {
      j["exponents"].push_back(
          json{{"node", node_to_json(node)}, {"value", rational_to_json(a)}});
    }
    return j;
  }

  //! The function payload may sit at the top level or under "fn"; with only
  //! "exponents" the ideal is built from them.
  inline FractionalIdeal ideal_from_json(json const& j, TowerPtr tower) {
    std::optional<LevelExponentIdeal> prov;
    if (j.contains("exponents")) {
      prov = exponents_from_json(j["exponents"], tower);
    }
    json const* fn = nullptr;
    if (j.contains("fn")) {
      fn = &j["fn"];
    } else if (j.contains("cells") || j.contains("exceptional") || j.contains("level")) {
      fn = &j;
    }
    if (fn == nullptr) {
      if (!prov) {
        throw Error(ErrorKind::invalid_input,
                    "ideal file needs a function payload or \"exponents\"");
      }
      return from_exponents(*prov);
    }
    FractionalIdeal I(function_from_json(*fn, tower), prov);
    if (prov && !(from_exponents(*prov) == I)) {
      throw Error(ErrorKind::invalid_input,
                  "the \"exponents\" provenance does not induce the given function");
    }
    return I;
  }

  inline json ideal_to_json(FractionalIdeal const& I, std::string const& tower_ref) {
    json j = function_to_json(I.fn(), tower_ref);
    if (I.provenance()) {
      j["exponents"] = exponents_to_json(*I.provenance());
    }
    return j;
  }

  //! {"fibers": [{"base": b, "levels": [[rule, ...], ...]}]} where level n
  //! lists rules {"node": [labels], "perm": [...]} or {"all": [...]}.
  inline TowerAutomorphism automorphism_from_json(json const& j, TowerPtr tower) {
    std::map<std::string, Portrait> portraits;
    for (auto const& fj : j.value("fibers", json::array())) {
      std::string base;
      if (fj.contains("base")) {
        base = fj["base"].get<std::string>();
      } else if (tower->fibers().size() == 1) {
        base = tower->fibers().front().label();
      } else {
        throw Error(ErrorKind::invalid_input, "automorphism fiber needs \"base\"");
      }
      Portrait&   p      = portraits[base];
      auto const& levels = fj.value("levels", json::array());
      for (std::size_t lvl = 0; lvl < levels.size(); ++lvl) {
        auto rules = levels[lvl];
        if (rules.is_object()) {
          rules = json::array({rules});
        }
        for (auto const& r : rules) {
          if (r.contains("all")) {
            p.levels[lvl] = labels_from_json(r["all"], "permutation");
            continue;
          }
          Labels at = labels_from_json(r.value("node", json::array()), "node");
          if (at.size() != lvl) {
            throw Error(ErrorKind::invalid_input,
                        "rule for node " + labels_str(at) + " listed at level "
                            + std::to_string(lvl));
          }
          p.nodes[at] = labels_from_json(r.at("perm"), "permutation");
        }
      }
    }
    return TowerAutomorphism(std::move(tower), std::move(portraits));
  }

  inline json automorphism_to_json(TowerAutomorphism const& s,
                                   std::string const&       tower_ref) {
    json j;
    j["tower"]  = tower_ref;
    j["fibers"] = json::array();
    for (auto const& [base, p] : s.portraits()) {
      json levels = json::array();
      for (std::size_t lvl = 0; lvl < p.depth(); ++lvl) {
        json rules = json::array();
        if (auto it = p.levels.find(lvl); it != p.levels.end()) {
          rules.push_back(json{{"all", it->second}});
        }
        for (auto const& [at, perm] : p.nodes) {
          if (at.size() == lvl) {
            rules.push_back(json{{"node", at}, {"perm", perm}});
          }
        }
        levels.push_back(rules);
      }
      j["fibers"].push_back(json{{"base", base}, {"levels", levels}});
    }
    return j;
  }

  ////////////////////////////////////////////////////////////////////////
  // Workspace
  ////////////////////////////////////////////////////////////////////////

  inline json read_json_file(std::filesystem::path const& path) {
    std::ifstream in(path);
    if (!in) {
      throw Error(ErrorKind::invalid_input, "cannot open " + path.string());
    }
    try {
      return json::parse(in);
    } catch (json::exception const& e) {
      throw Error(ErrorKind::invalid_input,
                  path.string() + " is not valid JSON: " + e.what());
    }
  }

  //! Loaded objects, all sharing one tower.
  class Workspace {
   public:
    //! A tower reference: "builtin:NAME", a tower file, or an inline object.
    TowerPtr tower(json const& ref, std::filesystem::path const& base_dir = ".") {
      std::string key;
      json        body;
      if (ref.is_string()) {
        auto s = ref.get<std::string>();
        if (s.rfind("builtin:", 0) == 0) {
          key = s;
        } else {
          auto p = std::filesystem::weakly_canonical(base_dir / s);
          key    = p.string();
          if (!_towers.count(key)) {
            body = read_json_file(p);
          }
        }
      } else if (ref.is_object()) {
        key  = "inline:" + ref.dump();
        body = ref;
      } else {
        throw Error(ErrorKind::invalid_input, "malformed tower reference " + ref.dump());
      }
      if (auto it = _towers.find(key); it != _towers.end()) {
        return adopt(it->second);
      }
      TowerPtr t;
      if (key.rfind("builtin:", 0) == 0) {
        auto b = builtin_tower(key.substr(8));
        if (!b) {
          throw Error(ErrorKind::invalid_input, "unknown built-in tower " + key);
        }
        t = std::make_shared<Tower const>(std::move(*b));
      } else {
        t = std::make_shared<Tower const>(tower_from_json(body));
      }
      _towers.emplace(key, t);
      _refs[t.get()] = ref.is_string() ? ref.get<std::string>() : key;
      return adopt(t);
    }

    //! A tower file (or "builtin:NAME") given on the command line.
    TowerPtr tower_arg(std::string const& arg) {
      if (arg.rfind("builtin:", 0) == 0) {
        return tower(json(arg));
      }
      auto p = std::filesystem::path(arg);
      return tower(json(p.filename().string()), p.parent_path());
    }

    UscFunction function(std::filesystem::path const& path) {
      json j = read_json_file(path);
      return function_from_json(j, tower_of(j, path));
    }

    FractionalIdeal ideal(std::filesystem::path const& path) {
      json j = read_json_file(path);
      return ideal_from_json(j, tower_of(j, path));
    }

    TowerAutomorphism automorphism(std::filesystem::path const& path) {
      json j = read_json_file(path);
      return automorphism_from_json(j, tower_of(j, path));
    }

    ElementVector element(std::filesystem::path const& path) {
      json                j = read_json_file(path);
      TowerPtr            t = tower_of(j, path);
      ElementVector::Map  values;
      for (auto const& e : j.value("values", json::array())) {
        NodeId node  = node_from_json(e.at("node"), *t);
        values[node] = rational_from_json(e.at("value"), "valuation at " + node.str());
      }
      return ElementVector(t, j.value("level", std::size_t{0}), std::move(values));
    }

    [[nodiscard]] std::string ref(TowerPtr const& t) const {
      auto it = _refs.find(t.get());
      return it == _refs.end() ? t->name() : it->second;
    }

    [[nodiscard]] TowerPtr const& current() const noexcept { return _current; }

   private:
    TowerPtr tower_of(json const& j, std::filesystem::path const& path) {
      if (!j.contains("tower")) {
        throw Error(ErrorKind::invalid_input,
                    path.string() + " has no \"tower\" reference");
      }
      return tower(j["tower"], path.parent_path());
    }

    TowerPtr adopt(TowerPtr t) {
      if (_current && _current != t) {
        throw Error(ErrorKind::tower_mismatch,
                    "objects reference different towers (" + ref(_current)
                        + " and " + ref(t) + ")");
      }
      _current = t;
      return t;
    }

    std::map<std::string, TowerPtr>       _towers;
    std::map<Tower const*, std::string>   _refs;
    TowerPtr                              _current;
  };

}  // namespace fracideal::io
