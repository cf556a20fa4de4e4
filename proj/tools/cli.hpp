#pragma once

// The fracideal command line. run() is separate from main() so tests can
// drive it with captured streams.
//
// Exit codes: 0 success, 1 invalid input (unreadable or malformed files,
// bad arguments, mismatched towers), 2 invariant failure (an INVALID
// function, a non-invertible or non-regular ideal where one is required,
// an exceeded orbit bound, an undecidable query, a failing suite).

#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracideal/check/oracles.hpp"
#include "fracideal/check/suites.hpp"
#include "fracideal/classgrp.hpp"
#include "fracideal/galois.hpp"
#include "fracideal/ideal.hpp"
#include "fracideal/io.hpp"

namespace fracideal::cli {

  using json = nlohmann::json;

  namespace detail {

    struct Options {
      std::string              format = "table";
      std::vector<std::string> files;
      std::size_t              depth        = 3;
      std::optional<std::size_t> level;
      bool                     alpha_literal = false;
      std::string              path;
      std::size_t              bound = 64;
      std::string              suite = "all";
      std::uint64_t            seed  = 1;
      std::optional<std::size_t> cases;
    };

    inline int exit_code(ErrorKind k) {
      switch (k) {
        case ErrorKind::invalid_input:
        case ErrorKind::malformed_tower:
        case ErrorKind::tower_mismatch: return 1;
        default: return 2;
      }
    }

    class Runner {
     public:
      Runner(Options const& o, std::ostream& out) : _o(o), _out(out) {}

      bool json_out() const { return _o.format == "json"; }

      void emit(json const& j) { _out << j.dump(2) << "\n"; }

      std::string ref() { return _ws.ref(_ws.current()); }

      std::string const& file(std::size_t i) const {
        if (i >= _o.files.size()) {
          throw Error(ErrorKind::invalid_input,
                      "missing file argument #" + std::to_string(i + 1));
        }
        return _o.files[i];
      }

      void show_function(UscFunction const& f) {
        if (json_out()) {
          emit(io::function_to_json(f, ref()));
        } else {
          _out << f.str() << "\n";
        }
      }

      void show_ideal(FractionalIdeal const& I) {
        if (json_out()) {
          emit(io::ideal_to_json(I, ref()));
        } else {
          _out << I.fn().str() << "\n";
        }
      }

      // tower ------------------------------------------------------------

      int tower_validate() {
        TowerPtr t = _ws.tower_arg(file(0));
        // exercise every node to one level past the stable depth
        for (auto const& f : t->fibers()) {
          if (!f.opaque()) {
            descendants(*t, NodeId{f.label(), {}}, f.stable_depth() + 1);
          }
        }
        if (json_out()) {
          emit(json{{"valid", true}, {"tower", io::tower_to_json(*t)}});
        } else {
          _out << "valid: " << t->fibers().size() << " base prime(s)\n";
        }
        return 0;
      }

      int tower_show() {
        TowerPtr t = _ws.tower_arg(file(0));
        json     j;
        j["tower"] = io::tower_to_json(*t);
        j["nodes"] = json::array();
        std::ostringstream table;
        table << std::left << std::setw(24) << "node" << std::setw(12) << "e"
              << "children\n";
        for (auto const& f : t->fibers()) {
          std::vector<NodeId> frontier{NodeId{f.label(), {}}};
          for (std::size_t d = 0; d <= _o.depth; ++d) {
            std::vector<NodeId> next;
            for (auto const& n : frontier) {
              Integer     e = ramification(*t, n);
              std::string kids;
              try {
                kids = std::to_string(arity(*t, n));
              } catch (Error const& err) {
                if (err.kind() != ErrorKind::undetermined) {
                  throw;
                }
                kids = "undetermined";
              }
              j["nodes"].push_back(
                  json{{"node", io::node_to_json(n)}, {"e", io::integer_to_json(e)}, {"children", kids}});
              table << std::setw(24) << n.str() << std::setw(12) << e.str() << kids << "\n";
              if (d < _o.depth && kids != "undetermined") {
                for (std::size_t i = 0; i < arity(*t, n); ++i) {
                  next.push_back(n.child(static_cast<Label>(i)));
                }
              }
            }
            frontier = std::move(next);
          }
        }
        j["fibers"] = json::array();
        table << "\n";
        for (auto const& f : t->fibers()) {
          json row{{"base", f.label()}, {"e_rule", f.e_rule()},
                   {"metadata", io::metadata_to_json(f.metadata())},
                   {"stable_depth", f.stable_depth()}};
          auto fin = fiber_is_finite(*t, f.label());
          row["finite"] = fin ? json(*fin) : json("unknown");
          j["fibers"].push_back(row);
          table << f.label() << ": " << f.e_rule() << ", metadata "
                << to_string(f.metadata().behavior) << ", finite fiber "
                << (fin ? (*fin ? "yes" : "no") : "unknown") << "\n";
        }
        if (json_out()) {
          emit(j);
        } else {
          _out << table.str();
        }
        return 0;
      }

      // fn ---------------------------------------------------------------

      int fn_validate() {
        UscFunction f = _ws.function(file(0));
        Validation  v = validate(f);
        if (json_out()) {
          emit(json{{"classification", to_string(v.classification)},
                    {"reason", v.reason},
                    {"canonical", v.valid() ? io::function_to_json(canonicalize(f), ref()) : json()}});
        } else {
          _out << to_string(v.classification);
          if (!v.valid()) {
            _out << ": " << v.reason;
          }
          _out << "\n";
        }
        return v.valid() ? 0 : 2;
      }

      int fn_add() {
        UscFunction f = _ws.function(file(0));
        UscFunction g = _ws.function(file(1));
        show_function(add(f, g));
        return 0;
      }

      int fn_eval() {
        UscFunction f = _ws.function(file(0));
        if (_o.path.empty()) {
          throw Error(ErrorKind::invalid_input, "fn eval needs --path");
        }
        PrimePath p = io::parse_path_arg(_o.path, f.tower());
        RTilde    v = evaluate(f, p);
        if (json_out()) {
          emit(json{{"path", io::path_to_json(p)}, {"value", io::rtilde_to_json(v)}});
        } else {
          _out << v.str() << "\n";
        }
        return 0;
      }

      // ideal ------------------------------------------------------------

      int ideal_classify() {
        FractionalIdeal I = _ws.ideal(file(0));
        IdealClass      c = classify(I);
        if (json_out()) {
          emit(json{{"class", to_string(c)},
                    {"function", to_string(I.classification())},
                    {"idempotent", is_idempotent(I)}});
        } else {
          _out << to_string(c) << "\n";
        }
        return 0;
      }

      int ideal_mul() {
        FractionalIdeal I = _ws.ideal(file(0));
        FractionalIdeal J = _ws.ideal(file(1));
        show_ideal(multiply(I, J));
        return 0;
      }

      int ideal_inverse() {
        show_ideal(inverse(_ws.ideal(file(0))));
        return 0;
      }

      int ideal_witness() {
        show_ideal(regular_witness(_ws.ideal(file(0))));
        return 0;
      }

      int ideal_contains() {
        FractionalIdeal I = _ws.ideal(file(0));
        ElementVector   x = _ws.element(file(1));
        bool            c = contains(I, x);
        if (json_out()) {
          emit(json{{"contains", c}});
        } else {
          _out << (c ? "true" : "false") << "\n";
        }
        return 0;
      }

      int ideal_intersect() {
        FractionalIdeal I = _ws.ideal(file(0));
        if (!_o.level) {
          throw Error(ErrorKind::invalid_input, "ideal intersect needs --level");
        }
        LevelExponentIdeal E = intersect_level(I, *_o.level, _o.alpha_literal);
        if (json_out()) {
          json j          = io::exponents_to_json(E);
          j["tower"]      = ref();
          j["alpha_rule"] = _o.alpha_literal ? "literal" : "per-point";
          emit(j);
        } else {
          _out << E.str() << "\n";
        }
        return 0;
      }

      // class ------------------------------------------------------------

      int class_eq_cmd() {
        FractionalIdeal I = _ws.ideal(file(0));
        FractionalIdeal J = _ws.ideal(file(1));
        auto            r = class_eq_explained(I.fn(), J.fn());
        if (json_out()) {
          emit(json{{"result", to_string(r.result)}, {"reason", r.reason}});
        } else {
          _out << to_string(r.result);
          if (!r.reason.empty()) {
            _out << ": " << r.reason;
          }
          _out << "\n";
        }
        return r.result == ClassEq::undecided ? 2 : 0;
      }

      int class_canon() {
        FractionalIdeal I = _ws.ideal(file(0));
        ClassDescriptor d = class_descriptor(I);
        json            residues = json::array();
        std::ostringstream table;
        for (auto const& r : d.residues) {
          residues.push_back(json{{"at", r.where}, {"group", r.group.str()},
                                  {"residue", io::rational_to_json(r.residue)}});
          table << "  " << r.where << ": " << to_string(r.residue) << " mod "
                << r.group.str() << "\n";
        }
        if (json_out()) {
          emit(json{{"flag_pattern", d.flag_pattern()},
                    {"residues", residues},
                    {"representative", io::function_to_json(d.representative, ref())},
                    {"comparison_only", d.comparison_only},
                    {"note", d.note}});
        } else {
          _out << (d.trivial() ? "trivial class" : "class of " + d.representative.str())
               << (d.comparison_only ? " (comparison only: " + d.note + ")" : "") << "\n";
          auto flags = d.flag_pattern();
          if (!flags.empty()) {
            _out << "flag pattern:";
            for (auto const& s : flags) {
              _out << " " << s;
            }
            _out << "\n";
          }
          _out << table.str();
        }
        return 0;
      }

      int class_summands() {
        TowerPtr      t = _ws.tower_arg(file(0));
        SummandReport r = summand_report(*t);
        json          rows = json::array();
        std::ostringstream table;
        table << std::left << std::setw(10) << "base" << std::setw(10) << "points"
              << std::setw(16) << "value groups" << "summand\n";
        for (auto const& row : r.rows) {
          std::string groups;
          json        gj = json::array();
          if (row.groups) {
            for (auto const& G : *row.groups) {
              groups += (groups.empty() ? "" : ",") + G.str();
              gj.push_back(G.str());
            }
          } else {
            groups = "unknown";
            gj     = "unknown";
          }
          auto c = row.contributes();
          rows.push_back(json{{"base", row.base},
                              {"points", row.points.str()},
                              {"value_groups", gj},
                              {"dense", c ? json(*c) : json("unknown")},
                              {"summand", row.summand()}});
          table << std::setw(10) << row.base << std::setw(10) << row.points.str()
                << std::setw(16) << groups << row.summand() << "\n";
        }
        auto pic = r.regular_classes_are_pic();
        if (json_out()) {
          emit(json{{"rows", rows}, {"reg_cl_equals_pic", pic ? json(*pic) : json("unknown")}});
        } else {
          _out << table.str() << "Reg Cl = Pic: "
               << (pic ? (*pic ? "yes" : "no") : "unknown") << "\n";
        }
        return 0;
      }

      int class_clifford() {
        TowerPtr t = _ws.tower_arg(file(0));
        auto     c = is_clifford(*t);
        std::string s = c ? (*c ? "true" : "false") : "unknown";
        if (json_out()) {
          emit(json{{"clifford", c ? json(*c) : json("unknown")}});
        } else {
          _out << s << "\n";
        }
        return 0;
      }

      // galois -----------------------------------------------------------

      int galois_act() {
        TowerAutomorphism sigma = _ws.automorphism(file(0));
        json              j     = io::read_json_file(file(1));
        if (j.contains("exponents") || j.contains("fn")) {
          FractionalIdeal I = _ws.ideal(file(1));
          FractionalIdeal s = act_on_ideal(sigma, I);
          if (!check_equivariance(sigma, I)) {
            throw Error(ErrorKind::invariant_failure, "equivariance check failed");
          }
          show_ideal(s);
        } else {
          show_function(act_on_function(sigma, _ws.function(file(1))));
        }
        return 0;
      }

      int galois_orbit() {
        UscFunction                    f = _ws.function(file(0));
        std::vector<TowerAutomorphism> gens;
        for (std::size_t i = 1; i < _o.files.size(); ++i) {
          gens.push_back(_ws.automorphism(_o.files[i]));
        }
        auto orb = orbit(f, gens, _o.bound);
        if (json_out()) {
          json members = json::array();
          for (auto const& g : orb) {
            members.push_back(io::function_to_json(g, ref()));
          }
          emit(json{{"size", orb.size()}, {"orbit", members}});
        } else {
          _out << "orbit size " << orb.size() << "\n";
          for (auto const& g : orb) {
            _out << "  " << g.str() << "\n";
          }
        }
        return 0;
      }

      // check ------------------------------------------------------------

      int check() {
        check::SuiteOptions so{_o.seed, _o.cases};
        auto                results = check::run_suite(_o.suite, so);
        std::size_t         total = 0, passed = 0;
        json                rows  = json::array();
        for (auto const& r : results) {
          total += r.cases;
          passed += r.passed;
          rows.push_back(json{{"suite", r.name}, {"cases", r.cases}, {"passed", r.passed},
                              {"failures", r.failures}});
          if (!json_out()) {
            _out << (r.ok() ? "PASS " : "FAIL ") << r.name << ": " << r.passed << "/"
                 << r.cases << " passed\n";
            for (auto const& f : r.failures) {
              _out << "    " << f << "\n";
            }
          }
        }
        if (json_out()) {
          emit(json{{"seed", _o.seed}, {"suites", rows}, {"cases", total}, {"passed", passed}});
        } else {
          _out << "total: " << passed << "/" << total << " passed (seed " << _o.seed << ")\n";
        }
        return passed == total ? 0 : 2;
      }

     private:
      Options const& _o;
      std::ostream&  _out;
      io::Workspace  _ws;
    };

  }  // namespace detail

  inline int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err) {
    detail::Options o;
    CLI::App        app{"Fractional ideals of integral closures in infinite extensions, "
                 "via their R~-valued semicontinuous functions"};
    app.name("fracideal");
    app.require_subcommand(1);
    app.add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "table"}));

    using Handler = int (detail::Runner::*)();
    Handler handler = nullptr;

    auto leaf = [&](CLI::App* parent, std::string const& name, std::string const& help,
                    Handler h, std::size_t nfiles) {
      CLI::App* sub = parent->add_subcommand(name, help);
      sub->fallthrough();
      if (nfiles > 0) {
        auto* opt = sub->add_option("files", o.files, "Input files")->required();
        if (nfiles == 99) {
          opt->expected(1, CLI::detail::expected_max_vector_size);
        } else {
          opt->expected(static_cast<int>(nfiles));
        }
      }
      sub->callback([&handler, h] { handler = h; });
      return sub;
    };
    auto group = [&](std::string const& name, std::string const& help) {
      CLI::App* g = app.add_subcommand(name, help);
      g->require_subcommand(1);
      g->fallthrough();
      return g;
    };

    using R   = detail::Runner;
    auto* tw = group("tower", "Tower descriptions");
    leaf(tw, "validate", "Check a tower file", &R::tower_validate, 1);
    leaf(tw, "show", "List nodes and ramification", &R::tower_show, 1)
        ->add_option("--depth", o.depth, "Depth to list");

    auto* fn = group("fn", "Semicontinuous functions");
    leaf(fn, "validate", "Classify a function", &R::fn_validate, 1);
    leaf(fn, "add", "Sum of two functions", &R::fn_add, 2);
    leaf(fn, "eval", "Value at a boundary point", &R::fn_eval, 1)
        ->add_option("--path", o.path, "Point as JSON, e.g. '{\"base\":\"c\",\"prefix\":[1]}'");

    auto* id = group("ideal", "Fractional ideals");
    leaf(id, "classify", "Invertible / regular / not regular", &R::ideal_classify, 1);
    leaf(id, "mul", "Product of two ideals", &R::ideal_mul, 2);
    leaf(id, "inverse", "Inverse of an invertible ideal", &R::ideal_inverse, 1);
    leaf(id, "witness", "J with IJI = I", &R::ideal_witness, 1);
    leaf(id, "contains", "Membership of an element valuation vector", &R::ideal_contains, 2);
    auto* inter = leaf(id, "intersect", "Exponents of the intersection with a level",
                       &R::ideal_intersect, 1);
    inter->add_option("--level", o.level, "Level n")->required();
    inter->add_flag("--alpha-literal", o.alpha_literal,
                    "Strict threshold for all values below a node with any flag-1 value");

    auto* cl = group("class", "Ideal classes modulo Pic");
    leaf(cl, "eq", "Equivalence of two ideals", &R::class_eq_cmd, 2);
    leaf(cl, "canon", "Canonical class descriptor", &R::class_canon, 1);
    leaf(cl, "summands", "Per base prime summands of Cl/Pic", &R::class_summands, 1);
    leaf(cl, "clifford", "Whether the class semigroup is Clifford", &R::class_clifford, 1);

    auto* ga = group("galois", "Tree automorphisms");
    leaf(ga, "act", "Apply an automorphism to a function or ideal", &R::galois_act, 2);
    leaf(ga, "orbit", "Orbit of a function: <fn> <automorphism>...", &R::galois_orbit, 99)
        ->add_option("--bound", o.bound, "Largest orbit accepted");

    auto* ck = leaf(&app, "check", "Run invariant suites", &R::check, 0);
    std::vector<std::string> names{"all"};
    for (auto const& [n, f] : check::suites()) {
      names.push_back(n);
    }
    ck->add_option("--suite", o.suite, "Suite name")->check(CLI::IsMember(names));
    ck->add_option("--seed", o.seed, "Random seed");
    ck->add_option("--cases", o.cases, "Random cases per tower");

    try {
      app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
      int code = app.exit(e, out, err);
      return code == 0 ? 0 : 1;
    }
    try {
      detail::Runner runner(o, out);
      return (runner.*handler)();
    } catch (Error const& e) {
      err << "error: " << e.what() << "\n";
      return detail::exit_code(e.kind());
    } catch (nlohmann::json::exception const& e) {
      err << "error: invalid_input: " << e.what() << "\n";
      return 1;
    }
  }

}  // namespace fracideal::cli
