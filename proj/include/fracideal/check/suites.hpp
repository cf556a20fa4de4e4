#pragma once

// Invariant suites shared by the `check` command and the acceptance test.
// Each suite reports one result per tower it runs on; `cases` is the number
// of random cases per tower (exhaustive and fixed suites ignore it).

#include <chrono>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../classgrp.hpp"
#include "../galois.hpp"
#include "../ideal.hpp"
#include "../rtilde.hpp"
#include "../tower.hpp"
#include "../uscfn.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace fracideal::check {

  struct SuiteResult {
    std::string              name;
    std::size_t              cases  = 0;
    std::size_t              passed = 0;
    std::vector<std::string> failures;  // first few only
    double                   seconds = 0;

    [[nodiscard]] bool ok() const { return passed == cases; }

    void record(bool pass, std::string const& what) {
      ++cases;
      if (pass) {
        ++passed;
      } else if (failures.size() < 5) {
        failures.push_back(what);
      }
    }
  };

  struct SuiteOptions {
    std::uint64_t              seed = 1;
    std::optional<std::size_t> cases;
  };

  namespace detail {

    struct NamedTower {
      std::string name;
      TowerPtr    tower;
    };

    inline std::vector<NamedTower> builtin_towers() {
      return {{"puiseux", std::make_shared<Tower const>(builtin::puiseux())},
              {"cantor", std::make_shared<Tower const>(builtin::cantor())},
              {"cantor_ramified", std::make_shared<Tower const>(builtin::cantor_ramified())},
              {"zp_like", std::make_shared<Tower const>(builtin::zp_like(2))}};
    }

    inline std::uint64_t stream_id(std::string const& s) {
      std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
      for (unsigned char c : s) {
        h = (h ^ c) * 1099511628211ULL;
      }
      return h;
    }

    //! Runs `body` once per case, catching exceptions as failures.
    template <typename Body>
    SuiteResult per_case(std::string name, std::uint64_t seed, std::size_t cases,
                         Body&& body) {
      SuiteResult r;
      r.name    = std::move(name);
      auto t0   = std::chrono::steady_clock::now();
      Rng  rng(seed, stream_id(r.name));
      for (std::size_t i = 0; i < cases; ++i) {
        std::string what = "case " + std::to_string(i);
        bool        pass = false;
        try {
          pass = body(rng, what);
        } catch (std::exception const& e) {
          what += ": exception " + std::string(e.what());
        }
        r.record(pass, what);
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return r;
    }

    inline bool pointwise_equal(UscFunction const& f, UscFunction const& g,
                                std::vector<PrimePath> const& probes, std::string& what) {
      for (auto const& p : probes) {
        if (evaluate(f, p) != evaluate(g, p)) {
          what += ": differ at " + p.str() + " (" + evaluate(f, p).str() + " vs "
                  + evaluate(g, p).str() + ")";
          return false;
        }
      }
      return true;
    }

    inline bool is_dense_tower(std::string const& name) { return name != "cantor"; }

  }  // namespace detail

  ////////////////////////////////////////////////////////////////////////

  //! Order and ordered-monoid laws over magnitudes {-2, ..., 2} in steps of
  //! 1/6 with both flags, against integer arithmetic on (6·magnitude, flag).
  inline std::vector<SuiteResult> suite_rtilde(SuiteOptions const&) {
    SuiteResult r;
    r.name  = "rtilde";
    auto t0 = std::chrono::steady_clock::now();
    struct Raw {
      long long k;
      int       s;
    };
    std::vector<Raw>    raw;
    std::vector<RTilde> vals;
    for (long long k = -12; k <= 12; ++k) {
      for (int s = 0; s <= 1; ++s) {
        raw.push_back({k, s});
        vals.emplace_back(make_rational(Integer(k), Integer(6)), s == 1);
      }
    }
    auto less = [](Raw a, Raw b) { return a.k < b.k || (a.k == b.k && a.s < b.s); };
    std::size_t n = vals.size();
    for (std::size_t i = 0; i < n; ++i) {
      RTilde const& a = vals[i];
      bool unit_ok = a + RTilde::zero() == a && involute(involute(a)) == a
                     && (a + involute(a)) == RTilde(0, 1, raw[i].s == 1);
      for (std::size_t j = 0; j < n; ++j) {
        RTilde const& b   = vals[j];
        Raw           sum = {raw[i].k + raw[j].k, std::max(raw[i].s, raw[j].s)};
        bool pair_ok = a + b == b + a
                       && (a + b) == RTilde(make_rational(Integer(sum.k), Integer(6)), sum.s == 1)
                       && ((a < b) == less(raw[i], raw[j]))
                       && ((a == b) == (i == j))
                       && (a <= b || b <= a)
                       && involute(a + b) == involute(a) + involute(b);
        for (std::size_t k = 0; k < n; ++k) {
          RTilde const& c  = vals[k];
          bool          ok = pair_ok && unit_ok && (a + b) + c == a + (b + c)
                    && (!(a <= b && b <= c) || a <= c)
                    && (!(a <= b) || a + c <= b + c)
                    && (!(a <= b && b <= a) || a == b);
          r.record(ok, a.str() + ", " + b.str() + ", " + c.str());
        }
      }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {r};
  }

  //! f~_{IJ} = f~_I + f~_J, compared pointwise against R~ addition.
  inline std::vector<SuiteResult> suite_homomorphism(SuiteOptions const& o) {
    std::vector<SuiteResult> out;
    for (auto const& [name, tower] : detail::builtin_towers()) {
      auto t = tower;
      out.push_back(detail::per_case("homomorphism[" + name + "]", o.seed, o.cases.value_or(1000),
                                     [&](Rng& rng, std::string& what) {
        FractionalIdeal I(random_function(rng, t, Mode::usc_b));
        FractionalIdeal J(random_function(rng, t, Mode::usc_b));
        FractionalIdeal IJ = multiply(I, J);
        std::size_t level = common_level({&I.fn(), &J.fn(), &IJ.fn()});
        for (auto const& p : probe_points({&I.fn(), &J.fn(), &IJ.fn()}, level)) {
          if (evaluate(IJ.fn(), p) != evaluate(I.fn(), p) + evaluate(J.fn(), p)) {
            what += ": product differs from the pointwise sum at " + p.str();
            return false;
          }
        }
        return canonicalize(IJ.fn()) == IJ.fn() && validate(IJ.fn()).valid();
      }));
    }
    return out;
  }

  //! intersect_level(from_exponents(E), m) = E at m = n and m = n + 2.
  inline std::vector<SuiteResult> suite_roundtrip(SuiteOptions const& o) {
    std::vector<SuiteResult> out;
    for (auto const& [name, tower] : detail::builtin_towers()) {
      auto t = tower;
      out.push_back(detail::per_case("roundtrip[" + name + "]", o.seed, o.cases.value_or(500),
                                     [&](Rng& rng, std::string& what) {
        auto               n = static_cast<std::size_t>(rng.uniform(0, 3));
        LevelExponentIdeal E = random_exponents(rng, t, n);
        FractionalIdeal    I = from_exponents(E);
        if (classify(I) != IdealClass::invertible) {
          what += ": exponent ideal not invertible";
          return false;
        }
        for (std::size_t m : {n, n + 2}) {
          LevelExponentIdeal got = intersect_level(I, m);
          for (auto const& node : level_nodes(*t, m)) {
            if (got.at(node) != E.at(node.ancestor(n))) {
              what += ": level " + std::to_string(m) + " exponent at " + node.str() + " is "
                      + to_string(got.at(node)) + ", expected "
                      + to_string(E.at(node.ancestor(n)));
              return false;
            }
          }
        }
        return true;
      }));
    }
    return out;
  }

  //! The per-point alpha formula against the smallest grid valuation accepted
  //! by `contains`, on mixed-flag functions.
  inline std::vector<SuiteResult> suite_alpha(SuiteOptions const& o) {
    std::vector<SuiteResult> out;
    for (auto const& [name, tower] : detail::builtin_towers()) {
      if (!detail::is_dense_tower(name)) {
        continue;
      }
      auto t = tower;
      out.push_back(detail::per_case("alpha[" + name + "]", o.seed, o.cases.value_or(200),
                                     [&](Rng& rng, std::string& what) {
        FractionalIdeal I(random_function(rng, t, Mode::usc_b));
        auto n = static_cast<std::size_t>(rng.uniform(0, static_cast<long long>(I.fn().level()) + 1));
        LevelExponentIdeal alpha = intersect_level(I, n);
        std::set<NodeId>   nodes;
        for (auto const& [node, v] : I.fn().cells()) {
          nodes.insert(node.level() >= n ? node.ancestor(n) : random_node_below(rng, *t, node, n));
        }
        for (auto const& [p, v] : I.fn().exceptional()) {
          nodes.insert(p.node_at(n));
        }
        nodes.insert(random_node(rng, *t, n));
        for (auto const& node : nodes) {
          long long e     = static_cast<long long>(ramification(*t, node));
          auto      found = alpha_by_membership(I, node, -40 * e, 40 * e, Rational(1000));
          if (!found || *found != alpha.at(node)) {
            what += ": at " + node.str() + " formula gives " + to_string(alpha.at(node))
                    + ", membership gives " + (found ? to_string(*found) : "nothing");
            return false;
          }
        }
        return true;
      }));
    }
    return out;
  }

  //! Classification of the three reference ideals.
  inline std::vector<SuiteResult> suite_classification(SuiteOptions const&) {
    SuiteResult r;
    r.name  = "classification";
    auto t0 = std::chrono::steady_clock::now();
    auto P  = std::make_shared<Tower const>(builtin::puiseux());
    auto C  = std::make_shared<Tower const>(builtin::cantor());
    auto half = from_exponents(LevelExponentIdeal(P, 1, {{NodeId{"P", {0}}, make_rational(1, 2)}}));
    FractionalIdeal maximal(UscFunction(P, 0, {{NodeId{"P", {}}, RTilde(0, 1, true)}}, {}));
    FractionalIdeal witness(UscFunction(C, 0, {}, {{PrimePath("c", {}), RTilde(1, 1, false)}}));
    r.record(classify(half) == IdealClass::invertible, "T^{1/2}O is INVERTIBLE");
    r.record(classify(maximal) == IdealClass::regular_not_invertible,
             "the maximal ideal of the Puiseux tower is REGULAR_NOT_INVERTIBLE");
    r.record(classify(witness) == IdealClass::not_regular,
             "the Cantor exceptional-point ideal is NOT_REGULAR");
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {r};
  }

  //! validate vs. the definition-level u.s.c. check at depth level + 3, and
  //! USC_REF vs. the local reflexibility criterion.
  inline std::vector<SuiteResult> suite_usc(SuiteOptions const& o) {
    std::vector<SuiteResult> out;
    for (auto const& [name, tower] : detail::builtin_towers()) {
      auto t = tower;
      out.push_back(detail::per_case("usc[" + name + "]", o.seed, o.cases.value_or(1000),
                                     [&](Rng& rng, std::string& what) {
        Mode        mode = rng.chance(1, 3) ? Mode::ref : Mode::usc_b;
        UscFunction f    = random_function(rng, t, mode);
        if (rng.chance(1, 2)) {
          f = break_semicontinuity(rng, f);
        }
        Validation  v     = validate(f);
        std::size_t depth = f.level() + 3;
        bool        usc   = brute_force_usc_check(f, depth);
        bool        refl  = reflexibility_criterion(f, depth);
        bool regular = v.classification == Classification::usc_ref
                       || v.classification == Classification::val_ref;
        if (v.valid() != usc || regular != refl) {
          what += ": " + f.str() + " validate=" + to_string(v.classification) + " (" + v.reason
                  + "), definition u.s.c.=" + (usc ? "yes" : "no")
                  + ", criterion reflexible=" + (refl ? "yes" : "no");
          return false;
        }
        return true;
      }));
    }
    return out;
  }

  //! Class group mod Pic of the Z_p-like tower with p = 2.
  inline std::vector<SuiteResult> suite_zp_classes(SuiteOptions const&) {
    SuiteResult r;
    r.name  = "zp_classes";
    auto t0 = std::chrono::steady_clock::now();
    auto Z  = std::make_shared<Tower const>(builtin::zp_like(2));
    auto cell = [&](Rational m) {
      return FractionalIdeal(UscFunction(Z, 1, {{NodeId{"2", {0}}, RTilde(m, true)}}, {}));
    };
    auto report = summand_report(*Z);
    std::size_t dense_rows = 0;
    bool        shape_ok   = false;
    for (auto const& row : report.rows) {
      if (row.contributes().value_or(false)) {
        ++dense_rows;
        shape_ok = row.points.is_finite() && row.points.n == 1 && row.groups->size() == 1
                   && row.groups->front() == GroupShape::localized(1, 2);
      }
    }
    r.record(dense_rows == 1 && shape_ok, "exactly one {0} ⊔ R/Z[1/2] summand");
    Rational third = make_rational(1, 3);
    r.record(class_eq(cell(third), cell(third + make_rational(5, 8))) == ClassEq::equivalent,
             "(1/3,1) ~ (1/3+5/8,1)");
    r.record(class_eq(cell(third), cell(make_rational(1, 5))) == ClassEq::not_equivalent,
             "(1/3,1) !~ (1/5,1)");
    auto d = class_descriptor(cell(make_rational(11, 24)));
    r.record(!d.comparison_only && d.residues.size() == 1
                 && d.residues.front().residue == third,
             "descriptor of (11/24,1) has residue 1/3");
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {r};
  }

  //! Clifford iff finite character, with classify never NOT_REGULAR on
  //! finite-character towers.
  inline std::vector<SuiteResult> suite_clifford(SuiteOptions const& o) {
    std::vector<SuiteResult> out;
    for (auto const& [name, tower] : detail::builtin_towers()) {
      if (name == "cantor" || name == "cantor_ramified") {
        continue;
      }
      auto t = tower;
      out.push_back(detail::per_case("clifford[" + name + "]", o.seed, o.cases.value_or(500),
                                     [&](Rng& rng, std::string& what) {
        if (is_clifford(*t) != std::optional<bool>(true)) {
          what += ": tower not reported Clifford";
          return false;
        }
        FractionalIdeal I(random_function(rng, t, Mode::usc_b));
        if (classify(I) == IdealClass::not_regular) {
          what += ": " + I.fn().str() + " classified NOT_REGULAR";
          return false;
        }
        return true;
      }));
    }
    SuiteResult r;
    r.name = "clifford[cantor]";
    auto C = std::make_shared<Tower const>(builtin::cantor());
    r.record(is_clifford(*C) == std::optional<bool>(false), "Cantor tower is not Clifford");
    FractionalIdeal witness(UscFunction(C, 0, {}, {{PrimePath("c", {}), RTilde(1, 1, false)}}));
    r.record(classify(witness) == IdealClass::not_regular, "Cantor witness is NOT_REGULAR");
    out.push_back(r);
    return out;
  }

  //! I·J·I = I for the regularity witness, and I·I^{-1} = O when invertible.
  inline std::vector<SuiteResult> suite_witness(SuiteOptions const& o) {
    std::vector<SuiteResult> out;
    for (auto const& [name, tower] : detail::builtin_towers()) {
      auto t = tower;
      out.push_back(detail::per_case("witness[" + name + "]", o.seed, o.cases.value_or(300),
                                     [&](Rng& rng, std::string& what) {
        FractionalIdeal I(random_function(rng, t, rng.chance(1, 3) ? Mode::val_ref : Mode::ref));
        if (classify(I) == IdealClass::not_regular) {
          what += ": generator produced a non-regular ideal " + I.fn().str();
          return false;
        }
        FractionalIdeal J   = regular_witness(I);
        FractionalIdeal IJI = multiply(multiply(I, J), I);
        auto probes = probe_points({&I.fn(), &J.fn()}, common_level({&I.fn(), &J.fn()}));
        for (auto const& p : probes) {
          RTilde a = evaluate(I.fn(), p);
          if (evaluate(J.fn(), p) != involute(a) || a + involute(a) + a != a) {
            what += ": witness identity fails at " + p.str();
            return false;
          }
        }
        if (!(IJI == I)) {
          what += ": I*J*I != I";
          return false;
        }
        if (classify(I) == IdealClass::invertible) {
          return multiply(I, inverse(I)) == unit_ideal(t);
        }
        return true;
      }));
    }
    return out;
  }

  //! f~_{σI} = f~_I ∘ σ^{-1} pointwise, and invariance of classification
  //! and of class equivalence.
  inline std::vector<SuiteResult> suite_galois(SuiteOptions const& o) {
    std::vector<SuiteResult> out;
    for (auto const& [name, tower] : detail::builtin_towers()) {
      if (name != "cantor" && name != "cantor_ramified") {
        continue;
      }
      auto t = tower;
      out.push_back(detail::per_case("galois[" + name + "]", o.seed, o.cases.value_or(200),
                                     [&](Rng& rng, std::string& what) {
        TowerAutomorphism sigma = random_automorphism(rng, t);
        TowerAutomorphism tau   = random_automorphism(rng, t);
        FractionalIdeal   I(random_function(rng, t, Mode::usc_b));
        FractionalIdeal   sI = act_on_ideal(sigma, I);
        std::size_t level = std::max({I.fn().level(), sI.fn().level(),
                                      sigma.depth(t->fibers().front().label())});
        for (auto const& p : probe_points({&I.fn(), &sI.fn()}, level)) {
          if (evaluate(sI.fn(), p) != evaluate(I.fn(), preimage(sigma, p))) {
            what += ": transport fails at " + p.str();
            return false;
          }
        }
        if (sI.classification() != I.classification()) {
          what += ": classification changed";
          return false;
        }
        FractionalIdeal H = from_exponents(random_exponents(rng, t, 2));
        FractionalIdeal J = rng.chance(1, 2) ? multiply(I, H)
                                             : FractionalIdeal(random_function(rng, t, Mode::usc_b));
        if (class_eq(I, J) != class_eq(sI, act_on_ideal(sigma, J))) {
          what += ": class equivalence not preserved";
          return false;
        }
        if (!(act_on_function(compose(sigma, tau), I.fn())
              == act_on_function(sigma, act_on_function(tau, I.fn())))) {
          what += ": action law fails";
          return false;
        }
        if (!(act_on_function(sigma, add(I.fn(), J.fn()))
              == add(sI.fn(), act_on_function(sigma, J.fn())))) {
          what += ": action is not additive";
          return false;
        }
        return check_equivariance(sigma, I) && check_equivariance(sigma, H);
      }));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////

  using SuiteFn = std::vector<SuiteResult> (*)(SuiteOptions const&);

  inline std::vector<std::pair<std::string, SuiteFn>> const& suites() {
    static std::vector<std::pair<std::string, SuiteFn>> const table{
        {"rtilde", &suite_rtilde},
        {"homomorphism", &suite_homomorphism},
        {"roundtrip", &suite_roundtrip},
        {"alpha", &suite_alpha},
        {"classification", &suite_classification},
        {"usc", &suite_usc},
        {"zp_classes", &suite_zp_classes},
        {"clifford", &suite_clifford},
        {"witness", &suite_witness},
        {"galois", &suite_galois},
    };
    return table;
  }

  //! Runs one suite by name, or every suite for "all".
  inline std::vector<SuiteResult> run_suite(std::string const& name, SuiteOptions const& o) {
    std::vector<SuiteResult> out;
    for (auto const& [n, fn] : suites()) {
      if (name == "all" || name == n) {
        auto r = fn(o);
        out.insert(out.end(), r.begin(), r.end());
      }
    }
    if (out.empty()) {
      throw Error(ErrorKind::invalid_input, "unknown suite \"" + name + "\"");
    }
    return out;
  }

}  // namespace fracideal::check
