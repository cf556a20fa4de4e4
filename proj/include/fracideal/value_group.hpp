#pragma once

#include <string>

#include "rational.hpp"

namespace fracideal {

  //! A subgroup of Q of one of the shapes arising as v_P(L^x) in the modeled
  //! towers: (1/c)Z, (1/c)Z[1/p] or Q.
  //!
  //! The scale c is kept coprime to p for the localized shape, so equal
  //! groups have equal descriptors.
  class GroupShape {
   public:
    enum class Kind { discrete, localized, rationals };

    static GroupShape discrete(Integer scale) {
      return GroupShape(Kind::discrete, std::move(scale), 0);
    }

    static GroupShape localized(Integer scale, Integer p) {
      if (p < 2) {
        throw Error(ErrorKind::invalid_input,
                    "localized value group needs p >= 2");
      }
      scale /= smooth_part(scale, p);
      return GroupShape(Kind::localized, std::move(scale), std::move(p));
    }

    static GroupShape rationals() { return GroupShape(Kind::rationals, 1, 0); }

    [[nodiscard]] Kind kind() const noexcept { return _kind; }
    [[nodiscard]] Integer const& scale() const noexcept { return _scale; }
    [[nodiscard]] Integer const& p() const noexcept { return _p; }

    //! V_P = R exactly when the group is not discrete.
    [[nodiscard]] bool dense() const noexcept {
      return _kind != Kind::discrete;
    }

    [[nodiscard]] bool contains(Rational const& q) const {
      switch (_kind) {
        case Kind::discrete: return in_grid(q, _scale);
        case Kind::localized: {
          Integer d = den(q * Rational(_scale));
          return smooth_part(d, _p) == d;
        }
        case Kind::rationals: return true;
      }
      return false;
    }

    //! The canonical representative of q modulo the group: the unique
    //! r in [0, 1/c) congruent to q, with denominator of r·c coprime to p in
    //! the localized case; always 0 for Q.
    [[nodiscard]] Rational coset_representative(Rational const& q) const {
      switch (_kind) {
        case Kind::discrete: {
          Rational scaled = q * Rational(_scale);
          return (scaled - Rational(floor(scaled))) / Rational(_scale);
        }
        case Kind::localized: {
          Rational scaled = q * Rational(_scale);
          Integer  a      = num(scaled);
          Integer  b      = den(scaled);
          Integer  b2     = smooth_part(b, _p);
          Integer  b1     = b / b2;
          if (b1 == 1) {
            return 0;
          }
          Integer x = ((a * mod_inverse(b2, b1)) % b1 + b1) % b1;
          return make_rational(x, b1) / Rational(_scale);
        }
        case Kind::rationals: return 0;
      }
      return 0;
    }

    [[nodiscard]] std::string str() const {
      std::string prefix = _scale == 1 ? "" : "(1/" + _scale.str() + ")";
      switch (_kind) {
        case Kind::discrete: return prefix + "Z";
        case Kind::localized: return prefix + "Z[1/" + _p.str() + "]";
        case Kind::rationals: return "Q";
      }
      return "?";
    }

    friend bool operator==(GroupShape const&, GroupShape const&) = default;

   private:
    GroupShape(Kind k, Integer scale, Integer p)
        : _kind(k), _scale(std::move(scale)), _p(std::move(p)) {}

    Kind    _kind;
    Integer _scale;
    Integer _p;
  };

  //! Description of v_P(L^x) along one boundary path: the group itself plus
  //! the rule its finite-level pieces (1/e_n)Z follow.
  struct ValueGroupDescriptor {
    GroupShape  group;
    std::string e_rule;  // e.g. "e_n = (n+1)!", "e_n = 2^n", "e_n = 1"

    [[nodiscard]] bool discrete() const { return !group.dense(); }
    [[nodiscard]] bool contains(Rational const& q) const {
      return group.contains(q);
    }
    [[nodiscard]] std::string str() const {
      return std::string(discrete() ? "discrete" : "nondiscrete") + ", "
             + group.str() + ", " + e_rule;
    }
  };

}  // namespace fracideal
