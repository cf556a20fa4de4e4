#pragma once

#include <compare>
#include <ostream>
#include <string>

#include "rational.hpp"

namespace fracideal {

  //! An element (magnitude, flag) of R x {0,1}, restricted to rational
  //! magnitudes, ordered lexicographically and added by
  //! (a, s) + (b, t) = (a + b, max(s, t)).
  //!
  //! Flag 1 records that the infimum is not attained. Elements with flag 0
  //! are exactly the invertible ones, and ι(a) is then their inverse.
  class RTilde {
   public:
    RTilde() = default;
    RTilde(Rational magnitude, bool flag)
        : _magnitude(std::move(magnitude)), _flag(flag) {}
    RTilde(long long num, long long den, bool flag)
        : _magnitude(make_rational(num, den)), _flag(flag) {}

    static RTilde zero() { return RTilde(); }

    [[nodiscard]] Rational const& magnitude() const noexcept {
      return _magnitude;
    }
    [[nodiscard]] bool flag() const noexcept { return _flag; }

    [[nodiscard]] bool is_zero() const noexcept {
      return !_flag && _magnitude == 0;
    }

    [[nodiscard]] bool is_unit() const noexcept { return !_flag; }

    //! The involution ι(a, s) = (-a, s).
    [[nodiscard]] RTilde involute() const { return RTilde(-_magnitude, _flag); }

    friend RTilde operator+(RTilde const& x, RTilde const& y) {
      return RTilde(x._magnitude + y._magnitude, x._flag || y._flag);
    }

    RTilde& operator+=(RTilde const& y) {
      _magnitude += y._magnitude;
      _flag = _flag || y._flag;
      return *this;
    }

    friend bool operator==(RTilde const& x, RTilde const& y) {
      return x._flag == y._flag && x._magnitude == y._magnitude;
    }

    friend std::strong_ordering operator<=>(RTilde const& x, RTilde const& y) {
      if (x._magnitude < y._magnitude) {
        return std::strong_ordering::less;
      }
      if (y._magnitude < x._magnitude) {
        return std::strong_ordering::greater;
      }
      return x._flag <=> y._flag;
    }

    [[nodiscard]] std::string str() const {
      return "(" + _magnitude.str() + "," + (_flag ? "1" : "0") + ")";
    }

    friend std::ostream& operator<<(std::ostream& os, RTilde const& x) {
      return os << x.str();
    }

   private:
    Rational _magnitude = 0;
    bool     _flag      = false;
  };

  enum class Ordering { lt, eq, gt };

  inline Ordering compare(RTilde const& a, RTilde const& b) {
    auto c = a <=> b;
    if (c < 0) {
      return Ordering::lt;
    }
    return c == 0 ? Ordering::eq : Ordering::gt;
  }

  inline RTilde add(RTilde const& a, RTilde const& b) { return a + b; }

  inline RTilde involute(RTilde const& a) { return a.involute(); }

}  // namespace fracideal
