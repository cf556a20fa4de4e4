#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"

namespace fracideal {

  using Integer  = boost::multiprecision::cpp_int;
  using Rational = boost::multiprecision::cpp_rational;

  inline Rational make_rational(Integer const& num, Integer const& den) {
    if (den == 0) {
      throw Error(ErrorKind::invalid_input, "zero denominator");
    }
    return Rational(num) / Rational(den);
  }

  inline Integer num(Rational const& q) {
    return boost::multiprecision::numerator(q);
  }

  inline Integer den(Rational const& q) {
    return boost::multiprecision::denominator(q);
  }

  inline Integer floor_div(Integer const& a, Integer const& b) {
    Integer q = a / b;
    Integer r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) {
      --q;
    }
    return q;
  }

  inline Integer floor(Rational const& q) { return floor_div(num(q), den(q)); }

  inline Integer ceil(Rational const& q) { return -floor_div(-num(q), den(q)); }

  //! Smallest element k/e of (1/e)Z with k/e >= value, or k/e > value when
  //! `strict` is set.
  inline Rational ceil_to_grid(Rational const& value,
                               Integer const&  e,
                               bool            strict) {
    Rational scaled = value * Rational(e);
    Integer  k      = ceil(scaled);
    if (strict && Rational(k) == scaled) {
      ++k;
    }
    return make_rational(k, e);
  }

  inline Rational floor_to_grid(Rational const& value,
                                Integer const&  e,
                                bool            strict) {
    Rational scaled = value * Rational(e);
    Integer  k      = floor(scaled);
    if (strict && Rational(k) == scaled) {
      --k;
    }
    return make_rational(k, e);
  }

  //! True iff q lies in (1/e)Z.
  inline bool in_grid(Rational const& q, Integer const& e) {
    return den(q * Rational(e)) == 1;
  }

  inline Integer gcd(Integer const& a, Integer const& b) {
    return boost::multiprecision::gcd(a, b);
  }

  //! Largest divisor of n all of whose prime factors divide p.
  inline Integer smooth_part(Integer n, Integer const& p) {
    if (n < 0) {
      n = -n;
    }
    Integer result = 1;
    Integer g      = gcd(n, p);
    while (g > 1) {
      while (n % g == 0) {
        n /= g;
        result *= g;
      }
      g = gcd(n, p);
    }
    return result;
  }

  //! Inverse of a modulo m (gcd(a, m) = 1, m >= 1); result in [0, m).
  inline Integer mod_inverse(Integer a, Integer const& m) {
    if (m == 1) {
      return 0;
    }
    a = ((a % m) + m) % m;
    Integer old_r = a, r = m, old_s = 1, s = 0;
    while (r != 0) {
      Integer q = old_r / r;
      Integer t = old_r - q * r;
      old_r     = r;
      r         = t;
      t         = old_s - q * s;
      old_s     = s;
      s         = t;
    }
    if (old_r != 1) {
      throw Error(ErrorKind::invalid_input, "mod_inverse of non-unit");
    }
    return ((old_s % m) + m) % m;
  }

  inline Integer factorial(std::size_t n) {
    Integer result = 1;
    for (std::size_t i = 2; i <= n; ++i) {
      result *= i;
    }
    return result;
  }

  inline Integer ipow(Integer const& base, std::size_t exp) {
    Integer result = 1;
    for (std::size_t i = 0; i < exp; ++i) {
      result *= base;
    }
    return result;
  }

  inline bool fits_int64(Integer const& n) {
    return n >= std::numeric_limits<std::int64_t>::min()
           && n <= std::numeric_limits<std::int64_t>::max();
  }

  inline std::string to_string(Rational const& q) {
    return q.str();
  }

}  // namespace fracideal
