#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "camal/error.hpp"

namespace camal {

using boost::multiprecision::cpp_int;

// Angle on the unit circle, stored as an exact fraction of a full turn.
// Canonical form: 0 <= num < den, gcd(num, den) = 1.  The represented
// complex value is exp(2*pi*i * num/den).
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d) { *this = mod1(n, d); }

  static Rational mod1(long long n, long long d);

  Rational plus(const Rational& o) const;
  Rational negated() const;
  // k * this, reduced mod 1; k may be arbitrarily large.
  Rational scaled(const cpp_int& k) const;

  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool is_zero() const { return num == 0; }

  // Signed angle in (-1/2, 1/2] turns; symmetric so that the unit value of a
  // negated angle is the exact complex conjugate.
  double signed_turns() const;
  std::complex<double> unit() const;
  std::string str() const;
};

// Chord distance |e^{2 pi i a} - e^{2 pi i b}| for turn fractions a, b.
double chord_between(double turns_a, double turns_b);

}  // namespace camal
