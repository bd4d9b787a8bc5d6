#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "camal/error.hpp"

namespace camal {

using boost::multiprecision::cpp_int;

enum class RingKind { Integer, ModInt, PLocal };

// ModInt carries the modulus m >= 1, PLocal the prime p >= 2.
struct RingDesc {
  RingKind kind = RingKind::Integer;
  cpp_int param = 0;

  static RingDesc integers() { return {RingKind::Integer, 0}; }
  static RingDesc mod(const cpp_int& m);
  static RingDesc plocal(const cpp_int& p);

  bool operator==(const RingDesc& o) const { return kind == o.kind && param == o.param; }
  bool operator!=(const RingDesc& o) const { return !(*this == o); }
  std::string str() const;
};

// Exact scalar in Z, Z/m, or Z[1/p].
//
// Normal forms: ModInt residues live in [0, m); a Z[1/p] value num/p^k keeps
// k = 0 or p not dividing num, and zero is (0, 0).
class RingValue {
 public:
  RingValue() : ring_(RingDesc::integers()), v_(0), pexp_(0) {}

  static RingValue integer(const cpp_int& v);
  static RingValue mod(const cpp_int& v, const cpp_int& m);
  static RingValue plocal(const cpp_int& num, int pexp, const cpp_int& p);
  static RingValue zero(const RingDesc& r);
  static RingValue one(const RingDesc& r);

  const RingDesc& ring() const { return ring_; }
  const cpp_int& raw() const { return v_; }
  int pexp() const { return pexp_; }

  bool is_zero() const { return v_ == 0; }
  bool is_one() const;
  bool is_unit() const;
  // True when the value lies in the base integers (no p in the denominator).
  bool is_integral() const { return pexp_ == 0; }

  RingValue add(const RingValue& o) const;
  RingValue sub(const RingValue& o) const;
  RingValue mul(const RingValue& o) const;
  RingValue neg() const;
  RingValue inverse_unit() const;  // Err::NonInvertible when not a unit

  // Ring homomorphism onto Z/m.  Defined for Integer sources, for PLocal
  // sources with gcd(m, p) = 1 (p inverted mod m), and for ModInt sources
  // whose modulus is a multiple of m.
  RingValue reduce_mod(const cpp_int& m) const;

  // For integral values: the underlying integer (Integer/PLocal numerator,
  // ModInt residue).
  cpp_int integral_value() const;

  bool operator==(const RingValue& o) const;
  bool operator!=(const RingValue& o) const { return !(*this == o); }
  std::string str() const;

 private:
  RingValue(RingDesc r, cpp_int v, int pexp) : ring_(std::move(r)), v_(std::move(v)), pexp_(pexp) {}
  void normalize();
  void require_same_ring(const RingValue& o) const;

  RingDesc ring_;
  cpp_int v_;
  int pexp_;
};

cpp_int mod_inverse(const cpp_int& a, const cpp_int& m);  // Err::NonInvertible if gcd != 1

}  // namespace camal
