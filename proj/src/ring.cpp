#include "camal/ring.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "camal/rational.hpp"

namespace camal {

const char* err_name(Err e) {
  switch (e) {
    case Err::RingMismatch: return "RingMismatch";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::NonInvertible: return "NonInvertible";
    case Err::NonInvertiblePrime: return "NonInvertiblePrime";
    case Err::CapExceeded: return "CapExceeded";
    case Err::SearchExhausted: return "SearchExhausted";
    case Err::PreconditionFailed: return "PreconditionFailed";
    case Err::IncompatibleImages: return "IncompatibleImages";
    case Err::BasisError: return "BasisError";
    case Err::AmalgamDisagreement: return "AmalgamDisagreement";
    case Err::CommutationFailure: return "CommutationFailure";
    case Err::NotSubgroup: return "NotSubgroup";
    case Err::UnknownGenerator: return "UnknownGenerator";
    case Err::UnknownElement: return "UnknownElement";
    case Err::StateNotPositive: return "StateNotPositive";
    case Err::Config: return "Config";
    case Err::Internal: return "Internal";
  }
  return "Error";
}

// ---------------------------------------------------------------- Rational

Rational Rational::mod1(long long n, long long d) {
  if (d == 0) throw Error(Err::Internal, "zero denominator");
  if (d < 0) { n = -n; d = -d; }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) { n /= g; d /= g; }
  n %= d;
  if (n < 0) n += d;
  Rational r;
  r.num = n;
  r.den = d;
  return r;
}

Rational Rational::plus(const Rational& o) const {
  long long g = std::gcd(den, o.den);
  if (den / g > std::numeric_limits<long long>::max() / o.den)
    throw Error(Err::Internal, "angle denominator overflow");
  long long lcm = den / g * o.den;
  __int128 n = static_cast<__int128>(num) * (lcm / den) +
               static_cast<__int128>(o.num) * (lcm / o.den);
  return mod1(static_cast<long long>(n % lcm), lcm);
}

Rational Rational::negated() const { return mod1(-num, den); }

Rational Rational::scaled(const cpp_int& k) const {
  cpp_int r = k % den;
  long long rr = r.convert_to<long long>();
  __int128 n = static_cast<__int128>(rr) * num;
  __int128 folded = n % den;
  return mod1(static_cast<long long>(folded), den);
}

double Rational::signed_turns() const {
  // canonical num/den in [0,1); fold to (-1/2, 1/2]
  if (2 * num > den) return static_cast<double>(num - den) / static_cast<double>(den);
  return static_cast<double>(num) / static_cast<double>(den);
}

std::complex<double> Rational::unit() const {
  if (num == 0) return {1.0, 0.0};
  if (2 * num == den) return {-1.0, 0.0};
  double a = 2.0 * std::numbers::pi * signed_turns();
  return {std::cos(a), std::sin(a)};
}

std::string Rational::str() const {
  std::ostringstream os;
  os << num << "/" << den;
  return os.str();
}

double chord_between(double turns_a, double turns_b) {
  double d = turns_a - turns_b;
  d -= std::round(d);
  return 2.0 * std::abs(std::sin(std::numbers::pi * d));
}

// ---------------------------------------------------------------- RingDesc

RingDesc RingDesc::mod(const cpp_int& m) {
  if (m < 1) throw Error(Err::Config, "modulus must be >= 1");
  return {RingKind::ModInt, m};
}

RingDesc RingDesc::plocal(const cpp_int& p) {
  if (p < 2) throw Error(Err::Config, "prime must be >= 2");
  return {RingKind::PLocal, p};
}

std::string RingDesc::str() const {
  switch (kind) {
    case RingKind::Integer: return "Z";
    case RingKind::ModInt: return "Z/" + param.str();
    case RingKind::PLocal: return "Z[1/" + param.str() + "]";
  }
  return "?";
}

// ---------------------------------------------------------------- RingValue

RingValue RingValue::integer(const cpp_int& v) { return RingValue(RingDesc::integers(), v, 0); }

RingValue RingValue::mod(const cpp_int& v, const cpp_int& m) {
  RingValue r(RingDesc::mod(m), v, 0);
  r.normalize();
  return r;
}

RingValue RingValue::plocal(const cpp_int& num, int pexp, const cpp_int& p) {
  if (pexp < 0) throw Error(Err::Config, "p-exponent must be >= 0");
  RingValue r(RingDesc::plocal(p), num, pexp);
  r.normalize();
  return r;
}

RingValue RingValue::zero(const RingDesc& r) { return RingValue(r, 0, 0); }

RingValue RingValue::one(const RingDesc& r) {
  RingValue v(r, 1, 0);
  v.normalize();
  return v;
}

void RingValue::normalize() {
  switch (ring_.kind) {
    case RingKind::Integer:
      pexp_ = 0;
      break;
    case RingKind::ModInt:
      v_ %= ring_.param;
      if (v_ < 0) v_ += ring_.param;
      pexp_ = 0;
      break;
    case RingKind::PLocal:
      if (v_ == 0) {
        pexp_ = 0;
      } else {
        while (pexp_ > 0 && v_ % ring_.param == 0) {
          v_ /= ring_.param;
          --pexp_;
        }
      }
      break;
  }
}

void RingValue::require_same_ring(const RingValue& o) const {
  if (ring_ != o.ring_) throw Error(Err::RingMismatch, ring_.str() + " vs " + o.ring_.str());
}

bool RingValue::is_one() const {
  return pexp_ == 0 && (ring_.kind == RingKind::ModInt ? v_ == 1 % ring_.param : v_ == 1);
}

bool RingValue::is_unit() const {
  switch (ring_.kind) {
    case RingKind::Integer:
      return v_ == 1 || v_ == -1;
    case RingKind::ModInt:
      return boost::multiprecision::gcd(v_, ring_.param) == 1;
    case RingKind::PLocal: {
      if (v_ == 0) return false;
      cpp_int a = v_ < 0 ? cpp_int(-v_) : v_;
      while (a % ring_.param == 0) a /= ring_.param;
      return a == 1;
    }
  }
  return false;
}

RingValue RingValue::add(const RingValue& o) const {
  require_same_ring(o);
  RingValue r(ring_, 0, 0);
  switch (ring_.kind) {
    case RingKind::Integer:
    case RingKind::ModInt:
      r.v_ = v_ + o.v_;
      break;
    case RingKind::PLocal: {
      int e = std::max(pexp_, o.pexp_);
      r.v_ = v_ * boost::multiprecision::pow(ring_.param, static_cast<unsigned>(e - pexp_)) +
             o.v_ * boost::multiprecision::pow(ring_.param, static_cast<unsigned>(e - o.pexp_));
      r.pexp_ = e;
      break;
    }
  }
  r.normalize();
  return r;
}

RingValue RingValue::sub(const RingValue& o) const { return add(o.neg()); }

RingValue RingValue::mul(const RingValue& o) const {
  require_same_ring(o);
  RingValue r(ring_, v_ * o.v_, pexp_ + o.pexp_);
  r.normalize();
  return r;
}

RingValue RingValue::neg() const {
  RingValue r(ring_, -v_, pexp_);
  r.normalize();
  return r;
}

RingValue RingValue::inverse_unit() const {
  if (!is_unit()) throw Error(Err::NonInvertible, str() + " is not a unit in " + ring_.str());
  switch (ring_.kind) {
    case RingKind::Integer:
      return *this;  // +-1
    case RingKind::ModInt:
      return RingValue(ring_, mod_inverse(v_, ring_.param), 0);
    case RingKind::PLocal: {
      // value is +-p^(a - pexp_); the inverse is +-p^(pexp_ - a)
      bool negv = v_ < 0;
      cpp_int a = negv ? cpp_int(-v_) : v_;
      int k = 0;
      while (a % ring_.param == 0) {
        a /= ring_.param;
        ++k;
      }
      int net = k - pexp_;
      RingValue r(ring_, negv ? -1 : 1, 0);
      if (net >= 0) {
        r.pexp_ = net;
      } else {
        r.v_ *= boost::multiprecision::pow(ring_.param, static_cast<unsigned>(-net));
      }
      r.normalize();
      return r;
    }
  }
  throw Error(Err::Internal, "unreachable");
}

RingValue RingValue::reduce_mod(const cpp_int& m) const {
  switch (ring_.kind) {
    case RingKind::Integer:
      return RingValue::mod(v_, m);
    case RingKind::PLocal: {
      if (boost::multiprecision::gcd(m, ring_.param) != 1)
        throw Error(Err::NonInvertiblePrime,
                    "p = " + ring_.param.str() + " is not invertible mod " + m.str());
      cpp_int pinv = mod_inverse(ring_.param % m, m);
      cpp_int acc = v_ % m;
      for (int i = 0; i < pexp_; ++i) acc = acc * pinv % m;
      return RingValue::mod(acc, m);
    }
    case RingKind::ModInt:
      if (ring_.param % m != 0)
        throw Error(Err::RingMismatch,
                    "no reduction Z/" + ring_.param.str() + " -> Z/" + m.str());
      return RingValue::mod(v_, m);
  }
  throw Error(Err::Internal, "unreachable");
}

cpp_int RingValue::integral_value() const {
  if (!is_integral()) throw Error(Err::BasisError, str() + " is not integral");
  return v_;
}

bool RingValue::operator==(const RingValue& o) const {
  return ring_ == o.ring_ && v_ == o.v_ && pexp_ == o.pexp_;
}

std::string RingValue::str() const {
  if (ring_.kind == RingKind::PLocal && pexp_ > 0) {
    std::string d = pexp_ == 1 ? ring_.param.str()
                               : ring_.param.str() + "^" + std::to_string(pexp_);
    return v_.str() + "/" + d;
  }
  return v_.str();
}

cpp_int mod_inverse(const cpp_int& a, const cpp_int& m) {
  cpp_int r0 = m, r1 = a % m, s0 = 0, s1 = 1;
  if (r1 < 0) r1 += m;
  while (r1 != 0) {
    cpp_int q = r0 / r1;
    cpp_int r2 = r0 - q * r1;
    cpp_int s2 = s0 - q * s1;
    r0 = r1; r1 = r2;
    s0 = s1; s1 = s2;
  }
  if (r0 != 1) throw Error(Err::NonInvertible, a.str() + " has no inverse mod " + m.str());
  s0 %= m;
  if (s0 < 0) s0 += m;
  return s0;
}

}  // namespace camal
