#include "camal/matrix.hpp"

#include <sstream>

namespace camal {

ExactMatrix::ExactMatrix(int n, const RingDesc& ring) : ring_(ring), n_(n) {
  if (n < 1) throw Error(Err::DimensionMismatch, "matrix dimension must be >= 1");
  e_.assign(static_cast<size_t>(n) * n, RingValue::zero(ring));
}

ExactMatrix ExactMatrix::identity(int n, const RingDesc& ring) {
  ExactMatrix m(n, ring);
  for (int i = 0; i < n; ++i) m.set(i, i, RingValue::one(ring));
  return m;
}

ExactMatrix ExactMatrix::elementary(int n, const RingDesc& ring, int i, int j,
                                    const RingValue& v) {
  if (i == j) throw Error(Err::Config, "elementary matrix needs i != j");
  ExactMatrix m = identity(n, ring);
  m.set(i, j, v);
  return m;
}

ExactMatrix ExactMatrix::diagonal(const std::vector<RingValue>& d) {
  if (d.empty()) throw Error(Err::DimensionMismatch, "empty diagonal");
  ExactMatrix m(static_cast<int>(d.size()), d[0].ring());
  for (size_t i = 0; i < d.size(); ++i) m.set(static_cast<int>(i), static_cast<int>(i), d[i]);
  return m;
}

void ExactMatrix::set(int i, int j, const RingValue& v) {
  if (v.ring() != ring_) throw Error(Err::RingMismatch, "entry ring differs from matrix ring");
  e_[static_cast<size_t>(i) * n_ + j] = v;
}

ExactMatrix ExactMatrix::mul(const ExactMatrix& o) const {
  if (n_ != o.n_) throw Error(Err::DimensionMismatch, "matrix dimensions differ");
  if (ring_ != o.ring_) throw Error(Err::RingMismatch, "matrix rings differ");
  ExactMatrix r(n_, ring_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      RingValue acc = RingValue::zero(ring_);
      for (int k = 0; k < n_; ++k) acc = acc.add(at(i, k).mul(o.at(k, j)));
      r.set(i, j, acc);
    }
  return r;
}

ExactMatrix ExactMatrix::inverse() const {
  if (!is_upper_triangular())
    throw Error(Err::NonInvertible, "inverse implemented for upper-triangular shapes only");
  std::vector<RingValue> dinv;
  dinv.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    if (!at(i, i).is_unit())
      throw Error(Err::NonInvertible, "diagonal entry " + at(i, i).str() + " is not a unit");
    dinv.push_back(at(i, i).inverse_unit());
  }
  ExactMatrix x(n_, ring_);
  for (int i = n_ - 1; i >= 0; --i) {
    x.set(i, i, dinv[i]);
    for (int j = i + 1; j < n_; ++j) {
      RingValue acc = RingValue::zero(ring_);
      for (int k = i + 1; k <= j; ++k) acc = acc.add(at(i, k).mul(x.at(k, j)));
      x.set(i, j, dinv[i].mul(acc).neg());
    }
  }
  return x;
}

ExactMatrix ExactMatrix::pow(long long k) const {
  ExactMatrix base = k < 0 ? inverse() : *this;
  unsigned long long e = k < 0 ? static_cast<unsigned long long>(-(k + 1)) + 1ull
                               : static_cast<unsigned long long>(k);
  ExactMatrix acc = identity(n_, ring_);
  while (e) {
    if (e & 1ull) acc = acc.mul(base);
    base = base.mul(base);
    e >>= 1;
  }
  return acc;
}

ExactMatrix ExactMatrix::reduce_mod(const cpp_int& m) const {
  ExactMatrix r(n_, RingDesc::mod(m));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.set(i, j, at(i, j).reduce_mod(m));
  return r;
}

bool ExactMatrix::is_identity() const { return *this == identity(n_, ring_); }

bool ExactMatrix::is_upper_triangular() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < i; ++j)
      if (!at(i, j).is_zero()) return false;
  return true;
}

bool ExactMatrix::has_unit_diagonal() const {
  for (int i = 0; i < n_; ++i)
    if (!at(i, i).is_unit()) return false;
  return true;
}

bool ExactMatrix::operator==(const ExactMatrix& o) const {
  return n_ == o.n_ && ring_ == o.ring_ && e_ == o.e_;
}

std::string ExactMatrix::str() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < n_; ++i) {
    os << (i ? "; " : "");
    for (int j = 0; j < n_; ++j) os << (j ? "," : "") << at(i, j).str();
  }
  os << "]";
  return os.str();
}

}  // namespace camal
