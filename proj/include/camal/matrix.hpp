#pragma once

#include <string>
#include <vector>

#include "camal/ring.hpp"

namespace camal {

// Dense square matrix with exact entries, all sharing one ring.
class ExactMatrix {
 public:
  ExactMatrix() : n_(0) {}
  ExactMatrix(int n, const RingDesc& ring);

  static ExactMatrix identity(int n, const RingDesc& ring);
  // I + v * E(i, j), zero-based indices.
  static ExactMatrix elementary(int n, const RingDesc& ring, int i, int j, const RingValue& v);
  static ExactMatrix diagonal(const std::vector<RingValue>& d);

  int dim() const { return n_; }
  const RingDesc& ring() const { return ring_; }

  const RingValue& at(int i, int j) const { return e_[static_cast<size_t>(i) * n_ + j]; }
  void set(int i, int j, const RingValue& v);

  ExactMatrix mul(const ExactMatrix& o) const;
  // Inverse of an upper-triangular matrix with unit diagonal entries, by back
  // substitution; the only invertible shape the group layer admits.
  ExactMatrix inverse() const;
  ExactMatrix pow(long long k) const;  // negative k inverts first
  ExactMatrix reduce_mod(const cpp_int& m) const;

  bool is_identity() const;
  bool is_upper_triangular() const;
  bool has_unit_diagonal() const;

  bool operator==(const ExactMatrix& o) const;
  bool operator!=(const ExactMatrix& o) const { return !(*this == o); }
  std::string str() const;

 private:
  RingDesc ring_;
  int n_;
  std::vector<RingValue> e_;
};

}  // namespace camal
