#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "camal/group.hpp"

namespace camal {

inline constexpr uint64_t kDefaultEnumCap = 1'000'000;

// Finite congruence image of a GroupSpec mod m.
//
// Elements are stored reduced, row-major, one uint32 per entry; the index map
// keys on a canonical big-endian byte encoding, so byte order and numeric
// row-major order agree.  Indices follow BFS discovery order from the
// identity and are deterministic for a fixed generator list.
class FiniteQuotient {
 public:
  static std::shared_ptr<const FiniteQuotient> enumerate(const GroupSpec& g, const cpp_int& m,
                                                         uint64_t cap = kDefaultEnumCap);

  const GroupSpec& source() const { return src_; }
  uint32_t modulus() const { return m_; }
  int dim() const { return dim_; }
  uint32_t order() const { return order_; }

  uint32_t identity_index() const { return 0; }
  uint32_t mult(uint32_t a, uint32_t b) const;
  uint32_t inverse(uint32_t a) const;
  uint32_t power(uint32_t a, long long k) const;

  // Index of a reduced group element; Err::UnknownElement if it lies outside
  // the enumerated image.
  uint32_t index_of(const ExactMatrix& group_element) const;
  std::string encoding(uint32_t idx) const;
  ExactMatrix matrix_of(uint32_t idx) const;

  uint32_t generator_image(size_t gen_pos) const { return gen_img_[gen_pos]; }

  // Image of C: sorted element indices, closed under the quotient operations.
  const std::vector<uint32_t>& c_image() const { return c_image_; }
  bool in_c_image(uint32_t idx) const { return c_pos_[idx] >= 0; }
  // Position of idx inside c_image(), or -1.
  int32_t c_position(uint32_t idx) const { return c_pos_[idx]; }

  // Canonical coset representatives for C: each is the minimal element of its
  // coset in encoding order; the list is sorted by encoding.
  const std::vector<uint32_t>& transversal() const { return transversal_; }
  uint32_t coset_of(uint32_t idx) const { return coset_of_[idx]; }
  uint32_t transversal_inverse(uint32_t coset) const { return trans_inv_[coset]; }

 private:
  explicit FiniteQuotient(GroupSpec s) : src_(std::move(s)) {}
  std::vector<uint32_t> mat_at(uint32_t idx) const;

  GroupSpec src_;
  uint32_t m_ = 0;
  int dim_ = 0;
  uint32_t order_ = 0;
  std::vector<uint32_t> elems_;  // order * dim * dim entries
  std::unordered_map<std::string, uint32_t> index_;
  std::vector<uint32_t> gen_img_;
  std::vector<uint32_t> c_image_;
  std::vector<int32_t> c_pos_;
  std::vector<uint32_t> transversal_;
  std::vector<uint32_t> coset_of_;
  std::vector<uint32_t> trans_inv_;
};

std::shared_ptr<const FiniteQuotient> enumerate_quotient(const GroupSpec& g, const cpp_int& m,
                                                         uint64_t cap = kDefaultEnumCap);

// ----------------------------------------------------------------- witness

struct WitnessAttempt {
  uint32_t modulus = 0;
  bool ok = false;
  std::string detail;  // why this modulus failed, or "ok"
};

struct WitnessResult {
  std::optional<uint32_t> modulus;
  std::shared_ptr<const FiniteQuotient> quotient;
  std::vector<WitnessAttempt> attempts;
};

// Smallest m in [m_min, m_max] whose congruence image maps every listed
// element outside the image of C and separates every listed pair of distinct
// C-elements.  The winning modulus is re-verified by an independent pass.
WitnessResult filtration_witness(const GroupSpec& g, const std::vector<ExactMatrix>& outside,
                                 const std::vector<std::pair<ExactMatrix, ExactMatrix>>& pairs,
                                 uint32_t m_min, uint32_t m_max,
                                 uint64_t cap = kDefaultEnumCap);

// ------------------------------------------------------------------- probe

struct ProbeEntry {
  uint32_t modulus = 0;
  uint64_t c_image_order = 0;
  std::string verdict;  // "inside" | "outside" | "error"
  std::string error;
  double elapsed_ms = 0.0;
};

struct ProbeReport {
  std::vector<ProbeEntry> entries;  // ordered by position in the input list
  uint64_t inside = 0, outside = 0, errors = 0;
};

// For each modulus, reduces x and tests membership in the image of C
// (enumerated directly from the C-generator images; the full quotient is not
// built).  x itself must lie outside C.  Runs moduli concurrently; the
// report order is the input order.
ProbeReport profinite_probe(const GroupSpec& g, const ExactMatrix& x,
                            const std::vector<uint32_t>& moduli,
                            uint64_t cap = kDefaultEnumCap);

// ------------------------------------------------------------------- core

// Largest normal subgroup of the quotient contained in the subgroup S
// (given as element indices).  Err::NotSubgroup if S is not a subgroup.
std::vector<uint32_t> normal_core(const FiniteQuotient& q, const std::vector<uint32_t>& s);

}  // namespace camal
