#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "camal/character.hpp"

namespace camal {

// Unitary monomial matrix: one unit-modulus entry per row and column, kept as
// (column, exact phase exponent) per row.
struct Monomial {
  std::vector<uint32_t> col;
  std::vector<Rational> phase;

  Monomial() = default;
  Monomial(std::vector<uint32_t> c, std::vector<Rational> p);  // validates permutation shape

  int dim() const { return static_cast<int>(col.size()); }
  static Monomial identity(int n);

  Monomial mul(const Monomial& o) const;
  Monomial adjoint() const;
  // k-fold direct sum (block diagonal copies).
  Monomial direct_sum_copies(int k) const;

  bool is_identity() const;
  // Normalized trace; exactly 0 with no diagonal support, exactly the common
  // phase value when scalar.
  std::complex<double> normalized_trace() const;
  // Operator norm of (this - I), from eigenvalues of the permutation cycles.
  double distance_from_identity() const;

  Eigen::MatrixXcd dense() const;
};

// Representation value: exact monomial when available, dense otherwise.
class RepMatrix {
 public:
  static RepMatrix from_monomial(Monomial m);
  static RepMatrix from_dense(Eigen::MatrixXcd m);

  int dim() const;
  bool is_monomial() const { return mono_.has_value(); }
  const Monomial& monomial() const;
  Eigen::MatrixXcd dense() const;

  RepMatrix mul(const RepMatrix& o) const;
  RepMatrix adjoint() const;
  std::complex<double> normalized_trace() const;
  double distance_from_identity() const;
  double unitarity_defect() const;  // max entry of |U*U - I|

 private:
  RepMatrix() = default;
  std::optional<Monomial> mono_;
  std::optional<Eigen::MatrixXcd> dense_;
};

// Finite-dimensional unitary representation.  Realizations: induced from a
// quotient character (exact monomial values, cached), explicit generator
// images (word evaluation only), or a unitary conjugate of another
// representation.  A copies multiplier realizes block-diagonal multiples.
class FinDimRep {
 public:
  static FinDimRep induced(std::shared_ptr<const FiniteQuotient> q, QuotientCharacter chi);
  static FinDimRep explicit_rep(std::vector<std::pair<std::string, Eigen::MatrixXcd>> images);
  static FinDimRep conjugated(FinDimRep base, Eigen::MatrixXcd u);

  int base_dim() const { return base_dim_; }
  int copies() const { return copies_; }
  int dim() const { return base_dim_ * copies_; }
  FinDimRep with_copies(int k) const;

  bool is_induced() const;
  // Quotient behind the evaluation, when there is one (induced, possibly
  // under conjugation); null for explicit realizations.
  std::shared_ptr<const FiniteQuotient> quotient() const;
  // Character of the induced realization; null otherwise.
  const QuotientCharacter* character() const;

  // True when elements of the source group can be evaluated directly.
  bool evaluates_elements() const;
  RepMatrix at_element(const ExactMatrix& g) const;
  RepMatrix at_quotient(uint32_t idx) const;
  RepMatrix at_word(const GroupWord& w) const;

 private:
  struct Induced {
    std::shared_ptr<const FiniteQuotient> q;
    QuotientCharacter chi;
  };
  struct Explicit {
    std::vector<std::pair<std::string, Eigen::MatrixXcd>> images;
  };
  struct Conjugated {
    std::shared_ptr<const FinDimRep> base;
    Eigen::MatrixXcd u;
  };
  struct Cache {
    mutable std::shared_mutex mu;
    mutable std::unordered_map<uint32_t, Monomial> map;
  };

  FinDimRep(std::variant<Induced, Explicit, Conjugated> r, int base_dim);
  Monomial induced_monomial(uint32_t idx) const;
  RepMatrix expand(RepMatrix base) const;

  std::variant<Induced, Explicit, Conjugated> real_;
  int base_dim_ = 0;
  int copies_ = 1;
  std::shared_ptr<Cache> cache_;
};

FinDimRep induce(std::shared_ptr<const FiniteQuotient> q, QuotientCharacter chi);

std::complex<double> normalized_trace(const FinDimRep& rho, const ExactMatrix& g);

// Block-diagonal multiples bringing both representations to lcm dimension;
// equal dimensions pass through untouched.
std::pair<FinDimRep, FinDimRep> align_dims(const FinDimRep& r1, const FinDimRep& r2,
                                           int dim_cap = 4096);

// Search limits shared by the level/modulus/seed searches.
struct SearchBudget {
  uint32_t max_modulus = 16;
  int max_levels = 1;
  int max_seeds = 8;
  uint64_t cap = kDefaultEnumCap;
};

struct ApproxLevel {
  int level = 0;
  double eps_level = 0.0;
  uint32_t modulus = 0;
  FinDimRep rep;
  std::vector<DirectionData> directions;
  // re-verified after construction, independent of the search
  double max_central_error = 0.0;
  std::vector<bool> outside_trace_exactly_zero;
};

struct ApproxSequence {
  std::vector<ApproxLevel> levels;
  bool exhausted = false;
  std::string detail;
};

// One induced representation per tolerance level eps/2^k, each with a
// certificate: central traces within the level tolerance (exactly equal for
// exact character data) and structurally zero traces outside C.
ApproxSequence character_approx_sequence(const GroupSpec& g, const Character& lambda, double eps,
                                         const std::vector<ExactMatrix>& test_outside,
                                         const std::vector<ExactMatrix>& test_central,
                                         const SearchBudget& budget);

// State on a matrix algebra: normalized trace or a unit-vector state.
struct StateVector {
  enum class Kind { NormalizedTrace, Vector };
  Kind kind = Kind::NormalizedTrace;
  Eigen::VectorXcd v;

  static StateVector normalized_trace_state();
  static StateVector vector_state(Eigen::VectorXcd v);
};

struct GnsResult {
  int dim = 0;
  FinDimRep rep;  // explicit realization over the source group's generator names
  Eigen::VectorXcd cyclic;
  double reproduction_error = 0.0;  // max over the quotient of |<L(q) xi, xi> - f(rho(q))|
};

// Finite GNS: orthonormalizes {rho(q)} under <a, b> = f(b* a) and represents
// left multiplication on the span; the cyclic vector reproduces the state.
GnsResult gns_from_state(const FinDimRep& rho, const StateVector& f,
                         const std::shared_ptr<const FiniteQuotient>& q);

enum class KernelVerdict { Pass, Fail, Skipped };

struct KernelReport {
  KernelVerdict verdict = KernelVerdict::Skipped;
  double precondition_value = 0.0;  // |lambda_tilde(F* F)|
  double scalar_defect = 0.0;       // max entry defect of rho(c) vs lambda(c) I
  double norm = 0.0;                // operator norm of rho(F)
  std::string detail;
};

// For F = sum of coefficient * element with lambda_tilde(F* F) = 0, a
// representation scalar on C with the same scalars must kill F.
KernelReport kernel_consistency_check(
    const GroupSpec& g, const Character& lambda,
    const std::vector<std::pair<ExactMatrix, std::complex<double>>>& coefficients,
    const FinDimRep& rho);

}  // namespace camal
