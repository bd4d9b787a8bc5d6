#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "camal/quotient.hpp"

namespace camal {

// Fraction of a full turn, either exact or a real target.
struct Angle {
  bool exact = true;
  Rational q{};        // canonical in [0,1), meaningful when exact
  double turns = 0.0;  // canonical in [0,1), always maintained

  static Angle rational(const Rational& r);
  static Angle real(double turns);
};

// Character of the declared abelian structure of C: one angle per free basis
// direction, one root-of-unity exponent per torsion direction.
class Character {
 public:
  Character(AbelianStructure structure, std::vector<Angle> free_angles,
            std::vector<long long> torsion_exponents);

  const AbelianStructure& structure() const { return structure_; }
  const Angle& free_angle(int i) const { return free_[i]; }
  long long torsion_exponent(int i) const { return torsion_[i]; }
  // True when every free angle is exact; torsion parts always are.
  bool all_exact() const;

  std::complex<double> value(const CCoords& c) const;
  // Exact fraction-of-turn exponent; empty when an inexact free angle
  // contributes with nonzero coordinate.
  std::optional<Rational> exact_exponent(const CCoords& c) const;

 private:
  AbelianStructure structure_;
  std::vector<Angle> free_;
  std::vector<long long> torsion_;
};

// Zero-extension: lambda on C, 0 elsewhere.
std::complex<double> extend_by_zero(const GroupSpec& g, const Character& lambda,
                                    const ExactMatrix& x);

struct PsdReport {
  int size = 0;
  double min_eigenvalue = 0.0;
  bool pass = false;
};

// Gram matrix [lambda_tilde(s^-1 t)] over F, exactly Hermitian by
// construction; pass iff the minimum eigenvalue is >= -tol.
PsdReport psd_check(const GroupSpec& g, const Character& lambda,
                    const std::vector<ExactMatrix>& f, double tol);

// Smallest k guaranteeing the k-th roots of unity form an eps/(s(L+1))-net in
// chord distance: ceil(2*pi*s*(L+1)/eps).
long long k0_for(double eps, int s, int L);

// Character of the C-image of a finite quotient, stored as one exact
// fraction-of-turn exponent per C-image element.
class QuotientCharacter {
 public:
  // Extends the per-generator exponents (aligned with the source group's
  // C-generator list) multiplicatively over the C-image; every edge of the
  // image's Cayley graph is checked, so ill-defined data cannot slip through.
  static QuotientCharacter from_generator_exponents(
      std::shared_ptr<const FiniteQuotient> q, const std::vector<Rational>& gen_exponents);
  static QuotientCharacter trivial(std::shared_ptr<const FiniteQuotient> q);

  const std::shared_ptr<const FiniteQuotient>& quotient() const { return q_; }
  // idx must lie in the C-image.
  const Rational& exponent_at(uint32_t idx) const;
  const Rational& exponent_at_position(size_t pos) const { return exps_[pos]; }
  std::complex<double> value_at(uint32_t idx) const;

 private:
  QuotientCharacter(std::shared_ptr<const FiniteQuotient> q, std::vector<Rational> exps)
      : q_(std::move(q)), exps_(std::move(exps)) {}

  std::shared_ptr<const FiniteQuotient> q_;
  std::vector<Rational> exps_;  // aligned with c_image positions
};

// Per abelian basis direction: the cyclic order of the direction generator's
// image, the chosen root-of-unity numerator, and the chord distance from the
// target angle (exactly 0.0 when the target is hit exactly).
struct DirectionData {
  long long k = 0;
  long long l = 0;
  double error = 0.0;
};

struct CompatibleCharacters {
  QuotientCharacter a;
  QuotientCharacter b;
  std::vector<DirectionData> directions;
  std::vector<double> generator_errors;  // |chi(f(h_i)) - lambda(h_i)| per given C-generator
};

// Matching characters on the C-images of two quotients: nearest-root
// approximation per free direction, exact copy per torsion direction, equal
// exponents across the verified C-image bijection.  Acceptance is by
// certificate: each free direction must land within eps/(s(L+1)) in chord
// distance, where L is the largest basis coordinate of the given
// C-generators; when a direction misses that bound and its cyclic order is
// below k0_for(eps, s, L), the modulus is too small (PreconditionFailed).
CompatibleCharacters build_compatible_characters(std::shared_ptr<const FiniteQuotient> qa,
                                                 std::shared_ptr<const FiniteQuotient> qb,
                                                 const Character& lambda, double eps,
                                                 const std::vector<ExactMatrix>& c_generators);

}  // namespace camal
