#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "camal/rep.hpp"

namespace camal {

enum class Side { Left, Right };

struct AmalgamLetter {
  Side side = Side::Left;
  ExactMatrix g;
};

// Word in the free product of two factor groups amalgamated over their shared
// central subgroup; the identification is the identity map on matrices.
struct AmalgamWord {
  std::vector<AmalgamLetter> letters;
  bool empty() const { return letters.empty(); }
  std::string str() const;
};

// Letters are whitespace-separated "L:name^k" / "R:name^k" tokens; "^k" is
// optional and names must be generators of the respective factor.
AmalgamWord parse_amalgam_word(const GroupSpec& left, const GroupSpec& right,
                               const std::string& text);

// Normal form: identity letters dropped, adjacent same-side letters merged,
// central letters absorbed into the following letter (the preceding one at
// the end of the word).  The result represents the identity iff it is empty.
AmalgamWord reduce_amalgam(const GroupSpec& left, const GroupSpec& right, const AmalgamWord& w);

struct HnnLetter {
  bool stable = false;  // the letter is t^tpow when set, otherwise g
  long long tpow = 0;
  ExactMatrix g;
};

// Word in <G, t | t^-1 c t = c for all c in C> with C central in G.
struct HNNWord {
  std::vector<HnnLetter> letters;
  bool empty() const { return letters.empty(); }
  std::string str() const;
};

// Tokens are "t^k" (the name t is reserved) or "name^k" over g's generators.
HNNWord parse_hnn_word(const GroupSpec& g, const std::string& text);

// Shape of a fully reduced word: mixed words classified by their boundary
// letters, otherwise a central element times a stable power, or central only.
enum class BrittonForm {
  GroupToStable,   // g1 t^k1 ... gn t^kn
  StableToStable,  // t^k1 g2 ... t^kn
  GroupToGroup,    // g1 t^k1 ... gn
  StableToGroup,   // t^k1 g2 ... gn
  CentralStable,   // h t^k with h in C, k != 0
  CentralOnly,     // h in C
};

const char* britton_form_name(BrittonForm f);

struct BrittonResult {
  // Reduced word.  For the central forms a leading group letter carries h
  // when h != e; for mixed forms h is folded into the first group letter.
  HNNWord word;
  BrittonForm form = BrittonForm::CentralOnly;
  bool nontrivial = false;  // the word is not the identity of the extension
  ExactMatrix central;      // h for the central forms, identity otherwise
};

// Because C is central, every stable-letter pinch amounts to sliding central
// group letters out of the word and merging neighbors; iterating that to a
// fixed point yields the normal form.
BrittonResult britton_reduce(const GroupSpec& g, const HNNWord& w);

// Ordered product of the letter images after checking that the two
// representations agree on the amalgam: exactly (at the level of character
// exponents) when both are induced, numerically at 1e-12 otherwise.
RepMatrix evaluate_amalgam(const FinDimRep& rho1, const FinDimRep& rho2, const AmalgamWord& w);

// Ordered product with t mapped to u; u must be unitary (1e-9) and commute
// with the images of the C-generators (1e-12).
RepMatrix evaluate_hnn(const FinDimRep& rho, const Eigen::MatrixXcd& u, const HNNWord& w);

// Deterministic Haar-style unitary: a complex Gaussian matrix drawn from the
// keyed generator, QR-orthonormalized with a fixed diagonal phase convention.
Eigen::MatrixXcd seeded_unitary(int n, uint64_t key);

struct SeparationAttempt {
  uint32_t modulus = 0;
  int level = 0;
  long long seed = -1;  // seed index; -1 when no unitary is drawn
  bool success = false;
  double norm = 0.0;  // ||sigma(w) - I|| for completed evaluations
  std::string detail;
};

struct SeparationReport {
  bool identity_in_group = false;  // reduced to the identity; nothing to separate
  bool separated = false;
  std::optional<SeparationAttempt> winner;
  std::vector<SeparationAttempt> attempts;
  std::string reduced_word;
  std::string classification;  // reduced-form name for stable-letter searches
  // Every completed evaluation returned the identity.  Consistent with a
  // word that no finite-dimensional representation separates; flagged so the
  // caller reviews it instead of treating the search as merely unlucky.
  bool identity_at_every_level = false;
};

// Scans moduli 2..max_modulus and accuracy levels eps = 2^-level, inducing a
// compatible pair of characters from lambda on both factors and testing
// ||sigma(w) - I|| >= 0.1.  Deterministic; stops at the first success.
SeparationReport separate_amalgam(const GroupSpec& g1, const GroupSpec& g2, const AmalgamWord& w,
                                  const Character& lambda, const SearchBudget& budget);

// Same scan for the HNN-extension: per modulus and level one induced
// representation, then max_seeds deterministic unitaries for the stable
// letter, keyed off (seed, modulus, level, seed index).
SeparationReport separate_hnn(const GroupSpec& g, const HNNWord& w, const Character& lambda,
                              long long seed, const SearchBudget& budget);

// (u* gamma u, gamma): a pair of representations that agree on the amalgam
// whenever u commutes with gamma's C-generator images.
std::pair<FinDimRep, FinDimRep> hnn_to_amalgam_transfer(const FinDimRep& gamma,
                                                        const Eigen::MatrixXcd& u);

// Substitutes t^k -> [R: g0^k] and g -> [L: g] in the reduced word; requires
// g0^j outside C for every 1 <= j <= max |k| so that no substituted stable
// power collapses into the amalgam.
AmalgamWord embed_hnn_word(const GroupSpec& g, const HNNWord& w, const ExactMatrix& g0);

struct AbelsReport {
  cpp_int p;
  ProbeReport probe;
  std::string witness_hnn;
  std::string witness_amalgam;
  size_t witness_length = 0;
  bool witness_reduced_nontrivial = false;
  SeparationReport separation;
  // Probe membership plus a failed separation search is evidence, not proof.
  bool one_sided_evidence = true;
};

// Probes x0 = I + (1/p)E14 against the central line over every listed
// modulus (each must be coprime to p), embeds the commutator witness
// t^-1 x0 t x0^-1 into the doubled amalgam via g0 = diag(1, p, p, 1), and
// runs the separation search on the embedded word.
AbelsReport abels_experiment(const cpp_int& p, const std::vector<uint32_t>& m_list,
                             const SearchBudget& budget);

}  // namespace camal
