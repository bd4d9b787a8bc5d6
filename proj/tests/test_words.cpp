#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "camal/character.hpp"
#include "camal/words.hpp"

using namespace camal;

namespace {

Character z_line(long long num, long long den) {
  return Character(AbelianStructure{1, {}}, {Angle::rational(Rational(num, den))}, {});
}

FinDimRep heis_rep(uint32_t m, long long num, long long den) {
  auto q = FiniteQuotient::enumerate(heisenberg(), m);
  return induce(q, QuotientCharacter::from_generator_exponents(q, {Rational(num, den)}));
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

bool same_attempt(const SeparationAttempt& a, const SeparationAttempt& b) {
  return a.modulus == b.modulus && a.level == b.level && a.seed == b.seed &&
         a.success == b.success && a.norm == b.norm && a.detail == b.detail;
}

bool same_report(const SeparationReport& a, const SeparationReport& b) {
  if (a.identity_in_group != b.identity_in_group || a.separated != b.separated ||
      a.reduced_word != b.reduced_word || a.classification != b.classification ||
      a.identity_at_every_level != b.identity_at_every_level ||
      a.attempts.size() != b.attempts.size() || a.winner.has_value() != b.winner.has_value())
    return false;
  for (size_t i = 0; i < a.attempts.size(); ++i)
    if (!same_attempt(a.attempts[i], b.attempts[i])) return false;
  if (a.winner && !same_attempt(*a.winner, *b.winner)) return false;
  return true;
}

}  // namespace

TEST_CASE("amalgam words parse against both factors") {
  GroupSpec g = heisenberg();
  AmalgamWord w = parse_amalgam_word(g, g, "L:x R:y^-2 L:z^3");
  REQUIRE(w.letters.size() == 3);
  CHECK(w.letters[0].side == Side::Left);
  CHECK(w.letters[0].g == g.generator("x"));
  CHECK(w.letters[1].side == Side::Right);
  CHECK(w.letters[1].g == g.generator("y").pow(-2));
  CHECK(w.letters[2].g == g.generator("z").pow(3));

  CHECK(parse_amalgam_word(g, g, "").empty());
  CHECK(parse_amalgam_word(g, g, "").str() == "(empty)");
  CHECK_THROWS_AS(parse_amalgam_word(g, g, "x"), Error);
  CHECK_THROWS_AS(parse_amalgam_word(g, g, "L:q"), Error);
  CHECK_THROWS_AS(parse_amalgam_word(g, g, "L:x^"), Error);
  CHECK_THROWS_AS(parse_amalgam_word(g, g, "L:x^two"), Error);
  CHECK_THROWS_AS(parse_amalgam_word(g, g, "L:"), Error);
}

TEST_CASE("amalgam reduction merges, cancels, and absorbs central letters") {
  GroupSpec g = heisenberg();
  const ExactMatrix x = g.generator("x");
  const ExactMatrix y = g.generator("y");
  const ExactMatrix z = g.generator("z");

  // Same-side inverse pair cancels to the empty word.
  AmalgamWord cancel = parse_amalgam_word(g, g, "L:x L:x^-1");
  CHECK(reduce_amalgam(g, g, cancel).empty());

  // A central letter is absorbed into the next letter across the seam.
  AmalgamWord seam = parse_amalgam_word(g, g, "L:z R:y");
  AmalgamWord seam_red = reduce_amalgam(g, g, seam);
  REQUIRE(seam_red.letters.size() == 1);
  CHECK(seam_red.letters[0].side == Side::Right);
  CHECK(seam_red.letters[0].g == z.mul(y));

  // At the end of the word the absorption goes left.
  AmalgamWord tail = parse_amalgam_word(g, g, "R:y L:z");
  AmalgamWord tail_red = reduce_amalgam(g, g, tail);
  REQUIRE(tail_red.letters.size() == 1);
  CHECK(tail_red.letters[0].side == Side::Right);
  CHECK(tail_red.letters[0].g == y.mul(z));

  // Alternating non-central letters are already reduced.
  AmalgamWord alt = parse_amalgam_word(g, g, "L:x R:y L:x");
  AmalgamWord alt_red = reduce_amalgam(g, g, alt);
  REQUIRE(alt_red.letters.size() == 3);
  CHECK(alt_red.letters[0].g == x);
  CHECK(alt_red.letters[2].g == x);

  // A lone central letter is a valid non-identity word.
  AmalgamWord lone = parse_amalgam_word(g, g, "L:z");
  CHECK(reduce_amalgam(g, g, lone).letters.size() == 1);

  // Opposite-side inverse matrices do not cancel in the free product.
  AmalgamWord cross = parse_amalgam_word(g, g, "L:x R:x^-1");
  CHECK(reduce_amalgam(g, g, cross).letters.size() == 2);

  // Reduction is idempotent on a seeded corpus.
  std::mt19937 rng(2024);
  const char* names[3] = {"x", "y", "z"};
  for (int trial = 0; trial < 50; ++trial) {
    AmalgamWord w;
    const int len = static_cast<int>(rng() % 7);
    for (int i = 0; i < len; ++i) {
      const Side side = (rng() & 1) ? Side::Left : Side::Right;
      const long long e = static_cast<long long>(rng() % 5) - 2;
      w.letters.push_back(AmalgamLetter{side, g.generator(names[rng() % 3]).pow(e)});
    }
    AmalgamWord r1 = reduce_amalgam(g, g, w);
    AmalgamWord r2 = reduce_amalgam(g, g, r1);
    CHECK(r1.str() == r2.str());
  }
}

TEST_CASE("amalgam reduction rejects mismatched factors") {
  GroupSpec h = heisenberg();
  AmalgamWord empty;
  CHECK_THROWS_AS(reduce_amalgam(h, abels(2), empty), Error);
  CHECK_THROWS_AS(reduce_amalgam(h, heisenberg_mod(3), empty), Error);

  AmalgamWord bad;
  bad.letters.push_back(AmalgamLetter{Side::Left, ExactMatrix::identity(4, h.ring())});
  CHECK_THROWS_AS(reduce_amalgam(h, h, bad), Error);
}

TEST_CASE("hnn words parse with t reserved") {
  GroupSpec g = heisenberg();
  HNNWord w = parse_hnn_word(g, "t^-1 x t x^-1");
  REQUIRE(w.letters.size() == 4);
  CHECK(w.letters[0].stable);
  CHECK(w.letters[0].tpow == -1);
  CHECK_FALSE(w.letters[1].stable);
  CHECK(w.letters[1].g == g.generator("x"));
  CHECK(w.letters[2].tpow == 1);
  CHECK(w.letters[3].g == g.generator("x").pow(-1));
  CHECK(parse_hnn_word(g, "").empty());
  CHECK_THROWS_AS(parse_hnn_word(g, "q"), Error);
  CHECK_THROWS_AS(parse_hnn_word(g, "t^"), Error);
}

TEST_CASE("britton reduction classifies reduced words") {
  GroupSpec g = heisenberg();
  const ExactMatrix z = g.generator("z");

  // Central letters slide through stable letters, which then cancel.
  BrittonResult conj = britton_reduce(g, parse_hnn_word(g, "t^-1 z t"));
  CHECK(conj.form == BrittonForm::CentralOnly);
  CHECK(conj.nontrivial);
  CHECK(conj.central == z);
  REQUIRE(conj.word.letters.size() == 1);
  CHECK(conj.word.letters[0].g == z);

  // Non-central letters block the pinch.
  BrittonResult comm = britton_reduce(g, parse_hnn_word(g, "t^-1 x t x^-1"));
  CHECK(comm.form == BrittonForm::StableToGroup);
  CHECK(comm.nontrivial);
  CHECK(comm.word.letters.size() == 4);
  CHECK(comm.central.is_identity());

  CHECK_FALSE(britton_reduce(g, parse_hnn_word(g, "")).nontrivial);
  CHECK_FALSE(britton_reduce(g, parse_hnn_word(g, "z z^-1")).nontrivial);
  CHECK_FALSE(britton_reduce(g, parse_hnn_word(g, "x t^0 x^-1")).nontrivial);
  CHECK_FALSE(britton_reduce(g, parse_hnn_word(g, "t^2 t^-2")).nontrivial);
  CHECK_FALSE(britton_reduce(g, parse_hnn_word(g, "t^-1 z t z^-1")).nontrivial);

  BrittonResult cs = britton_reduce(g, parse_hnn_word(g, "z t^3"));
  CHECK(cs.form == BrittonForm::CentralStable);
  CHECK(cs.nontrivial);
  CHECK(cs.central == z);
  REQUIRE(cs.word.letters.size() == 2);
  CHECK(cs.word.letters[1].tpow == 3);

  CHECK(britton_reduce(g, parse_hnn_word(g, "x t x^-1 t^-1")).form ==
        BrittonForm::GroupToStable);
  CHECK(britton_reduce(g, parse_hnn_word(g, "t x t^-1")).form == BrittonForm::StableToStable);

  // Adjacent group letters merge; a single non-central letter is a group word.
  BrittonResult merged = britton_reduce(g, parse_hnn_word(g, "x y"));
  CHECK(merged.form == BrittonForm::GroupToGroup);
  REQUIRE(merged.word.letters.size() == 1);
  CHECK(merged.word.letters[0].g == g.generator("x").mul(g.generator("y")));

  // The central accumulator folds into the first group letter of mixed forms.
  BrittonResult folded = britton_reduce(g, parse_hnn_word(g, "z t x t^-1"));
  CHECK(folded.form == BrittonForm::StableToStable);
  bool saw_group = false;
  for (const auto& l : folded.word.letters)
    if (!l.stable) {
      CHECK(l.g == z.mul(g.generator("x")));
      saw_group = true;
    }
  CHECK(saw_group);

  std::set<std::string> names;
  for (BrittonForm f :
       {BrittonForm::GroupToStable, BrittonForm::StableToStable, BrittonForm::GroupToGroup,
        BrittonForm::StableToGroup, BrittonForm::CentralStable, BrittonForm::CentralOnly})
    names.insert(britton_form_name(f));
  CHECK(names.size() == 6);

  // Reducing a reduced word changes nothing.
  for (const char* text : {"t^-1 z t", "t^-1 x t x^-1", "z t^3", "x y", "z t x t^-1"}) {
    BrittonResult once = britton_reduce(g, parse_hnn_word(g, text));
    BrittonResult twice = britton_reduce(g, once.word);
    CHECK(once.word.str() == twice.word.str());
    CHECK(once.form == twice.form);
    CHECK(once.nontrivial == twice.nontrivial);
  }
}

TEST_CASE("evaluate_amalgam takes ordered products when the amalgam matches") {
  GroupSpec g = heisenberg();
  FinDimRep rho = heis_rep(3, 1, 3);
  const std::complex<double> omega = std::exp(std::complex<double>(0, 2.0 * M_PI / 3.0));

  AmalgamWord empty;
  RepMatrix id = evaluate_amalgam(rho, rho, empty);
  CHECK(id.distance_from_identity() == 0.0);

  // A central letter evaluates identically on either side.
  RepMatrix lz = evaluate_amalgam(rho, rho, parse_amalgam_word(g, g, "L:z"));
  RepMatrix rz = evaluate_amalgam(rho, rho, parse_amalgam_word(g, g, "R:z"));
  CHECK(max_abs_diff(lz.dense(), rz.dense()) == 0.0);
  CHECK(std::abs(lz.dense()(0, 0) - omega) < 1e-12);

  // Inserting a central inverse pair across the seam changes nothing.
  RepMatrix plain = evaluate_amalgam(rho, rho, parse_amalgam_word(g, g, "L:x R:y"));
  RepMatrix seam = evaluate_amalgam(rho, rho, parse_amalgam_word(g, g, "L:x R:z L:z^-1 R:y"));
  CHECK(max_abs_diff(plain.dense(), seam.dense()) < 1e-12);
  CHECK(plain.is_monomial());

  // Mismatched central characters are rejected exactly.
  FinDimRep other = heis_rep(3, 2, 3);
  CHECK_THROWS_AS(evaluate_amalgam(rho, other, parse_amalgam_word(g, g, "L:x")), Error);

  // The numeric agreement path accepts a conjugated copy and rejects a
  // genuinely different character.
  FinDimRep conj = FinDimRep::conjugated(rho, Eigen::MatrixXcd::Identity(9, 9));
  RepMatrix via_conj = evaluate_amalgam(rho, conj, parse_amalgam_word(g, g, "L:x R:y"));
  CHECK(max_abs_diff(via_conj.dense(), plain.dense()) < 1e-12);
  FinDimRep conj_other = FinDimRep::conjugated(other, Eigen::MatrixXcd::Identity(9, 9));
  CHECK_THROWS_AS(evaluate_amalgam(rho, conj_other, parse_amalgam_word(g, g, "L:x")), Error);

  CHECK_THROWS_AS(evaluate_amalgam(heis_rep(2, 1, 2), rho, empty), Error);
}

TEST_CASE("evaluate_hnn maps the stable letter to a commuting unitary") {
  GroupSpec g = heisenberg();
  FinDimRep rho = heis_rep(3, 1, 3);
  const Eigen::MatrixXcd u = seeded_unitary(9, 0xfeedULL);

  RepMatrix cancel = evaluate_hnn(rho, u, parse_hnn_word(g, "t t^-1"));
  CHECK(cancel.distance_from_identity() < 1e-9);

  // t^-1 z t evaluates to the scalar image of z.
  RepMatrix conj = evaluate_hnn(rho, u, parse_hnn_word(g, "t^-1 z t"));
  CHECK(max_abs_diff(conj.dense(), rho.at_element(g.generator("z")).dense()) < 1e-12);

  // Stable powers use repeated squaring; compare against direct products.
  RepMatrix p3 = evaluate_hnn(rho, u, parse_hnn_word(g, "t^3"));
  CHECK(max_abs_diff(p3.dense(), u * u * u) < 1e-12);
  RepMatrix pm2 = evaluate_hnn(rho, u, parse_hnn_word(g, "t^-2"));
  CHECK(max_abs_diff(pm2.dense(), (u * u).adjoint()) < 1e-12);

  CHECK_THROWS_AS(evaluate_hnn(rho, 2.0 * u, parse_hnn_word(g, "t")), Error);
  CHECK_THROWS_AS(evaluate_hnn(rho, seeded_unitary(4, 1), parse_hnn_word(g, "t")), Error);

  // Representations without element evaluation are rejected up front.
  std::vector<std::pair<std::string, Eigen::MatrixXcd>> images;
  images.emplace_back("a", Eigen::MatrixXcd::Identity(2, 2));
  FinDimRep expl = FinDimRep::explicit_rep(images);
  CHECK_THROWS_AS(evaluate_hnn(expl, Eigen::MatrixXcd::Identity(2, 2), HNNWord{}), Error);
}

TEST_CASE("seeded unitaries are deterministic and unitary") {
  for (int n : {1, 2, 9, 32}) {
    const Eigen::MatrixXcd u = seeded_unitary(n, 99);
    CHECK(max_abs_diff(u.adjoint() * u, Eigen::MatrixXcd::Identity(n, n)) < 1e-12);
    CHECK(max_abs_diff(u, seeded_unitary(n, 99)) == 0.0);
  }
  CHECK(max_abs_diff(seeded_unitary(5, 1), seeded_unitary(5, 2)) > 1e-3);
  CHECK_THROWS_AS(seeded_unitary(0, 7), Error);
}

TEST_CASE("separate_amalgam finds witnesses over congruence quotients") {
  GroupSpec g = heisenberg();
  const Character lambda = z_line(1, 3);
  SearchBudget budget;
  budget.max_modulus = 16;

  AmalgamWord w = parse_amalgam_word(g, g, "L:x R:x");
  SeparationReport rep = separate_amalgam(g, g, w, lambda, budget);
  CHECK(rep.separated);
  REQUIRE(rep.winner.has_value());
  CHECK(rep.winner->modulus == 3);
  CHECK(rep.winner->norm >= 0.1);
  CHECK(rep.winner->seed == -1);
  CHECK_FALSE(rep.identity_in_group);
  // The modulus-2 attempt fails the character certificate and is recorded.
  REQUIRE(rep.attempts.size() == 2);
  CHECK(rep.attempts[0].modulus == 2);
  CHECK(rep.attempts[0].detail != "ok");
  CHECK(rep.attempts[1].detail == "ok");

  // Deterministic: a second run reproduces the report exactly.
  CHECK(same_report(rep, separate_amalgam(g, g, w, lambda, budget)));

  // A central letter is separated through the character itself.
  SeparationReport zrep = separate_amalgam(g, g, parse_amalgam_word(g, g, "L:z"), lambda, budget);
  CHECK(zrep.separated);
  CHECK(zrep.winner->modulus == 3);

  // Words that reduce to the identity are never searched.
  SeparationReport idrep =
      separate_amalgam(g, g, parse_amalgam_word(g, g, "L:x L:x^-1"), lambda, budget);
  CHECK(idrep.identity_in_group);
  CHECK_FALSE(idrep.separated);
  CHECK(idrep.attempts.empty());

  // Equal compatible characters evaluate L:x R:x^-1 to the identity at every
  // admissible modulus; the report flags that outcome for review.
  SearchBudget small = budget;
  small.max_modulus = 6;
  SeparationReport flat =
      separate_amalgam(g, g, parse_amalgam_word(g, g, "L:x R:x^-1"), lambda, small);
  CHECK_FALSE(flat.separated);
  CHECK_FALSE(flat.identity_in_group);
  CHECK(flat.identity_at_every_level);
}

TEST_CASE("separate_hnn draws deterministic unitaries per modulus") {
  GroupSpec g = heisenberg();
  const Character lambda = z_line(1, 3);
  SearchBudget budget;
  budget.max_modulus = 16;
  budget.max_seeds = 8;

  HNNWord w = parse_hnn_word(g, "t^-1 x t x^-1");
  SeparationReport rep = separate_hnn(g, w, lambda, 7, budget);
  CHECK(rep.separated);
  REQUIRE(rep.winner.has_value());
  CHECK(rep.winner->modulus == 3);
  CHECK(rep.winner->seed >= 0);
  CHECK(rep.winner->norm >= 0.1);
  CHECK(rep.classification == "stable..group");
  CHECK(same_report(rep, separate_hnn(g, w, lambda, 7, budget)));

  // A different master seed draws different unitaries.
  SeparationReport rep2 = separate_hnn(g, w, lambda, 8, budget);
  CHECK(rep2.separated);
  CHECK(rep2.winner->norm != rep.winner->norm);

  // Words equal to the identity in the extension are never searched.
  SeparationReport idrep = separate_hnn(g, parse_hnn_word(g, "t^-1 z t z^-1"), lambda, 7, budget);
  CHECK(idrep.identity_in_group);
  CHECK(idrep.attempts.empty());
  CHECK(idrep.classification == "central");

  // The bare stable letter is separated by any unitary away from 1.
  SeparationReport trep = separate_hnn(g, parse_hnn_word(g, "t"), z_line(0, 1), 7, budget);
  CHECK(trep.separated);
  CHECK(trep.winner->modulus == 2);
  CHECK(trep.classification == "central*stable");

  // A central witness is separated by the character, independent of u.
  SeparationReport zrep = separate_hnn(g, parse_hnn_word(g, "z"), lambda, 7, budget);
  CHECK(zrep.separated);
  CHECK(zrep.classification == "central");
}

TEST_CASE("hnn_to_amalgam_transfer matches the stable-letter evaluation") {
  GroupSpec g = heisenberg();
  FinDimRep gamma = heis_rep(3, 1, 3);
  const Eigen::MatrixXcd u = seeded_unitary(9, 42);

  auto [left, right] = hnn_to_amalgam_transfer(gamma, u);
  CHECK(left.dim() == 9);

  // sigma(t^-1 g t) = u* rho(g) u is exactly the left factor's image, so the
  // commutator witness evaluates identically through both constructions.
  RepMatrix via_hnn = evaluate_hnn(gamma, u, parse_hnn_word(g, "t^-1 x t x^-1"));
  RepMatrix via_amalgam =
      evaluate_amalgam(left, right, parse_amalgam_word(g, g, "L:x R:x^-1"));
  CHECK(max_abs_diff(via_hnn.dense(), via_amalgam.dense()) < 1e-12);
  CHECK(via_hnn.distance_from_identity() >= 0.1);

  CHECK_THROWS_AS(hnn_to_amalgam_transfer(gamma, Eigen::MatrixXcd::Identity(4, 4)), Error);
}

TEST_CASE("embed_hnn_word substitutes stable powers into the right factor") {
  GroupSpec g = heisenberg();
  const ExactMatrix x = g.generator("x");
  const ExactMatrix y = g.generator("y");

  AmalgamWord e1 = embed_hnn_word(g, parse_hnn_word(g, "t x t^-1"), y);
  REQUIRE(e1.letters.size() == 3);
  CHECK(e1.letters[0].side == Side::Right);
  CHECK(e1.letters[0].g == y);
  CHECK(e1.letters[1].side == Side::Left);
  CHECK(e1.letters[1].g == x);
  CHECK(e1.letters[2].g == y.pow(-1));

  AmalgamWord e2 = embed_hnn_word(g, parse_hnn_word(g, "t^2 x t^-2"), y);
  REQUIRE(e2.letters.size() == 3);
  CHECK(e2.letters[0].g == y.pow(2));

  // Substituting the letter itself keeps the word alternating.
  CHECK(embed_hnn_word(g, parse_hnn_word(g, "t x t^-1"), x).letters.size() == 3);

  // Trivial words embed to the empty word.
  CHECK(embed_hnn_word(g, parse_hnn_word(g, "t^-1 z t z^-1"), y).empty());

  // Central-times-stable words collapse to one right-side letter.
  AmalgamWord cs = embed_hnn_word(g, parse_hnn_word(g, "z t^3"), y);
  REQUIRE(cs.letters.size() == 1);
  CHECK(cs.letters[0].g == g.generator("z").mul(y.pow(3)));

  // g0 must stay outside C up to the largest stable power.
  CHECK_THROWS_AS(embed_hnn_word(g, parse_hnn_word(g, "t x t^-1"), g.generator("z")), Error);
}

TEST_CASE("abels experiment reports one-sided evidence") {
  SearchBudget budget;
  budget.max_modulus = 5;
  budget.cap = 100000;
  AbelsReport rep = abels_experiment(2, {3, 9, 15}, budget);

  CHECK(rep.p == 2);
  REQUIRE(rep.probe.entries.size() == 3);
  CHECK(rep.probe.inside == 3);
  CHECK(rep.probe.outside == 0);
  CHECK(rep.probe.errors == 0);
  for (const auto& e : rep.probe.entries) CHECK(e.verdict == "inside");

  CHECK(rep.witness_length == 4);
  CHECK(rep.witness_reduced_nontrivial);
  CHECK_FALSE(rep.separation.separated);
  CHECK_FALSE(rep.separation.identity_in_group);
  CHECK(rep.separation.identity_at_every_level);
  CHECK(rep.one_sided_evidence);

  // Moduli 2 and 4 fail on the inverted prime, 5 exceeds the cap; only the
  // modulus-3 attempt completes, and it evaluates to the identity exactly.
  int completed = 0;
  for (const auto& a : rep.separation.attempts)
    if (a.detail == "ok") {
      ++completed;
      CHECK(a.modulus == 3);
      CHECK(a.norm == 0.0);
    }
  CHECK(completed == 1);

  CHECK_THROWS_AS(abels_experiment(2, {4}, budget), Error);
  CHECK_THROWS_AS(abels_experiment(5, {10}, budget), Error);
}
