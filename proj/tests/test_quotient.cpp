#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "camal/quotient.hpp"

using namespace camal;

namespace {

// Test-local closure oracle: plain std::map over entry vectors, long-hand
// modular multiply.  Independent of the production hash/encoding path.
struct OracleGroup {
  int n;
  long long m;
  std::vector<std::vector<long long>> elems;
  std::map<std::vector<long long>, int> idx;

  std::vector<long long> mul(const std::vector<long long>& a,
                             const std::vector<long long>& b) const {
    std::vector<long long> c(n * n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        long long acc = 0;
        for (int k = 0; k < n; ++k) acc = (acc + a[i * n + k] * b[k * n + j]) % m;
        c[i * n + j] = acc;
      }
    return c;
  }
};

OracleGroup oracle_closure(const GroupSpec& g, long long m) {
  OracleGroup og;
  og.n = g.dim();
  og.m = m;
  std::vector<std::vector<long long>> gens;
  for (auto& [name, mat] : g.generators()) {
    ExactMatrix r = mat.reduce_mod(m);
    std::vector<long long> v;
    for (int i = 0; i < og.n; ++i)
      for (int j = 0; j < og.n; ++j) v.push_back(r.at(i, j).raw().convert_to<long long>());
    gens.push_back(v);
    // inverse by brute-force power (finite order)
    std::vector<long long> id(og.n * og.n, 0);
    for (int i = 0; i < og.n; ++i) id[i * og.n + i] = (m == 1 ? 0 : 1);
    std::vector<long long> pw = v, prev = id;
    while (pw != id) {
      prev = pw;
      pw = og.mul(pw, v);
    }
    gens.push_back(prev);
  }
  std::vector<long long> id(og.n * og.n, 0);
  for (int i = 0; i < og.n; ++i) id[i * og.n + i] = (m == 1 ? 0 : 1);
  og.idx[id] = 0;
  og.elems.push_back(id);
  std::queue<int> bfs;
  bfs.push(0);
  while (!bfs.empty()) {
    int at = bfs.front();
    bfs.pop();
    for (auto& s : gens) {
      auto nx = og.mul(og.elems[at], s);
      if (!og.idx.count(nx)) {
        og.idx[nx] = static_cast<int>(og.elems.size());
        og.elems.push_back(nx);
        bfs.push(static_cast<int>(og.idx[nx]));
      }
    }
  }
  return og;
}

std::vector<long long> eltvec(const FiniteQuotient& q, uint32_t idx) {
  ExactMatrix m = q.matrix_of(idx);
  std::vector<long long> v;
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) v.push_back(m.at(i, j).raw().convert_to<long long>());
  return v;
}

}  // namespace

TEST_CASE("heisenberg congruence image orders are m^3") {
  GroupSpec g = heisenberg();
  for (long long m = 1; m <= 6; ++m) {
    auto q = enumerate_quotient(g, m);
    CHECK(q->order() == static_cast<uint32_t>(m * m * m));
    CHECK(q->c_image().size() == static_cast<size_t>(m));
    CHECK(q->transversal().size() == static_cast<size_t>(m * m));
  }
}

TEST_CASE("quotient matches the independent closure oracle") {
  GroupSpec g = heisenberg();
  for (long long m : {2, 3, 4, 5}) {
    auto q = enumerate_quotient(g, m);
    OracleGroup og = oracle_closure(g, m);
    REQUIRE(q->order() == og.elems.size());
    // same element sets
    for (uint32_t i = 0; i < q->order(); ++i) CHECK(og.idx.count(eltvec(*q, i)));
    // multiplication agrees on all pairs
    for (uint32_t a = 0; a < q->order(); ++a)
      for (uint32_t b = 0; b < q->order(); ++b) {
        auto prod = og.mul(eltvec(*q, a), eltvec(*q, b));
        CHECK(eltvec(*q, q->mult(a, b)) == prod);
      }
  }
}

TEST_CASE("lagrange bookkeeping") {
  GroupSpec g = heisenberg();
  for (long long m : {2, 3, 4, 5, 6}) {
    auto q = enumerate_quotient(g, m);
    CHECK(q->order() % q->c_image().size() == 0);
    CHECK(q->transversal().size() * q->c_image().size() == q->order());
    // transversal representatives are minimal in their coset and sorted
    for (size_t i = 1; i < q->transversal().size(); ++i)
      CHECK(q->encoding(q->transversal()[i - 1]) < q->encoding(q->transversal()[i]));
    for (uint32_t u = 0; u < q->order(); ++u) {
      uint32_t rep = q->transversal()[q->coset_of(u)];
      // same coset: rep^{-1} u lies in the image of C
      CHECK(q->in_c_image(q->mult(q->inverse(rep), u)));
      CHECK(q->encoding(rep) <= q->encoding(u));
    }
  }
}

TEST_CASE("group operations inside the quotient") {
  GroupSpec g = heisenberg();
  auto q = enumerate_quotient(g, 5);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<uint32_t> pick(0, q->order() - 1);
  for (int t = 0; t < 200; ++t) {
    uint32_t a = pick(rng), b = pick(rng), c = pick(rng);
    CHECK(q->mult(q->mult(a, b), c) == q->mult(a, q->mult(b, c)));
    CHECK(q->mult(a, q->inverse(a)) == q->identity_index());
    CHECK(q->mult(q->identity_index(), a) == a);
  }
  CHECK(q->power(pick(rng), 0) == q->identity_index());
}

TEST_CASE("reduction map is a homomorphism on divisor pairs") {
  GroupSpec g = heisenberg();
  for (auto [m, mp] : std::vector<std::pair<long long, long long>>{{2, 4}, {3, 9}, {2, 6}}) {
    auto qs = enumerate_quotient(g, m);
    auto qb = enumerate_quotient(g, mp);
    // map: reduce a mod-mp element to mod-m, then locate it
    auto down = [&](uint32_t idx) { return qs->index_of(qb->matrix_of(idx).reduce_mod(m)); };
    for (size_t gi = 0; gi < g.generators().size(); ++gi)
      for (size_t gj = 0; gj < g.generators().size(); ++gj) {
        uint32_t a = qb->generator_image(gi), b = qb->generator_image(gj);
        CHECK(down(qb->mult(a, b)) == qs->mult(down(a), down(b)));
      }
  }
}

TEST_CASE("abels congruence images for odd moduli") {
  GroupSpec g = abels(2);
  auto q3 = enumerate_quotient(g, 3);
  // order = m^6 * ord_m(2)^2: 729 * 4
  CHECK(q3->order() == 2916);
  CHECK(q3->c_image().size() == 3);
  auto q5 = enumerate_quotient(g, 5);
  CHECK(q5->order() == 250000);  // 15625 * 16
  CHECK(q5->c_image().size() == 5);

  // sampled associativity and table consistency on the big quotient
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<uint32_t> pick(0, q5->order() - 1);
  for (int t = 0; t < 50; ++t) {
    uint32_t a = pick(rng), b = pick(rng);
    ExactMatrix prod = q5->matrix_of(a).mul(q5->matrix_of(b));
    CHECK(q5->mult(a, b) == q5->index_of(prod.reduce_mod(5)));
  }
}

TEST_CASE("abels quotient rejects moduli sharing a factor with p") {
  GroupSpec g = abels(2);
  CHECK_THROWS_AS(enumerate_quotient(g, 4), Error);
  CHECK_THROWS_AS(enumerate_quotient(g, 6), Error);
}

TEST_CASE("cap aborts enumeration") {
  GroupSpec g = heisenberg();
  CHECK_THROWS_AS(enumerate_quotient(g, 7, 100), Error);
}

TEST_CASE("torsion group quotients along divisors") {
  GroupSpec g = heisenberg_mod(9);
  auto q = enumerate_quotient(g, 3);
  CHECK(q->order() == 27);
  CHECK(q->c_image().size() == 3);
  CHECK_THROWS_AS(enumerate_quotient(g, 2), Error);
}

TEST_CASE("filtration witness finds the first good modulus") {
  GroupSpec g = heisenberg();
  ExactMatrix x = g.generator("x");
  ExactMatrix z = g.generator("z");
  ExactMatrix e = ExactMatrix::identity(3, g.ring());

  WitnessResult r1 = filtration_witness(g, {x}, {{z, e}}, 1, 16);
  REQUIRE(r1.modulus.has_value());
  CHECK(*r1.modulus == 2);

  // z^2 collapses mod 2, so the first workable modulus is 3
  ExactMatrix xz = x.mul(z);
  WitnessResult r2 = filtration_witness(g, {xz}, {{z.pow(2), e}}, 1, 16);
  REQUIRE(r2.modulus.has_value());
  CHECK(*r2.modulus == 3);
  CHECK(r2.attempts.size() == 3);  // m=1,2 fail, m=3 wins

  // empty conditions hold in the trivial quotient
  WitnessResult r3 = filtration_witness(g, {}, {}, 1, 16);
  REQUIRE(r3.modulus.has_value());
  CHECK(*r3.modulus == 1);
}

TEST_CASE("filtration witness validates inputs and reports exhaustion") {
  GroupSpec g = heisenberg();
  ExactMatrix z = g.generator("z");
  CHECK_THROWS_AS(filtration_witness(g, {z}, {}, 1, 4), Error);  // z lies in C
  CHECK_THROWS_AS(filtration_witness(g, {}, {{z, z}}, 1, 4), Error);  // equal pair

  // x^2 is central mod 2 only; demanding it outside C while m stays < 3 fails
  WitnessResult r = filtration_witness(g, {g.generator("x").pow(2)}, {}, 2, 2);
  CHECK_FALSE(r.modulus.has_value());
  REQUIRE(r.attempts.size() == 1);
  CHECK_FALSE(r.attempts[0].ok);
}

TEST_CASE("profinite probe: heisenberg x stays outside") {
  GroupSpec g = heisenberg();
  ProbeReport r = profinite_probe(g, g.generator("x"), {2, 3});
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[0].verdict == "outside");
  CHECK(r.entries[1].verdict == "outside");
  CHECK(r.outside == 2);
  CHECK(r.entries[0].c_image_order == 2);
  CHECK(r.entries[1].c_image_order == 3);
}

TEST_CASE("profinite probe: abels fraction line lands inside") {
  GroupSpec g = abels(2);
  ExactMatrix x0 = ExactMatrix::elementary(4, g.ring(), 0, 3, RingValue::plocal(1, 1, 2));
  ProbeReport r = profinite_probe(g, x0, {3, 5, 7});
  REQUIRE(r.entries.size() == 3);
  for (auto& e : r.entries) CHECK(e.verdict == "inside");
  CHECK(r.inside == 3);

  // even moduli cannot invert p = 2: recorded as per-modulus errors
  ProbeReport r2 = profinite_probe(g, x0, {3, 4});
  CHECK(r2.entries[0].verdict == "inside");
  CHECK(r2.entries[1].verdict == "error");
  CHECK(r2.errors == 1);
}

TEST_CASE("probe rejects elements of C") {
  GroupSpec g = heisenberg();
  CHECK_THROWS_AS(profinite_probe(g, g.generator("z").pow(6), {2, 3}), Error);
}

TEST_CASE("normal core of the whole group and of the center") {
  GroupSpec g = heisenberg();
  auto q = enumerate_quotient(g, 3);
  std::vector<uint32_t> whole(q->order());
  for (uint32_t i = 0; i < q->order(); ++i) whole[i] = i;
  CHECK(normal_core(*q, whole) == whole);
  // central subgroups are their own core
  std::vector<uint32_t> c = q->c_image();
  CHECK(normal_core(*q, c) == c);
}

TEST_CASE("normal core against brute-force subgroup enumeration") {
  GroupSpec g = heisenberg();
  auto q = enumerate_quotient(g, 2);
  REQUIRE(q->order() == 8);

  // S = <image of x>
  uint32_t xi = q->index_of(g.generator("x"));
  std::set<uint32_t> s_set = {q->identity_index()};
  uint32_t acc = xi;
  while (!s_set.count(acc)) {
    s_set.insert(acc);
    acc = q->mult(acc, xi);
  }
  std::vector<uint32_t> s(s_set.begin(), s_set.end());
  std::vector<uint32_t> core = normal_core(*q, s);

  // oracle: largest normal subgroup contained in S, found by enumerating the
  // closures of all subsets of S
  std::vector<uint32_t> best = {q->identity_index()};
  size_t nsub = 1ull << s.size();
  for (size_t mask = 0; mask < nsub; ++mask) {
    std::set<uint32_t> h = {q->identity_index()};
    for (size_t b = 0; b < s.size(); ++b)
      if (mask & (1ull << b)) h.insert(s[b]);
    // close under products/inverses
    bool grew = true;
    while (grew) {
      grew = false;
      std::set<uint32_t> add;
      for (uint32_t a : h) {
        if (!h.count(q->inverse(a))) add.insert(q->inverse(a));
        for (uint32_t b : h)
          if (!h.count(q->mult(a, b))) add.insert(q->mult(a, b));
      }
      for (uint32_t v : add) {
        h.insert(v);
        grew = true;
      }
    }
    bool inside = std::all_of(h.begin(), h.end(), [&](uint32_t u) { return s_set.count(u); });
    if (!inside) continue;
    bool normal = true;
    for (uint32_t gg = 0; gg < q->order() && normal; ++gg)
      for (uint32_t u : h)
        if (!h.count(q->mult(q->mult(q->inverse(gg), u), gg))) {
          normal = false;
          break;
        }
    if (normal && h.size() > best.size()) best.assign(h.begin(), h.end());
  }
  std::sort(best.begin(), best.end());
  CHECK(core == best);
}

TEST_CASE("normal core validates its input") {
  GroupSpec g = heisenberg();
  auto q = enumerate_quotient(g, 2);
  uint32_t xi = q->index_of(g.generator("x"));
  CHECK_THROWS_AS(normal_core(*q, {xi}), Error);  // identity missing
}

TEST_CASE("deterministic indexing across enumerations") {
  GroupSpec g = heisenberg();
  auto a = enumerate_quotient(g, 4);
  auto b = enumerate_quotient(g, 4);
  REQUIRE(a->order() == b->order());
  for (uint32_t i = 0; i < a->order(); ++i) CHECK(a->encoding(i) == b->encoding(i));
  CHECK(a->transversal() == b->transversal());
  CHECK(a->c_image() == b->c_image());
}
