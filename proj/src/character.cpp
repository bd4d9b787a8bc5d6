#include "camal/character.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace camal {

namespace {

double frac_turns(double t) {
  double f = t - std::floor(t);
  return f == 1.0 ? 0.0 : f;
}

}  // namespace

Angle Angle::rational(const Rational& r) {
  Angle a;
  a.exact = true;
  a.q = r;
  a.turns = static_cast<double>(r.num) / static_cast<double>(r.den);
  return a;
}

Angle Angle::real(double turns) {
  Angle a;
  a.exact = false;
  a.turns = frac_turns(turns);
  return a;
}

// --------------------------------------------------------------- Character

Character::Character(AbelianStructure structure, std::vector<Angle> free_angles,
                     std::vector<long long> torsion_exponents)
    : structure_(std::move(structure)), free_(std::move(free_angles)),
      torsion_(std::move(torsion_exponents)) {
  if (static_cast<int>(free_.size()) != structure_.free_rank)
    throw Error(Err::PreconditionFailed, "one angle per free basis direction required");
  if (torsion_.size() != structure_.torsion.size())
    throw Error(Err::PreconditionFailed, "one exponent per torsion direction required");
  for (size_t i = 0; i < torsion_.size(); ++i) {
    long long d = structure_.torsion[i];
    torsion_[i] %= d;
    if (torsion_[i] < 0) torsion_[i] += d;
  }
}

bool Character::all_exact() const {
  for (const Angle& a : free_)
    if (!a.exact) return false;
  return true;
}

std::optional<Rational> Character::exact_exponent(const CCoords& c) const {
  if (c.free_part.size() != free_.size() || c.torsion_part.size() != torsion_.size())
    throw Error(Err::PreconditionFailed, "coordinate shape differs from the declared structure");
  Rational acc{0, 1};
  for (size_t i = 0; i < free_.size(); ++i) {
    if (c.free_part[i] == 0) continue;
    if (!free_[i].exact) return std::nullopt;
    acc = acc.plus(free_[i].q.scaled(c.free_part[i]));
  }
  for (size_t i = 0; i < torsion_.size(); ++i) {
    long long d = structure_.torsion[i];
    long long n = static_cast<long long>(static_cast<__int128>(torsion_[i]) * c.torsion_part[i] % d);
    acc = acc.plus(Rational::mod1(n, d));
  }
  return acc;
}

std::complex<double> Character::value(const CCoords& c) const {
  if (auto e = exact_exponent(c)) return e->unit();
  double t = 0.0;
  for (size_t i = 0; i < free_.size(); ++i) {
    if (c.free_part[i] == 0) continue;
    t += free_[i].turns * c.free_part[i].convert_to<double>();
    t = t - std::floor(t);
  }
  for (size_t i = 0; i < torsion_.size(); ++i) {
    long long d = structure_.torsion[i];
    t += static_cast<double>(torsion_[i] * c.torsion_part[i] % d) / static_cast<double>(d);
    t = t - std::floor(t);
  }
  double a = 2.0 * std::numbers::pi * frac_turns(t);
  return {std::cos(a), std::sin(a)};
}

std::complex<double> extend_by_zero(const GroupSpec& g, const Character& lambda,
                                    const ExactMatrix& x) {
  g.validate_element(x);
  if (!g.in_c(x)) return {0.0, 0.0};
  return lambda.value(g.c_coordinates(x));
}

// --------------------------------------------------------------- psd_check

PsdReport psd_check(const GroupSpec& g, const Character& lambda,
                    const std::vector<ExactMatrix>& f, double tol) {
  if (f.empty()) throw Error(Err::PreconditionFailed, "psd_check needs a nonempty element list");
  const int n = static_cast<int>(f.size());
  std::vector<ExactMatrix> inv;
  inv.reserve(f.size());
  for (const ExactMatrix& e : f) {
    g.validate_element(e);
    inv.push_back(e.inverse());
  }
  Eigen::MatrixXcd gram(n, n);
  for (int s = 0; s < n; ++s)
    for (int t = s; t < n; ++t) {
      std::complex<double> v = extend_by_zero(g, lambda, inv[s].mul(f[t]));
      gram(s, t) = v;
      gram(t, s) = std::conj(v);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error(Err::Internal, "eigenvalue solve failed on a Hermitian Gram matrix");
  PsdReport r;
  r.size = n;
  r.min_eigenvalue = es.eigenvalues()(0);
  r.pass = r.min_eigenvalue >= -tol;
  return r;
}

long long k0_for(double eps, int s, int L) {
  if (!(eps > 0.0)) throw Error(Err::PreconditionFailed, "eps must be > 0");
  if (s < 1) throw Error(Err::PreconditionFailed, "free rank must be >= 1");
  if (L < 0) throw Error(Err::PreconditionFailed, "coordinate bound must be >= 0");
  double v = 2.0 * std::numbers::pi * s * (L + 1) / eps;
  if (!(v < 4.0e18)) throw Error(Err::PreconditionFailed, "eps too small: k0 out of range");
  long long k0 = static_cast<long long>(std::ceil(v));
  return k0 < 1 ? 1 : k0;
}

// ------------------------------------------------------- QuotientCharacter

QuotientCharacter QuotientCharacter::from_generator_exponents(
    std::shared_ptr<const FiniteQuotient> q, const std::vector<Rational>& gen_exponents) {
  if (!q) throw Error(Err::PreconditionFailed, "null quotient");
  const auto& cgens = q->source().c_generators();
  if (gen_exponents.size() != cgens.size())
    throw Error(Err::PreconditionFailed, "one exponent per C-generator required");

  std::vector<uint32_t> img;
  img.reserve(cgens.size());
  for (const auto& [name, mat] : cgens) {
    uint32_t idx = q->index_of(mat);
    if (!q->in_c_image(idx)) throw Error(Err::Internal, "C-generator image left the C-image");
    img.push_back(idx);
  }

  const std::vector<uint32_t>& cim = q->c_image();
  const size_t kk = cim.size();
  std::vector<char> seen(kk, 0);
  std::vector<Rational> exps(kk);
  uint32_t id_pos = static_cast<uint32_t>(q->c_position(q->identity_index()));
  seen[id_pos] = 1;
  std::vector<uint32_t> queue = {q->identity_index()};
  for (size_t at = 0; at < queue.size(); ++at) {
    uint32_t u = queue[at];
    const Rational& base = exps[q->c_position(u)];
    for (size_t j = 0; j < img.size(); ++j) {
      for (int sgn : {+1, -1}) {
        uint32_t v = q->mult(u, sgn > 0 ? img[j] : q->inverse(img[j]));
        int32_t pos = q->c_position(v);
        if (pos < 0) throw Error(Err::Internal, "C-image not closed under its generators");
        Rational e = base.plus(sgn > 0 ? gen_exponents[j] : gen_exponents[j].negated());
        if (!seen[pos]) {
          seen[pos] = 1;
          exps[pos] = e;
          queue.push_back(v);
        }
      }
    }
  }
  for (char s : seen)
    if (!s) throw Error(Err::Internal, "C-image not generated by the C-generator images");

  // Exhaustive edge check: every multiplication by a generator image must
  // advance the exponent by that generator's exponent.
  for (uint32_t u : cim)
    for (size_t j = 0; j < img.size(); ++j) {
      Rational expect = exps[q->c_position(u)].plus(gen_exponents[j]);
      if (exps[q->c_position(q->mult(u, img[j]))] != expect)
        throw Error(Err::IncompatibleImages,
                    "exponents do not define a character of the C-image");
    }
  return QuotientCharacter(std::move(q), std::move(exps));
}

QuotientCharacter QuotientCharacter::trivial(std::shared_ptr<const FiniteQuotient> q) {
  if (!q) throw Error(Err::PreconditionFailed, "null quotient");
  std::vector<Rational> zeros(q->source().c_generators().size());
  return from_generator_exponents(std::move(q), zeros);
}

const Rational& QuotientCharacter::exponent_at(uint32_t idx) const {
  int32_t pos = q_->c_position(idx);
  if (pos < 0)
    throw Error(Err::PreconditionFailed, "element lies outside the C-image");
  return exps_[pos];
}

std::complex<double> QuotientCharacter::value_at(uint32_t idx) const {
  return exponent_at(idx).unit();
}

// --------------------------------------------- build_compatible_characters

namespace {

// Cyclic order of an element inside a finite quotient.
long long image_order(const FiniteQuotient& q, uint32_t u) {
  long long k = 1;
  uint32_t acc = u;
  while (acc != q.identity_index()) {
    acc = q.mult(acc, u);
    ++k;
  }
  return k;
}

// Index of the unique basis direction a C-generator hits.
int hit_direction(const CCoords& c) {
  for (size_t i = 0; i < c.free_part.size(); ++i)
    if (c.free_part[i] != 0) return static_cast<int>(i);
  for (size_t i = 0; i < c.torsion_part.size(); ++i)
    if (c.torsion_part[i] != 0)
      return static_cast<int>(c.free_part.size() + i);
  throw Error(Err::Internal, "C-generator with all-zero basis coordinates");
}

struct NearestRoot {
  long long l = 0;
  double error = 0.0;
};

// Nearest k-th root of unity to the target angle; a tie between two roots
// resolves to the lower one.
NearestRoot nearest_root(const Angle& target, long long k) {
  NearestRoot r;
  if (target.exact) {
    __int128 tn = static_cast<__int128>(target.q.num) * k;
    long long fl = static_cast<long long>(tn / target.q.den);
    long long rem = static_cast<long long>(tn % target.q.den);
    r.l = fl + (2 * rem > target.q.den ? 1 : 0);
    r.error = rem == 0 ? 0.0
                       : chord_between(static_cast<double>(r.l) / static_cast<double>(k),
                                       static_cast<double>(target.q.num) /
                                           static_cast<double>(target.q.den));
  } else {
    double t = target.turns * static_cast<double>(k);
    double fl = std::floor(t);
    r.l = static_cast<long long>(fl) + (t - fl > 0.5 ? 1 : 0);
    r.error = chord_between(static_cast<double>(r.l) / static_cast<double>(k), target.turns);
  }
  r.l %= k;
  if (r.l < 0) r.l += k;
  return r;
}

// Pairing of two C-images along matched generator images; verifies the map
// is a well-defined bijective homomorphism.
void verify_c_image_bijection(const FiniteQuotient& qa, const FiniteQuotient& qb,
                              const std::vector<uint32_t>& ua, const std::vector<uint32_t>& ub,
                              std::vector<int32_t>& a_to_b) {
  const size_t ka = qa.c_image().size(), kb = qb.c_image().size();
  if (ka != kb)
    throw Error(Err::IncompatibleImages, "C-images have different orders: " +
                                             std::to_string(ka) + " vs " + std::to_string(kb));
  a_to_b.assign(ka, -1);
  std::vector<int32_t> b_to_a(kb, -1);
  uint32_t ia = static_cast<uint32_t>(qa.c_position(qa.identity_index()));
  uint32_t ib = static_cast<uint32_t>(qb.c_position(qb.identity_index()));
  a_to_b[ia] = static_cast<int32_t>(ib);
  b_to_a[ib] = static_cast<int32_t>(ia);
  std::vector<std::pair<uint32_t, uint32_t>> queue = {{qa.identity_index(), qb.identity_index()}};
  for (size_t at = 0; at < queue.size(); ++at) {
    auto [x, y] = queue[at];
    for (size_t j = 0; j < ua.size(); ++j) {
      for (int sgn : {+1, -1}) {
        uint32_t xs = qa.mult(x, sgn > 0 ? ua[j] : qa.inverse(ua[j]));
        uint32_t ys = qb.mult(y, sgn > 0 ? ub[j] : qb.inverse(ub[j]));
        int32_t pa = qa.c_position(xs), pb = qb.c_position(ys);
        if (pa < 0 || pb < 0) throw Error(Err::Internal, "C-image not closed");
        if (a_to_b[pa] < 0 && b_to_a[pb] < 0) {
          a_to_b[pa] = pb;
          b_to_a[pb] = pa;
          queue.emplace_back(xs, ys);
        } else if (a_to_b[pa] != pb || b_to_a[pb] != pa) {
          throw Error(Err::IncompatibleImages,
                      "generator-image correspondence does not extend to a bijection");
        }
      }
    }
  }
  for (int32_t v : a_to_b)
    if (v < 0)
      throw Error(Err::IncompatibleImages, "C-image correspondence is not surjective");
}

}  // namespace

CompatibleCharacters build_compatible_characters(std::shared_ptr<const FiniteQuotient> qa,
                                                 std::shared_ptr<const FiniteQuotient> qb,
                                                 const Character& lambda, double eps,
                                                 const std::vector<ExactMatrix>& c_generators) {
  if (!qa || !qb) throw Error(Err::PreconditionFailed, "null quotient");
  if (!(eps > 0.0)) throw Error(Err::PreconditionFailed, "eps must be > 0");
  if (c_generators.empty())
    throw Error(Err::PreconditionFailed, "need at least one C-generator for the certificate");
  const GroupSpec& ga = qa->source();
  const GroupSpec& gb = qb->source();
  const AbelianStructure& st = ga.c_structure();
  if (!(st == gb.c_structure()))
    throw Error(Err::IncompatibleImages, "the two groups declare different structures for C");
  if (!(st == lambda.structure()))
    throw Error(Err::PreconditionFailed, "character structure differs from the groups' C");
  const int dirs = st.dirs();
  if (static_cast<int>(ga.c_generators().size()) != dirs ||
      static_cast<int>(gb.c_generators().size()) != dirs)
    throw Error(Err::IncompatibleImages, "C-generator counts differ from the basis directions");

  // Direction -> C-generator position on each side (basis alignment makes
  // this a bijection).
  std::vector<int> dir_gen_a(dirs, -1), dir_gen_b(dirs, -1);
  for (int j = 0; j < dirs; ++j) {
    dir_gen_a[hit_direction(ga.c_basis()[j])] = j;
    dir_gen_b[hit_direction(gb.c_basis()[j])] = j;
  }

  // Per-direction generator images and their cyclic orders.
  std::vector<uint32_t> ua(dirs), ub(dirs);
  std::vector<long long> korder(dirs);
  for (int i = 0; i < dirs; ++i) {
    ua[i] = qa->index_of(ga.c_generators()[dir_gen_a[i]].second);
    ub[i] = qb->index_of(gb.c_generators()[dir_gen_b[i]].second);
    korder[i] = image_order(*qa, ua[i]);
    if (image_order(*qb, ub[i]) != korder[i])
      throw Error(Err::IncompatibleImages, "matched direction images have different orders");
  }

  std::vector<int32_t> a_to_b;
  verify_c_image_bijection(*qa, *qb, ua, ub, a_to_b);

  // The per-direction construction needs the C-image to split as the direct
  // product of the direction subgroups.
  {
    unsigned long long prod = 1;
    for (long long k : korder) {
      prod *= static_cast<unsigned long long>(k);
      if (prod > qa->c_image().size()) break;
    }
    if (prod != qa->c_image().size())
      throw Error(Err::PreconditionFailed,
                  "C-image does not split along the basis directions at this modulus");
  }

  // Certificate bound from the given C-generators.
  long long L = 0;
  for (const ExactMatrix& h : c_generators) {
    CCoords c = ga.c_coordinates(h);
    for (const cpp_int& v : c.free_part) {
      cpp_int a = v < 0 ? -v : v;
      if (a > L) L = a.convert_to<long long>();
    }
    for (long long v : c.torsion_part) {
      long long a = v < 0 ? -v : v;
      if (a > L) L = a;
    }
  }
  if (L > 1'000'000)
    throw Error(Err::PreconditionFailed, "C-generator coordinates too large for the certificate");
  const int s = st.free_rank;
  const double per_direction_bound =
      s >= 1 ? eps / (static_cast<double>(s) * static_cast<double>(L + 1)) : 0.0;

  CompatibleCharacters out{QuotientCharacter::trivial(qa), QuotientCharacter::trivial(qb), {}, {}};
  std::vector<Rational> exp_a(dirs), exp_b(dirs);
  out.directions.resize(dirs);
  for (int i = 0; i < dirs; ++i) {
    DirectionData& dd = out.directions[i];
    dd.k = korder[i];
    if (i < s) {
      NearestRoot nr = nearest_root(lambda.free_angle(i), korder[i]);
      dd.l = nr.l;
      dd.error = nr.error;
      if (nr.error > per_direction_bound) {
        if (korder[i] < k0_for(eps, s, static_cast<int>(L)))
          throw Error(Err::PreconditionFailed,
                      "direction " + std::to_string(i) + " has image order " +
                          std::to_string(korder[i]) + ", below the k0 requirement");
        throw Error(Err::Internal, "nearest root misses the net bound at admissible order");
      }
    } else {
      long long d = st.torsion[i - s];
      if (korder[i] != d)
        throw Error(Err::PreconditionFailed,
                    "quotient collapses torsion direction " + std::to_string(i - s));
      dd.l = lambda.torsion_exponent(i - s);
      dd.error = 0.0;
    }
    Rational e = Rational::mod1(dd.l, dd.k);
    exp_a[dir_gen_a[i]] = e;
    exp_b[dir_gen_b[i]] = e;
  }

  out.a = QuotientCharacter::from_generator_exponents(qa, exp_a);
  out.b = QuotientCharacter::from_generator_exponents(qb, exp_b);

  // Exponent-level compatibility across the verified bijection.
  for (size_t p = 0; p < a_to_b.size(); ++p)
    if (out.a.exponent_at_position(p) != out.b.exponent_at_position(a_to_b[p]))
      throw Error(Err::Internal, "compatible characters disagree across the bijection");

  // Numeric certificate per given C-generator.
  out.generator_errors.reserve(c_generators.size());
  for (const ExactMatrix& h : c_generators) {
    uint32_t idx = qa->index_of(h);
    std::complex<double> err = out.a.value_at(idx) - lambda.value(ga.c_coordinates(h));
    double e = std::abs(err);
    if (e > eps)
      throw Error(Err::Internal, "certified character misses the eps bound on a C-generator");
    out.generator_errors.push_back(e);
  }
  return out;
}

}  // namespace camal
