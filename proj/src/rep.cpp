#include "camal/rep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace camal {

namespace {

Eigen::MatrixXcd block_diag_copies(const Eigen::MatrixXcd& a, int k) {
  if (k == 1) return a;
  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n * k, n * k);
  for (int b = 0; b < k; ++b) out.block(b * n, b * n, n, n) = a;
  return out;
}

double operator_norm(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

Eigen::MatrixXcd dense_pow(Eigen::MatrixXcd b, unsigned long long e) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(b.rows(), b.cols());
  while (e > 0) {
    if (e & 1ull) acc = acc * b;
    e >>= 1;
    if (e > 0) b = b * b;
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<uint32_t> c, std::vector<Rational> p)
    : col(std::move(c)), phase(std::move(p)) {
  if (col.size() != phase.size()) throw Error(Err::Internal, "monomial row count mismatch");
  std::vector<char> seen(col.size(), 0);
  for (uint32_t j : col) {
    if (j >= col.size() || seen[j]) throw Error(Err::Internal, "monomial columns are not a permutation");
    seen[j] = 1;
  }
}

Monomial Monomial::identity(int n) {
  std::vector<uint32_t> c(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) c[static_cast<size_t>(i)] = static_cast<uint32_t>(i);
  return Monomial(std::move(c), std::vector<Rational>(static_cast<size_t>(n)));
}

Monomial Monomial::mul(const Monomial& o) const {
  if (dim() != o.dim()) throw Error(Err::DimensionMismatch, "monomial dimensions differ");
  std::vector<uint32_t> c(col.size());
  std::vector<Rational> p(col.size());
  for (size_t i = 0; i < col.size(); ++i) {
    c[i] = o.col[col[i]];
    p[i] = phase[i].plus(o.phase[col[i]]);
  }
  return Monomial(std::move(c), std::move(p));
}

Monomial Monomial::adjoint() const {
  std::vector<uint32_t> c(col.size());
  std::vector<Rational> p(col.size());
  for (size_t j = 0; j < col.size(); ++j) {
    c[col[j]] = static_cast<uint32_t>(j);
    p[col[j]] = phase[j].negated();
  }
  return Monomial(std::move(c), std::move(p));
}

Monomial Monomial::direct_sum_copies(int k) const {
  if (k < 1) throw Error(Err::PreconditionFailed, "copy count must be positive");
  if (k == 1) return *this;
  const size_t n = col.size();
  std::vector<uint32_t> c(n * static_cast<size_t>(k));
  std::vector<Rational> p(n * static_cast<size_t>(k));
  for (size_t b = 0; b < static_cast<size_t>(k); ++b)
    for (size_t i = 0; i < n; ++i) {
      c[b * n + i] = col[i] + static_cast<uint32_t>(b * n);
      p[b * n + i] = phase[i];
    }
  return Monomial(std::move(c), std::move(p));
}

bool Monomial::is_identity() const {
  for (size_t i = 0; i < col.size(); ++i)
    if (col[i] != i || !phase[i].is_zero()) return false;
  return true;
}

std::complex<double> Monomial::normalized_trace() const {
  bool any_diag = false, all_diag = true;
  for (size_t i = 0; i < col.size(); ++i) {
    if (col[i] == i)
      any_diag = true;
    else
      all_diag = false;
  }
  if (!any_diag) return {0.0, 0.0};
  if (all_diag) {
    bool same = true;
    for (size_t i = 1; i < col.size() && same; ++i) same = (phase[i] == phase[0]);
    if (same) return phase[0].unit();
  }
  std::complex<double> s{0.0, 0.0};
  for (size_t i = 0; i < col.size(); ++i)
    if (col[i] == i) s += phase[i].unit();
  return s / static_cast<double>(col.size());
}

double Monomial::distance_from_identity() const {
  double best = 0.0;
  std::vector<char> vis(col.size(), 0);
  for (size_t start = 0; start < col.size(); ++start) {
    if (vis[start]) continue;
    Rational q;
    long long len = 0;
    size_t i = start;
    do {
      vis[i] = 1;
      q = q.plus(phase[i]);
      i = col[i];
      ++len;
    } while (i != start);
    // cycle of length len with phase exponent q has eigenvalue angles (q+r)/len
    const double qt = q.signed_turns();
    for (long long r = 0; r < len; ++r) {
      double t = (qt + static_cast<double>(r)) / static_cast<double>(len);
      best = std::max(best, chord_between(t, 0.0));
    }
  }
  return best;
}

Eigen::MatrixXcd Monomial::dense() const {
  const Eigen::Index n = dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    m(i, col[static_cast<size_t>(i)]) = phase[static_cast<size_t>(i)].unit();
  return m;
}

// --------------------------------------------------------------- RepMatrix

RepMatrix RepMatrix::from_monomial(Monomial m) {
  RepMatrix r;
  r.mono_ = std::move(m);
  return r;
}

RepMatrix RepMatrix::from_dense(Eigen::MatrixXcd m) {
  if (m.rows() != m.cols()) throw Error(Err::DimensionMismatch, "value must be square");
  RepMatrix r;
  r.dense_ = std::move(m);
  return r;
}

int RepMatrix::dim() const {
  return mono_ ? mono_->dim() : static_cast<int>(dense_->rows());
}

const Monomial& RepMatrix::monomial() const {
  if (!mono_) throw Error(Err::PreconditionFailed, "dense value has no monomial form");
  return *mono_;
}

Eigen::MatrixXcd RepMatrix::dense() const { return mono_ ? mono_->dense() : *dense_; }

RepMatrix RepMatrix::mul(const RepMatrix& o) const {
  if (dim() != o.dim()) throw Error(Err::DimensionMismatch, "value dimensions differ");
  if (mono_ && o.mono_) return from_monomial(mono_->mul(*o.mono_));
  return from_dense(dense() * o.dense());
}

RepMatrix RepMatrix::adjoint() const {
  if (mono_) return from_monomial(mono_->adjoint());
  return from_dense(dense_->adjoint());
}

std::complex<double> RepMatrix::normalized_trace() const {
  if (mono_) return mono_->normalized_trace();
  return dense_->trace() / static_cast<double>(dense_->rows());
}

double RepMatrix::distance_from_identity() const {
  if (mono_) return mono_->distance_from_identity();
  Eigen::MatrixXcd d = *dense_;
  d -= Eigen::MatrixXcd::Identity(d.rows(), d.cols());
  return operator_norm(d);
}

double RepMatrix::unitarity_defect() const {
  if (mono_) return 0.0;
  Eigen::MatrixXcd g = dense_->adjoint() * (*dense_);
  g -= Eigen::MatrixXcd::Identity(g.rows(), g.cols());
  return g.cwiseAbs().maxCoeff();
}

// --------------------------------------------------------------- FinDimRep

FinDimRep::FinDimRep(std::variant<Induced, Explicit, Conjugated> r, int base_dim)
    : real_(std::move(r)), base_dim_(base_dim) {
  if (base_dim_ < 1) throw Error(Err::Internal, "representation dimension must be positive");
  if (std::holds_alternative<Induced>(real_)) cache_ = std::make_shared<Cache>();
}

FinDimRep FinDimRep::induced(std::shared_ptr<const FiniteQuotient> q, QuotientCharacter chi) {
  if (!q) throw Error(Err::PreconditionFailed, "null quotient");
  if (chi.quotient().get() != q.get())
    throw Error(Err::PreconditionFailed, "character lives on a different quotient");
  const int bd = static_cast<int>(q->transversal().size());
  return FinDimRep(Induced{std::move(q), std::move(chi)}, bd);
}

FinDimRep FinDimRep::explicit_rep(std::vector<std::pair<std::string, Eigen::MatrixXcd>> images) {
  if (images.empty()) throw Error(Err::PreconditionFailed, "no generator images");
  const Eigen::Index n = images[0].second.rows();
  for (size_t i = 0; i < images.size(); ++i) {
    const auto& [name, m] = images[i];
    if (m.rows() != n || m.cols() != n)
      throw Error(Err::DimensionMismatch, "generator image dimensions differ");
    Eigen::MatrixXcd g = m.adjoint() * m;
    g -= Eigen::MatrixXcd::Identity(n, n);
    if (g.cwiseAbs().maxCoeff() > 1e-9)
      throw Error(Err::PreconditionFailed, "generator image " + name + " is not unitary");
    for (size_t j = 0; j < i; ++j)
      if (images[j].first == name)
        throw Error(Err::PreconditionFailed, "duplicate generator image " + name);
  }
  return FinDimRep(Explicit{std::move(images)}, static_cast<int>(n));
}

FinDimRep FinDimRep::conjugated(FinDimRep base, Eigen::MatrixXcd u) {
  const int n = base.dim();
  if (u.rows() != n || u.cols() != n)
    throw Error(Err::DimensionMismatch, "conjugator dimension differs from the representation");
  Eigen::MatrixXcd g = u.adjoint() * u;
  g -= Eigen::MatrixXcd::Identity(n, n);
  if (g.cwiseAbs().maxCoeff() > 1e-9)
    throw Error(Err::PreconditionFailed, "conjugator is not unitary");
  return FinDimRep(Conjugated{std::make_shared<FinDimRep>(std::move(base)), std::move(u)}, n);
}

FinDimRep FinDimRep::with_copies(int k) const {
  if (k < 1) throw Error(Err::PreconditionFailed, "copy count must be positive");
  const long long total = static_cast<long long>(copies_) * k;
  if (static_cast<long long>(base_dim_) * total > (1ll << 22))
    throw Error(Err::CapExceeded, "copied dimension is too large");
  FinDimRep r = *this;
  r.copies_ = static_cast<int>(total);
  return r;
}

bool FinDimRep::is_induced() const { return std::holds_alternative<Induced>(real_); }

std::shared_ptr<const FiniteQuotient> FinDimRep::quotient() const {
  if (const auto* in = std::get_if<Induced>(&real_)) return in->q;
  if (const auto* cj = std::get_if<Conjugated>(&real_)) return cj->base->quotient();
  return nullptr;
}

const QuotientCharacter* FinDimRep::character() const {
  if (const auto* in = std::get_if<Induced>(&real_)) return &in->chi;
  if (const auto* cj = std::get_if<Conjugated>(&real_)) return cj->base->character();
  return nullptr;
}

bool FinDimRep::evaluates_elements() const {
  if (std::holds_alternative<Induced>(real_)) return true;
  if (const auto* cj = std::get_if<Conjugated>(&real_)) return cj->base->evaluates_elements();
  return false;
}

Monomial FinDimRep::induced_monomial(uint32_t idx) const {
  const auto& in = std::get<Induced>(real_);
  {
    std::shared_lock lk(cache_->mu);
    auto it = cache_->map.find(idx);
    if (it != cache_->map.end()) return it->second;
  }
  const FiniteQuotient& q = *in.q;
  if (idx >= q.order()) throw Error(Err::UnknownElement, "quotient index out of range");
  const auto& trans = q.transversal();
  const size_t d = trans.size();
  std::vector<uint32_t> c(d);
  std::vector<Rational> p(d);
  const uint32_t ginv = q.inverse(idx);
  for (size_t i = 0; i < d; ++i) {
    // the unique column j with t_i^{-1} g t_j in the image of C
    const uint32_t j = q.coset_of(q.mult(ginv, trans[i]));
    const uint32_t ci = q.mult(q.mult(q.transversal_inverse(static_cast<uint32_t>(i)), idx), trans[j]);
    c[i] = j;
    p[i] = in.chi.exponent_at(ci);
  }
  Monomial m(std::move(c), std::move(p));
  std::unique_lock lk(cache_->mu);
  auto [it, inserted] = cache_->map.emplace(idx, std::move(m));
  (void)inserted;
  return it->second;
}

RepMatrix FinDimRep::expand(RepMatrix base) const {
  if (copies_ == 1) return base;
  if (base.is_monomial())
    return RepMatrix::from_monomial(base.monomial().direct_sum_copies(copies_));
  return RepMatrix::from_dense(block_diag_copies(base.dense(), copies_));
}

RepMatrix FinDimRep::at_quotient(uint32_t idx) const {
  if (std::holds_alternative<Induced>(real_))
    return expand(RepMatrix::from_monomial(induced_monomial(idx)));
  if (const auto* cj = std::get_if<Conjugated>(&real_)) {
    Eigen::MatrixXcd m = cj->base->at_quotient(idx).dense();
    return expand(RepMatrix::from_dense(cj->u.adjoint() * m * cj->u));
  }
  throw Error(Err::PreconditionFailed, "explicit realization has no quotient");
}

RepMatrix FinDimRep::at_element(const ExactMatrix& g) const {
  if (const auto* in = std::get_if<Induced>(&real_))
    return expand(RepMatrix::from_monomial(induced_monomial(in->q->index_of(g))));
  if (const auto* cj = std::get_if<Conjugated>(&real_)) {
    Eigen::MatrixXcd m = cj->base->at_element(g).dense();
    return expand(RepMatrix::from_dense(cj->u.adjoint() * m * cj->u));
  }
  throw Error(Err::PreconditionFailed, "explicit realization evaluates words only");
}

RepMatrix FinDimRep::at_word(const GroupWord& w) const {
  if (const auto* ex = std::get_if<Explicit>(&real_)) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(base_dim_, base_dim_);
    for (const auto& [name, k] : w.letters) {
      const Eigen::MatrixXcd* img = nullptr;
      for (const auto& [n2, m2] : ex->images)
        if (n2 == name) {
          img = &m2;
          break;
        }
      if (!img) throw Error(Err::UnknownGenerator, name);
      if (k == 0) continue;
      const Eigen::MatrixXcd step = k > 0 ? *img : Eigen::MatrixXcd(img->adjoint());
      const unsigned long long e =
          k > 0 ? static_cast<unsigned long long>(k)
                : (k == std::numeric_limits<long long>::min()
                       ? static_cast<unsigned long long>(std::numeric_limits<long long>::max()) + 1
                       : static_cast<unsigned long long>(-k));
      acc = acc * dense_pow(step, e);
    }
    return expand(RepMatrix::from_dense(std::move(acc)));
  }
  if (const auto* cj = std::get_if<Conjugated>(&real_)) {
    Eigen::MatrixXcd m = cj->base->at_word(w).dense();
    return expand(RepMatrix::from_dense(cj->u.adjoint() * m * cj->u));
  }
  const auto& in = std::get<Induced>(real_);
  return at_element(evaluate_word(in.q->source(), w));
}

FinDimRep induce(std::shared_ptr<const FiniteQuotient> q, QuotientCharacter chi) {
  return FinDimRep::induced(std::move(q), std::move(chi));
}

std::complex<double> normalized_trace(const FinDimRep& rho, const ExactMatrix& g) {
  return rho.at_element(g).normalized_trace();
}

std::pair<FinDimRep, FinDimRep> align_dims(const FinDimRep& r1, const FinDimRep& r2, int dim_cap) {
  const long long d1 = r1.dim(), d2 = r2.dim();
  if (d1 == d2) return {r1, r2};
  const long long l = std::lcm(d1, d2);
  if (l > dim_cap)
    throw Error(Err::CapExceeded, "aligned dimension " + std::to_string(l) + " exceeds cap " +
                                      std::to_string(dim_cap));
  return {r1.with_copies(static_cast<int>(l / d1)), r2.with_copies(static_cast<int>(l / d2))};
}

// ---------------------------------------------------- approximation levels

ApproxSequence character_approx_sequence(const GroupSpec& g, const Character& lambda, double eps,
                                         const std::vector<ExactMatrix>& test_outside,
                                         const std::vector<ExactMatrix>& test_central,
                                         const SearchBudget& budget) {
  if (!(eps > 0.0)) throw Error(Err::PreconditionFailed, "tolerance must be positive");
  if (budget.max_levels < 1) throw Error(Err::PreconditionFailed, "at least one level required");
  if (budget.max_modulus < 1) throw Error(Err::PreconditionFailed, "empty modulus budget");
  for (const auto& a : test_outside) {
    g.validate_element(a);
    if (g.in_c(a)) throw Error(Err::PreconditionFailed, "outside test element lies in C");
  }
  for (const auto& h : test_central) {
    g.validate_element(h);
    if (!g.in_c(h)) throw Error(Err::PreconditionFailed, "central test element lies outside C");
  }
  std::vector<ExactMatrix> cgens;
  for (const auto& [name, m] : g.c_generators()) cgens.push_back(m);
  for (const auto& h : test_central) cgens.push_back(h);

  std::map<uint32_t, std::shared_ptr<const FiniteQuotient>> qcache;  // null marks cap overruns
  ApproxSequence seq;
  for (int k = 0; k < budget.max_levels; ++k) {
    const double eps_k = std::ldexp(eps, -k);
    bool found = false;
    int consecutive_cap = 0;
    for (uint32_t m = 1; m <= budget.max_modulus; ++m) {
      std::shared_ptr<const FiniteQuotient> q;
      if (auto it = qcache.find(m); it != qcache.end()) {
        q = it->second;
      } else {
        try {
          q = FiniteQuotient::enumerate(g, m, budget.cap);
        } catch (const Error& e) {
          if (e.code() != Err::CapExceeded) throw;
        }
        qcache.emplace(m, q);
      }
      if (!q) {
        // quotients only grow with the modulus; stop after repeated overruns
        if (++consecutive_cap >= 3) break;
        continue;
      }
      consecutive_cap = 0;
      bool outside_ok = true;
      for (const auto& a : test_outside)
        if (q->in_c_image(q->index_of(a))) {
          outside_ok = false;
          break;
        }
      if (!outside_ok) continue;
      std::optional<CompatibleCharacters> cc;
      try {
        cc = build_compatible_characters(q, q, lambda, eps_k, cgens);
      } catch (const Error& e) {
        if (e.code() == Err::PreconditionFailed || e.code() == Err::IncompatibleImages) continue;
        throw;
      }
      FinDimRep rep = induce(q, cc->a);
      // certificate, recomputed from the representation itself
      double max_err = 0.0;
      for (const auto& h : test_central) {
        const std::complex<double> tr = normalized_trace(rep, h);
        const std::complex<double> lv = extend_by_zero(g, lambda, h);
        max_err = std::max(max_err, std::abs(tr - lv));
      }
      if (max_err > eps_k) continue;
      std::vector<bool> zeros;
      bool zeros_ok = true;
      for (const auto& a : test_outside) {
        const bool z = normalized_trace(rep, a) == std::complex<double>(0.0, 0.0);
        zeros.push_back(z);
        if (!z) {
          zeros_ok = false;
          break;
        }
      }
      if (!zeros_ok) continue;
      seq.levels.push_back(ApproxLevel{k, eps_k, q->modulus(), std::move(rep), cc->directions,
                                       max_err, std::move(zeros)});
      found = true;
      break;
    }
    if (!found) {
      seq.exhausted = true;
      seq.detail = "level " + std::to_string(k) + ": no modulus up to " +
                   std::to_string(budget.max_modulus) + " certifies tolerance " +
                   std::to_string(eps_k);
      break;
    }
  }
  return seq;
}

// --------------------------------------------------------------------- GNS

StateVector StateVector::normalized_trace_state() {
  return StateVector{Kind::NormalizedTrace, Eigen::VectorXcd()};
}

StateVector StateVector::vector_state(Eigen::VectorXcd v) {
  if (v.size() == 0) throw Error(Err::PreconditionFailed, "empty state vector");
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw Error(Err::PreconditionFailed, "state vector must have unit norm");
  return StateVector{Kind::Vector, std::move(v)};
}

GnsResult gns_from_state(const FinDimRep& rho, const StateVector& f,
                         const std::shared_ptr<const FiniteQuotient>& q) {
  if (!q) throw Error(Err::PreconditionFailed, "null quotient");
  const auto rq = rho.quotient();
  if (!rq || rq.get() != q.get())
    throw Error(Err::PreconditionFailed, "representation does not evaluate this quotient");
  const int d = rho.dim();
  const bool trace_state = f.kind == StateVector::Kind::NormalizedTrace;
  if (!trace_state && f.v.size() != d)
    throw Error(Err::DimensionMismatch, "state vector length differs from the representation");

  const uint32_t n = q->order();
  const Eigen::Index embdim = trace_state ? static_cast<Eigen::Index>(d) * d : d;
  if (static_cast<uint64_t>(embdim) * n > (8ull << 20))
    throw Error(Err::CapExceeded, "GNS working set is too large");

  auto embed = [&](const Eigen::MatrixXcd& a) -> Eigen::VectorXcd {
    if (trace_state) {
      Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(a.data(), embdim);
      return v / std::sqrt(static_cast<double>(d));
    }
    return a * f.v;
  };
  // left multiplication in embedded coordinates
  auto apply = [&](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& cols) -> Eigen::MatrixXcd {
    if (!trace_state) return a * cols;
    Eigen::MatrixXcd out(embdim, cols.cols());
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
      Eigen::Map<const Eigen::MatrixXcd> x(cols.col(c).data(), d, d);
      const Eigen::MatrixXcd ax = a * x;
      out.col(c) = Eigen::Map<const Eigen::VectorXcd>(ax.data(), embdim);
    }
    return out;
  };

  Eigen::MatrixXcd emb(embdim, n);
  for (uint32_t idx = 0; idx < n; ++idx) emb.col(idx) = embed(rho.at_quotient(idx).dense());

  {
    const Eigen::MatrixXcd gram = emb.adjoint() * emb;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(Err::Internal, "gram eigensolve failed");
    if (es.eigenvalues()(0) < -1e-9)
      throw Error(Err::StateNotPositive,
                  "gram eigenvalue " + std::to_string(es.eigenvalues()(0)));
  }

  Eigen::MatrixXcd basis(embdim, std::min<Eigen::Index>(n, embdim));
  Eigen::Index r = 0;
  for (uint32_t idx = 0; idx < n; ++idx) {
    Eigen::VectorXcd w = emb.col(idx);
    for (int pass = 0; pass < 2; ++pass)
      if (r > 0) w -= basis.leftCols(r) * (basis.leftCols(r).adjoint() * w);
    const double nw = w.norm();
    if (nw > 1e-9) {
      if (r == basis.cols()) throw Error(Err::Internal, "basis exceeds the ambient dimension");
      basis.col(r++) = w / nw;
    }
  }
  basis.conservativeResize(embdim, r);

  if (q->mult(0, 0) != 0 || q->inverse(0) != 0)
    throw Error(Err::Internal, "identity is not at index 0");
  Eigen::VectorXcd xi = basis.adjoint() * emb.col(0);

  double reperr = 0.0;
  const Eigen::VectorXcd carrier = basis * xi;
  for (uint32_t idx = 0; idx < n; ++idx) {
    const Eigen::MatrixXcd a = rho.at_quotient(idx).dense();
    const Eigen::VectorXcd lv = basis.adjoint() * apply(a, carrier);
    const std::complex<double> val = xi.dot(lv);  // <L(a) xi, xi>
    const std::complex<double> expect =
        trace_state ? a.trace() / static_cast<double>(d)
                    : std::complex<double>(f.v.dot(a * f.v));
    reperr = std::max(reperr, std::abs(val - expect));
  }

  std::vector<std::pair<std::string, Eigen::MatrixXcd>> images;
  for (const auto& [name, mat] : q->source().generators()) {
    const Eigen::MatrixXcd a = rho.at_element(mat).dense();
    images.emplace_back(name, Eigen::MatrixXcd(basis.adjoint() * apply(a, basis)));
  }
  FinDimRep gnsrep = FinDimRep::explicit_rep(std::move(images));
  return GnsResult{static_cast<int>(r), std::move(gnsrep), std::move(xi), reperr};
}

// ------------------------------------------------------------ kernel check

KernelReport kernel_consistency_check(
    const GroupSpec& g, const Character& lambda,
    const std::vector<std::pair<ExactMatrix, std::complex<double>>>& coefficients,
    const FinDimRep& rho) {
  if (coefficients.empty()) throw Error(Err::PreconditionFailed, "empty combination");
  if (!rho.evaluates_elements())
    throw Error(Err::PreconditionFailed, "representation must evaluate group elements");
  for (const auto& [mat, coef] : coefficients) g.validate_element(mat);

  KernelReport report;
  std::complex<double> acc{0.0, 0.0};
  for (const auto& [gi, ti] : coefficients)
    for (const auto& [gj, tj] : coefficients)
      acc += std::conj(ti) * tj * extend_by_zero(g, lambda, gi.inverse().mul(gj));
  report.precondition_value = std::abs(acc);
  if (report.precondition_value > 1e-12) {
    report.verdict = KernelVerdict::Skipped;
    report.detail = "state value of F* F is nonzero";
    return report;
  }

  double defect = 0.0;
  for (const auto& [name, c] : g.c_generators()) {
    const Eigen::MatrixXcd m = rho.at_element(c).dense();
    const std::complex<double> s = extend_by_zero(g, lambda, c);
    Eigen::MatrixXcd diff = m;
    diff -= s * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    defect = std::max(defect, diff.cwiseAbs().maxCoeff());
  }
  report.scalar_defect = defect;
  if (defect > 1e-12) {
    report.verdict = KernelVerdict::Skipped;
    report.detail = "representation is not scalar on C with the character's values";
    return report;
  }

  const int n = rho.dim();
  Eigen::MatrixXcd fmat = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [gi, ti] : coefficients) fmat += ti * rho.at_element(gi).dense();
  report.norm = operator_norm(fmat);
  report.verdict = report.norm <= 1e-9 ? KernelVerdict::Pass : KernelVerdict::Fail;
  report.detail = report.verdict == KernelVerdict::Pass ? "ok" : "rho does not kill F";
  return report;
}

}  // namespace camal
