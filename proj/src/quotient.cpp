#include "camal/quotient.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <sstream>

#include "camal/parallel.hpp"

namespace camal {

namespace {

// Compact mod-m matrix helpers; entries < m <= 2^31, products accumulate in
// uint64 with a reduction per addition.

using Row = std::vector<uint32_t>;

Row compact_of(const ExactMatrix& reduced) {
  Row r;
  r.reserve(static_cast<size_t>(reduced.dim()) * reduced.dim());
  for (int i = 0; i < reduced.dim(); ++i)
    for (int j = 0; j < reduced.dim(); ++j)
      r.push_back(reduced.at(i, j).raw().convert_to<uint32_t>());
  return r;
}

Row mul_mod(const Row& a, const Row& b, int n, uint64_t m) {
  Row c(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      uint64_t acc = 0;
      for (int k = 0; k < n; ++k)
        acc = (acc + static_cast<uint64_t>(a[i * n + k]) * b[k * n + j]) % m;
      c[i * n + j] = static_cast<uint32_t>(acc);
    }
  return c;
}

uint64_t inv_mod_u64(uint64_t a, uint64_t m) {
  int64_t r0 = static_cast<int64_t>(m), r1 = static_cast<int64_t>(a % m), s0 = 0, s1 = 1;
  while (r1 != 0) {
    int64_t q = r0 / r1;
    int64_t r2 = r0 - q * r1, s2 = s0 - q * s1;
    r0 = r1; r1 = r2;
    s0 = s1; s1 = s2;
  }
  if (r0 != 1) throw Error(Err::NonInvertible, "diagonal entry not invertible mod m");
  s0 %= static_cast<int64_t>(m);
  if (s0 < 0) s0 += static_cast<int64_t>(m);
  return static_cast<uint64_t>(s0);
}

// Inverse of an upper-triangular matrix mod m by back substitution.
Row inv_mod(const Row& a, int n, uint64_t m) {
  if (m == 1) return Row(static_cast<size_t>(n) * n, 0);
  Row x(static_cast<size_t>(n) * n, 0);
  std::vector<uint64_t> dinv(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j)
      if (a[i * n + j] != 0) throw Error(Err::Internal, "quotient element not triangular");
    dinv[i] = inv_mod_u64(a[i * n + i], m);
  }
  for (int i = n - 1; i >= 0; --i) {
    x[i * n + i] = static_cast<uint32_t>(dinv[i]);
    for (int j = i + 1; j < n; ++j) {
      uint64_t acc = 0;
      for (int k = i + 1; k <= j; ++k)
        acc = (acc + static_cast<uint64_t>(a[i * n + k]) * x[k * n + j]) % m;
      acc = acc * dinv[i] % m;
      x[i * n + j] = static_cast<uint32_t>((m - acc) % m);
    }
  }
  return x;
}

std::string encode(const Row& r) {
  std::string s;
  s.resize(r.size() * 4);
  for (size_t i = 0; i < r.size(); ++i) {
    uint32_t v = r[i];
    s[4 * i + 0] = static_cast<char>((v >> 24) & 0xff);
    s[4 * i + 1] = static_cast<char>((v >> 16) & 0xff);
    s[4 * i + 2] = static_cast<char>((v >> 8) & 0xff);
    s[4 * i + 3] = static_cast<char>(v & 0xff);
  }
  return s;
}

uint32_t to_u32_modulus(const cpp_int& m) {
  if (m < 1 || m > cpp_int(0x7fffffff))
    throw Error(Err::Config, "modulus must lie in [1, 2^31)");
  return m.convert_to<uint32_t>();
}

struct Closure {
  std::vector<Row> elems;
  std::unordered_map<std::string, uint32_t> index;
};

// BFS closure under right multiplication by the given elements and their
// inverses.  Aborts as soon as the table passes cap.
Closure closure_from(const std::vector<Row>& seeds_gens, int n, uint64_t m, uint64_t cap) {
  Closure c;
  std::vector<Row> steps;
  for (const Row& g : seeds_gens) {
    steps.push_back(g);
    Row gi = inv_mod(g, n, m);
    if (gi != g) steps.push_back(std::move(gi));
  }
  Row id(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) id[i * n + i] = m == 1 ? 0u : 1u;
  c.index.emplace(encode(id), 0);
  c.elems.push_back(std::move(id));
  std::deque<uint32_t> queue = {0};
  while (!queue.empty()) {
    uint32_t at = queue.front();
    queue.pop_front();
    for (const Row& s : steps) {
      Row nx = mul_mod(c.elems[at], s, n, m);
      std::string key = encode(nx);
      auto [it, fresh] = c.index.emplace(std::move(key), static_cast<uint32_t>(c.elems.size()));
      if (fresh) {
        if (c.elems.size() >= cap)
          throw Error(Err::CapExceeded,
                      "enumeration passed cap " + std::to_string(cap) + " at modulus " +
                          std::to_string(m));
        c.elems.push_back(std::move(nx));
        queue.push_back(it->second);
      }
    }
  }
  return c;
}

}  // namespace

std::vector<uint32_t> FiniteQuotient::mat_at(uint32_t idx) const {
  return Row(elems_.begin() + static_cast<size_t>(idx) * dim_ * dim_,
             elems_.begin() + static_cast<size_t>(idx + 1) * dim_ * dim_);
}

std::shared_ptr<const FiniteQuotient> FiniteQuotient::enumerate(const GroupSpec& g,
                                                                const cpp_int& m, uint64_t cap) {
  auto q = std::shared_ptr<FiniteQuotient>(new FiniteQuotient(g));
  q->m_ = to_u32_modulus(m);
  q->dim_ = g.dim();
  const int n = q->dim_;
  const uint64_t mm = q->m_;

  std::vector<Row> gen_rows;
  for (auto& [name, mat] : g.generators()) gen_rows.push_back(compact_of(mat.reduce_mod(m)));

  Closure c = closure_from(gen_rows, n, mm, cap);
  q->order_ = static_cast<uint32_t>(c.elems.size());
  q->elems_.reserve(c.elems.size() * n * n);
  for (const Row& r : c.elems) q->elems_.insert(q->elems_.end(), r.begin(), r.end());
  q->index_ = std::move(c.index);

  for (const Row& r : gen_rows) q->gen_img_.push_back(q->index_.at(encode(r)));

  // Image of C: closure of the C-generator images inside the table.
  {
    std::vector<Row> cgen_rows;
    for (auto& [name, mat] : g.c_generators()) cgen_rows.push_back(compact_of(mat.reduce_mod(m)));
    Closure cc = closure_from(cgen_rows, n, mm, cap);
    q->c_image_.reserve(cc.elems.size());
    for (const Row& r : cc.elems) q->c_image_.push_back(q->index_.at(encode(r)));
    std::sort(q->c_image_.begin(), q->c_image_.end());
  }
  q->c_pos_.assign(q->order(), -1);
  for (size_t p = 0; p < q->c_image_.size(); ++p)
    q->c_pos_[q->c_image_[p]] = static_cast<int32_t>(p);

  // Canonical transversal: the minimal element of each coset u*C in encoding
  // order represents the coset; representatives are listed sorted.
  {
    const uint32_t order = q->order();
    std::vector<uint32_t> rep_of(order);
    for (uint32_t u = 0; u < order; ++u) {
      uint32_t best = u;
      std::string best_key = q->encoding(u);
      for (uint32_t cidx : q->c_image_) {
        uint32_t v = q->mult(u, cidx);
        std::string key = q->encoding(v);
        if (key < best_key) {
          best_key = std::move(key);
          best = v;
        }
      }
      rep_of[u] = best;
    }
    std::vector<std::pair<std::string, uint32_t>> reps;
    for (uint32_t u = 0; u < order; ++u)
      if (rep_of[u] == u) reps.emplace_back(q->encoding(u), u);
    std::sort(reps.begin(), reps.end());
    q->transversal_.reserve(reps.size());
    std::vector<uint32_t> pos_of_rep(order, 0);
    for (size_t i = 0; i < reps.size(); ++i) {
      q->transversal_.push_back(reps[i].second);
      pos_of_rep[reps[i].second] = static_cast<uint32_t>(i);
    }
    q->coset_of_.resize(order);
    for (uint32_t u = 0; u < order; ++u) q->coset_of_[u] = pos_of_rep[rep_of[u]];
    q->trans_inv_.reserve(reps.size());
    for (uint32_t t : q->transversal_) q->trans_inv_.push_back(q->inverse(t));
  }
  return q;
}

uint32_t FiniteQuotient::mult(uint32_t a, uint32_t b) const {
  Row r = mul_mod(mat_at(a), mat_at(b), dim_, m_);
  return index_.at(encode(r));
}

uint32_t FiniteQuotient::inverse(uint32_t a) const {
  Row r = inv_mod(mat_at(a), dim_, m_);
  return index_.at(encode(r));
}

uint32_t FiniteQuotient::power(uint32_t a, long long k) const {
  uint32_t base = k < 0 ? inverse(a) : a;
  unsigned long long e = k < 0 ? static_cast<unsigned long long>(-(k + 1)) + 1ull
                               : static_cast<unsigned long long>(k);
  uint32_t acc = identity_index();
  while (e) {
    if (e & 1ull) acc = mult(acc, base);
    base = mult(base, base);
    e >>= 1;
  }
  return acc;
}

uint32_t FiniteQuotient::index_of(const ExactMatrix& group_element) const {
  Row r = compact_of(group_element.reduce_mod(m_));
  auto it = index_.find(encode(r));
  if (it == index_.end())
    throw Error(Err::UnknownElement, "element does not reduce into the enumerated image");
  return it->second;
}

std::string FiniteQuotient::encoding(uint32_t idx) const { return encode(mat_at(idx)); }

ExactMatrix FiniteQuotient::matrix_of(uint32_t idx) const {
  Row r = mat_at(idx);
  ExactMatrix m(dim_, RingDesc::mod(m_));
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      m.set(i, j, RingValue::mod(r[static_cast<size_t>(i) * dim_ + j], m_));
  return m;
}

std::shared_ptr<const FiniteQuotient> enumerate_quotient(const GroupSpec& g, const cpp_int& m,
                                                         uint64_t cap) {
  return FiniteQuotient::enumerate(g, m, cap);
}

// ----------------------------------------------------------------- witness

namespace {

// Shared condition check; used both by the search and by the post-search
// verification pass.
std::string witness_conditions(const FiniteQuotient& q, const std::vector<ExactMatrix>& outside,
                               const std::vector<std::pair<ExactMatrix, ExactMatrix>>& pairs) {
  for (size_t i = 0; i < outside.size(); ++i) {
    uint32_t idx = q.index_of(outside[i]);
    if (q.in_c_image(idx))
      return "outside element #" + std::to_string(i) + " maps into the image of C";
  }
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (q.index_of(pairs[i].first) == q.index_of(pairs[i].second))
      return "pair #" + std::to_string(i) + " collapses";
  }
  return "ok";
}

}  // namespace

WitnessResult filtration_witness(const GroupSpec& g, const std::vector<ExactMatrix>& outside,
                                 const std::vector<std::pair<ExactMatrix, ExactMatrix>>& pairs,
                                 uint32_t m_min, uint32_t m_max, uint64_t cap) {
  for (auto& a : outside) {
    g.validate_element(a);
    if (g.in_c(a))
      throw Error(Err::PreconditionFailed, "listed outside element lies in C: " + a.str());
  }
  for (auto& [a, b] : pairs) {
    if (!g.in_c(a) || !g.in_c(b))
      throw Error(Err::PreconditionFailed, "pair element lies outside C");
    if (a == b) throw Error(Err::PreconditionFailed, "pair elements must be distinct");
  }
  WitnessResult res;
  for (uint32_t m = std::max<uint32_t>(m_min, 1); m <= m_max; ++m) {
    WitnessAttempt at;
    at.modulus = m;
    try {
      auto q = enumerate_quotient(g, m, cap);
      at.detail = witness_conditions(*q, outside, pairs);
      at.ok = at.detail == "ok";
      if (at.ok) {
        // Independent re-verification of the winning modulus.
        auto q2 = enumerate_quotient(g, m, cap);
        if (witness_conditions(*q2, outside, pairs) != "ok")
          throw Error(Err::Internal, "witness verification disagreed with the search");
        res.modulus = m;
        res.quotient = q;
        res.attempts.push_back(std::move(at));
        return res;
      }
    } catch (const Error& e) {
      if (e.code() == Err::Internal) throw;
      at.ok = false;
      at.detail = e.what();
    }
    res.attempts.push_back(std::move(at));
  }
  return res;
}

// ------------------------------------------------------------------- probe

ProbeReport profinite_probe(const GroupSpec& g, const ExactMatrix& x,
                            const std::vector<uint32_t>& moduli, uint64_t cap) {
  g.validate_element(x);
  if (g.in_c(x))
    throw Error(Err::PreconditionFailed, "probe element lies in C; membership is trivial");

  std::vector<Row> cgen_mats;  // reduced per modulus inside the worker
  ProbeReport rep;
  rep.entries = indexed_parallel_map(moduli.size(), [&](size_t i) {
    ProbeEntry e;
    e.modulus = moduli[i];
    auto t0 = std::chrono::steady_clock::now();
    try {
      const int n = g.dim();
      std::vector<Row> cg;
      for (auto& [name, mat] : g.c_generators()) cg.push_back(compact_of(mat.reduce_mod(e.modulus)));
      Closure cc = closure_from(cg, n, e.modulus, cap);
      e.c_image_order = cc.elems.size();
      Row xr = compact_of(x.reduce_mod(e.modulus));
      e.verdict = cc.index.count(encode(xr)) ? "inside" : "outside";
    } catch (const Error& err) {
      e.verdict = "error";
      e.error = err.what();
    }
    e.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return e;
  });
  for (auto& e : rep.entries) {
    if (e.verdict == "inside") ++rep.inside;
    else if (e.verdict == "outside") ++rep.outside;
    else ++rep.errors;
  }
  return rep;
}

// -------------------------------------------------------------------- core

std::vector<uint32_t> normal_core(const FiniteQuotient& q, const std::vector<uint32_t>& s) {
  std::vector<char> in_s(q.order(), 0);
  for (uint32_t u : s) {
    if (u >= q.order()) throw Error(Err::UnknownElement, "subgroup index out of range");
    in_s[u] = 1;
  }
  if (!in_s[q.identity_index()]) throw Error(Err::NotSubgroup, "identity missing");
  for (uint32_t a : s) {
    if (!in_s[q.inverse(a)]) throw Error(Err::NotSubgroup, "not closed under inverse");
    for (uint32_t b : s)
      if (!in_s[q.mult(a, b)]) throw Error(Err::NotSubgroup, "not closed under product");
  }
  std::vector<uint32_t> core;
  for (uint32_t u : s) {
    bool keep = true;
    for (uint32_t g = 0; g < q.order() && keep; ++g)
      if (!in_s[q.mult(q.mult(q.inverse(g), u), g)]) keep = false;
    if (keep) core.push_back(u);
  }
  std::sort(core.begin(), core.end());
  return core;
}

}  // namespace camal
