#include "camal/group.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace camal {

namespace {

bool is_prime_small(const cpp_int& p) {
  if (p < 2) return false;
  for (cpp_int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

GroupSpec::GroupSpec(std::string name, RingDesc ring, int dim,
                     std::vector<std::pair<std::string, ExactMatrix>> generators,
                     std::vector<std::pair<std::string, ExactMatrix>> c_generators,
                     CentralPredicate predicate, AbelianStructure structure,
                     std::vector<CCoords> c_basis)
    : name_(std::move(name)),
      ring_(std::move(ring)),
      dim_(dim),
      generators_(std::move(generators)),
      c_generators_(std::move(c_generators)),
      predicate_(predicate),
      structure_(structure),
      c_basis_(std::move(c_basis)) {
  if (generators_.empty()) throw Error(Err::Config, "group needs at least one generator");
  if (c_generators_.empty()) throw Error(Err::Config, "group needs at least one C-generator");
  for (auto& [n, g] : generators_) validate_element(g);
  for (auto& [n, g] : c_generators_) validate_element(g);

  for (auto& td : structure_.torsion)
    if (td < 2) throw Error(Err::Config, "torsion order must be >= 2");

  if (predicate_.kind == PredicateKind::UnipotentLine) {
    if (c_generators_.size() != 1)
      throw Error(Err::Config, "line predicate expects exactly one C-generator");
    ExactMatrix expect = ExactMatrix::elementary(dim_, ring_, predicate_.row, predicate_.col,
                                                 RingValue::one(ring_));
    if (c_generators_[0].second != expect)
      throw Error(Err::Config, "C-generator must be I + E(row, col) for the line predicate");
  }

  if (c_basis_.size() != c_generators_.size())
    throw Error(Err::Config, "need one basis coordinate vector per C-generator");

  // Basis alignment: each C-generator occupies exactly one declared direction
  // with coefficient 1, and each direction is covered once.
  std::vector<int> covered(structure_.dirs(), 0);
  for (auto& bc : c_basis_) {
    if (static_cast<int>(bc.free_part.size()) != structure_.free_rank ||
        bc.torsion_part.size() != structure_.torsion.size())
      throw Error(Err::Config, "basis coordinate vector has wrong shape");
    int hits = 0, dir = -1;
    for (int i = 0; i < structure_.free_rank; ++i)
      if (bc.free_part[i] != 0) {
        if (bc.free_part[i] != 1) throw Error(Err::Config, "basis coordinates must be 0/1");
        ++hits;
        dir = i;
      }
    for (size_t i = 0; i < bc.torsion_part.size(); ++i)
      if (bc.torsion_part[i] != 0) {
        if (bc.torsion_part[i] != 1) throw Error(Err::Config, "basis coordinates must be 0/1");
        ++hits;
        dir = structure_.free_rank + static_cast<int>(i);
      }
    if (hits != 1)
      throw Error(Err::Config, "each C-generator must align with exactly one basis direction");
    if (covered[dir]++)
      throw Error(Err::Config, "two C-generators share a basis direction");
  }
  for (int c : covered)
    if (!c) throw Error(Err::Config, "a declared basis direction has no C-generator");

  // Centrality of C-generators against all group generators.
  for (auto& [cn, c] : c_generators_)
    for (auto& [gn, g] : generators_)
      if (c.mul(g) != g.mul(c))
        throw Error(Err::Config, "C-generator " + cn + " does not commute with " + gn);

  // The predicate accepts all short words in the C-generators.
  if (!in_c(ExactMatrix::identity(dim_, ring_)))
    throw Error(Err::Config, "predicate rejects the identity");
  std::vector<ExactMatrix> pool = {ExactMatrix::identity(dim_, ring_)};
  std::vector<ExactMatrix> steps;
  for (auto& [n, c] : c_generators_) {
    steps.push_back(c);
    steps.push_back(c.inverse());
  }
  for (int len = 0; len < 3; ++len) {
    std::vector<ExactMatrix> next;
    for (auto& w : pool)
      for (auto& s : steps) next.push_back(w.mul(s));
    for (auto& w : next)
      if (!in_c(w))
        throw Error(Err::Config, "predicate rejects a short word in the C-generators");
    pool = std::move(next);
  }

  // Declared torsion orders hold exactly.
  for (size_t gi = 0; gi < c_generators_.size(); ++gi) {
    for (size_t ti = 0; ti < structure_.torsion.size(); ++ti) {
      if (c_basis_[gi].torsion_part[ti] == 0) continue;
      ExactMatrix pw = c_generators_[gi].second.pow(structure_.torsion[ti]);
      if (!pw.is_identity())
        throw Error(Err::Config, "C-generator " + c_generators_[gi].first +
                                     " does not have declared order " +
                                     std::to_string(structure_.torsion[ti]));
    }
  }
}

const ExactMatrix& GroupSpec::generator(const std::string& name) const {
  for (auto& [n, g] : generators_)
    if (n == name) return g;
  throw Error(Err::UnknownGenerator, name + " in group " + name_);
}

bool GroupSpec::has_generator(const std::string& name) const {
  for (auto& [n, g] : generators_)
    if (n == name) return true;
  return false;
}

void GroupSpec::validate_element(const ExactMatrix& g) const {
  if (g.dim() != dim_) throw Error(Err::DimensionMismatch, "element dimension != group dimension");
  if (g.ring() != ring_) throw Error(Err::RingMismatch, "element ring != group ring");
  if (!g.is_upper_triangular())
    throw Error(Err::PreconditionFailed, "group elements must be upper-triangular");
  if (!g.has_unit_diagonal())
    throw Error(Err::PreconditionFailed, "group elements must have unit diagonal entries");
}

bool GroupSpec::in_c(const ExactMatrix& g) const {
  if (g.dim() != dim_ || g.ring() != ring_) return false;
  switch (predicate_.kind) {
    case PredicateKind::UnipotentLine: {
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
          const RingValue& v = g.at(i, j);
          if (i == j) {
            if (!v.is_one()) return false;
          } else if (i == predicate_.row && j == predicate_.col) {
            if (predicate_.require_integral && !v.is_integral()) return false;
          } else if (!v.is_zero()) {
            return false;
          }
        }
      return true;
    }
  }
  return false;
}

CCoords GroupSpec::c_coordinates(const ExactMatrix& g) const {
  if (!in_c(g)) throw Error(Err::PreconditionFailed, "element is not in C");
  CCoords out;
  out.free_part.assign(structure_.free_rank, 0);
  out.torsion_part.assign(structure_.torsion.size(), 0);
  // Line predicate: exponent along the unique C-generator is the entry itself.
  const RingValue& v = g.at(predicate_.row, predicate_.col);
  cpp_int c;
  try {
    c = v.integral_value();
  } catch (const Error&) {
    throw Error(Err::BasisError, "entry " + v.str() + " is not an integer coordinate");
  }
  const CCoords& basis = c_basis_[0];
  for (int i = 0; i < structure_.free_rank; ++i)
    if (basis.free_part[i] != 0) out.free_part[i] = c;
  for (size_t i = 0; i < basis.torsion_part.size(); ++i)
    if (basis.torsion_part[i] != 0) {
      cpp_int r = c % structure_.torsion[i];
      if (r < 0) r += structure_.torsion[i];
      out.torsion_part[i] = r.convert_to<long long>();
    }
  return out;
}

bool GroupSpec::same_presentation(const GroupSpec& o) const {
  return name_ == o.name_ && ring_ == o.ring_ && dim_ == o.dim_ &&
         generators_ == o.generators_ && c_generators_ == o.c_generators_;
}

// ------------------------------------------------------------------ words

GroupWord GroupWord::parse(const std::string& text) {
  GroupWord w;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    auto caret = tok.find('^');
    std::string name = tok.substr(0, caret);
    long long e = 1;
    if (caret != std::string::npos) {
      try {
        e = std::stoll(tok.substr(caret + 1));
      } catch (...) {
        throw Error(Err::Config, "bad exponent in word token '" + tok + "'");
      }
    }
    if (name.empty()) throw Error(Err::Config, "empty generator name in word");
    w.letters.emplace_back(name, e);
  }
  return w;
}

std::string GroupWord::str() const {
  std::ostringstream os;
  bool first = true;
  for (auto& [n, e] : letters) {
    if (!first) os << " ";
    first = false;
    os << n;
    if (e != 1) os << "^" << e;
  }
  return os.str();
}

GroupWord GroupWord::inverse() const {
  GroupWord w;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it)
    w.letters.emplace_back(it->first, -it->second);
  return w;
}

GroupWord GroupWord::concat(const GroupWord& o) const {
  GroupWord w = *this;
  w.letters.insert(w.letters.end(), o.letters.begin(), o.letters.end());
  return w;
}

ExactMatrix evaluate_word(const GroupSpec& g, const GroupWord& w) {
  ExactMatrix acc = ExactMatrix::identity(g.dim(), g.ring());
  for (auto& [name, e] : w.letters) acc = acc.mul(g.generator(name).pow(e));
  return acc;
}

// --------------------------------------------------------------- builtins

GroupSpec heisenberg() {
  RingDesc r = RingDesc::integers();
  RingValue one = RingValue::one(r);
  ExactMatrix x = ExactMatrix::elementary(3, r, 0, 1, one);
  ExactMatrix y = ExactMatrix::elementary(3, r, 1, 2, one);
  ExactMatrix z = ExactMatrix::elementary(3, r, 0, 2, one);
  return GroupSpec("heisenberg", r, 3, {{"x", x}, {"y", y}, {"z", z}}, {{"z", z}},
                   CentralPredicate{PredicateKind::UnipotentLine, 0, 2, false},
                   AbelianStructure{1, {}}, {CCoords{{1}, {}}});
}

GroupSpec abels(const cpp_int& p) {
  if (!is_prime_small(p)) throw Error(Err::Config, "abels parameter must be a prime");
  RingDesc r = RingDesc::plocal(p);
  RingValue one = RingValue::one(r);
  RingValue pv = RingValue::plocal(p, 0, p);
  std::vector<std::pair<std::string, ExactMatrix>> gens;
  gens.emplace_back("d1", ExactMatrix::diagonal({one, pv, one, one}));
  gens.emplace_back("d2", ExactMatrix::diagonal({one, one, pv, one}));
  const int pos[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  const char* names[6] = {"e12", "e13", "e14", "e23", "e24", "e34"};
  for (int k = 0; k < 6; ++k)
    gens.emplace_back(names[k], ExactMatrix::elementary(4, r, pos[k][0], pos[k][1], one));
  ExactMatrix n1 = ExactMatrix::elementary(4, r, 0, 3, one);
  return GroupSpec("abels_" + p.str(), r, 4, std::move(gens), {{"e14", n1}},
                   CentralPredicate{PredicateKind::UnipotentLine, 0, 3, true},
                   AbelianStructure{1, {}}, {CCoords{{1}, {}}});
}

GroupSpec heisenberg_mod(const cpp_int& m) {
  RingDesc r = RingDesc::mod(m);
  RingValue one = RingValue::one(r);
  ExactMatrix x = ExactMatrix::elementary(3, r, 0, 1, one);
  ExactMatrix y = ExactMatrix::elementary(3, r, 1, 2, one);
  ExactMatrix z = ExactMatrix::elementary(3, r, 0, 2, one);
  return GroupSpec("heisenberg_mod_" + m.str(), r, 3, {{"x", x}, {"y", y}, {"z", z}}, {{"z", z}},
                   CentralPredicate{PredicateKind::UnipotentLine, 0, 2, false},
                   AbelianStructure{0, {m.convert_to<long long>()}}, {CCoords{{}, {1}}});
}

// ----------------------------------------------------------------- config

namespace {

using nlohmann::json;

RingValue parse_entry(const json& v, const RingDesc& ring) {
  if (v.is_number_integer()) {
    switch (ring.kind) {
      case RingKind::Integer: return RingValue::integer(v.get<long long>());
      case RingKind::ModInt: return RingValue::mod(v.get<long long>(), ring.param);
      case RingKind::PLocal: return RingValue::plocal(v.get<long long>(), 0, ring.param);
    }
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    auto slash = s.find('/');
    if (slash == std::string::npos) {
      cpp_int n(s);
      switch (ring.kind) {
        case RingKind::Integer: return RingValue::integer(n);
        case RingKind::ModInt: return RingValue::mod(n, ring.param);
        case RingKind::PLocal: return RingValue::plocal(n, 0, ring.param);
      }
    }
    if (ring.kind != RingKind::PLocal)
      throw Error(Err::Config, "fractional entry '" + s + "' outside Z[1/p]");
    cpp_int num(s.substr(0, slash));
    cpp_int den(s.substr(slash + 1));
    int k = 0;
    while (den > 1 && den % ring.param == 0) {
      den /= ring.param;
      ++k;
    }
    if (den != 1)
      throw Error(Err::Config, "denominator of '" + s + "' is not a power of p");
    return RingValue::plocal(num, k, ring.param);
  }
  throw Error(Err::Config, "matrix entries must be integers or strings");
}

ExactMatrix parse_matrix(const json& rows, int dim, const RingDesc& ring) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
    throw Error(Err::Config, "matrix must have 'dimension' rows");
  ExactMatrix m(dim, ring);
  for (int i = 0; i < dim; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw Error(Err::Config, "matrix row has wrong length");
    for (int j = 0; j < dim; ++j) m.set(i, j, parse_entry(row[j], ring));
  }
  return m;
}

}  // namespace

GroupSpec group_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(Err::Config, std::string("bad group config JSON: ") + e.what());
  }
  try {
    std::string name = doc.at("name").get<std::string>();
    const json& rj = doc.at("ring");
    std::string kind = rj.at("kind").get<std::string>();
    RingDesc ring;
    if (kind == "integer") ring = RingDesc::integers();
    else if (kind == "modint") ring = RingDesc::mod(rj.at("m").get<long long>());
    else if (kind == "plocal") ring = RingDesc::plocal(rj.at("p").get<long long>());
    else throw Error(Err::Config, "ring kind must be integer|modint|plocal");
    int dim = doc.at("dimension").get<int>();

    std::vector<std::pair<std::string, ExactMatrix>> gens;
    for (const json& g : doc.at("generators"))
      gens.emplace_back(g.at("name").get<std::string>(), parse_matrix(g.at("matrix"), dim, ring));

    std::vector<std::pair<std::string, ExactMatrix>> cgens;
    for (const json& c : doc.at("c_generators")) {
      if (c.is_string()) {
        std::string n = c.get<std::string>();
        bool found = false;
        for (auto& [gn, gm] : gens)
          if (gn == n) {
            cgens.emplace_back(n, gm);
            found = true;
          }
        if (!found) throw Error(Err::Config, "c_generator '" + n + "' names no generator");
      } else {
        cgens.emplace_back(c.at("name").get<std::string>(),
                           parse_matrix(c.at("matrix"), dim, ring));
      }
    }

    const json& pj = doc.at("predicate");
    if (pj.at("kind").get<std::string>() != "unipotent_line")
      throw Error(Err::Config, "predicate kind must be unipotent_line");
    CentralPredicate pred;
    pred.kind = PredicateKind::UnipotentLine;
    pred.row = pj.at("row").get<int>() - 1;  // config uses 1-based positions
    pred.col = pj.at("col").get<int>() - 1;
    pred.require_integral = pj.value("integral", false);

    const json& aj = doc.at("abelian");
    AbelianStructure st;
    st.free_rank = aj.at("free_rank").get<int>();
    for (const json& t : aj.value("torsion", json::array()))
      st.torsion.push_back(t.get<long long>());

    std::vector<CCoords> basis;
    for (const json& b : aj.at("basis")) {
      CCoords bc;
      for (const json& v : b.value("free", json::array())) bc.free_part.push_back(v.get<long long>());
      for (const json& v : b.value("torsion", json::array()))
        bc.torsion_part.push_back(v.get<long long>());
      basis.push_back(std::move(bc));
    }

    return GroupSpec(name, ring, dim, std::move(gens), std::move(cgens), pred, st,
                     std::move(basis));
  } catch (const json::exception& e) {
    throw Error(Err::Config, std::string("group config: ") + e.what());
  }
}

GroupSpec load_group_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Err::Config, "cannot open group config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return group_from_json_text(ss.str());
}

}  // namespace camal
