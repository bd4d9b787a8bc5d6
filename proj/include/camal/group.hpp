#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "camal/matrix.hpp"
#include "camal/rational.hpp"

namespace camal {

// Declared shape of the central subgroup C as Z^s x (torsion cyclic factors).
struct AbelianStructure {
  int free_rank = 0;
  std::vector<long long> torsion;  // cyclic orders, each >= 2

  int dirs() const { return free_rank + static_cast<int>(torsion.size()); }
  bool operator==(const AbelianStructure& o) const {
    return free_rank == o.free_rank && torsion == o.torsion;
  }
};

// Coordinates of an element of C in the declared basis.
struct CCoords {
  std::vector<cpp_int> free_part;
  std::vector<long long> torsion_part;  // exponent mod the cyclic order
};

// Membership test for C, selected from a fixed menu of shapes.
//
// UnipotentLine: matrices equal to I except entry (row, col); over Z[1/p]
// the entry must additionally be integral.  Requires exactly one C-generator,
// equal to I + E(row, col), aligned with one declared basis direction.
enum class PredicateKind { UnipotentLine };

struct CentralPredicate {
  PredicateKind kind = PredicateKind::UnipotentLine;
  int row = 0;  // zero-based
  int col = 0;
  bool require_integral = false;
};

// Finitely generated group of upper-triangular matrices with a distinguished
// central subgroup C.  Construction validates element shapes, centrality of
// the C-generators, predicate consistency on short C-words, declared torsion
// orders, and basis alignment of the C-generators.
class GroupSpec {
 public:
  GroupSpec(std::string name, RingDesc ring, int dim,
            std::vector<std::pair<std::string, ExactMatrix>> generators,
            std::vector<std::pair<std::string, ExactMatrix>> c_generators,
            CentralPredicate predicate, AbelianStructure structure,
            std::vector<CCoords> c_basis);

  const std::string& name() const { return name_; }
  const RingDesc& ring() const { return ring_; }
  int dim() const { return dim_; }

  const std::vector<std::pair<std::string, ExactMatrix>>& generators() const {
    return generators_;
  }
  const std::vector<std::pair<std::string, ExactMatrix>>& c_generators() const {
    return c_generators_;
  }
  const AbelianStructure& c_structure() const { return structure_; }
  const std::vector<CCoords>& c_basis() const { return c_basis_; }
  const CentralPredicate& predicate() const { return predicate_; }

  const ExactMatrix& generator(const std::string& name) const;
  bool has_generator(const std::string& name) const;

  // Shape gate for submitted elements: matching ring/dimension,
  // upper-triangular, unit diagonal.
  void validate_element(const ExactMatrix& g) const;

  bool in_c(const ExactMatrix& g) const;
  // Coordinates in the declared basis of C; Err::BasisError when g is in C
  // but not expressible (and Err::PreconditionFailed when g is not in C).
  CCoords c_coordinates(const ExactMatrix& g) const;

  bool same_presentation(const GroupSpec& o) const;

 private:
  std::string name_;
  RingDesc ring_;
  int dim_;
  std::vector<std::pair<std::string, ExactMatrix>> generators_;
  std::vector<std::pair<std::string, ExactMatrix>> c_generators_;
  CentralPredicate predicate_;
  AbelianStructure structure_;
  std::vector<CCoords> c_basis_;
};

// Word in the generators: ordered (generator name, exponent) pairs.
struct GroupWord {
  std::vector<std::pair<std::string, long long>> letters;

  static GroupWord parse(const std::string& text);  // "x^2 y^-1 z"
  std::string str() const;
  GroupWord inverse() const;
  GroupWord concat(const GroupWord& o) const;
  bool empty() const { return letters.empty(); }
};

ExactMatrix evaluate_word(const GroupSpec& g, const GroupWord& w);

// Discrete Heisenberg group: 3x3 unitriangular integer matrices, generators
// x = I+E12, y = I+E23, z = I+E13, C = <z>.
GroupSpec heisenberg();

// Upper-triangular 4x4 matrices over Z[1/p] with diagonal (1, p^k, p^n, 1);
// generators are the two diagonal scalings and the six elementary unipotents,
// C = <I + E14> (integral line).
GroupSpec abels(const cpp_int& p);

// Heisenberg reduced mod m (finite); C = <z> is cyclic torsion of order m.
// Exercises torsion declarations; quotients exist for divisors of m.
GroupSpec heisenberg_mod(const cpp_int& m);

GroupSpec load_group_config(const std::string& path);
GroupSpec group_from_json_text(const std::string& text);

}  // namespace camal
