#pragma once

#include <string>
#include <vector>

#include "tnkit/linalg.hpp"

namespace tnkit {

// Finite group given by its multiplication table; mul[a][b] = index of a*b.
struct FiniteGroup {
  int order = 0;
  std::vector<std::vector<int>> mul;
  int identity = 0;
  std::vector<int> inv;
  std::string name;

  // Checks closure, associativity, identity and inverses exactly.
  static FiniteGroup from_table(const std::vector<std::vector<int>>& table, std::string name = "");
  static FiniteGroup cyclic(int n);
  static FiniteGroup product(const FiniteGroup& a, const FiniteGroup& b);
  static FiniteGroup symmetric(int n);  // n <= 4, permutations in lexicographic order
  static FiniteGroup dihedral(int n);   // order 2n; r^k -> k, s r^k -> n + k

  int mult(int a, int b) const { return mul[a][b]; }
  bool abelian() const;
  int element_order(int g) const;
  int exponent() const;
  std::vector<std::vector<int>> conjugacy_classes() const;
  std::vector<int> centralizer(int h) const;
  // Subgroup on the listed elements; map[k] is the parent index of element k.
  FiniteGroup subgroup(const std::vector<int>& elements) const;
};

// "z<n>", "s<n>" (n <= 4), "d<n>", and products joined by 'x', e.g. "z2xz2".
FiniteGroup group_by_name(const std::string& name);

struct CharacterTable {
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of;             // element -> class index
  std::vector<int> dims;                 // per irrep
  std::vector<std::vector<cplx>> chi;    // chi[irrep][class]
  cplx value(int irrep, int g) const { return chi[irrep][class_of[g]]; }
};

// Irreducible characters from the class algebra; irrep 0 is trivial.
CharacterTable character_table(const FiniteGroup& g);

}  // namespace tnkit
