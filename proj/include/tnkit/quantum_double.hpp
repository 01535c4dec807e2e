#pragma once

#include <vector>

#include "tnkit/group.hpp"
#include "tnkit/peps.hpp"

namespace tnkit {

// L_g |k> = |g k>
Mat left_regular(const FiniteGroup& g, int h);

// Plaquette-colour tensor of the quantum double: every site carries a colour c
// (D = |G|) and owns its right and down edges, physical (c^-1 c_right, c^-1 c_down)
// with index a * |G| + b. The tensor is invariant under L_g on all four legs.
PepsTensor quantum_double_tensor(const FiniteGroup& g);
PepsPatch quantum_double_patch(const FiniteGroup& g, int Lx, int Ly);

struct SectorLabel {
  int flux = 0;        // conjugacy class representative h
  int class_index = 0;
  int irrep = 0;       // irrep of the centralizer Z(h)
  int irrep_dim = 1;
  std::vector<int> centralizer;
};
std::vector<SectorLabel> sector_labels(const FiniteGroup& g);

// Horizontal string: L_g on the vertical bonds between rows `row` and row + 1.
// Vertical string: L_h on the horizontal bonds between columns `column` and column + 1,
// rows above the crossing carry g h g^-1.
struct StringPlacement {
  int row = 0;
  int column = 0;
};
PepsPatch quantum_double_with_strings(const FiniteGroup& g, int Lx, int Ly, int horizontal, int vertical,
                                      const StringPlacement& at = {});

struct SectorBasis {
  FiniteGroup group;
  int Lx = 0, Ly = 0;
  StringPlacement placement;
  std::vector<SectorLabel> labels;
  std::vector<Vec> states;  // normalised
  Mat gram;
  int rank = 0;
  double min_gram_eigenvalue = 0;
};
// jobs > 1 builds the sector states on that many threads.
SectorBasis quantum_double_sectors(const FiniteGroup& g, int Lx, int Ly, int jobs = 1);

struct TopologicalEntropy {
  double entropy = 0;
  int boundary_legs = 0;
  // Distinct colour variables on the cut legs. The top and left legs of the corner
  // site carry the same colour, so this is one less than the leg count for a rectangle.
  int effective_boundary = 0;
  double gamma = 0;
};
TopologicalEntropy topological_entropy(const FiniteGroup& g, int Lx, int Ly, const Rect& region);

}  // namespace tnkit
