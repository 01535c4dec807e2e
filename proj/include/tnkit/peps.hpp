#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnkit/linalg.hpp"

namespace tnkit {

// A^i_{t r d l}, axes (p, t, r, d, l); clockwise from the top.
struct PepsTensor {
  int d = 0, Dt = 0, Dr = 0, Dd = 0, Dl = 0;
  DenseTensor data;

  static PepsTensor zeros(int d, int Dt, int Dr, int Dd, int Dl);
  static PepsTensor from_data(int d, int Dt, int Dr, int Dd, int Dl, std::vector<cplx> data);
  cplx& at(int i, int t, int r, int dn, int l);
  cplx at(int i, int t, int r, int dn, int l) const;
  // Multiply one virtual leg ("t", "r", "d", "l") by m: new[.., a, ..] = sum_b old[.., b, ..] m(b, a).
  PepsTensor leg_transformed(const std::string& leg, const Mat& m) const;
  // Physical map: new^i = sum_j op(i, j) old^j.
  PepsTensor physical_transformed(const Mat& op) const;
};

enum class PepsBoundary { Torus, Open };

// Site (x, y) at index y * Lx + x; x grows to the right, y grows downwards.
// Open patches have bond dimension 1 on every dangling leg.
struct PepsPatch {
  int Lx = 0, Ly = 0;
  PepsBoundary boundary = PepsBoundary::Torus;
  std::vector<PepsTensor> tensors;

  static PepsPatch uniform(const PepsTensor& t, int Lx, int Ly, PepsBoundary b);
  // Open patch from a bulk tensor, closing dangling legs with boundary vectors.
  static PepsPatch open_with_boundary(const PepsTensor& t, int Lx, int Ly, const Vec& top, const Vec& right,
                                      const Vec& down, const Vec& left);
  const PepsTensor& at(int x, int y) const { return tensors[std::size_t(y) * Lx + x]; }
  PepsTensor& at(int x, int y) { return tensors[std::size_t(y) * Lx + x]; }
  int sites() const { return Lx * Ly; }
  void validate() const;
};

// Half-open rectangle [x0, x1) x [y0, y1).
struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  int sites() const { return (x1 - x0) * (y1 - y0); }
};

struct PlacedOp {
  int x = 0, y = 0;
  Mat op;
};

struct ContractionResult {
  double norm2 = 0;
  std::optional<Vec> amplitudes;  // site order y-major, site 0 most significant
};
ContractionResult peps_contract(const PepsPatch& p, bool amplitudes = false);
Vec peps_dense_state(const PepsPatch& p);
// <psi| prod ops |psi> / <psi|psi>
cplx peps_expectation(const PepsPatch& p, const std::vector<PlacedOp>& ops);

// A virtual leg cut by a region boundary.
struct BoundaryLeg {
  int x = 0, y = 0;     // site inside the region
  std::string leg;      // "t", "r", "d" or "l"
  int dim = 0;
};
std::vector<BoundaryLeg> region_legs(const PepsPatch& p, const Rect& r);

// Region map: rows physical configurations of the region (y-major), columns boundary configurations.
Mat region_map(const PepsPatch& p, const Rect& r);
// Environment of the complement: N = B^dagger B on the boundary space.
Mat complement_gram(const PepsPatch& p, const Rect& r);

struct InjectivityReport {
  bool injective = false;
  int rank = 0;
  long boundary_dim = 0;
};
InjectivityReport peps_region_injectivity(const PepsPatch& p, const Rect& r);

struct BoundaryState {
  Rect region;
  std::vector<BoundaryLeg> legs;
  Mat sigma;     // normalised, hermitian PSD on the boundary space
  Mat isometry;  // U_A of the polar decomposition, a partial isometry on the support of sigma_A
  Mat support;   // orthonormal basis of that support; isometry^dagger isometry = support support^dagger
  std::vector<double> spectrum;                        // eigenvalues of sigma, descending
  std::vector<double> entanglement_hamiltonian_spectrum;  // -log of the nonzero ones
  int rank = 0;
  double entropy = 0;
};
BoundaryState region_boundary_state(const PepsPatch& p, const Rect& r);
// Exact reduced density matrix of the region, normalised.
Mat region_density_matrix(const PepsPatch& p, const Rect& r);

double von_neumann_entropy(const Mat& rho);

}  // namespace tnkit
