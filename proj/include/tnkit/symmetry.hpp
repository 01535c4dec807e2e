#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnkit/group.hpp"
#include "tnkit/mps.hpp"

namespace tnkit {

struct OnSiteSymmetry {
  FiniteGroup group;
  std::vector<Mat> U;  // per element, d x d
  // U_g U_h = U_gh and unitarity, to tol::eq() scaled by d.
  void validate() const;
};

struct ProjectiveData {
  FiniteGroup group;
  std::vector<Mat> X;                       // sum_j U_ij A^j = e^{i phi} X^{-1} A^i X
  std::vector<double> phi;                  // radians
  std::vector<std::vector<double>> omega;   // X_g X_h = e^{i omega(g,h)} X_gh, radians in [0, 2pi)
  std::vector<std::string> warnings;
};

// Phases from given virtual matrices; used by detect_symmetry_action and by tests.
ProjectiveData projective_data_from(const FiniteGroup& g, std::vector<Mat> X, std::vector<double> phi);

ProjectiveData detect_symmetry_action(const UniformMps& mps, const OnSiteSymmetry& sym);

// Orders (> 1) of the cyclic factors of H^2(G, U(1)).
std::vector<int> cohomology_group(const FiniteGroup& g);

struct CommutatorPhase {
  int g = 0, h = 0;
  cplx value;
};

struct CohomologyClass {
  std::vector<int> group_structure;
  std::vector<int> label;  // one entry per factor, reduced mod the factor order
  bool trivial = true;
  std::vector<CommutatorPhase> invariants;  // commuting pairs g < h
  // 1-cocycle phi/2pi mod 1 per element, for the given unit cell and after 2-site blocking
  std::vector<double> h1_unit, h1_blocked;
  std::vector<std::string> warnings;
};

CohomologyClass cocycle_class(const ProjectiveData& pd);
// Class of a U(1) 2-cocycle given as a phase table (radians).
std::vector<int> cocycle_label(const FiniteGroup& g, const std::vector<std::vector<double>>& omega);
// Max violation of the 2-cocycle identity, radians mod 2pi.
double cocycle_defect(const FiniteGroup& g, const std::vector<std::vector<double>>& omega);

int time_reversal_index(const UniformMps& mps, const Mat& u);

// <R U_g^{(x)L} R>; L empty means the limit L -> infinity.
cplx string_order(const UniformMps& mps, const OnSiteSymmetry& sym, int g, const Mat& R,
                  std::optional<int> L);

struct SptFixedPoint {
  UniformMps mps;
  OnSiteSymmetry sym;
  std::vector<Mat> X;
};
SptFixedPoint build_spt_fixed_point(const FiniteGroup& g, const std::vector<std::vector<double>>& omega,
                                    const std::vector<double>& phi);

struct RgfpReport {
  bool fixed_point = false;
  double residual = 0;          // ||E^2 - E|| after normalisation
  bool isometry = false;        // two-site map factors through an isometry of the one-site map
  double isometry_residual = 0;
};
RgfpReport rgfp_check(const UniformMps& mps);

// Snap to the nearest multiple of 2pi/n when within 1e-6.
double snap_phase(double x, int n, bool* snapped = nullptr);

}  // namespace tnkit
