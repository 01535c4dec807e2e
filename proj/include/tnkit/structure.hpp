#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnkit/mps.hpp"

namespace tnkit {

struct CanonicalBlock {
  double mu = 0;       // weight; the block's transfer operator has spectral radius 1
  MpsTensor tensor;    // normal
  int offset = 0;      // first column of this block in `gauge`
};

struct CanonicalForm {
  int blocking_p = 1;
  int d = 0;           // physical dimension after blocking
  std::vector<CanonicalBlock> blocks;
  Mat gauge;           // unitary; gauge^H A gauge is block upper triangular
  int dropped_dim = 0; // nilpotent diagonal blocks (generate nothing)
  double rank_margin = 0;  // decades between kept/dropped spectra and the rank cut
  std::vector<int> periods;  // peripheral counts of the irreducible blocks before blocking
};

CanonicalForm canonical_form(const UniformMps& mps);

struct NormalityReport {
  bool normal = false;
  int peripheral_count = 0;
  int rank_rhoL = 0, rank_rhoR = 0;
  bool defective = false;
  std::vector<cplx> peripheral;
};
NormalityReport is_normal(const UniformMps& mps);

int injectivity_length(const UniformMps& mps);
int injectivity_bound(int D);

struct BlockRelation {
  int block = 0;   // index into CanonicalForm::blocks
  double mu = 0;
  Mat X;           // block tensor = e^{i phi} X member X^{-1}
  double phi = 0;
};

struct BasisOfNormalTensors {
  std::vector<MpsTensor> members;
  std::vector<std::vector<BlockRelation>> multiplicities;
};
BasisOfNormalTensors basis_of_normal_tensors(const CanonicalForm& cf);

// If b = lambda * X a X^{-1} with |lambda| = 1, returns (X, lambda). Both
// inputs must be normal with transfer spectral radius 1.
struct GaugeMatch {
  bool equivalent = false;
  double leading_modulus = 0;
  cplx lambda;
  Mat X;
  double residual = 0;
};
GaugeMatch match_normal(const std::vector<Mat>& a, const std::vector<Mat>& b);

enum class Verdict { Equal, Proportional, Different };
const char* verdict_name(Verdict v);

struct GaugeRelation {
  Verdict verdict = Verdict::Different;
  std::optional<Mat> X;        // b = scale * X a X^{-1}
  std::optional<double> phase; // arg(scale)
  std::optional<cplx> scale;
  int blocking_p = 1;          // comparison done on p-blocked tensors
  std::vector<int> z_orders;   // per-block root-of-unity orders (periodic blocks)
  bool x_in_canonical_coordinates = false;
  std::string note;
};
GaugeRelation compare_states(const UniformMps& a, const UniformMps& b);

// Scale X so its largest-modulus entry is 1.
Mat normalize_gauge(const Mat& X);

}  // namespace tnkit
