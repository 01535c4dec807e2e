#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tnkit/mps.hpp"

namespace tnkit {

struct ParentHamiltonian {
  int L = 0;
  int d = 0;
  Mat h;                    // d^L x d^L hermitian projector, site 0 most significant
  int kernel_dim = 0;
  std::string source;
  std::vector<Mat> tensor;  // generating tensor when built from an MPS
  std::vector<std::string> warnings;
};

ParentHamiltonian parent_hamiltonian(const UniformMps& mps, int L);
// Wraps an arbitrary projector; throws if h is not a hermitian projector.
ParentHamiltonian projector_term(const Mat& h, int d, int L, std::string source = "matrix");

// y = sum of the term on sites (s, s+1, ..., s+L-1) mod N for every placement, columnwise.
void apply_chain(const ParentHamiltonian& h, int N, Boundary b, const Mat& x, Mat& y);
Mat dense_chain(const ParentHamiltonian& h, int N, Boundary b);

struct LowSpectrum {
  std::vector<double> values;
  std::vector<Vec> vectors;
  double max_residual = 0;
  int restarts = 0;
};
// Lowest nev eigenpairs of a hermitian operator by restarted block Krylov with
// full reorthogonalisation; residuals certified to `tol`.
LowSpectrum lowest_eigenpairs(const std::function<void(const Mat&, Mat&)>& apply, long dim, int nev,
                              double tol = 1e-8, unsigned seed = 1);

struct GroundSpaceReport {
  int N = 0;
  Boundary boundary = Boundary::Periodic;
  int dimension = 0;
  bool dimension_is_lower_bound = false;
  std::vector<double> energies;
  std::vector<Vec> basis;
  std::string method;  // "dense" or "krylov"
  double max_residual = 0;
  int frustration_free = -1;  // 1 / 0, or -1 when no source tensor is available
};
// seed drives the Krylov start block and the random boundary matrices of the frustration check.
GroundSpaceReport ground_space(const ParentHamiltonian& h, int N, Boundary b, int nev = 6, bool keep_basis = false,
                               unsigned seed = 1);

struct GapCertificate {
  std::string method;
  int blocking = 0, n = 0;
  double c = 0;
  double measured = 0;
  double threshold = 0;       // verdict threshold
  double threshold_weak = 0;  // 1/(n-1) for the local-gap test
  bool verdict = false;
  double margin = 0;
  std::string note;
};

// Largest gamma in [-1, 1] (resolution 1e-4) with {hi,hj} + c(1-gamma)(hi+hj) >= 0.
double martingale_gamma(const Mat& hi, const Mat& hj, double c);
GapCertificate martingale_certificate(const ParentHamiltonian& h, int blocking);
GapCertificate knabe_certificate(const ParentHamiltonian& h, int n);

}  // namespace tnkit
