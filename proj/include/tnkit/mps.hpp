#pragma once

#include <optional>
#include <vector>

#include "tnkit/linalg.hpp"

namespace tnkit {

// A^i_{ab}, axes (p, l, r).
struct MpsTensor {
  int d = 0, Dl = 0, Dr = 0;
  DenseTensor data;

  static MpsTensor from_matrices(const std::vector<Mat>& mats);
  std::vector<Mat> matrices() const;
  Mat matrix(int i) const;
};

enum class Boundary { Periodic, Open };

struct UniformMps {
  MpsTensor tensor;
  Boundary boundary = Boundary::Periodic;
  Vec l, r;  // only for Open

  static UniformMps periodic(const std::vector<Mat>& mats);
  static UniformMps open(const std::vector<Mat>& mats, const Vec& l, const Vec& r);
  int d() const { return tensor.d; }
  int D() const { return tensor.Dl; }
  std::vector<Mat> mats() const { return tensor.matrices(); }
};

struct TransferOperator {
  Mat matrix;          // E, row (a,a'), column (b,b'), row-major vectorisation
  cplx lambda1;        // before any normalisation
  Mat rhoL, rhoR;      // fixed points, tr(rhoR) > 0, tr(rhoL rhoR) = 1
  std::vector<cplx> peripheral;  // eigenvalues / lambda1 on the unit circle
  std::vector<cplx> spectrum;    // full spectrum of matrix, descending modulus
  bool peripheral_defective = false;
  bool normalized = false;
};

struct EntanglementData {
  std::vector<double> schmidt_squares;
  std::vector<std::pair<double, double>> renyi;  // (alpha, S_alpha); alpha = 1 is von Neumann
  double correlation_length = 0.0;
  bool correlation_length_infinite = false;
};

// Row-major vectorisation helpers used for E and its fixed points.
Vec vec_rm(const Mat& x);
Mat unvec_rm(const Vec& v, int rows, int cols);

cplx amplitude(const UniformMps& mps, const std::vector<int>& config);
// All d^N amplitudes, site 0 is the most significant digit.
Vec dense_state(const UniformMps& mps, int N);

UniformMps block_sites(const UniformMps& mps, int k);

// sum_i A^i (x) conj(B^i)
Mat mixed_transfer(const std::vector<Mat>& a, const std::vector<Mat>& b);
// sum_ij O_ij A^j (x) conj(A^i)
Mat dressed_transfer(const std::vector<Mat>& a, const Mat& op);

TransferOperator transfer_operator(const UniformMps& mps, bool normalize = false);
// Unique peripheral eigenvalue and full-rank fixed points.
bool transfer_is_normal(const TransferOperator& t, int D);

EntanglementData correlation_length(const UniformMps& mps);
EntanglementData entanglement_spectrum(const UniformMps& mps,
                                       const std::vector<double>& alphas = {0.5, 1.0, 2.0, 3.0});
std::vector<std::pair<double, double>> renyi_table(const std::vector<double>& p,
                                                   const std::vector<double>& alphas);

// N empty means the infinite chain.
Mat reduced_density_matrix(const UniformMps& mps, int n, std::optional<int> N);
cplx correlation_function(const UniformMps& mps, const Mat& X, const Mat& Y, int separation,
                          std::optional<int> N = std::nullopt);

}  // namespace tnkit
