#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace tnkit {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using ComplexMatrix = Mat;

enum class Errc {
  InvalidInput,
  DimensionMismatch,
  CapExceeded,
  NonNormal,
  Defective,
  NotConverged,
  Ambiguous,
  SymmetryViolated,
  CocycleViolated,
  NotCovariant,
  NotUnitary,
  Unsupported,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Tolerance pair. rank() is always 100 * eq().
namespace tol {
inline constexpr double kEqDefault = 1e-10;
inline constexpr double kRankDefault = 1e-8;
double eq();
double rank();
// Process-wide override; meant to be called once at startup.
void set(double eq);
}  // namespace tol

// Caps on dense work. The CLI lowers the ED caps from TNKIT_CAP_QUBITS.
struct Caps {
  int ed_dense_log2 = 12;
  int ed_max_log2 = 20;
  std::int64_t max_tensor_entries = std::int64_t(1) << 25;
  int block_phys_log2 = 20;
};
const Caps& caps();
void set_caps(const Caps& c);

// Axis-labelled dense tensor, row-major.
class DenseTensor {
 public:
  DenseTensor() = default;
  DenseTensor(std::vector<std::string> labels, std::vector<int> shape);
  DenseTensor(std::vector<std::string> labels, std::vector<int> shape, std::vector<cplx> data);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  int axis(const std::string& label) const;
  bool has_axis(const std::string& label) const;
  int extent(const std::string& label) const { return shape_[axis(label)]; }

  cplx& at(const std::vector<int>& idx);
  cplx at(const std::vector<int>& idx) const;

  DenseTensor permuted(const std::vector<std::string>& order) const;
  DenseTensor relabeled(const std::vector<std::pair<std::string, std::string>>& map) const;
  DenseTensor conj() const;

  // Reshape into a matrix: row axes then column axes, each group in the given order.
  Mat as_matrix(const std::vector<std::string>& rows, const std::vector<std::string>& cols) const;
  static DenseTensor from_matrix(const Mat& m, std::vector<std::string> row_labels,
                                 std::vector<int> row_shape, std::vector<std::string> col_labels,
                                 std::vector<int> col_shape);

 private:
  std::vector<std::string> labels_;
  std::vector<int> shape_;
  std::vector<cplx> data_;
};

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<std::string, std::string>>& pairs);
// Contract every label the two tensors share.
DenseTensor contract_shared(const DenseTensor& a, const DenseTensor& b);

struct EigenPair {
  cplx value;
  Vec right;  // empty when the pair belongs to a defective cluster
  Vec left;   // normalised so left^H right = 1
};

struct EigResult {
  std::vector<EigenPair> pairs;  // descending modulus
  bool defective = false;
  std::vector<cplx> values() const;
};

EigResult eig_general(const Mat& m);

struct SvdResult {
  Mat U;
  RVec s;
  Mat V;
};
SvdResult svd(const Mat& m);

struct PolarResult {
  Mat W;
  Mat P;
};
PolarResult polar_decompose(const Mat& m);

// Hermitian eigensystem, ascending eigenvalues.
struct HermEig {
  RVec values;
  Mat vectors;
};
HermEig herm_eig(const Mat& h);

using BigInt = boost::multiprecision::cpp_int;

class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(std::size_t(rows) * cols) {}
  static IntegerMatrix identity(int n);
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  BigInt& operator()(int r, int c) { return e_[std::size_t(r) * cols_ + c]; }
  const BigInt& operator()(int r, int c) const { return e_[std::size_t(r) * cols_ + c]; }
  IntegerMatrix operator*(const IntegerMatrix& o) const;
  bool operator==(const IntegerMatrix& o) const;
  BigInt det() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<BigInt> e_;
};

struct SmithResult {
  IntegerMatrix U, S, V;
  IntegerMatrix Vinv;
  std::vector<BigInt> diagonal;
};
// U*m*V = S. With track_u false the U factor is left empty (large row counts).
SmithResult smith_normal_form(const IntegerMatrix& m, bool track_u = true);

// Small helpers used across modules.
Mat kron(const Mat& a, const Mat& b);
int numerical_rank(const RVec& s, double rel);
Mat range_basis(const Mat& m, double rel);
Mat null_space(const Mat& m, double rel);
Mat psd_sqrt(const Mat& h);
Mat hermitize(const Mat& m);
double spectral_norm(const Mat& m);
Mat random_matrix(int rows, int cols, std::mt19937_64& rng);
Mat random_unitary(int n, std::mt19937_64& rng);

}  // namespace tnkit
