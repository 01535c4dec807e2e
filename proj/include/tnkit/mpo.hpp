#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnkit/structure.hpp"

namespace tnkit {

// W^{o,i}_{ab}, axes (out, in, left, right).
struct MpoTensor {
  int d_out = 0, d_in = 0, D = 0;
  DenseTensor data;

  // mats[o * d_in + i] is the D x D matrix W^{o,i}
  static MpoTensor from_matrices(int d_out, int d_in, const std::vector<Mat>& mats);
  Mat matrix(int o, int i) const;
  std::vector<Mat> matrices() const;
  // Operator viewed as a vector: physical index o * d_in + i.
  UniformMps as_mpv() const;
  static MpoTensor from_mpv(const MpsTensor& t, int d_out, int d_in);
};

MpoTensor mpo_identity(int d);
MpoTensor mpo_product(const Mat& op);
// out_k = in_{k+1}: moves the state one site to the left.
MpoTensor mpo_shift_left(int d);
MpoTensor mpo_shift_right(int d);
MpoTensor mpo_dagger(const MpoTensor& o);
// Two MPOs on separate registers, combined site index o_a * d_b + o_b.
MpoTensor mpo_tensor(const MpoTensor& a, const MpoTensor& b);

UniformMps mpo_apply(const MpoTensor& o, const UniformMps& mps);
// Operator product a * b (b acts first); bond D_a * D_b.
MpoTensor mpo_compose(const MpoTensor& a, const MpoTensor& b);

struct MpoBlock {
  double mu = 0;
  MpoTensor tensor;
};
struct MpoReduction {
  int blocking_p = 1;
  std::vector<MpoBlock> blocks;
  int dropped_dim = 0;
};
MpoReduction mpo_reduce(const MpoTensor& o);

// d_out^N x d_in^N, site 0 most significant.
Mat mpo_dense(const MpoTensor& o, int N);

struct MpuReport {
  bool unitary = false;
  std::optional<double> index;
  int blocking_used = 0;
  int rank_left = 0, rank_right = 0;
  int dense_checked_up_to = 0;  // largest N of the dense cross-check
  std::string note;
  std::vector<std::string> warnings;
};
MpuReport is_unitary_mpu(const MpoTensor& o);
MpuReport mpu_index(const MpoTensor& o);

struct PositivityReport {
  bool positive = false;
  double min_eigenvalue = 0;
};
PositivityReport mpo_positivity_small(const MpoTensor& o, int N);

}  // namespace tnkit
