#include "tnkit/mpo.hpp"

#include <cmath>
#include <functional>

namespace tnkit {

namespace {

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// MPV components of a k-site block, (o_1 i_1)(o_2 i_2)... -> (o_1..o_k, i_1..i_k)
MpoTensor regroup_blocked(const std::vector<Mat>& m, int d_out, int d_in, int k) {
  const long Do = ipow(d_out, k), Di = ipow(d_in, k), pair = long(d_out) * d_in;
  std::vector<Mat> out(std::size_t(Do * Di));
  for (long j = 0; j < long(m.size()); ++j) {
    long t = j, O = 0, I = 0, wo = 1, wi = 1;
    for (int s = 0; s < k; ++s, t /= pair) {
      const long oi = t % pair;
      O += (oi / d_in) * wo;
      I += (oi % d_in) * wi;
      wo *= d_out;
      wi *= d_in;
    }
    out[std::size_t(O * Di + I)] = m[j];
  }
  return MpoTensor::from_matrices(int(Do), int(Di), out);
}

MpoTensor block_mpo(const MpoTensor& o, int k) {
  if (k == 1) return o;
  return regroup_blocked(block_sites(o.as_mpv(), k).mats(), o.d_out, o.d_in, k);
}

struct Saturation {
  bool ok = false;
  int k = 0, left = 0, right = 0;
};

Saturation saturate(const MpoTensor& o) {
  const int d = o.d_in, D = o.D;
  const int kmax = D * D * D * D;
  Saturation s;
  for (int k = 1; k <= kmax; ++k) {
    if (k * std::log2(double(d)) > caps().block_phys_log2 + 1e-9) break;
    const double entries = std::pow(double(d), 2.0 * k) * D * D;
    if (entries > double(caps().max_tensor_entries)) break;
    MpoTensor w = block_mpo(o, k);
    const long dk = ipow(d, k);
    Mat ml = Mat::Zero(dk * D, dk * D), mr = Mat::Zero(dk * D, dk * D);
    for (long O = 0; O < dk; ++O)
      for (long I = 0; I < dk; ++I) {
        Mat m = w.matrix(int(O), int(I));
        for (int a = 0; a < D; ++a)
          for (int b = 0; b < D; ++b) {
            ml(I * D + a, O * D + b) = m(a, b);
            mr(I * D + b, O * D + a) = m(a, b);
          }
      }
    s.k = k;
    s.left = numerical_rank(svd(ml).s, tol::rank());
    s.right = numerical_rank(svd(mr).s, tol::rank());
    if (long(s.left) * s.right == dk * dk) {
      s.ok = true;
      return s;
    }
  }
  return s;
}

}  // namespace

MpoTensor MpoTensor::from_matrices(int d_out, int d_in, const std::vector<Mat>& mats) {
  if (d_out <= 0 || d_in <= 0 || long(mats.size()) != long(d_out) * d_in)
    throw Error(Errc::DimensionMismatch, "mpo: need d_out * d_in matrices");
  MpoTensor t;
  t.d_out = d_out;
  t.d_in = d_in;
  t.D = int(mats[0].rows());
  if (t.D == 0) throw Error(Errc::InvalidInput, "mpo: empty bond");
  std::vector<cplx> data(mats.size() * t.D * t.D);
  for (std::size_t j = 0; j < mats.size(); ++j) {
    if (mats[j].rows() != t.D || mats[j].cols() != t.D)
      throw Error(Errc::DimensionMismatch, "mpo: inconsistent matrix shapes");
    for (int a = 0; a < t.D; ++a)
      for (int b = 0; b < t.D; ++b) data[(j * t.D + a) * t.D + b] = mats[j](a, b);
  }
  t.data = DenseTensor({"out", "in", "left", "right"}, {d_out, d_in, t.D, t.D}, std::move(data));
  return t;
}

Mat MpoTensor::matrix(int o, int i) const {
  Mat m(D, D);
  const std::size_t base = (std::size_t(o) * d_in + i) * D * D;
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) m(a, b) = data.data()[base + std::size_t(a) * D + b];
  return m;
}

std::vector<Mat> MpoTensor::matrices() const {
  std::vector<Mat> out;
  for (int o = 0; o < d_out; ++o)
    for (int i = 0; i < d_in; ++i) out.push_back(matrix(o, i));
  return out;
}

UniformMps MpoTensor::as_mpv() const { return UniformMps::periodic(matrices()); }

MpoTensor MpoTensor::from_mpv(const MpsTensor& t, int d_out, int d_in) {
  if (long(t.d) != long(d_out) * d_in) throw Error(Errc::DimensionMismatch, "mpo: physical dimension is not d_out * d_in");
  return from_matrices(d_out, d_in, t.matrices());
}

MpoTensor mpo_identity(int d) {
  std::vector<Mat> m(std::size_t(d) * d, Mat::Zero(1, 1));
  for (int i = 0; i < d; ++i) m[std::size_t(i) * d + i](0, 0) = 1;
  return MpoTensor::from_matrices(d, d, m);
}

MpoTensor mpo_product(const Mat& op) {
  std::vector<Mat> m;
  for (int o = 0; o < op.rows(); ++o)
    for (int i = 0; i < op.cols(); ++i) m.push_back(Mat::Constant(1, 1, op(o, i)));
  return MpoTensor::from_matrices(int(op.rows()), int(op.cols()), m);
}

MpoTensor mpo_shift_left(int d) {
  std::vector<Mat> m;
  for (int o = 0; o < d; ++o)
    for (int i = 0; i < d; ++i) {
      Mat w = Mat::Zero(d, d);
      w(i, o) = 1;
      m.push_back(w);
    }
  return MpoTensor::from_matrices(d, d, m);
}

MpoTensor mpo_shift_right(int d) {
  std::vector<Mat> m;
  for (int o = 0; o < d; ++o)
    for (int i = 0; i < d; ++i) {
      Mat w = Mat::Zero(d, d);
      w(o, i) = 1;
      m.push_back(w);
    }
  return MpoTensor::from_matrices(d, d, m);
}

MpoTensor mpo_dagger(const MpoTensor& o) {
  std::vector<Mat> m;
  for (int a = 0; a < o.d_in; ++a)
    for (int b = 0; b < o.d_out; ++b) m.push_back(o.matrix(b, a).conjugate());
  return MpoTensor::from_matrices(o.d_in, o.d_out, m);
}

MpoTensor mpo_tensor(const MpoTensor& a, const MpoTensor& b) {
  const int d_out = a.d_out * b.d_out, d_in = a.d_in * b.d_in;
  std::vector<Mat> m(std::size_t(d_out) * d_in);
  for (int oa = 0; oa < a.d_out; ++oa)
    for (int ob = 0; ob < b.d_out; ++ob)
      for (int ia = 0; ia < a.d_in; ++ia)
        for (int ib = 0; ib < b.d_in; ++ib)
          m[std::size_t(oa * b.d_out + ob) * d_in + ia * b.d_in + ib] = kron(a.matrix(oa, ia), b.matrix(ob, ib));
  return MpoTensor::from_matrices(d_out, d_in, m);
}

UniformMps mpo_apply(const MpoTensor& o, const UniformMps& mps) {
  if (o.d_in != mps.d()) throw Error(Errc::DimensionMismatch, "mpo_apply: d_in differs from the MPS physical dimension");
  if (mps.boundary != Boundary::Periodic) throw Error(Errc::Unsupported, "mpo_apply: open boundary MPS");
  const auto A = mps.mats();
  std::vector<Mat> B;
  for (int out = 0; out < o.d_out; ++out) {
    Mat b = Mat::Zero(o.D * mps.D(), o.D * mps.D());
    for (int i = 0; i < o.d_in; ++i) b += kron(o.matrix(out, i), A[i]);
    B.push_back(b);
  }
  return UniformMps::periodic(B);
}

MpoTensor mpo_compose(const MpoTensor& a, const MpoTensor& b) {
  if (a.d_in != b.d_out) throw Error(Errc::DimensionMismatch, "mpo_compose: inner dimensions differ");
  std::vector<Mat> m;
  for (int o = 0; o < a.d_out; ++o)
    for (int i = 0; i < b.d_in; ++i) {
      Mat c = Mat::Zero(a.D * b.D, a.D * b.D);
      for (int k = 0; k < a.d_in; ++k) c += kron(a.matrix(o, k), b.matrix(k, i));
      m.push_back(c);
    }
  return MpoTensor::from_matrices(a.d_out, b.d_in, m);
}

MpoReduction mpo_reduce(const MpoTensor& o) {
  CanonicalForm cf = canonical_form(o.as_mpv());
  MpoReduction r;
  r.blocking_p = cf.blocking_p;
  r.dropped_dim = cf.dropped_dim;
  for (const auto& b : cf.blocks)
    r.blocks.push_back({b.mu, regroup_blocked(b.tensor.matrices(), o.d_out, o.d_in, cf.blocking_p)});
  return r;
}

Mat mpo_dense(const MpoTensor& o, int N) {
  if (N <= 0) throw Error(Errc::InvalidInput, "mpo_dense: length must be positive");
  if (N * std::log2(double(o.d_out) * o.d_in) > 2.0 * caps().ed_dense_log2 + 1e-9)
    throw Error(Errc::CapExceeded, "mpo_dense: operator exceeds cap");
  const long rows = ipow(o.d_out, N), cols = ipow(o.d_in, N);
  const auto W = o.matrices();
  Mat M(rows, cols);
  std::vector<Mat> stack(N + 1);
  stack[0] = Mat::Identity(o.D, o.D);
  std::function<void(int, long, long)> walk = [&](int s, long r, long c) {
    if (s == N) {
      M(r, c) = stack[N].trace();
      return;
    }
    for (int out = 0; out < o.d_out; ++out)
      for (int in = 0; in < o.d_in; ++in) {
        stack[s + 1] = stack[s] * W[std::size_t(out) * o.d_in + in];
        walk(s + 1, r * o.d_out + out, c * o.d_in + in);
      }
  };
  walk(0, 0, 0);
  return M;
}

MpuReport is_unitary_mpu(const MpoTensor& o) {
  MpuReport rep;
  if (o.d_out != o.d_in) {
    rep.note = "d_out differs from d_in";
    return rep;
  }
  const int d = o.d_in;
  // U U^dagger has bond D^2; shrink D first when the MPV reduces to a single block
  MpoTensor w = o;
  if (o.D > 2) {
    const MpoReduction red = mpo_reduce(o);
    if (red.blocks.size() == 1 && red.blocking_p == 1 && red.blocks[0].tensor.D < o.D) {
      auto m = red.blocks[0].tensor.matrices();
      for (auto& x : m) x *= red.blocks[0].mu;
      w = MpoTensor::from_matrices(o.d_out, o.d_in, m);
    }
  }
  GaugeRelation g = compare_states(mpo_compose(w, mpo_dagger(w)).as_mpv(), mpo_identity(d).as_mpv());
  rep.unitary = g.verdict == Verdict::Equal;
  rep.note = std::string("U U^dagger vs identity: ") + verdict_name(g.verdict);
  for (int N = 1; N <= 4; ++N) {
    if (N * std::log2(double(d)) > caps().ed_dense_log2 + 1e-9) break;
    Mat U = mpo_dense(o, N);
    const bool dense = (U * U.adjoint() - Mat::Identity(U.rows(), U.rows())).norm() <= 1e-8 * std::sqrt(double(U.rows()));
    rep.dense_checked_up_to = N;
    if (!dense && rep.unitary)
      rep.warnings.push_back("dense check failed at N=" + std::to_string(N) + " although the MPV comparison says unitary");
    if (!dense) rep.unitary = false;
  }
  return rep;
}

MpuReport mpu_index(const MpoTensor& o) {
  MpuReport rep = is_unitary_mpu(o);
  if (!rep.unitary) throw Error(Errc::NotUnitary, "mpu_index: MPO is not unitary");
  Saturation s = saturate(o);
  if (!s.ok) {
    MpoReduction red = mpo_reduce(o);
    if (red.blocks.size() == 1 && red.blocking_p == 1) {
      s = saturate(red.blocks[0].tensor);
      if (s.ok) rep.note += "; index from the reduced tensor";
    }
  }
  if (!s.ok) throw Error(Errc::NotConverged, "mpu_index: ranks did not saturate within the blocking cap");
  rep.blocking_used = s.k;
  rep.rank_left = s.left;
  rep.rank_right = s.right;
  rep.index = 0.5 * std::log2(double(s.right) / double(s.left));
  return rep;
}

PositivityReport mpo_positivity_small(const MpoTensor& o, int N) {
  if (o.d_out != o.d_in) throw Error(Errc::DimensionMismatch, "mpo_positivity_small: d_out differs from d_in");
  if (N * std::log2(double(o.d_in)) > caps().ed_dense_log2 + 1e-9)
    throw Error(Errc::CapExceeded, "mpo_positivity_small: d^N exceeds cap");
  Mat M = mpo_dense(o, N);
  if ((M - M.adjoint()).norm() > tol::rank() * std::max(1.0, M.norm()))
    throw Error(Errc::InvalidInput, "mpo_positivity_small: operator is not hermitian");
  PositivityReport r;
  r.min_eigenvalue = herm_eig(hermitize(M)).values[0];
  r.positive = r.min_eigenvalue >= -tol::eq();
  return r;
}

}  // namespace tnkit
