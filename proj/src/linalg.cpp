#include "tnkit/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>

namespace tnkit {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidInput: return "invalid_input";
    case Errc::DimensionMismatch: return "dimension_mismatch";
    case Errc::CapExceeded: return "cap_exceeded";
    case Errc::NonNormal: return "non_normal";
    case Errc::Defective: return "defective";
    case Errc::NotConverged: return "not_converged";
    case Errc::Ambiguous: return "ambiguous";
    case Errc::SymmetryViolated: return "symmetry_violated";
    case Errc::CocycleViolated: return "cocycle_violated";
    case Errc::NotCovariant: return "not_covariant";
    case Errc::NotUnitary: return "not_unitary";
    case Errc::Unsupported: return "unsupported";
  }
  return "unknown";
}

namespace tol {
namespace {
std::atomic<double> g_eq{kEqDefault};
}
double eq() { return g_eq.load(std::memory_order_relaxed); }
double rank() { return 100.0 * eq(); }
void set(double e) {
  if (!(e > 0) || !std::isfinite(e)) throw Error(Errc::InvalidInput, "tolerance must be positive");
  g_eq.store(e, std::memory_order_relaxed);
}
}  // namespace tol

namespace {
Caps g_caps;
}
const Caps& caps() { return g_caps; }
void set_caps(const Caps& c) { g_caps = c; }

// ---------------------------------------------------------------- DenseTensor

static std::int64_t product(const std::vector<int>& s) {
  std::int64_t p = 1;
  for (int x : s) p *= x;
  return p;
}

DenseTensor::DenseTensor(std::vector<std::string> labels, std::vector<int> shape)
    : DenseTensor(std::move(labels), shape, std::vector<cplx>(product(shape))) {}

DenseTensor::DenseTensor(std::vector<std::string> labels, std::vector<int> shape,
                         std::vector<cplx> data)
    : labels_(std::move(labels)), shape_(std::move(shape)), data_(std::move(data)) {
  if (labels_.size() != shape_.size())
    throw Error(Errc::InvalidInput, "tensor: label count differs from rank");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw Error(Errc::InvalidInput, "tensor: duplicate axis label");
  for (int e : shape_)
    if (e <= 0) throw Error(Errc::InvalidInput, "tensor: non-positive extent");
  if (static_cast<std::int64_t>(data_.size()) != product(shape_))
    throw Error(Errc::InvalidInput, "tensor: entry count differs from shape");
}

int DenseTensor::axis(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(Errc::InvalidInput, "tensor: no axis '" + label + "'");
  return static_cast<int>(it - labels_.begin());
}

bool DenseTensor::has_axis(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

static std::int64_t flat_index(const std::vector<int>& shape, const std::vector<int>& idx) {
  std::int64_t f = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) f = f * shape[k] + idx[k];
  return f;
}

cplx& DenseTensor::at(const std::vector<int>& idx) { return data_[flat_index(shape_, idx)]; }
cplx DenseTensor::at(const std::vector<int>& idx) const { return data_[flat_index(shape_, idx)]; }

DenseTensor DenseTensor::permuted(const std::vector<std::string>& order) const {
  if (order.size() != labels_.size()) throw Error(Errc::InvalidInput, "permute: wrong axis count");
  const int r = rank();
  std::vector<int> perm(r);
  for (int k = 0; k < r; ++k) perm[k] = axis(order[k]);
  bool identity = true;
  for (int k = 0; k < r; ++k) identity = identity && perm[k] == k;
  if (identity) return *this;

  std::vector<std::int64_t> stride(r);
  {
    std::int64_t s = 1;
    for (int k = r - 1; k >= 0; --k) {
      stride[k] = s;
      s *= shape_[k];
    }
  }
  std::vector<int> nshape(r);
  std::vector<std::int64_t> nstride(r);
  for (int k = 0; k < r; ++k) {
    nshape[k] = shape_[perm[k]];
    nstride[k] = stride[perm[k]];
  }
  std::vector<cplx> out(data_.size());
  std::vector<int> idx(r, 0);
  std::int64_t src = 0;
  const std::int64_t n = size();
  const int inner = r - 1;
  for (std::int64_t dst = 0; dst < n;) {
    // innermost run
    const int len = nshape[inner];
    const std::int64_t st = nstride[inner];
    for (int q = 0; q < len; ++q) out[dst++] = data_[src + q * st];
    // carry
    int k = inner - 1;
    while (k >= 0) {
      ++idx[k];
      src += nstride[k];
      if (idx[k] < nshape[k]) break;
      src -= nstride[k] * nshape[k];
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  std::vector<std::string> nl(order.begin(), order.end());
  return DenseTensor(std::move(nl), std::move(nshape), std::move(out));
}

DenseTensor DenseTensor::relabeled(const std::vector<std::pair<std::string, std::string>>& map) const {
  auto nl = labels_;
  for (const auto& [from, to] : map) nl[axis(from)] = to;
  return DenseTensor(nl, shape_, data_);
}

DenseTensor DenseTensor::conj() const {
  auto out = *this;
  for (auto& x : out.data_) x = std::conj(x);
  return out;
}

Mat DenseTensor::as_matrix(const std::vector<std::string>& rows,
                           const std::vector<std::string>& cols) const {
  std::vector<std::string> order(rows);
  order.insert(order.end(), cols.begin(), cols.end());
  DenseTensor p = permuted(order);
  std::int64_t nr = 1, nc = 1;
  for (const auto& l : rows) nr *= extent(l);
  for (const auto& l : cols) nc *= extent(l);
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMat>(p.data_.data(), nr, nc);
}

DenseTensor DenseTensor::from_matrix(const Mat& m, std::vector<std::string> row_labels,
                                     std::vector<int> row_shape, std::vector<std::string> col_labels,
                                     std::vector<int> col_shape) {
  if (product(row_shape) != m.rows() || product(col_shape) != m.cols())
    throw Error(Errc::DimensionMismatch, "from_matrix: shape does not match matrix");
  std::vector<cplx> data(m.size());
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMat>(data.data(), m.rows(), m.cols()) = m;
  row_labels.insert(row_labels.end(), col_labels.begin(), col_labels.end());
  row_shape.insert(row_shape.end(), col_shape.begin(), col_shape.end());
  return DenseTensor(std::move(row_labels), std::move(row_shape), std::move(data));
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<std::string> pa, pb;
  for (const auto& [la, lb] : pairs) {
    if (a.extent(la) != b.extent(lb))
      throw Error(Errc::DimensionMismatch, "contract: extent mismatch on " + la + "/" + lb);
    pa.push_back(la);
    pb.push_back(lb);
  }
  std::vector<std::string> fa, fb;
  std::vector<int> sa, sb;
  for (int k = 0; k < a.rank(); ++k)
    if (std::find(pa.begin(), pa.end(), a.labels()[k]) == pa.end()) {
      fa.push_back(a.labels()[k]);
      sa.push_back(a.shape()[k]);
    }
  for (int k = 0; k < b.rank(); ++k)
    if (std::find(pb.begin(), pb.end(), b.labels()[k]) == pb.end()) {
      fb.push_back(b.labels()[k]);
      sb.push_back(b.shape()[k]);
    }
  for (const auto& l : fb)
    if (std::find(fa.begin(), fa.end(), l) != fa.end())
      throw Error(Errc::InvalidInput, "contract: duplicate axis label '" + l + "' in result");
  std::int64_t out_size = product(sa) * product(sb);
  if (out_size > caps().max_tensor_entries)
    throw Error(Errc::CapExceeded, "contract: result exceeds tensor-size cap");
  Mat am = a.as_matrix(fa, pa);
  Mat bm = b.as_matrix(pb, fb);
  Mat cm = am * bm;
  return DenseTensor::from_matrix(cm, fa, sa, fb, sb);
}

DenseTensor contract_shared(const DenseTensor& a, const DenseTensor& b) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& l : a.labels())
    if (b.has_axis(l)) pairs.emplace_back(l, l);
  return contract(a, b, pairs);
}

// ---------------------------------------------------------------- eigen

std::vector<cplx> EigResult::values() const {
  std::vector<cplx> v;
  v.reserve(pairs.size());
  for (const auto& p : pairs) v.push_back(p.value);
  return v;
}

namespace {

// Eigen's BDCSVD can return non-orthogonal factors on strongly degenerate spectra;
// such results are detected here and recomputed with Jacobi.
bool factors_ok(const Mat& m, const RVec& s, const Mat& V) {
  const double scale = std::max(1.0, s.size() ? s[0] : 0.0);
  const double tol = 1e-9 * std::sqrt(double(V.cols()) + 1) * scale;
  if ((V.adjoint() * V - Mat::Identity(V.cols(), V.cols())).norm() > 1e-9 * std::sqrt(double(V.cols()) + 1))
    return false;
  const RVec cn = (m * V).colwise().norm();
  for (int k = 0; k < cn.size(); ++k)
    if (std::abs(cn[k] - (k < s.size() ? s[k] : 0.0)) > tol) return false;
  return true;
}

struct FullV {
  RVec s;
  Mat V;
};

FullV full_v_svd(const Mat& m) {
  Eigen::BDCSVD<Mat> b(m, Eigen::ComputeFullV);
  if (b.info() == Eigen::Success && factors_ok(m, b.singularValues(), b.matrixV()))
    return {b.singularValues(), b.matrixV()};
  Eigen::JacobiSVD<Mat> j(m, Eigen::ComputeFullV);
  return {j.singularValues(), j.matrixV()};
}

}  // namespace

EigResult eig_general(const Mat& m) {
  if (m.rows() != m.cols()) throw Error(Errc::InvalidInput, "eig_general: matrix not square");
  const int n = static_cast<int>(m.rows());
  EigResult res;
  if (n == 0) return res;
  Eigen::ComplexEigenSolver<Mat> es;
  es.setMaxIterations(4 * n);
  es.compute(m, true);
  Vec vals;
  Mat vecs;
  if (es.info() == Eigen::Success) {
    vals = es.eigenvalues();
    vecs = es.eigenvectors();
  } else {
    // QR stalls on some large Jordan structures; a random unitary similarity unsticks it
    std::mt19937_64 rng(0x5eed);
    const Mat Q = random_unitary(n, rng);
    es.setMaxIterations(30 * n);
    es.compute(Q.adjoint() * m * Q, true);
    if (es.info() != Eigen::Success) throw Error(Errc::NotConverged, "eig_general: iteration failure");
    vals = es.eigenvalues();
    vecs = Q * es.eigenvectors();
  }
  const Mat vinv = Eigen::PartialPivLU<Mat>(vecs).inverse();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double tie = 1e-12 * scale;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double ma = std::abs(vals[a]), mb = std::abs(vals[b]);
    if (std::abs(ma - mb) > tie) return ma > mb;
    if (std::abs(vals[a].real() - vals[b].real()) > tie) return vals[a].real() > vals[b].real();
    return vals[a].imag() > vals[b].imag();
  });

  // Cluster (near-)equal eigenvalues, then rebuild eigenvector bases per cluster.
  const double cluster_tol = 1e-7 * scale;
  std::vector<bool> used(n, false);
  std::vector<std::vector<int>> clusters;
  for (int a = 0; a < n; ++a) {
    if (used[order[a]]) continue;
    std::vector<int> c{order[a]};
    used[order[a]] = true;
    for (int b = a + 1; b < n; ++b)
      if (!used[order[b]] && std::abs(vals[order[b]] - vals[order[a]]) <= cluster_tol) {
        c.push_back(order[b]);
        used[order[b]] = true;
      }
    clusters.push_back(c);
  }

  for (const auto& c : clusters) {
    const int mult = static_cast<int>(c.size());
    if (mult == 1) {
      const int k = c[0];
      EigenPair p;
      p.value = vals[k];
      p.right = vecs.col(k).normalized();
      // left vector from the inverse eigenvector matrix, inverse iteration if that is inaccurate
      Vec w = vinv.row(k).adjoint();
      const double wn = w.norm();
      if (!std::isfinite(wn) || wn == 0 ||
          (m.adjoint() * w - std::conj(vals[k]) * w).norm() > 1e-9 * scale * wn) {
        Mat shifted = (m - (vals[k] + 1e-13 * scale) * Mat::Identity(n, n)).adjoint();
        Eigen::PartialPivLU<Mat> lu(shifted);
        for (int i = 0; i < n; ++i) w[i] = cplx(1.0, 0.37 * i / n);
        for (int it = 0; it < 3; ++it) {
          w = lu.solve(w);
          const double nn = w.norm();
          if (!std::isfinite(nn) || nn == 0) {
            Eigen::JacobiSVD<Mat> sv(shifted, Eigen::ComputeFullV);
            w = sv.matrixV().col(n - 1);
            break;
          }
          w /= nn;
        }
      }
      cplx ov = w.dot(p.right);
      if (std::abs(ov) < 1e-300) {
        res.defective = true;
        p.left = w;
      } else {
        p.left = w / std::conj(ov);
      }
      res.pairs.push_back(p);
      continue;
    }
    cplx lam = 0;
    for (int k : c) lam += vals[k];
    lam /= double(mult);
    Mat shifted = m - lam * Mat::Identity(n, n);
    const FullV sr = full_v_svd(shifted);
    const FullV sl = full_v_svd(shifted.adjoint());
    const double null_tol = 1e-6 * scale;
    int geo = 0;
    for (int k = n - 1; k >= 0 && sr.s[k] <= null_tol; --k) ++geo;
    geo = std::min(geo, mult);
    if (geo < mult) {
      res.defective = true;
      for (int q = 0; q < mult; ++q) {
        EigenPair p;
        p.value = vals[c[q]];
        if (q < geo) {
          p.right = sr.V.col(n - 1 - q);
          p.left = sl.V.col(n - 1 - q);
        }
        res.pairs.push_back(p);
      }
      continue;
    }
    Mat R = sr.V.rightCols(mult);
    Mat L = sl.V.rightCols(mult);
    Mat G = L.adjoint() * R;  // biorthogonalise: W = L (G^H)^{-1}
    Mat W = L * G.adjoint().inverse();
    for (int q = 0; q < mult; ++q) {
      EigenPair p;
      p.value = vals[c[q]];
      p.right = R.col(q);
      p.left = W.col(q);
      res.pairs.push_back(p);
    }
  }
  return res;
}

// ---------------------------------------------------------------- svd / polar

SvdResult svd(const Mat& m) {
  SvdResult r;
  if (m.size() == 0) {
    r.U = Mat(m.rows(), 0);
    r.V = Mat(m.cols(), 0);
    r.s = RVec(0);
    return r;
  }
  if (std::min(m.rows(), m.cols()) <= 64) {
    Eigen::JacobiSVD<Mat> s(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r.U = s.matrixU();
    r.s = s.singularValues();
    r.V = s.matrixV();
  } else {
    Eigen::BDCSVD<Mat> s(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (s.info() == Eigen::Success && factors_ok(m, s.singularValues(), s.matrixV())) {
      r.U = s.matrixU();
      r.s = s.singularValues();
      r.V = s.matrixV();
      if ((r.U.adjoint() * r.U - Mat::Identity(r.U.cols(), r.U.cols())).norm() <= 1e-9 * std::sqrt(double(r.U.cols()) + 1))
        return r;
    }
    Eigen::JacobiSVD<Mat> j(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r.U = j.matrixU();
    r.s = j.singularValues();
    r.V = j.matrixV();
  }
  return r;
}

PolarResult polar_decompose(const Mat& m) {
  if (m.rows() < m.cols()) throw Error(Errc::InvalidInput, "polar_decompose: rows < cols");
  SvdResult s = svd(m);
  PolarResult p;
  p.W = s.U * s.V.adjoint();
  p.P = s.V * s.s.cast<cplx>().asDiagonal() * s.V.adjoint();
  p.P = hermitize(p.P);
  return p;
}

HermEig herm_eig(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h));
  if (es.info() != Eigen::Success) throw Error(Errc::NotConverged, "herm_eig: iteration failure");
  return {es.eigenvalues(), es.eigenvectors()};
}

// ---------------------------------------------------------------- integers

IntegerMatrix IntegerMatrix::identity(int n) {
  IntegerMatrix I(n, n);
  for (int k = 0; k < n; ++k) I(k, k) = 1;
  return I;
}

IntegerMatrix IntegerMatrix::operator*(const IntegerMatrix& o) const {
  if (cols_ != o.rows_) throw Error(Errc::DimensionMismatch, "integer product: shape mismatch");
  IntegerMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (a == 0) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

bool IntegerMatrix::operator==(const IntegerMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
}

BigInt IntegerMatrix::det() const {
  if (rows_ != cols_) throw Error(Errc::InvalidInput, "det: non-square");
  const int n = rows_;
  if (n == 0) return 1;
  // Bareiss fraction-free elimination
  std::vector<BigInt> a(e_);
  auto A = [&](int i, int j) -> BigInt& { return a[std::size_t(i) * n + j]; };
  BigInt prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (A(k, k) == 0) {
      int sw = -1;
      for (int i = k + 1; i < n; ++i)
        if (A(i, k) != 0) {
          sw = i;
          break;
        }
      if (sw < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(sw, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) A(i, j) = (A(i, j) * A(k, k) - A(i, k) * A(k, j)) / prev;
    prev = A(k, k);
  }
  return sign * A(n - 1, n - 1);
}

SmithResult smith_normal_form(const IntegerMatrix& m, bool track_u) {
  const int R = m.rows(), C = m.cols();
  // Row-major working copy as vector of rows for cheap swaps.
  std::vector<std::vector<BigInt>> A(R, std::vector<BigInt>(C));
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) A[i][j] = m(i, j);
  std::vector<std::vector<BigInt>> U;
  if (track_u) {
    U.assign(R, std::vector<BigInt>(R));
    for (int i = 0; i < R; ++i) U[i][i] = 1;
  }
  // V stored column-wise (V[j] is column j) so column ops are row ops on V.
  std::vector<std::vector<BigInt>> V(C, std::vector<BigInt>(C)), Vi(C, std::vector<BigInt>(C));
  for (int j = 0; j < C; ++j) V[j][j] = Vi[j][j] = 1;

  auto row_axpy = [&](int dst, int src, const BigInt& q, int from) {  // row dst -= q*row src
    for (int j = from; j < C; ++j)
      if (A[src][j] != 0) A[dst][j] -= q * A[src][j];
    if (track_u)
      for (int j = 0; j < R; ++j)
        if (U[src][j] != 0) U[dst][j] -= q * U[src][j];
  };
  auto col_axpy = [&](int dst, int src, const BigInt& q, int from) {  // col dst -= q*col src
    for (int i = from; i < R; ++i)
      if (A[i][src] != 0) A[i][dst] -= q * A[i][src];
    for (int i = 0; i < C; ++i)
      if (V[src][i] != 0) V[dst][i] -= q * V[src][i];
    // inverse: row src of Vi += q * row dst of Vi
    for (int i = 0; i < C; ++i)
      if (Vi[dst][i] != 0) Vi[src][i] += q * Vi[dst][i];
  };
  auto swap_cols = [&](int a, int b) {
    if (a == b) return;
    for (int i = 0; i < R; ++i) std::swap(A[i][a], A[i][b]);
    std::swap(V[a], V[b]);
    std::swap(Vi[a], Vi[b]);
  };
  auto swap_rows = [&](int a, int b) {
    if (a == b) return;
    std::swap(A[a], A[b]);
    if (track_u) std::swap(U[a], U[b]);
  };

  const int T = std::min(R, C);
  std::vector<BigInt> diag;
  for (int t = 0; t < T; ++t) {
    bool any = false;
    for (;;) {
      // smallest nonzero pivot in the trailing block
      int pi = -1, pj = -1;
      BigInt best;
      for (int i = t; i < R; ++i)
        for (int j = t; j < C; ++j) {
          if (A[i][j] == 0) continue;
          BigInt v = abs(A[i][j]);
          if (pi < 0 || v < best) {
            best = v;
            pi = i;
            pj = j;
          }
        }
      if (pi < 0) break;
      any = true;
      swap_rows(t, pi);
      swap_cols(t, pj);
      bool clean = true;
      for (int i = t + 1; i < R; ++i) {
        if (A[i][t] == 0) continue;
        BigInt q = A[i][t] / A[t][t];
        row_axpy(i, t, q, t);
        if (A[i][t] != 0) clean = false;
      }
      for (int j = t + 1; j < C; ++j) {
        if (A[t][j] == 0) continue;
        BigInt q = A[t][j] / A[t][t];
        col_axpy(j, t, q, t);
        if (A[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility of the trailing block
      int bad = -1;
      for (int i = t + 1; i < R && bad < 0; ++i)
        for (int j = t + 1; j < C; ++j)
          if (A[i][j] != 0 && A[i][j] % A[t][t] != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      row_axpy(t, bad, BigInt(-1), t);  // row t += row bad
    }
    if (!any) break;
    if (A[t][t] < 0) {
      for (int j = t; j < C; ++j) A[t][j] = -A[t][j];
      if (track_u)
        for (int j = 0; j < R; ++j) U[t][j] = -U[t][j];
    }
    diag.push_back(A[t][t]);
  }

  SmithResult res;
  res.S = IntegerMatrix(R, C);
  for (std::size_t k = 0; k < diag.size(); ++k) res.S(int(k), int(k)) = diag[k];
  res.diagonal = diag;
  res.V = IntegerMatrix(C, C);
  res.Vinv = IntegerMatrix(C, C);
  for (int j = 0; j < C; ++j)
    for (int i = 0; i < C; ++i) {
      res.V(i, j) = V[j][i];
      res.Vinv(j, i) = Vi[j][i];
    }
  if (track_u) {
    res.U = IntegerMatrix(R, R);
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < R; ++j) res.U(i, j) = U[i][j];
  }
  return res;
}

// ---------------------------------------------------------------- helpers

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

int numerical_rank(const RVec& s, double rel) {
  if (s.size() == 0) return 0;
  const double top = s.maxCoeff();
  if (top <= 0) return 0;
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s[k] > rel * top) ++r;
  return r;
}

Mat range_basis(const Mat& m, double rel) {
  SvdResult s = svd(m);
  int r = numerical_rank(s.s, rel);
  return s.U.leftCols(r);
}

Mat null_space(const Mat& m, double rel) {
  const int n = static_cast<int>(m.cols());
  if (m.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> s(m, Eigen::ComputeFullV);
  int r = numerical_rank(s.singularValues(), rel);
  return s.matrixV().rightCols(n - r);
}

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

Mat psd_sqrt(const Mat& h) {
  HermEig e = herm_eig(h);
  RVec v = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * v.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 64) {
    Eigen::JacobiSVD<Mat> s(m);
    return s.singularValues()[0];
  }
  Eigen::BDCSVD<Mat> s(m);
  return s.singularValues()[0];
}

Mat random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat r(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) r(i, j) = cplx(n(rng), n(rng));
  return r;
}

Mat random_unitary(int n, std::mt19937_64& rng) {
  Mat g = random_matrix(n, n, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    cplx d = r(k, k);
    q.col(k) *= d / std::abs(d);
  }
  return q;
}

}  // namespace tnkit
