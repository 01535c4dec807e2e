#include "tnkit/mps.hpp"

#include <cmath>
#include <numeric>

namespace tnkit {

MpsTensor MpsTensor::from_matrices(const std::vector<Mat>& mats) {
  if (mats.empty()) throw Error(Errc::InvalidInput, "mps: no physical components");
  MpsTensor t;
  t.d = static_cast<int>(mats.size());
  t.Dl = static_cast<int>(mats[0].rows());
  t.Dr = static_cast<int>(mats[0].cols());
  if (t.Dl == 0 || t.Dr == 0) throw Error(Errc::InvalidInput, "mps: empty bond");
  std::vector<cplx> data(std::size_t(t.d) * t.Dl * t.Dr);
  for (int i = 0; i < t.d; ++i) {
    if (mats[i].rows() != t.Dl || mats[i].cols() != t.Dr)
      throw Error(Errc::DimensionMismatch, "mps: inconsistent matrix shapes");
    for (int a = 0; a < t.Dl; ++a)
      for (int b = 0; b < t.Dr; ++b) data[(std::size_t(i) * t.Dl + a) * t.Dr + b] = mats[i](a, b);
  }
  t.data = DenseTensor({"p", "l", "r"}, {t.d, t.Dl, t.Dr}, std::move(data));
  return t;
}

Mat MpsTensor::matrix(int i) const {
  Mat m(Dl, Dr);
  const auto& x = data.data();
  for (int a = 0; a < Dl; ++a)
    for (int b = 0; b < Dr; ++b) m(a, b) = x[(std::size_t(i) * Dl + a) * Dr + b];
  return m;
}

std::vector<Mat> MpsTensor::matrices() const {
  std::vector<Mat> out;
  out.reserve(d);
  for (int i = 0; i < d; ++i) out.push_back(matrix(i));
  return out;
}

UniformMps UniformMps::periodic(const std::vector<Mat>& mats) {
  UniformMps m;
  m.tensor = MpsTensor::from_matrices(mats);
  if (m.tensor.Dl != m.tensor.Dr) throw Error(Errc::DimensionMismatch, "uniform mps needs square matrices");
  return m;
}

UniformMps UniformMps::open(const std::vector<Mat>& mats, const Vec& l, const Vec& r) {
  UniformMps m = periodic(mats);
  if (l.size() != m.D() || r.size() != m.D())
    throw Error(Errc::DimensionMismatch, "open mps: boundary vector length differs from D");
  m.boundary = Boundary::Open;
  m.l = l;
  m.r = r;
  return m;
}

Vec vec_rm(const Mat& x) {
  Vec v(x.size());
  for (int a = 0; a < x.rows(); ++a)
    for (int b = 0; b < x.cols(); ++b) v[a * x.cols() + b] = x(a, b);
  return v;
}

Mat unvec_rm(const Vec& v, int rows, int cols) {
  Mat x(rows, cols);
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b) x(a, b) = v[a * cols + b];
  return x;
}

static cplx close_chain(const UniformMps& mps, const Mat& prod) {
  if (mps.boundary == Boundary::Periodic) return prod.trace();
  return mps.l.transpose() * prod * mps.r;
}

cplx amplitude(const UniformMps& mps, const std::vector<int>& config) {
  if (config.empty()) throw Error(Errc::InvalidInput, "amplitude: empty configuration");
  const auto A = mps.mats();
  Mat p = Mat::Identity(mps.D(), mps.D());
  for (int i : config) {
    if (i < 0 || i >= mps.d()) throw Error(Errc::InvalidInput, "amplitude: physical index out of range");
    p = p * A[i];
  }
  return close_chain(mps, p);
}

Vec dense_state(const UniformMps& mps, int N) {
  if (N <= 0) throw Error(Errc::InvalidInput, "dense_state: length must be positive");
  const int d = mps.d(), D = mps.D();
  const double log2dim = N * std::log2(double(d));
  if (log2dim > caps().ed_max_log2 + 1e-9) throw Error(Errc::CapExceeded, "dense_state: d^N exceeds cap");
  const auto A = mps.mats();
  // prefix products, breadth first
  std::vector<Mat> cur{Mat::Identity(D, D)};
  if (mps.boundary == Boundary::Open) cur[0] = mps.l.transpose();
  for (int s = 0; s < N; ++s) {
    std::vector<Mat> next;
    next.reserve(cur.size() * d);
    for (const auto& p : cur)
      for (int i = 0; i < d; ++i) next.push_back(p * A[i]);
    cur.swap(next);
  }
  Vec psi(cur.size());
  for (std::size_t k = 0; k < cur.size(); ++k)
    psi[k] = mps.boundary == Boundary::Periodic ? cur[k].trace() : cplx((cur[k] * mps.r)(0, 0));
  return psi;
}

UniformMps block_sites(const UniformMps& mps, int k) {
  if (k < 1) throw Error(Errc::InvalidInput, "block_sites: k must be positive");
  const double log2dim = k * std::log2(double(mps.d()));
  if (log2dim > caps().block_phys_log2 + 1e-9) throw Error(Errc::CapExceeded, "block_sites: d^k exceeds cap");
  const auto A = mps.mats();
  std::vector<Mat> cur = A;
  for (int s = 1; s < k; ++s) {
    std::vector<Mat> next;
    next.reserve(cur.size() * A.size());
    for (const auto& p : cur)
      for (const auto& a : A) next.push_back(p * a);
    cur.swap(next);
  }
  UniformMps out = mps;
  out.tensor = MpsTensor::from_matrices(cur);
  return out;
}

namespace {

void check_transfer_cap(Eigen::Index n, const char* who) {
  if (double(n) * double(n) > double(caps().max_tensor_entries))
    throw Error(Errc::CapExceeded, std::string(who) + ": transfer matrix exceeds the entry cap");
}

}  // namespace

Mat mixed_transfer(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "mixed_transfer: physical dims differ");
  check_transfer_cap(a[0].rows() * b[0].rows(), "mixed_transfer");
  Mat E = Mat::Zero(a[0].rows() * b[0].rows(), a[0].cols() * b[0].cols());
  for (std::size_t i = 0; i < a.size(); ++i) E += kron(a[i], b[i].conjugate());
  return E;
}

Mat dressed_transfer(const std::vector<Mat>& a, const Mat& op) {
  const int d = static_cast<int>(a.size());
  if (op.rows() != d || op.cols() != d) throw Error(Errc::DimensionMismatch, "dressed_transfer: operator size");
  Mat E = Mat::Zero(a[0].rows() * a[0].rows(), a[0].cols() * a[0].cols());
  for (int i = 0; i < d; ++i) {
    Mat ci = a[i].conjugate();
    for (int j = 0; j < d; ++j)
      if (op(i, j) != cplx(0)) E += op(i, j) * kron(a[j], ci);
  }
  return E;
}

static Mat phase_fix_hermitian(Mat x) {
  cplx t = x.trace();
  if (std::abs(t) > 1e-14 * std::max(1.0, x.norm())) {
    x *= std::conj(t) / std::abs(t);
  } else {
    Eigen::Index r, c;
    x.cwiseAbs().maxCoeff(&r, &c);
    cplx v = x(r, c);
    if (r == c && std::abs(v) > 0) x *= std::conj(v) / std::abs(v);
  }
  return hermitize(x);
}

TransferOperator transfer_operator(const UniformMps& mps, bool normalize) {
  const auto A = mps.mats();
  const int D = mps.D();
  TransferOperator t;
  t.matrix = mixed_transfer(A, A);
  EigResult er = eig_general(t.matrix);
  t.lambda1 = er.pairs[0].value;
  const double r = std::abs(t.lambda1);
  const double scale = std::max(1.0, t.matrix.cwiseAbs().maxCoeff());
  if (r <= 1e-14 * scale) {
    if (normalize) throw Error(Errc::InvalidInput, "transfer_operator: nilpotent tensor cannot be normalised");
    t.lambda1 = 0;
    t.rhoL = t.rhoR = Mat::Zero(D, D);
    t.spectrum = er.values();
    return t;
  }
  // lambda1 of a positive map is real positive; snap tiny imaginary noise
  if (std::abs(t.lambda1.imag()) <= 1e-12 * r) t.lambda1 = t.lambda1.real();

  std::vector<const EigenPair*> top;
  for (const auto& p : er.pairs) {
    if (std::abs(p.value) >= r * (1 - tol::rank())) {
      t.peripheral.push_back(p.value / t.lambda1);
      if (p.right.size() == 0) t.peripheral_defective = true;
    }
    if (std::abs(p.value - t.lambda1) <= 1e-7 * r) top.push_back(&p);
  }
  for (const auto* p : top)
    if (p->right.size() == 0) throw Error(Errc::Defective, "transfer_operator: Jordan structure at lambda1");

  Vec vr, vl;
  if (top.size() == 1) {
    vr = top[0]->right;
    vl = top[0]->left;
  } else {
    Vec vi = vec_rm(Mat::Identity(D, D));
    vr = Vec::Zero(D * D);
    vl = Vec::Zero(D * D);
    for (const auto* p : top) {
      vr += p->right * p->left.dot(vi);
      vl += p->left * p->right.dot(vi);
    }
  }
  t.rhoR = phase_fix_hermitian(unvec_rm(vr, D, D));
  t.rhoL = phase_fix_hermitian(unvec_rm(vl, D, D));
  cplx ov = (t.rhoL * t.rhoR).trace();
  if (std::abs(ov) > 0) {
    t.rhoR /= t.rhoR.trace().real();
    ov = (t.rhoL * t.rhoR).trace();
    t.rhoL /= ov.real();
  }

  t.spectrum = er.values();
  if (normalize) {
    t.matrix /= t.lambda1;
    for (auto& s : t.spectrum) s /= t.lambda1;
    t.normalized = true;
  }
  return t;
}

bool transfer_is_normal(const TransferOperator& t, int D) {
  if (t.peripheral.size() != 1 || t.peripheral_defective) return false;
  if (std::abs(t.lambda1) == 0) return false;
  auto full_rank = [&](const Mat& rho) {
    RVec ev = herm_eig(rho).values;
    double top = ev.cwiseAbs().maxCoeff();
    return top > 0 && ev.minCoeff() > tol::rank() * top && ev.size() == D;
  };
  return full_rank(t.rhoL) && full_rank(t.rhoR);
}

static TransferOperator require_normal(const UniformMps& mps) {
  TransferOperator t = transfer_operator(mps, true);
  if (!transfer_is_normal(t, mps.D()))
    throw Error(Errc::NonNormal, "input is not normal (peripheral count " +
                                     std::to_string(t.peripheral.size()) + ")");
  return t;
}

EntanglementData correlation_length(const UniformMps& mps) {
  TransferOperator t = require_normal(mps);
  EntanglementData e;
  if (t.spectrum.size() < 2 || std::abs(t.spectrum[1]) <= 1e-15) {
    e.correlation_length = 0.0;
    return e;
  }
  double l2 = std::abs(t.spectrum[1]);
  e.correlation_length = -1.0 / std::log(l2);
  return e;
}

std::vector<std::pair<double, double>> renyi_table(const std::vector<double>& p,
                                                   const std::vector<double>& alphas) {
  std::vector<std::pair<double, double>> out;
  for (double a : alphas) {
    double s = 0;
    if (std::abs(a - 1.0) < 1e-12) {
      for (double x : p)
        if (x > 0) s -= x * std::log(x);
    } else if (std::isinf(a)) {
      double m = 0;
      for (double x : p) m = std::max(m, x);
      s = -std::log(m);
    } else {
      double z = 0;
      for (double x : p)
        if (x > 0) z += std::pow(x, a);
      s = std::log(z) / (1.0 - a);
    }
    out.emplace_back(a, s);
  }
  return out;
}

EntanglementData entanglement_spectrum(const UniformMps& mps, const std::vector<double>& alphas) {
  TransferOperator t = require_normal(mps);
  Mat sq = psd_sqrt(t.rhoR);
  RVec ev = herm_eig(sq * t.rhoL * sq).values;
  std::vector<double> p;
  double total = 0;
  for (int k = 0; k < ev.size(); ++k) {
    double x = std::max(0.0, ev[k]);
    p.push_back(x);
    total += x;
  }
  for (auto& x : p) x /= total;
  std::sort(p.begin(), p.end(), std::greater<double>());
  EntanglementData e;
  e.schmidt_squares = p;
  e.renyi = renyi_table(p, alphas);
  if (t.spectrum.size() >= 2 && std::abs(t.spectrum[1]) > 1e-15)
    e.correlation_length = -1.0 / std::log(std::abs(t.spectrum[1]));
  return e;
}

// Products A^{i1}...A^{in} for all configurations, site 0 most significant.
static std::vector<Mat> all_products(const std::vector<Mat>& A, int n) {
  std::vector<Mat> cur{Mat::Identity(A[0].rows(), A[0].rows())};
  for (int s = 0; s < n; ++s) {
    std::vector<Mat> next;
    next.reserve(cur.size() * A.size());
    for (const auto& p : cur)
      for (const auto& a : A) next.push_back(p * a);
    cur.swap(next);
  }
  return cur;
}

static Mat mat_pow(const Mat& m, int k) {
  Mat r = Mat::Identity(m.rows(), m.cols());
  Mat b = m;
  while (k > 0) {
    if (k & 1) r = r * b;
    b = b * b;
    k >>= 1;
  }
  return r;
}

// Environment T with rho_ij = sum P_i[a,b] T[(b,b'),(a,a')] conj(P_j[a',b']).
static Mat environment(const UniformMps& mps, const Mat& E, int n, std::optional<int> N,
                       const TransferOperator* t) {
  const int D = mps.D();
  if (!N) {
    // |rhoR)(rhoL| with E normalised, so the rest of the chain is a projector
    return vec_rm(t->rhoR) * vec_rm(t->rhoL).adjoint();
  }
  Mat rest = mat_pow(E, *N - n);
  if (mps.boundary == Boundary::Periodic) return rest;
  // open: left boundary on the far left, so T = E^{m} |r r*)(l l*| E^{N-n-m}; place block first
  Vec lr = kron(mps.l, mps.l.conjugate());
  Vec rr = kron(mps.r, mps.r.conjugate());
  (void)D;
  return rest * rr * lr.transpose();
}

Mat reduced_density_matrix(const UniformMps& mps, int n, std::optional<int> N) {
  if (n < 1) throw Error(Errc::InvalidInput, "reduced_density_matrix: n must be positive");
  const int d = mps.d(), D = mps.D();
  if (n * std::log2(double(d)) > caps().ed_dense_log2 + 1e-9)
    throw Error(Errc::CapExceeded, "reduced_density_matrix: d^n exceeds cap");
  if (N && *N < n) throw Error(Errc::InvalidInput, "reduced_density_matrix: n > N");
  if (!N && mps.boundary == Boundary::Open)
    throw Error(Errc::InvalidInput, "reduced_density_matrix: infinite chain needs periodic tensor");
  const auto A = mps.mats();
  Mat E;
  TransferOperator t;
  std::vector<Mat> P;
  if (!N) {
    t = transfer_operator(mps, true);
    double s = std::sqrt(std::abs(t.lambda1));
    std::vector<Mat> As = A;
    for (auto& a : As) a /= s;
    P = all_products(As, n);
  } else {
    E = mixed_transfer(A, A);
    P = all_products(A, n);
  }
  Mat T = environment(mps, E, n, N, &t);
  // K[(a,b),(a',b')] = T[(b,b'),(a,a')]
  Mat K(D * D, D * D);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (int a2 = 0; a2 < D; ++a2)
        for (int b2 = 0; b2 < D; ++b2) K(a * D + b, a2 * D + b2) = T(b * D + b2, a * D + a2);
  Mat Pm(P.size(), D * D);
  for (std::size_t k = 0; k < P.size(); ++k) Pm.row(k) = vec_rm(P[k]).transpose();
  Mat rho = Pm * K * Pm.adjoint();
  rho = hermitize(rho);
  cplx tr = rho.trace();
  if (std::abs(tr) == 0) throw Error(Errc::InvalidInput, "reduced_density_matrix: state has zero norm");
  return rho / tr.real();
}

cplx correlation_function(const UniformMps& mps, const Mat& X, const Mat& Y, int separation,
                          std::optional<int> N) {
  if (separation < 1) throw Error(Errc::InvalidInput, "correlation_function: separation must be >= 1");
  TransferOperator t = require_normal(mps);
  const auto A = mps.mats();
  std::vector<Mat> As = A;
  const double s = std::sqrt(std::abs(t.lambda1));
  for (auto& a : As) a /= s;
  Mat E = t.matrix;
  Mat EX = dressed_transfer(As, X), EY = dressed_transfer(As, Y);
  Mat mid = mat_pow(E, separation - 1);
  if (!N) {
    Vec r = vec_rm(t.rhoR);
    Vec l = vec_rm(t.rhoL);
    cplx norm = l.dot(r);
    cplx xy = l.dot(EX * mid * EY * r) / norm;
    cplx x = l.dot(EX * r) / norm, y = l.dot(EY * r) / norm;
    return xy - x * y;
  }
  if (*N < separation + 1) throw Error(Errc::InvalidInput, "correlation_function: chain too short");
  if (mps.boundary != Boundary::Periodic)
    throw Error(Errc::Unsupported, "correlation_function: finite chains need periodic boundary");
  cplx z = mat_pow(E, *N).trace();
  cplx xy = (EX * mid * EY * mat_pow(E, *N - separation - 1)).trace() / z;
  cplx x = (EX * mat_pow(E, *N - 1)).trace() / z;
  cplx y = (EY * mat_pow(E, *N - 1)).trace() / z;
  return xy - x * y;
}

}  // namespace tnkit
