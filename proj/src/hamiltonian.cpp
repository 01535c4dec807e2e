#include "tnkit/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tnkit {

namespace {

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

void check_dim(int d, int N, int cap_log2, const char* who) {
  if (N * std::log2(double(d)) > cap_log2 + 1e-9)
    throw Error(Errc::CapExceeded, std::string(who) + ": d^N exceeds cap 2^" + std::to_string(cap_log2));
}

// Gather offsets for the sites touched by one placement, and the base indices of the rest.
struct Placement {
  std::vector<long> off;   // d^L
  std::vector<long> base;  // d^(N-L)
};

Placement make_placement(int d, int N, int L, int start) {
  Placement p;
  std::vector<int> sites(L);
  std::vector<bool> used(N, false);
  for (int k = 0; k < L; ++k) {
    sites[k] = (start + k) % N;
    used[sites[k]] = true;
  }
  auto weight = [&](int site) { return ipow(d, N - 1 - site); };
  const long dl = ipow(d, L);
  p.off.resize(dl);
  for (long a = 0; a < dl; ++a) {
    long t = a, o = 0;
    for (int k = L - 1; k >= 0; --k, t /= d) o += (t % d) * weight(sites[k]);
    p.off[a] = o;
  }
  std::vector<int> rest;
  for (int s = 0; s < N; ++s)
    if (!used[s]) rest.push_back(s);
  const long nb = ipow(d, int(rest.size()));
  p.base.resize(nb);
  for (long j = 0; j < nb; ++j) {
    long t = j, o = 0;
    for (int k = int(rest.size()) - 1; k >= 0; --k, t /= d) o += (t % d) * weight(rest[k]);
    p.base[j] = o;
  }
  return p;
}

std::vector<int> placements(int N, int L, Boundary b) {
  if (N < L) throw Error(Errc::InvalidInput, "chain shorter than the interaction range");
  std::vector<int> out;
  const int count = b == Boundary::Periodic ? (N == L ? 1 : N) : N - L + 1;
  for (int s = 0; s < count; ++s) out.push_back(s);
  return out;
}

void apply_placement(const Mat& h, const Placement& p, const Mat& x, Mat& y) {
  const long dl = long(p.off.size()), nb = long(p.base.size());
  Mat xl(dl, nb);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (long j = 0; j < nb; ++j)
      for (long a = 0; a < dl; ++a) xl(a, j) = x(p.base[j] + p.off[a], c);
    Mat yl = h * xl;
    for (long j = 0; j < nb; ++j)
      for (long a = 0; a < dl; ++a) y(p.base[j] + p.off[a], c) += yl(a, j);
  }
}

Mat kernel_projector(const Mat& H, double thr, int* dim = nullptr) {
  HermEig e = herm_eig(hermitize(H));
  int k = 0;
  while (k < e.values.size() && e.values[k] < thr) ++k;
  if (dim) *dim = k;
  Mat Q = e.vectors.leftCols(k);
  return Q * Q.adjoint();
}

// tr(A^{i1} ... A^{iN} X) for every configuration
Vec state_with_boundary(const std::vector<Mat>& A, int N, const Mat& X) {
  std::vector<Mat> cur{Mat::Identity(A[0].rows(), A[0].cols())};
  for (int s = 0; s < N; ++s) {
    std::vector<Mat> next;
    next.reserve(cur.size() * A.size());
    for (const auto& p : cur)
      for (const auto& a : A) next.push_back(p * a);
    cur.swap(next);
  }
  Vec v(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) v[i] = (cur[i] * X).trace();
  return v;
}

double zero_threshold(int terms) { return tol::eq() * std::max(1, terms) * 10; }

}  // namespace

ParentHamiltonian projector_term(const Mat& h, int d, int L, std::string source) {
  const long dl = ipow(d, L);
  if (h.rows() != dl || h.cols() != dl) throw Error(Errc::DimensionMismatch, "projector_term: h must be d^L x d^L");
  if ((h - h.adjoint()).norm() > tol::rank() * dl || (h * h - h).norm() > tol::rank() * dl)
    throw Error(Errc::InvalidInput, "projector_term: h is not a hermitian projector");
  ParentHamiltonian p;
  p.L = L;
  p.d = d;
  p.h = hermitize(h);
  p.kernel_dim = int(std::lround(double(dl) - p.h.trace().real()));
  p.source = std::move(source);
  return p;
}

ParentHamiltonian parent_hamiltonian(const UniformMps& mps, int L) {
  if (L < 1) throw Error(Errc::InvalidInput, "parent_hamiltonian: L must be positive");
  const int d = mps.d(), D = mps.D();
  check_dim(d, L, caps().ed_dense_log2, "parent_hamiltonian");
  const auto A = mps.mats();
  const long dl = ipow(d, L);
  // row: configuration, column: X = e_ab, entry tr(P e_ab) = P_ba
  Mat M(dl, D * D);
  std::vector<Mat> cur{Mat::Identity(D, D)};
  for (int s = 0; s < L; ++s) {
    std::vector<Mat> next;
    for (const auto& p : cur)
      for (const auto& a : A) next.push_back(p * a);
    cur.swap(next);
  }
  for (long i = 0; i < dl; ++i) M.row(i) = vec_rm(cur[i].transpose()).transpose();
  Mat Q = range_basis(M, tol::rank());
  ParentHamiltonian p;
  p.L = L;
  p.d = d;
  p.h = Mat::Identity(dl, dl) - Q * Q.adjoint();
  p.h = hermitize(p.h);
  p.kernel_dim = int(Q.cols());
  p.source = "mps d=" + std::to_string(d) + " D=" + std::to_string(D);
  p.tensor = A;
  if (p.kernel_dim == dl) p.warnings.push_back("d^L does not exceed dim G_L; h = 0");
  return p;
}

void apply_chain(const ParentHamiltonian& h, int N, Boundary b, const Mat& x, Mat& y) {
  y = Mat::Zero(x.rows(), x.cols());
  for (int s : placements(N, h.L, b)) apply_placement(h.h, make_placement(h.d, N, h.L, s), x, y);
}

Mat dense_chain(const ParentHamiltonian& h, int N, Boundary b) {
  check_dim(h.d, N, caps().ed_dense_log2, "dense_chain");
  const long dim = ipow(h.d, N);
  Mat H = Mat::Zero(dim, dim);
  const long dl = h.h.rows();
  for (int s : placements(N, h.L, b)) {
    Placement p = make_placement(h.d, N, h.L, s);
    for (long base : p.base)
      for (long bb = 0; bb < dl; ++bb)
        for (long a = 0; a < dl; ++a) H(base + p.off[a], base + p.off[bb]) += h.h(a, bb);
  }
  return hermitize(H);
}

LowSpectrum lowest_eigenpairs(const std::function<void(const Mat&, Mat&)>& apply, long dim, int nev, double tol,
                              unsigned seed) {
  LowSpectrum out;
  nev = int(std::min<long>(nev, dim));
  const int b = int(std::min<long>(dim, nev + 2));
  const long budget = std::max<long>(4L * b, std::min<long>(240, long(6e8 / (32.0 * double(dim)))));
  const long m = std::min<long>(dim, budget);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Mat Q(dim, b);
  for (long i = 0; i < dim; ++i)
    for (int j = 0; j < b; ++j) Q(i, j) = cplx(nd(rng), nd(rng));
  Q = Eigen::HouseholderQR<Mat>(Q).householderQ() * Mat::Identity(dim, b);
  Mat HQ;
  apply(Q, HQ);
  long last_start = 0, last_cols = b;
  double scale = std::max(1.0, HQ.norm() / std::sqrt(double(b)));

  for (int restart = 0; restart < 400; ++restart) {
    while (Q.cols() < m) {
      Mat R = HQ.middleCols(last_start, last_cols);
      for (int pass = 0; pass < 2; ++pass) R -= Q * (Q.adjoint() * R);
      SvdResult s = svd(R);
      int keep = 0;
      while (keep < s.s.size() && s.s[keep] > 1e-10 * scale) ++keep;
      keep = int(std::min<long>(keep, m - Q.cols()));
      if (keep == 0) break;
      Mat Rn = s.U.leftCols(keep);
      Rn -= Q * (Q.adjoint() * Rn);
      Rn = Eigen::HouseholderQR<Mat>(Rn).householderQ() * Mat::Identity(dim, keep);
      Mat HR;
      apply(Rn, HR);
      last_start = Q.cols();
      last_cols = keep;
      Mat Qn(dim, Q.cols() + keep), HQn(dim, Q.cols() + keep);
      Qn << Q, Rn;
      HQn << HQ, HR;
      Q.swap(Qn);
      HQ.swap(HQn);
    }
    HermEig e = herm_eig(hermitize(Q.adjoint() * HQ));
    scale = std::max(scale, e.values.cwiseAbs().maxCoeff());
    const int k = int(std::min<long>(nev, Q.cols()));
    Mat Y = e.vectors.leftCols(k);
    Mat X = Q * Y, HX = HQ * Y;
    double worst = 0;
    for (int j = 0; j < k; ++j) worst = std::max(worst, (HX.col(j) - e.values[j] * X.col(j)).norm());
    out.restarts = restart;
    if (worst <= tol * std::max(1.0, std::abs(e.values[k - 1])) || Q.cols() == dim) {
      out.max_residual = worst;
      for (int j = 0; j < k; ++j) {
        out.values.push_back(e.values[j]);
        out.vectors.push_back(X.col(j));
      }
      return out;
    }
    const long keep = std::min<long>(Q.cols(), std::max<long>(b, 2L * nev));
    Mat Yk = e.vectors.leftCols(keep);
    Q = Q * Yk;
    HQ = HQ * Yk;
    last_start = 0;
    last_cols = keep;
  }
  throw Error(Errc::NotConverged, "lowest_eigenpairs: residual above tolerance after restarts");
}

GroundSpaceReport ground_space(const ParentHamiltonian& h, int N, Boundary b, int nev, bool keep_basis,
                               unsigned seed) {
  check_dim(h.d, N, caps().ed_max_log2, "ground_space");
  GroundSpaceReport rep;
  rep.N = N;
  rep.boundary = b;
  const long dim = ipow(h.d, N);
  const int nterms = int(placements(N, h.L, b).size());
  const double thr = zero_threshold(nterms);
  std::vector<Vec> kernel;

  if (N * std::log2(double(h.d)) <= caps().ed_dense_log2 + 1e-9) {
    rep.method = "dense";
    Eigen::SelfAdjointEigenSolver<Mat> es(dense_chain(h, N, b),
                                          keep_basis ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    int count = 0;
    for (long k = 0; k < dim; ++k) {
      if (es.eigenvalues()[k] < thr) {
        ++count;
        if (keep_basis) kernel.push_back(es.eigenvectors().col(k));
      }
      if (k < nev) rep.energies.push_back(es.eigenvalues()[k]);
    }
    rep.dimension = count;
  } else {
    rep.method = "krylov";
    auto op = [&](const Mat& x, Mat& y) { apply_chain(h, N, b, x, y); };
    int want = nev;
    while (true) {
      LowSpectrum ls = lowest_eigenpairs(op, dim, want, 1e-8, seed);
      kernel.clear();
      for (std::size_t k = 0; k < ls.values.size(); ++k)
        if (ls.values[k] < thr) kernel.push_back(ls.vectors[k]);
      rep.energies.assign(ls.values.begin(), ls.values.begin() + std::min<std::size_t>(nev, ls.values.size()));
      rep.max_residual = ls.max_residual;
      if (int(kernel.size()) < want || want >= 64 || want >= dim) {
        rep.dimension_is_lower_bound = int(kernel.size()) == want && want < dim;
        break;
      }
      want *= 2;
    }
    rep.dimension = int(kernel.size());
  }
  if (keep_basis) rep.basis = kernel;

  if (!h.tensor.empty() && N * std::log2(double(h.d)) <= 16 + 1e-9) {
    const int D = int(h.tensor[0].rows());
    std::vector<Mat> Xs;
    if (b == Boundary::Periodic) {
      Xs.push_back(Mat::Identity(D, D));
    } else {
      std::mt19937_64 rng(seed + 4);
      Xs.push_back(random_matrix(D, D, rng));
      Xs.push_back(random_matrix(D, D, rng));
    }
    bool ff = true;
    for (const auto& X : Xs) {
      Vec psi = state_with_boundary(h.tensor, N, X);
      if (psi.norm() == 0) continue;
      for (int s : placements(N, h.L, b)) {
        Mat y = Mat::Zero(dim, 1);
        apply_placement(h.h, make_placement(h.d, N, h.L, s), psi, y);
        if (y.norm() > 1e-8 * psi.norm()) ff = false;
      }
    }
    rep.frustration_free = ff ? 1 : 0;
  }
  return rep;
}

double martingale_gamma(const Mat& hi, const Mat& hj, double c) {
  const Mat A = hi * hj + hj * hi, S = hi + hj;
  const double tol = 1e-10 * std::max(1.0, A.norm());
  auto psd = [&](double g) { return herm_eig(hermitize(A + c * (1 - g) * S)).values[0] >= -tol; };
  if (psd(1.0)) return 1.0;
  if (!psd(-1.0)) return -1.0;
  double lo = -1, hi_g = 1;
  while (hi_g - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi_g);
    (psd(mid) ? lo : hi_g) = mid;
  }
  return lo;
}

GapCertificate martingale_certificate(const ParentHamiltonian& h, int blocking) {
  if (blocking < 1) throw Error(Errc::InvalidInput, "martingale_certificate: blocking must be positive");
  const int len = h.L + blocking - 1;
  const int total = len + blocking;
  check_dim(h.d, total, caps().ed_dense_log2, "martingale_certificate");
  const Mat HI = dense_chain(h, len, Boundary::Open);
  const long dI = HI.rows(), ds = ipow(h.d, blocking);
  const Mat hI = Mat::Identity(dI, dI) - kernel_projector(HI, zero_threshold(len));
  GapCertificate g;
  g.method = "martingale";
  g.blocking = blocking;
  g.c = 0.5;  // each interval overlaps its two neighbours
  const Mat hi = kron(hI, Mat::Identity(ds, ds)), hj = kron(Mat::Identity(ds, ds), hI);
  g.measured = martingale_gamma(hi, hj, g.c);
  g.threshold = 0;
  g.verdict = g.measured > g.threshold;
  g.margin = g.measured - g.threshold;
  return g;
}

GapCertificate knabe_certificate(const ParentHamiltonian& h, int n) {
  if (n < 3) throw Error(Errc::InvalidInput, "knabe_certificate: n must exceed 2");
  const long dl = h.h.rows();
  if ((h.h * h.h - h.h).norm() > tol::rank() * dl || (h.h - h.h.adjoint()).norm() > tol::rank() * dl)
    throw Error(Errc::InvalidInput, "knabe_certificate: h is not a projector");
  GapCertificate g;
  g.method = "knabe";
  g.n = n;
  g.threshold_weak = 1.0 / (n - 1);
  g.threshold = 6.0 / (double(n) * (n + 1));
  if (h.h.norm() < tol::rank()) {
    g.note = "trivially gapped, no excited spectrum";
    g.margin = -g.threshold;
    return g;
  }
  // nearest-neighbour form: blocks of L-1 sites
  ParentHamiltonian nn = h;
  g.blocking = std::max(1, h.L - 1);
  if (h.L > 2) {
    const int b = h.L - 1;
    check_dim(h.d, 2 * b, caps().ed_dense_log2, "knabe_certificate");
    Mat H2 = dense_chain(h, 2 * b, Boundary::Open);
    nn.h = Mat::Identity(H2.rows(), H2.rows()) - kernel_projector(H2, zero_threshold(b + 1));
    nn.d = int(ipow(h.d, b));
    nn.L = 2;
  } else if (h.L == 1) {
    nn.h = kron(h.h, Mat::Identity(h.d, h.d));
    nn.L = 2;
  }
  check_dim(nn.d, n, caps().ed_dense_log2, "knabe_certificate");
  HermEig e = herm_eig(dense_chain(nn, n, Boundary::Open));
  const double thr = zero_threshold(n);
  long k = 0;
  while (k < e.values.size() && e.values[k] < thr) ++k;
  if (k == e.values.size()) {
    g.note = "no excited spectrum";
    g.margin = -g.threshold;
    return g;
  }
  g.measured = e.values[k];
  g.verdict = g.measured > g.threshold;
  g.margin = g.measured - g.threshold;
  if (k == 0) g.note = "subchain Hamiltonian has no kernel";
  return g;
}

}  // namespace tnkit
