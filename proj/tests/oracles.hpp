#pragma once
// Test-side reference constructions. These are built directly from the
// physical definitions and do not call into the library's algorithms.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline const double kS2 = std::sqrt(2.0);

inline Mat pauli(char c) {
  Mat m(2, 2);
  if (c == 'x') m << 0, 1, 1, 0;
  if (c == 'y') m << 0, cplx(0, -1), cplx(0, 1), 0;
  if (c == 'z') m << 1, 0, 0, -1;
  if (c == 'i') m << 1, 0, 0, 1;
  return m;
}

inline std::vector<Mat> aklt_pauli() { return {pauli('x') / kS2, pauli('y') / kS2, pauli('z') / kS2}; }

// S_z basis ordered (+1, 0, -1)
inline std::vector<Mat> aklt_sz() {
  Mat Y(2, 2);
  Y << 0, -1, 1, 0;
  Mat p(2, 2), z(2, 2), m(2, 2);
  p << 1, 0, 0, 0;
  z << 0, 1, 1, 0;
  m << 0, 0, 0, 1;
  return {p * Y, z * Y / kS2, m * Y};
}

// spin-1 matrices in the (+1,0,-1) basis
inline Mat spin1(char c) {
  Mat m = Mat::Zero(3, 3);
  const double r = 1.0 / kS2;
  if (c == 'z') {
    m(0, 0) = 1;
    m(2, 2) = -1;
  } else if (c == 'x') {
    m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = r;
  } else if (c == 'y') {
    m(0, 1) = cplx(0, -r);
    m(1, 0) = cplx(0, r);
    m(1, 2) = cplx(0, -r);
    m(2, 1) = cplx(0, r);
  }
  return m;
}

// Cartesian spin-1 matrices (S_k)_{ij} = -i eps_{kij}, basis (x,y,z)
inline Mat spin1_cartesian(int k) {
  Mat m = Mat::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int e = 0;
      if ((k + 1) % 3 == i && (k + 2) % 3 == j) e = 1;
      if ((k + 2) % 3 == i && (k + 1) % 3 == j) e = -1;
      m(i, j) = cplx(0, -e);
    }
  return m;
}

inline Mat expm_herm(const Mat& h, cplx factor) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec ph(h.rows());
  for (int k = 0; k < h.rows(); ++k) ph[k] = std::exp(factor * es.eigenvalues()[k]);
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// AKLT ring from singlet bonds projected onto the triplet, S_z basis (+1,0,-1).
inline Vec aklt_singlet_state(int N) {
  // site spin-1 state in terms of two spin-1/2 (a = left, b = right), up=0, down=1
  auto cg = [](int m, int a, int b) -> double {
    if (m == 0) return (a == 0 && b == 0) ? 1.0 : 0.0;
    if (m == 1) return (a != b) ? 1.0 / kS2 : 0.0;
    return (a == 1 && b == 1) ? 1.0 : 0.0;
  };
  auto eps = [](int x, int y) -> double { return x == y ? 0.0 : (x == 0 ? 1.0 : -1.0) / kS2; };
  long dim = 1;
  for (int k = 0; k < N; ++k) dim *= 3;
  Vec psi = Vec::Zero(dim);
  std::vector<int> m(N);
  for (long idx = 0; idx < dim; ++idx) {
    long t = idx;
    for (int k = N - 1; k >= 0; --k) {
      m[k] = int(t % 3);
      t /= 3;
    }
    double amp = 0;
    for (long s = 0; s < (1L << (2 * N)); ++s) {
      double w = 1;
      for (int k = 0; k < N && w != 0; ++k) {
        int a = (s >> (2 * k)) & 1, b = (s >> (2 * k + 1)) & 1;
        w *= cg(m[k], a, b);
        int an = (s >> (2 * ((k + 1) % N))) & 1;
        w *= eps(b, an);
      }
      amp += w;
    }
    psi[idx] = amp;
  }
  return psi;
}

inline Mat embed(const Mat& op, int site, int N, int d) {
  Mat r = Mat::Identity(1, 1);
  for (int k = 0; k < N; ++k) {
    Mat f = (k == site) ? op : Mat::Identity(d, d);
    Mat n(r.rows() * f.rows(), r.cols() * f.cols());
    for (int i = 0; i < r.rows(); ++i)
      for (int j = 0; j < r.cols(); ++j) n.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = r(i, j) * f;
    r = n;
  }
  return r;
}

inline Vec amplitudes_bruteforce(const std::vector<Mat>& A, int N) {
  const int d = int(A.size());
  long dim = 1;
  for (int k = 0; k < N; ++k) dim *= d;
  Vec psi(dim);
  for (long idx = 0; idx < dim; ++idx) {
    long t = idx;
    std::vector<int> c(N);
    for (int k = N - 1; k >= 0; --k) {
      c[k] = int(t % d);
      t /= d;
    }
    Mat p = Mat::Identity(A[0].rows(), A[0].rows());
    for (int k = 0; k < N; ++k) p = p * A[c[k]];
    psi[idx] = p.trace();
  }
  return psi;
}

// |<a|b>| / (|a||b|)
inline double fidelity(const Vec& a, const Vec& b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }

inline std::vector<Mat> random_tensor(int d, int D, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::vector<Mat> A(d, Mat(D, D));
  for (auto& a : A)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) a(i, j) = cplx(n(rng), n(rng));
  return A;
}

inline Mat random_invertible(int D, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat X(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) X(i, j) = cplx(n(rng), n(rng));
  return X + 0.5 * D * Mat::Identity(D, D);
}

}  // namespace oracle
