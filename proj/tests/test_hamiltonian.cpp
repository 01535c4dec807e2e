#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tnkit/hamiltonian.hpp"
#include "tnkit/structure.hpp"

using namespace tnkit;

namespace {

std::vector<Mat> ghz() {
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 0) = 1;
  b(1, 1) = 1;
  return {a, b};
}

// projector onto total spin 2 of two spin-1, S_z basis
Mat spin2_projector() {
  Mat S2 = Mat::Zero(9, 9);
  for (char c : {'x', 'y', 'z'}) {
    Mat s = oracle::embed(oracle::spin1(c), 0, 2, 3) + oracle::embed(oracle::spin1(c), 1, 2, 3);
    S2 += s * s;
  }
  return S2 * (S2 - 2.0 * Mat::Identity(9, 9)) / 24.0;
}

}  // namespace

TEST(Parent, Examples) {
  ParentHamiltonian g = parent_hamiltonian(UniformMps::periodic(ghz()), 2);
  Mat ref = Mat::Zero(4, 4);
  ref(1, 1) = ref(2, 2) = 1;
  EXPECT_LT((g.h - ref).norm(), 1e-12);

  ParentHamiltonian a = parent_hamiltonian(UniformMps::periodic(oracle::aklt_sz()), 2);
  EXPECT_LT((a.h - spin2_projector()).norm(), 1e-10);
  EXPECT_EQ(a.kernel_dim, 4);

  Vec phi(3);
  phi << 0.6, cplx(0, 0.8), 0;
  std::vector<Mat> P;
  for (int i = 0; i < 3; ++i) P.push_back(Mat::Constant(1, 1, phi[i]));
  ParentHamiltonian p = parent_hamiltonian(UniformMps::periodic(P), 1);
  EXPECT_LT((p.h - (Mat::Identity(3, 3) - phi * phi.adjoint())).norm(), 1e-12);

  ParentHamiltonian z = parent_hamiltonian(UniformMps::periodic(oracle::aklt_sz()), 1);
  EXPECT_FALSE(z.warnings.empty());
  EXPECT_LT(z.h.norm(), 1e-12);
}

TEST(Parent, ProjectorAndKernelProperties) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 3; ++trial) {
    auto A = oracle::random_tensor(3, 2, rng);
    for (int L = 2; L <= 4; ++L) {
      ParentHamiltonian p = parent_hamiltonian(UniformMps::periodic(A), L);
      EXPECT_LT((p.h * p.h - p.h).norm(), 1e-10);
      EXPECT_LT((p.h - p.h.adjoint()).norm(), 1e-12);
      // tr(A...A X) lies in the kernel for any X; dimension min(d^L, D^2)
      for (int k = 0; k < 3; ++k) {
        Mat X = random_matrix(2, 2, rng);
        Vec v(long(std::pow(3, L)));
        std::vector<int> c(L);
        for (long i = 0; i < v.size(); ++i) {
          long t = i;
          for (int s = L - 1; s >= 0; --s, t /= 3) c[s] = int(t % 3);
          Mat m = Mat::Identity(2, 2);
          for (int s = 0; s < L; ++s) m = m * A[c[s]];
          v[i] = (m * X).trace();
        }
        EXPECT_LT((p.h * v).norm(), 1e-10 * v.norm());
      }
      EXPECT_EQ(p.kernel_dim, std::min(4, int(std::pow(3, L))));
    }
    // gauge covariance: the kernel does not depend on the gauge
    Mat X = oracle::random_invertible(2, rng);
    std::vector<Mat> B;
    for (const auto& a : A) B.push_back(X * a * X.inverse());
    EXPECT_LT((parent_hamiltonian(UniformMps::periodic(A), 3).h - parent_hamiltonian(UniformMps::periodic(B), 3).h).norm(),
              1e-9);
  }
}

TEST(GroundSpace, Examples) {
  ParentHamiltonian a = parent_hamiltonian(UniformMps::periodic(oracle::aklt_sz()), 2);
  GroundSpaceReport r = ground_space(a, 6, Boundary::Periodic, 4, true);
  EXPECT_EQ(r.dimension, 1);
  EXPECT_EQ(r.frustration_free, 1);
  Vec psi = oracle::aklt_singlet_state(6);
  EXPECT_GE(oracle::fidelity(psi, r.basis[0]), 1 - 1e-10);

  ParentHamiltonian g = parent_hamiltonian(UniformMps::periodic(ghz()), 2);
  EXPECT_EQ(ground_space(g, 5, Boundary::Periodic).dimension, 2);
  EXPECT_EQ(ground_space(a, 4, Boundary::Open).dimension, 4);
  EXPECT_EQ(ground_space(a, 4, Boundary::Open).frustration_free, 1);
}

TEST(GroundSpace, DimensionMatchesNormalBasis) {
  ParentHamiltonian g = parent_hamiltonian(UniformMps::periodic(ghz()), 2);
  ParentHamiltonian a = parent_hamiltonian(UniformMps::periodic(oracle::aklt_pauli()), 2);
  for (int N = 3; N <= 7; ++N) {
    EXPECT_EQ(ground_space(g, N, Boundary::Periodic).dimension, 2) << N;
    GroundSpaceReport r = ground_space(a, N, Boundary::Periodic);
    EXPECT_EQ(r.dimension, 1) << N;
    EXPECT_EQ(r.frustration_free, 1);
  }
  // two inequivalent normal blocks
  std::mt19937_64 rng(43);
  auto B1 = oracle::random_tensor(3, 2, rng), B2 = oracle::random_tensor(3, 2, rng);
  std::vector<Mat> A;
  for (int i = 0; i < 3; ++i) {
    Mat m = Mat::Zero(4, 4);
    m.topLeftCorner(2, 2) = B1[i];
    m.bottomRightCorner(2, 2) = B2[i];
    A.push_back(m);
  }
  UniformMps m = UniformMps::periodic(A);
  const int members = int(basis_of_normal_tensors(canonical_form(m)).members.size());
  ASSERT_EQ(members, 2);
  ParentHamiltonian p = parent_hamiltonian(m, 3);
  for (int N = 4; N <= 6; ++N) {
    GroundSpaceReport r = ground_space(p, N, Boundary::Periodic);
    EXPECT_EQ(r.dimension, members) << N;
    EXPECT_EQ(r.frustration_free, 1);
  }
}

TEST(GroundSpace, KrylovAgreesWithDense) {
  ParentHamiltonian a = parent_hamiltonian(UniformMps::periodic(oracle::aklt_pauli()), 2);
  GroundSpaceReport dense = ground_space(a, 7, Boundary::Periodic, 5);
  Caps saved = caps();
  Caps c = saved;
  c.ed_dense_log2 = 6;
  set_caps(c);
  GroundSpaceReport kry = ground_space(a, 7, Boundary::Periodic, 5);
  GroundSpaceReport kopen = ground_space(a, 6, Boundary::Open, 3);
  set_caps(saved);
  EXPECT_EQ(dense.method, "dense");
  EXPECT_EQ(kry.method, "krylov");
  EXPECT_EQ(kry.dimension, 1);
  ASSERT_EQ(kry.energies.size(), dense.energies.size());
  for (std::size_t k = 0; k < kry.energies.size(); ++k) EXPECT_NEAR(kry.energies[k], dense.energies[k], 1e-8);
  EXPECT_LE(kry.max_residual, 1e-8);
  // open chain: four edge states, found by growing the block
  EXPECT_EQ(kopen.dimension, 4);
  EXPECT_FALSE(kopen.dimension_is_lower_bound);
}

TEST(GroundSpace, IntersectionProperty) {
  // kernels of the 3-local and 4-local parent Hamiltonians agree (L0 = 2)
  UniformMps m = UniformMps::periodic(oracle::aklt_pauli());
  for (int N = 5; N <= 6; ++N) {
    GroundSpaceReport r3 = ground_space(parent_hamiltonian(m, 3), N, Boundary::Periodic, 4, true);
    GroundSpaceReport r4 = ground_space(parent_hamiltonian(m, 4), N, Boundary::Periodic, 4, true);
    ASSERT_EQ(r3.dimension, 1);
    ASSERT_EQ(r4.dimension, 1);
    EXPECT_GE(oracle::fidelity(r3.basis[0], r4.basis[0]), 1 - 1e-10);
  }
}

TEST(Gap, Martingale) {
  ParentHamiltonian g = parent_hamiltonian(UniformMps::periodic(ghz()), 2);
  EXPECT_NEAR(martingale_certificate(g, 2).measured, 1.0, 1e-12);
  ParentHamiltonian a = parent_hamiltonian(UniformMps::periodic(oracle::aklt_pauli()), 2);
  GapCertificate c = martingale_certificate(a, 2);
  EXPECT_TRUE(c.verdict);
  EXPECT_GT(c.measured, 0.0);
  EXPECT_NEAR(c.margin, c.measured, 1e-15);
  Mat P = spin2_projector();
  EXPECT_NEAR(martingale_gamma(P, P, 0.5), 1.0, 1e-12);
  // non-commuting rank-one projectors at 45 degrees in a qubit: {P,Q} has eigenvalue (1 - sqrt2)/2
  Mat p(2, 2), q(2, 2);
  p << 1, 0, 0, 0;
  q << 0.5, 0.5, 0.5, 0.5;
  const double gam = martingale_gamma(p, q, 1.0);
  Mat A = p * q + q * p, S = p + q;
  EXPECT_GE(herm_eig(A + (1 - gam) * S).values[0], -1e-10);
  EXPECT_LT(herm_eig(A + (1 - gam - 2e-4) * S).values[0], 0.0);
}

TEST(Gap, Knabe) {
  ParentHamiltonian a = parent_hamiltonian(UniformMps::periodic(oracle::aklt_pauli()), 2);
  GapCertificate k = knabe_certificate(a, 4);
  EXPECT_TRUE(k.verdict);
  EXPECT_GT(k.measured, 0.3);
  EXPECT_NEAR(k.threshold, 0.3, 1e-15);
  EXPECT_NEAR(k.threshold_weak, 1.0 / 3.0, 1e-15);

  ParentHamiltonian g = parent_hamiltonian(UniformMps::periodic(ghz()), 2);
  GapCertificate kg = knabe_certificate(g, 3);
  EXPECT_NEAR(kg.measured, 1.0, 1e-10);
  EXPECT_TRUE(kg.verdict);

  ParentHamiltonian z = projector_term(Mat::Zero(4, 4), 2, 2);
  GapCertificate kz = knabe_certificate(z, 4);
  EXPECT_FALSE(kz.verdict);
  EXPECT_EQ(kz.note, "trivially gapped, no excited spectrum");
  EXPECT_THROW(knabe_certificate(projector_term(Mat::Identity(4, 4), 2, 2), 2), Error);
  EXPECT_THROW(projector_term(2.0 * Mat::Identity(4, 4), 2, 2), Error);

  // sanity: periodic ED gaps stay bounded away from zero
  for (int N : {6, 8}) {
    GroundSpaceReport r = ground_space(a, N, Boundary::Periodic, 3);
    ASSERT_EQ(r.dimension, 1);
    EXPECT_GT(r.energies[1], 0.2) << N;
  }
}
