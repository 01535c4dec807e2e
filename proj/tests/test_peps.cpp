#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <random>

#include "oracles_peps.hpp"
#include "tnkit/peps.hpp"
#include "tnkit/quantum_double.hpp"

using namespace tnkit;

using namespace peps_oracle;

TEST(Peps, ContractGhzAndCluster) {
  const PepsPatch g = PepsPatch::uniform(ghz2d(), 2, 2, PepsBoundary::Torus);
  const Vec v = peps_dense_state(g);
  int nonzero = 0;
  for (int k = 0; k < v.size(); ++k)
    if (std::abs(v[k]) > 1e-12) ++nonzero;
  EXPECT_EQ(nonzero, 2);
  EXPECT_NEAR(std::abs(v[0] - 1.0), 0, 1e-12);
  EXPECT_NEAR(std::abs(v[15] - 1.0), 0, 1e-12);
  EXPECT_NEAR(peps_contract(g).norm2, 2.0, 1e-12);

  for (auto [Lx, Ly] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{3, 3}}) {
    const PepsPatch c = PepsPatch::uniform(cluster2d(), Lx, Ly, PepsBoundary::Torus);
    const Vec want = cluster_oracle(Lx, Ly);
    const auto res = peps_contract(c, true);
    EXPECT_NEAR(res.norm2, want.squaredNorm(), 1e-12);
    EXPECT_LT((*res.amplitudes - want).norm(), 1e-12);
  }

  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  const PepsPatch tc = quantum_double_patch(z2, 3, 3);
  const Vec want = Colouring{z2, 3, 3}.dense();
  const double n2 = peps_contract(tc).norm2;
  EXPECT_GT(n2, 0);
  EXPECT_NEAR(n2, want.squaredNorm(), 1e-9);
  EXPECT_LT((peps_dense_state(tc) - want).norm(), 1e-9);
}

TEST(Peps, ExpectationIsingAndGhz) {
  for (double beta : {0.2, 0.4406, 0.8}) {
    const PepsPatch p = PepsPatch::uniform(ising(beta), 4, 4, PepsBoundary::Torus);
    for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 10}, std::pair{5, 7}}) {
      const cplx got = peps_expectation(p, {{a % 4, a / 4, Z()}, {b % 4, b / 4, Z()}});
      EXPECT_NEAR(got.real(), gibbs_zz(beta, 4, 4, a, b), 1e-10) << beta << " " << a << "," << b;
      EXPECT_NEAR(got.imag(), 0, 1e-12);
    }
    EXPECT_NEAR(std::abs(peps_expectation(p, {{1, 1, Mat::Identity(2, 2)}}) - 1.0), 0, 1e-12);
  }
  const PepsPatch g = PepsPatch::uniform(ghz2d(), 3, 3, PepsBoundary::Torus);
  for (int a = 0; a < 9; ++a)
    for (int b = a + 1; b < 9; ++b)
      EXPECT_NEAR(std::abs(peps_expectation(g, {{a % 3, a / 3, Z()}, {b % 3, b / 3, Z()}}) - 1.0), 0, 1e-12);
}

TEST(Peps, OpenPatchMatchesDense) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  std::vector<cplx> data(2 * 16);
  for (auto& x : data) x = cplx(nd(rng), nd(rng));
  const PepsTensor t = PepsTensor::from_data(2, 2, 2, 2, 2, data);
  Vec bv(2);
  bv << 0.6, cplx(0.3, -0.5);
  const PepsPatch p = PepsPatch::open_with_boundary(t, 3, 2, bv, bv, bv, bv);
  // oracle: explicit sum over all bonds
  Vec want = Vec::Zero(64);
  for (int phys = 0; phys < 64; ++phys)
    for (int b = 0; b < (1 << 7); ++b) {
      // horizontal bonds h(0,y), h(1,y) for y = 0, 1; vertical v(x, 0) for x = 0..2
      auto hb = [&](int x, int y) { return (b >> (x + 2 * y)) & 1; };
      auto vb = [&](int x) { return (b >> (4 + x)) & 1; };
      cplx amp = 1;
      for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) {
          const int i = (phys >> (5 - (y * 3 + x))) & 1;
          cplx s = 0;
          for (int e = 0; e < 16; ++e) {
            const int tt = (e >> 3) & 1, rr = (e >> 2) & 1, dd = (e >> 1) & 1, ll = e & 1;
            cplx w = t.at(i, tt, rr, dd, ll);
            w *= (y == 0) ? bv[tt] : cplx(tt == vb(x));
            w *= (x == 2) ? bv[rr] : cplx(rr == hb(x, y));
            w *= (y == 1) ? bv[dd] : cplx(dd == vb(x));
            w *= (x == 0) ? bv[ll] : cplx(ll == hb(x - 1, y));
            s += w;
          }
          amp *= s;
        }
      want[phys] += amp;
    }
  const auto res = peps_contract(p, true);
  EXPECT_LT((*res.amplitudes - want).norm(), 1e-10 * want.norm());
  EXPECT_NEAR(res.norm2, want.squaredNorm(), 1e-10 * want.squaredNorm());
}

TEST(Peps, RegionInjectivity) {
  // A bulk 2x2 region of a D=2, d=2 tensor has 16 < 2^8 physical states, so the
  // region sits in the corner of an open 3x3 patch where only 4 legs are cut.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  PepsTensor pert = cluster2d();
  for (auto& x : pert.data.data()) x += 0.3 * cplx(nd(rng), nd(rng));
  Vec bv(2);
  bv << 1, 0.4;
  const Rect corner{0, 0, 2, 2};
  const auto rp = peps_region_injectivity(PepsPatch::open_with_boundary(pert, 3, 3, bv, bv, bv, bv), corner);
  EXPECT_TRUE(rp.injective);
  EXPECT_EQ(rp.rank, 16);
  EXPECT_EQ(rp.boundary_dim, 16);
  const auto rc = peps_region_injectivity(PepsPatch::open_with_boundary(cluster2d(), 3, 3, bv, bv, bv, bv), corner);
  EXPECT_FALSE(rc.injective);
  EXPECT_LT(rc.rank, 16);

  // quantum double: rank = number of distinct physical images of the boundary colourings
  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  const PepsPatch tc = quantum_double_patch(z2, 3, 3);
  for (Rect r : {Rect{0, 0, 1, 1}, Rect{0, 0, 2, 1}, Rect{0, 0, 2, 2}}) {
    const auto legs = region_legs(tc, r);
    const auto rep = peps_region_injectivity(tc, r);
    EXPECT_FALSE(rep.injective);
    EXPECT_EQ(rep.boundary_dim, 1L << legs.size());
    // oracle: the image is spanned by the sums over inner colours for each boundary colouring;
    // count distinct nonzero columns up to the global shift, which acts trivially.
    const Mat A = region_map(tc, r);
    std::set<std::vector<int>> images;
    for (int b = 0; b < A.cols(); ++b) {
      std::vector<int> key;
      for (int i = 0; i < A.rows(); ++i) key.push_back(int(std::lround(A(i, b).real())));
      bool zero = std::all_of(key.begin(), key.end(), [](int k) { return k == 0; });
      if (!zero) images.insert(key);
    }
    // columns are 0/1 indicator sums of disjoint supports, so distinct columns are independent
    EXPECT_EQ(rep.rank, int(images.size()));
  }

  PepsTensor prod = PepsTensor::zeros(2, 1, 1, 1, 1);
  prod.at(0, 0, 0, 0, 0) = 0.6;
  prod.at(1, 0, 0, 0, 0) = 0.8;
  const auto r1 = peps_region_injectivity(PepsPatch::uniform(prod, 2, 2, PepsBoundary::Torus), Rect{0, 0, 1, 1});
  EXPECT_TRUE(r1.injective);
  EXPECT_EQ(r1.rank, 1);
}

TEST(Peps, BoundaryState) {
  const Rect r{1, 1, 3, 3};
  const PepsPatch g = PepsPatch::uniform(ghz2d(), 4, 4, PepsBoundary::Torus);
  const BoundaryState bg = region_boundary_state(g, r);
  EXPECT_EQ(bg.rank, 2);
  EXPECT_NEAR(bg.entropy, std::log(2.0), 1e-10);
  Mat ghz_rho = Mat::Zero(16, 16);
  ghz_rho(0, 0) = ghz_rho(15, 15) = 0.5;
  EXPECT_LT((region_density_matrix(g, r) - ghz_rho).norm(), 1e-10);

  PepsTensor prod = PepsTensor::zeros(2, 1, 1, 1, 1);
  prod.at(0, 0, 0, 0, 0) = 0.6;
  prod.at(1, 0, 0, 0, 0) = cplx(0, 0.8);
  const BoundaryState bp = region_boundary_state(PepsPatch::uniform(prod, 3, 3, PepsBoundary::Torus), Rect{0, 0, 1, 1});
  EXPECT_EQ(bp.rank, 1);
  EXPECT_NEAR(bp.entropy, 0, 1e-12);

  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  const PepsPatch tc = quantum_double_patch(z2, 4, 4);
  const BoundaryState bt = region_boundary_state(tc, r);
  ASSERT_EQ(bt.legs.size(), 8u);
  // seven distinct boundary colours: 2^6 up to the global shift
  EXPECT_EQ(bt.rank, 64);
  Mat X8 = Mat::Ones(1, 1);
  for (int k = 0; k < 8; ++k) X8 = kron(X8, oracle::pauli('x'));
  EXPECT_LT((X8 * bt.sigma - bt.sigma).norm(), 1e-10);
  EXPECT_LT((bt.sigma - bt.sigma.adjoint()).norm(), 1e-12);
  EXPECT_NEAR(bt.sigma.trace().real(), 1.0, 1e-12);
  EXPECT_GT(herm_eig(bt.sigma).values.minCoeff(), -1e-12);
  // isometry on the support, and spectrum matching the exact reduced density matrix
  const Mat P = bt.support * bt.support.adjoint();
  EXPECT_LT((bt.isometry.adjoint() * bt.isometry - P).norm(), 1e-10);
  const Mat rho = Colouring{z2, 4, 4}.rdm(r);
  const auto a = nonzero_spectrum(rho), b = nonzero_spectrum(bt.sigma);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10);
  EXPECT_NEAR(bt.entropy, entropy_of(rho), 1e-10);
}

TEST(Peps, BoundarySpectrumProperty) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<cplx> data(2 * 16);
    for (auto& x : data) x = cplx(nd(rng), nd(rng));
    const PepsPatch p = PepsPatch::uniform(PepsTensor::from_data(2, 2, 2, 2, 2, data), 3, 3, PepsBoundary::Torus);
    const Rect r = trial % 2 ? Rect{0, 0, 2, 2} : Rect{1, 0, 2, 3};
    const BoundaryState bs = region_boundary_state(p, r);
    // dense oracle reduced density matrix
    const Vec psi = peps_dense_state(p) / std::sqrt(peps_contract(p).norm2);
    std::vector<int> in, out;
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) (r.contains(x, y) ? in : out).push_back(y * 3 + x);
    Mat M(1 << in.size(), 1 << out.size());
    for (int c = 0; c < 512; ++c) {
      int i = 0, j = 0;
      for (int s : in) i = 2 * i + ((c >> (8 - s)) & 1);
      for (int s : out) j = 2 * j + ((c >> (8 - s)) & 1);
      M(i, j) = psi[c];
    }
    const Mat rho = M * M.adjoint();
    EXPECT_LT((region_density_matrix(p, r) - rho).norm(), 1e-10);
    const auto a = nonzero_spectrum(rho), b = nonzero_spectrum(bs.sigma);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10);
    const Mat P = bs.support * bs.support.adjoint();
    EXPECT_LT((bs.isometry.adjoint() * bs.isometry - P).norm(), 1e-10);
  }
}

TEST(QuantumDouble, StringsMatchColouringOracle) {
  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  for (int g = 0; g < 2; ++g)
    for (int h = 0; h < 2; ++h) {
      const Vec got = peps_dense_state(quantum_double_with_strings(z2, 3, 3, g, h, {1, 2}));
      Colouring c{z2, 3, 3, 1, 2, g, h};
      EXPECT_LT((got - c.dense()).norm(), 1e-9);
    }
  const FiniteGroup z3 = FiniteGroup::cyclic(3);
  for (int g = 0; g < 3; ++g)
    for (int h = 0; h < 3; ++h) {
      const Vec got = peps_dense_state(quantum_double_with_strings(z3, 2, 2, g, h));
      EXPECT_LT((got - Colouring{z3, 2, 2, 0, 0, g, h}.dense()).norm(), 1e-9);
    }
}

TEST(QuantumDouble, Sectors) {
  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  const SectorBasis s2 = quantum_double_sectors(z2, 3, 3);
  EXPECT_EQ(s2.labels.size(), 4u);
  EXPECT_EQ(s2.rank, 4);
  EXPECT_GT(s2.min_gram_eigenvalue, 0.5);
  // minimal central idempotents give orthogonal states
  EXPECT_LT((s2.gram - Mat::Identity(4, 4)).norm(), 1e-9);

  const FiniteGroup z3 = FiniteGroup::cyclic(3);
  const SectorBasis s3 = quantum_double_sectors(z3, 2, 2);
  EXPECT_EQ(s3.labels.size(), 9u);
  EXPECT_EQ(s3.rank, 9);
  const SectorBasis s3j = quantum_double_sectors(z3, 2, 2, 3);
  EXPECT_EQ((s3j.gram - s3.gram).norm(), 0.0);
  EXPECT_GT(s3.min_gram_eigenvalue, 0.5);

  // labels: sum over classes of the class count of the centralizer
  for (const FiniteGroup& g : {FiniteGroup::symmetric(3), FiniteGroup::cyclic(4), FiniteGroup::dihedral(4)}) {
    int want = 0;
    std::vector<int> seen(g.order, 0);
    for (int h = 0; h < g.order; ++h) {
      if (seen[h]) continue;
      for (int x = 0; x < g.order; ++x) seen[g.mult(g.mult(x, h), g.inv[x])] = 1;
      std::vector<int> z;
      for (int x = 0; x < g.order; ++x)
        if (g.mult(x, h) == g.mult(h, x)) z.push_back(x);
      want += class_count(g, z);
    }
    EXPECT_EQ(int(sector_labels(g).size()), want) << g.name;
  }
  EXPECT_EQ(sector_labels(FiniteGroup::symmetric(3)).size(), 8u);
}

TEST(QuantumDouble, ContractibleLoopInvariance) {
  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  const PepsPatch p = quantum_double_patch(z2, 3, 3);
  const Vec base = peps_dense_state(p);
  const Rect blk{0, 0, 2, 2};
  PepsPatch q = p;
  for (const auto& l : region_legs(p, blk)) q.at(l.x, l.y) = q.at(l.x, l.y).leg_transformed(l.leg, left_regular(z2, 1));
  EXPECT_LT((peps_dense_state(q) - base).norm(), 1e-10);
  // a non-contractible string changes the state
  const Vec twisted = peps_dense_state(quantum_double_with_strings(z2, 3, 3, 1, 0));
  EXPECT_GT((twisted - base).norm(), 1.0);
}

TEST(QuantumDouble, TopologicalEntropy) {
  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  const Rect r{1, 1, 3, 3};
  const TopologicalEntropy t2 = topological_entropy(z2, 4, 4, r);
  EXPECT_EQ(t2.boundary_legs, 8);
  EXPECT_EQ(t2.effective_boundary, 7);
  EXPECT_NEAR(t2.entropy, entropy_of(Colouring{z2, 4, 4}.rdm(r)), 1e-10);
  EXPECT_NEAR(t2.entropy, 6 * std::log(2.0), 1e-10);
  EXPECT_NEAR(t2.gamma, std::log(2.0), 1e-10);

  const TopologicalEntropy t1 = topological_entropy(FiniteGroup::cyclic(1), 3, 3, Rect{0, 0, 2, 2});
  EXPECT_NEAR(t1.entropy, 0, 1e-12);
  EXPECT_NEAR(t1.gamma, 0, 1e-12);

  const FiniteGroup z3 = FiniteGroup::cyclic(3);
  // a 3x3 torus double layer needs 3^16 intermediates, above the default cap
  const Rect r3{1, 0, 3, 1};
  const TopologicalEntropy t3 = topological_entropy(z3, 4, 2, r3);
  EXPECT_EQ(t3.effective_boundary, 5);
  EXPECT_NEAR(t3.entropy, entropy_of(Colouring{z3, 4, 2}.rdm(r3)), 1e-10);
  EXPECT_NEAR(t3.gamma, std::log(3.0), 1e-10);
}
