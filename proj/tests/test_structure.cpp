#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tnkit/structure.hpp"

using namespace tnkit;

namespace {

std::vector<Mat> gauge(const std::vector<Mat>& A, const Mat& X, cplx phase = 1.0) {
  Mat Xi = X.inverse();
  std::vector<Mat> out;
  for (const auto& a : A) out.push_back(phase * X * a * Xi);
  return out;
}

std::vector<Mat> block_upper(const std::vector<Mat>& B1, const std::vector<Mat>& B2, std::mt19937_64& rng) {
  const int n1 = int(B1[0].rows()), n2 = int(B2[0].rows());
  std::vector<Mat> out;
  for (std::size_t i = 0; i < B1.size(); ++i) {
    Mat m = Mat::Zero(n1 + n2, n1 + n2);
    m.topLeftCorner(n1, n1) = B1[i];
    m.bottomRightCorner(n2, n2) = B2[i];
    m.topRightCorner(n1, n2) = random_matrix(n1, n2, rng);
    out.push_back(m);
  }
  return out;
}

// sum_k mu_k^N |V^N(A_k)>
Vec from_canonical(const CanonicalForm& cf, int N) {
  Vec psi;
  for (const auto& b : cf.blocks) {
    Vec v = std::pow(b.mu, N) * dense_state(UniformMps::periodic(b.tensor.matrices()), N);
    psi = psi.size() ? Vec(psi + v) : v;
  }
  return psi;
}

std::vector<Mat> ghz() {
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 0) = 1;
  b(1, 1) = 1;
  return {a, b};
}

std::vector<Mat> cluster() {
  Mat a(2, 2), b(2, 2);
  a << 1, 1, 0, 0;
  b << 0, 0, 1, -1;
  return {a, b};
}

}  // namespace

TEST(CanonicalForm, GhzSplitsIntoTwoBlocks) {
  CanonicalForm cf = canonical_form(UniformMps::periodic(ghz()));
  ASSERT_EQ(cf.blocks.size(), 2u);
  EXPECT_EQ(cf.blocking_p, 1);
  for (const auto& b : cf.blocks) {
    EXPECT_EQ(b.tensor.Dl, 1);
    EXPECT_NEAR(b.mu, 1.0, 1e-10);
  }
  BasisOfNormalTensors bnt = basis_of_normal_tensors(cf);
  EXPECT_EQ(bnt.members.size(), 2u);
}

TEST(CanonicalForm, AkltIsSingleNormalBlock) {
  UniformMps m = UniformMps::periodic(oracle::aklt_pauli());
  CanonicalForm cf = canonical_form(m);
  ASSERT_EQ(cf.blocks.size(), 1u);
  EXPECT_EQ(cf.dropped_dim, 0);
  EXPECT_TRUE(is_normal(m).normal);
  EXPECT_EQ(injectivity_length(m), 2);
}

TEST(CanonicalForm, UpperTriangularReproducesState) {
  std::mt19937_64 rng(11);
  auto B1 = oracle::random_tensor(2, 2, rng);
  auto B2 = oracle::random_tensor(2, 3, rng);
  for (auto& b : B2) b *= 0.7;
  auto A = gauge(block_upper(B1, B2, rng), oracle::random_invertible(5, rng));
  UniformMps m = UniformMps::periodic(A);
  CanonicalForm cf = canonical_form(m);
  ASSERT_EQ(cf.blocks.size(), 2u);
  std::vector<int> dims{cf.blocks[0].tensor.Dl, cf.blocks[1].tensor.Dl};
  std::sort(dims.begin(), dims.end());
  EXPECT_EQ(dims, (std::vector<int>{2, 3}));
  EXPECT_LT((cf.gauge.adjoint() * cf.gauge - Mat::Identity(5, 5)).norm(), 1e-10);
  for (int N = 1; N <= 6; ++N) {
    Vec ref = oracle::amplitudes_bruteforce(A, N);
    EXPECT_LT((from_canonical(cf, N) - ref).norm(), 1e-8 * ref.norm()) << N;
  }
  EXPECT_FALSE(is_normal(m).normal);
}

TEST(CanonicalForm, NilpotentBlockDropped) {
  std::mt19937_64 rng(12);
  auto B1 = oracle::random_tensor(2, 2, rng);
  std::vector<Mat> Z(2, Mat::Zero(2, 2));
  Z[0](0, 1) = 1.0;  // strictly upper, nilpotent
  auto A = gauge(block_upper(B1, Z, rng), oracle::random_invertible(4, rng));
  CanonicalForm cf = canonical_form(UniformMps::periodic(A));
  ASSERT_EQ(cf.blocks.size(), 1u);
  EXPECT_EQ(cf.dropped_dim, 2);
  for (int N = 2; N <= 6; ++N) {
    Vec ref = oracle::amplitudes_bruteforce(A, N);
    EXPECT_LT((from_canonical(cf, N) - ref).norm(), 1e-8 * ref.norm());
  }
}

TEST(CanonicalForm, PeriodTwoBlocked) {
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 1) = 1;
  b(1, 0) = 1;
  UniformMps m = UniformMps::periodic({a, b});
  NormalityReport nr = is_normal(m);
  EXPECT_FALSE(nr.normal);
  EXPECT_EQ(nr.peripheral_count, 2);
  EXPECT_THROW(injectivity_length(m), Error);
  CanonicalForm cf = canonical_form(m);
  EXPECT_EQ(cf.blocking_p, 2);
  EXPECT_EQ(cf.periods, (std::vector<int>{2}));
  for (int N = 1; N <= 4; ++N) {
    Vec ref = oracle::amplitudes_bruteforce({a, b}, 2 * N);
    EXPECT_LT((from_canonical(cf, N) - ref).norm(), 1e-10);
  }
}

TEST(CanonicalForm, RepeatedBlockGivesOneMember) {
  std::mt19937_64 rng(13);
  auto A = oracle::random_tensor(3, 2, rng);
  const double phi = 0.9;
  auto A2 = gauge(A, oracle::random_invertible(2, rng), std::polar(1.0, phi));
  std::vector<Mat> blk;
  for (int i = 0; i < 3; ++i) {
    Mat m = Mat::Zero(4, 4);
    m.topLeftCorner(2, 2) = A[i];
    m.bottomRightCorner(2, 2) = 2.0 * A2[i];
    blk.push_back(m);
  }
  auto full = gauge(blk, oracle::random_invertible(4, rng));
  CanonicalForm cf = canonical_form(UniformMps::periodic(full));
  ASSERT_EQ(cf.blocks.size(), 2u);
  BasisOfNormalTensors bnt = basis_of_normal_tensors(cf);
  ASSERT_EQ(bnt.members.size(), 1u);
  ASSERT_EQ(bnt.multiplicities[0].size(), 2u);
  const auto& r0 = bnt.multiplicities[0][0];
  const auto& r1 = bnt.multiplicities[0][1];
  EXPECT_NEAR(std::max(r0.mu, r1.mu) / std::min(r0.mu, r1.mu), 2.0, 1e-8);
  // relative phase between the two copies
  double dphi = std::remainder((r0.mu > r1.mu ? r0.phi - r1.phi : r1.phi - r0.phi), 2 * M_PI);
  EXPECT_NEAR(dphi, phi, 1e-8);
  for (int N = 2; N <= 5; ++N) {
    Vec ref = oracle::amplitudes_bruteforce(full, N);
    EXPECT_LT((from_canonical(cf, N) - ref).norm(), 1e-8 * ref.norm());
  }
}

TEST(Injectivity, ClusterAndBlocking) {
  UniformMps c = UniformMps::periodic(cluster());
  EXPECT_EQ(injectivity_length(c), 2);
  Vec psi = dense_state(c, 4);
  for (int s = 0; s < 16; ++s) {
    int e = 0;
    for (int k = 0; k < 4; ++k) e += ((s >> (3 - k)) & 1) * ((s >> (3 - (k + 1) % 4)) & 1);
    EXPECT_NEAR(std::abs(psi[s] - (e % 2 ? -1.0 : 1.0) * psi[0]), 0.0, 1e-12);
  }
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 4; ++trial) {
    UniformMps m = UniformMps::periodic(oracle::random_tensor(2, 4, rng));
    const int L0 = injectivity_length(m);
    EXPECT_LE(L0, injectivity_bound(4));
    for (int k = 2; k <= 3; ++k) EXPECT_EQ(injectivity_length(block_sites(m, k)), (L0 + k - 1) / k);
  }
  EXPECT_EQ(injectivity_length(block_sites(UniformMps::periodic(oracle::aklt_pauli()), 2)), 1);
}

TEST(CompareStates, RecoversGaugeAndPhase) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    auto A = oracle::random_tensor(3, 3, rng);
    Mat X = oracle::random_invertible(3, rng);
    const double theta = 0.3 + trial;
    auto B = gauge(A, X, std::polar(1.0, theta));
    GaugeRelation r = compare_states(UniformMps::periodic(A), UniformMps::periodic(B));
    ASSERT_EQ(r.verdict, Verdict::Proportional);
    EXPECT_NEAR(std::abs(*r.scale - std::polar(1.0, theta)), 0.0, 1e-8);
    ASSERT_TRUE(r.X.has_value());
    EXPECT_FALSE(r.x_in_canonical_coordinates);
    EXPECT_LT((*r.X - normalize_gauge(X)).norm(), 1e-6);
    Vec va = dense_state(UniformMps::periodic(A), 5), vb = dense_state(UniformMps::periodic(B), 5);
    EXPECT_LT((vb - std::polar(1.0, 5 * theta) * va).norm(), 1e-8 * va.norm());

    auto C = gauge(A, X);
    GaugeRelation e = compare_states(UniformMps::periodic(A), UniformMps::periodic(C));
    ASSERT_EQ(e.verdict, Verdict::Equal);
    for (int N = 3; N <= 8; ++N) {
      Vec x = dense_state(UniformMps::periodic(A), N), y = dense_state(UniformMps::periodic(C), N);
      EXPECT_LT((x - y).norm(), 1e-8 * x.norm());
    }
  }
}

TEST(CompareStates, EquivalenceRelation) {
  std::mt19937_64 rng(16);
  auto A = oracle::random_tensor(2, 3, rng);
  auto B = gauge(A, oracle::random_invertible(3, rng));
  auto C = gauge(B, oracle::random_invertible(3, rng));
  auto D = oracle::random_tensor(2, 3, rng);
  auto P = [](const std::vector<Mat>& m) { return UniformMps::periodic(m); };
  EXPECT_EQ(compare_states(P(A), P(A)).verdict, Verdict::Equal);
  EXPECT_EQ(compare_states(P(A), P(B)).verdict, Verdict::Equal);
  EXPECT_EQ(compare_states(P(B), P(A)).verdict, Verdict::Equal);
  EXPECT_EQ(compare_states(P(B), P(C)).verdict, Verdict::Equal);
  EXPECT_EQ(compare_states(P(A), P(C)).verdict, Verdict::Equal);
  EXPECT_EQ(compare_states(P(A), P(D)).verdict, Verdict::Different);
  EXPECT_EQ(compare_states(P(D), P(A)).verdict, Verdict::Different);
}

TEST(CompareStates, NonInjectiveAndDifferentBond) {
  auto g = ghz();
  std::vector<Mat> swapped{g[0], g[1]};
  Mat P(2, 2);
  P << 0, 1, 1, 0;
  swapped = gauge(g, P);
  GaugeRelation r = compare_states(UniformMps::periodic(g), UniformMps::periodic(swapped));
  EXPECT_EQ(r.verdict, Verdict::Equal);
  ASSERT_TRUE(r.X.has_value());

  Mat one = Mat::Ones(1, 1), zero = Mat::Zero(1, 1);
  EXPECT_EQ(compare_states(UniformMps::periodic(g), UniformMps::periodic({one, zero})).verdict,
            Verdict::Different);

  // GHZ padded with a nilpotent corner still equals GHZ
  std::vector<Mat> pad;
  for (const auto& m : g) {
    Mat x = Mat::Zero(3, 3);
    x.topLeftCorner(2, 2) = m;
    pad.push_back(x);
  }
  pad[0](0, 2) = 0.5;
  GaugeRelation q = compare_states(UniformMps::periodic(g), UniformMps::periodic(pad));
  EXPECT_EQ(q.verdict, Verdict::Equal);
  EXPECT_TRUE(q.x_in_canonical_coordinates);
  for (int N = 3; N <= 8; ++N)
    EXPECT_LT((oracle::amplitudes_bruteforce(g, N) - oracle::amplitudes_bruteforce(pad, N)).norm(), 1e-12);
}

TEST(CompareStates, PeriodicInputs) {
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 1) = 1;
  b(1, 0) = 1;
  GaugeRelation r = compare_states(UniformMps::periodic({a, b}), UniformMps::periodic({b, a}));
  EXPECT_EQ(r.blocking_p, 2);
  EXPECT_EQ(r.verdict, Verdict::Equal);
  EXPECT_EQ(r.z_orders, (std::vector<int>{2}));
}
