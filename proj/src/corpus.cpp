#include "tnkit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "tnkit/quantum_double.hpp"
#include "tnkit/structure.hpp"

namespace tnkit {

using nlohmann::json;

const char* corpus_kind_name(CorpusKind k) {
  switch (k) {
    case CorpusKind::Mps: return "mps";
    case CorpusKind::Peps: return "peps";
    case CorpusKind::Mpo: return "mpo";
  }
  return "?";
}

namespace {

const double kS2 = std::sqrt(2.0);

Mat pauli(char c) {
  Mat m(2, 2);
  if (c == 'x') m << 0, 1, 1, 0;
  if (c == 'y') m << 0, cplx(0, -1), cplx(0, 1), 0;
  if (c == 'z') m << 1, 0, 0, -1;
  return m;
}

Mat mat2(cplx a, cplx b, cplx c, cplx d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

// singlet map on the virtual legs: the spin-1/2 part of Y pairs neighbours into singlets
Mat singlet_y(int D) {
  Mat y = Mat::Identity(D, D);
  y.topLeftCorner(2, 2) = mat2(0, -1, 1, 0);
  return y;
}

// A^i_{t r d l} = sum P^i_{t r d0 l0} Y_{d0 d} Y_{l0 l}
PepsTensor with_singlets(const PepsTensor& p) {
  const Mat y = singlet_y(p.Dd);
  return p.leg_transformed("d", y).leg_transformed("l", y);
}

const std::vector<CatalogItem> kCatalog = {
    {"ghz", CorpusKind::Mps, "GHZ state, A^i = |i)(i|", {{"d", 2}}},
    {"w", CorpusKind::Mps, "W state, open boundary with D = 2", {{"N", 5}}},
    {"cluster1d", CorpusKind::Mps, "1D cluster state", json::object()},
    {"aklt1d", CorpusKind::Mps, "AKLT chain; basis pauli (default) or sz", {{"basis", "pauli"}}},
    {"majumdar_ghosh", CorpusKind::Mps, "Majumdar-Ghosh dimer state, D = 3", json::object()},
    {"product", CorpusKind::Mps, "product state |0>", {{"d", 2}}},
    {"ghz2d", CorpusKind::Peps, "2D GHZ, D = d", {{"d", 2}}},
    {"cluster2d", CorpusKind::Peps, "2D cluster state", json::object()},
    {"aklt2d", CorpusKind::Peps, "2D AKLT, spin-2 projection of singlets", json::object()},
    {"rvb", CorpusKind::Peps, "nearest-neighbour RVB, D = 3", json::object()},
    {"ising_peps", CorpusKind::Peps, "classical Ising Gibbs PEPS", {{"beta", 0.4406}}},
    {"toric_code_dual", CorpusKind::Peps, "quantum double, plaquette-colour form", {{"group", "z2"}}},
    {"toric_code_primal", CorpusKind::Peps, "Z2 toric code, Gauss law on blocked plaquettes", json::object()},
    {"czx_state", CorpusKind::Peps, "CZX state, GHZ on every plaquette", json::object()},
    {"czx_mpu", CorpusKind::Mpo, "CZX edge MPU", json::object()},
    {"shift_mpu", CorpusKind::Mpo, "shift MPU; direction left (default) or right", {{"d", 2}, {"direction", "left"}}},
};

int get_int(const json& p, const char* k, int lo, int hi) {
  if (!p.at(k).is_number_integer()) throw Error(Errc::InvalidInput, std::string("corpus: ") + k + " must be an integer");
  const int v = p.at(k).get<int>();
  if (v < lo || v > hi)
    throw Error(Errc::InvalidInput, std::string("corpus: ") + k + " out of range [" + std::to_string(lo) + ", " +
                                        std::to_string(hi) + "]");
  return v;
}

ExpectedProperty prop(std::string name, json value, std::string tag, std::string anchor, double tol = 0) {
  return {std::move(name), std::move(value), std::move(tag), std::move(anchor), tol};
}

Mat total_spin_squared(const std::vector<Mat>& S, int N) {
  const int d = int(S[0].rows());
  long dim = 1;
  for (int k = 0; k < N; ++k) dim *= d;
  Mat tot2 = Mat::Zero(dim, dim);
  for (const Mat& s : S) {
    Mat tot = Mat::Zero(dim, dim);
    for (int k = 0; k < N; ++k) {
      Mat op = Mat::Ones(1, 1);
      for (int j = 0; j < N; ++j) op = kron(op, j == k ? s : Mat(Mat::Identity(d, d)));
      tot += op;
    }
    tot2 += tot * tot;
  }
  return tot2;
}

// spin-2 matrices in the Dicke basis k = number of down spins
std::vector<Mat> spin2() {
  Mat dicke = Mat::Zero(16, 5);
  for (int c = 0; c < 16; ++c) dicke(c, __builtin_popcount(c)) = 1;
  for (int k = 0; k < 5; ++k) dicke.col(k).normalize();
  std::vector<Mat> out;
  for (char a : {'x', 'y', 'z'}) {
    Mat s = Mat::Zero(16, 16);
    for (int q = 0; q < 4; ++q) {
      Mat op = Mat::Ones(1, 1);
      for (int j = 0; j < 4; ++j) op = kron(op, j == q ? Mat(pauli(a) / 2.0) : Mat(Mat::Identity(2, 2)));
      s += op;
    }
    out.push_back(dicke.adjoint() * s * dicke);
  }
  return out;
}

}  // namespace

const std::vector<CatalogItem>& corpus_catalog() { return kCatalog; }

CorpusEntry make(const std::string& name, const json& params) {
  auto it = std::find_if(kCatalog.begin(), kCatalog.end(), [&](const CatalogItem& c) { return c.name == name; });
  if (it == kCatalog.end()) throw Error(Errc::InvalidInput, "corpus: unknown entry '" + name + "'");
  if (!params.is_object()) throw Error(Errc::InvalidInput, "corpus: parameters must be an object");
  json p = it->defaults;
  for (const auto& [k, v] : params.items()) {
    if (!p.contains(k)) throw Error(Errc::InvalidInput, "corpus: entry '" + name + "' has no parameter '" + k + "'");
    p[k] = v;
  }
  CorpusEntry e;
  e.name = name;
  e.kind = it->kind;
  e.parameters = p;
  const std::string lit = "literature", der = "derived", triv = "trivial";

  if (name == "ghz") {
    const int d = get_int(p, "d", 1, 16);
    std::vector<Mat> A;
    for (int i = 0; i < d; ++i) {
      Mat m = Mat::Zero(d, d);
      m(i, i) = 1;
      A.push_back(m);
    }
    e.mps = UniformMps::periodic(A);
    e.expected = {prop("canonical_blocks", d, lit, "GHZ tensor delta_{i=a=b}"),
                  prop("normal", d == 1, der, "d orthogonal 1x1 blocks"),
                  prop("rgfp_residual", 0.0, der, "transfer operator is a projector", 1e-12),
                  prop("dense_nonzero_N4", d, triv, "GHZ definition")};
  } else if (name == "w") {
    const int N = get_int(p, "N", 2, 16);
    e.mps = UniformMps::open({Mat::Identity(2, 2), mat2(0, 1, 0, 0)}, Vec::Unit(2, 0), Vec::Unit(2, 1));
    e.expected = {prop("refuses_periodic", true, lit, "W state: periodic bond dimension grows with N"),
                  prop("dense_matches_w", true, triv, "one excitation on N sites")};
  } else if (name == "cluster1d") {
    e.mps = UniformMps::periodic({mat2(1, 1, 0, 0) / kS2, mat2(0, 0, 1, -1) / kS2});
    e.expected = {prop("normal", true, der, "injective after two sites"),
                  prop("injectivity_length", 2, der, "rank of the two-site map"),
                  prop("spt_blocked_label", json::array({1}), der, "X on each sublattice anticommutes virtually"),
                  prop("dense_matches_cz", true, der, "CZ on nearest neighbours of |+>^N")};
  } else if (name == "aklt1d") {
    const std::string basis = p.at("basis").get<std::string>();
    if (basis == "pauli") {
      e.mps = UniformMps::periodic({pauli('x') / kS2, pauli('y') / kS2, pauli('z') / kS2});
    } else if (basis == "sz") {
      const Mat Y = mat2(0, -1, 1, 0);
      e.mps = UniformMps::periodic({mat2(1, 0, 0, 0) * Y, mat2(0, 1, 1, 0) * Y / kS2, mat2(0, 0, 0, 1) * Y});
    } else {
      throw Error(Errc::InvalidInput, "corpus: aklt1d basis must be 'pauli' or 'sz'");
    }
    const double third = -1.0 / 3.0;
    e.expected = {prop("transfer_spectrum", json::array({1.0, third, third, third}), der, "Pauli transfer channel", 1e-10),
                  prop("injectivity_length", 2, lit, "AKLT injective after blocking two sites"),
                  prop("entanglement_spectrum", json::array({0.5, 0.5}), der, "maximally mixed fixed point", 1e-10),
                  prop("correlation_length", 1.0 / std::log(3.0), der, "-1/ln|lambda_2|", 1e-10),
                  prop("time_reversal_index", -1, der, "Haldane phase"),
                  prop("spt_label", json::array({1}), der, "Pauli matrices anticommute")};
  } else if (name == "majumdar_ghosh") {
    // 0: no open singlet; 1: singlet opened with up; 2: opened with down
    Mat up = Mat::Zero(3, 3), dn = Mat::Zero(3, 3);
    up(0, 1) = 1;
    up(2, 0) = 1;
    dn(0, 2) = -1;
    dn(1, 0) = 1;
    e.mps = UniformMps::periodic({up, dn});
    e.expected = {prop("canonical_blocks", 2, der, "two dimerisations"),
                  prop("blocking_p", 2, der, "period-two transfer channel"),
                  prop("dense_matches_dimers", true, lit, "superposition of the two singlet coverings")};
  } else if (name == "product") {
    const int d = get_int(p, "d", 1, 16);
    std::vector<Mat> A(d, Mat::Zero(1, 1));
    A[0](0, 0) = 1;
    e.mps = UniformMps::periodic(A);
    e.expected = {prop("injectivity_length", 1, triv, "D = 1"), prop("time_reversal_index", 1, triv, "real product state"),
                  prop("canonical_blocks", 1, triv, "D = 1")};
  } else if (name == "ghz2d") {
    const int d = get_int(p, "d", 1, 4);
    PepsTensor t = PepsTensor::zeros(d, d, d, d, d);
    for (int i = 0; i < d; ++i) t.at(i, i, i, i, i) = 1;
    e.peps = t;
    e.expected = {prop("dense_nonzero_2x2", d, lit, "2D GHZ with D = d"),
                  prop("zz_correlation", 1.0, triv, "GHZ definition", 1e-12)};
  } else if (name == "cluster2d") {
    PepsTensor t = PepsTensor::zeros(2, 2, 2, 2, 2);
    for (int i = 0; i < 2; ++i)
      for (int d = 0; d < 2; ++d)
        for (int l = 0; l < 2; ++l) {
          const double sd = (i == 1 && d == 1) ? -1 : 1, sl = (i == 1 && l == 1) ? -1 : 1;
          t.at(i, i, i, d, l) = sd * sl / 2.0;
        }
    e.peps = t;
    e.expected = {prop("dense_matches_cz_3x3", true, der, "CZ on every bond of |+>^N")};
  } else if (name == "aklt2d") {
    const double binom4[5] = {1, 4, 6, 4, 1};
    PepsTensor s = PepsTensor::zeros(5, 2, 2, 2, 2);
    for (int c = 0; c < 16; ++c) {
      const int k = __builtin_popcount(c);
      s.at(k, (c >> 3) & 1, (c >> 2) & 1, (c >> 1) & 1, c & 1) = 1.0 / std::sqrt(binom4[k]);
    }
    e.peps = with_singlets(s);
    e.expected = {prop("total_spin_2x2", 0.0, der, "SU(2) invariant singlets", 1e-10),
                  prop("norm_positive_2x2", true, triv, "nonzero state")};
  } else if (name == "rvb") {
    PepsTensor s = PepsTensor::zeros(2, 3, 3, 3, 3);
    for (int i = 0; i < 2; ++i)
      for (int leg = 0; leg < 4; ++leg) {
        int v[4] = {2, 2, 2, 2};
        v[leg] = i;
        s.at(i, v[0], v[1], v[2], v[3]) = 1;
      }
    e.peps = with_singlets(s);
    e.expected = {prop("total_spin_4x2", 0.0, der, "SU(2) invariant singlets", 1e-10),
                  prop("norm_positive_4x2", true, triv, "nonzero state")};
  } else if (name == "ising_peps") {
    if (!p.at("beta").is_number()) throw Error(Errc::InvalidInput, "corpus: beta must be a number");
    const double beta = p.at("beta").get<double>();
    if (!(beta >= 0) || !std::isfinite(beta)) throw Error(Errc::InvalidInput, "corpus: beta must be finite and >= 0");
    // M_ij = exp(-beta h(i,j)/2), h = -s_i s_j
    auto M = [&](int i, int j) { return std::exp(beta * (i == j ? 1.0 : -1.0) / 2); };
    PepsTensor t = PepsTensor::zeros(2, 2, 2, 2, 2);
    for (int i = 0; i < 2; ++i)
      for (int d = 0; d < 2; ++d)
        for (int l = 0; l < 2; ++l) t.at(i, i, i, d, l) = M(i, d) * M(i, l);
    e.peps = t;
    e.expected = {prop("zz_gibbs_3x3", true, der, "exhaustive classical Gibbs sum")};
  } else if (name == "toric_code_dual") {
    const FiniteGroup g = group_by_name(p.at("group").get<std::string>());
    if (g.order > 4) throw Error(Errc::CapExceeded, "corpus: quantum double limited to |G| <= 4");
    e.peps = quantum_double_tensor(g);
    int labels = 0;
    for (const auto& c : g.conjugacy_classes()) {
      const FiniteGroup z = g.subgroup(g.centralizer(c[0]));
      labels += int(z.conjugacy_classes().size());
    }
    e.expected = {prop("virtual_invariance", true, der, "L_g on all four legs"),
                  prop("sector_labels", labels, der, "conjugacy class and centralizer irrep")};
    if (g.order == 2) e.expected.push_back(prop("sector_rank_3x3", 4, lit, "four toric code sectors"));
  } else if (name == "toric_code_primal") {
    // edges N, E, S, W of a blocked plaquette; legs at the NE, SE, SW, NW corners
    PepsTensor t = PepsTensor::zeros(16, 2, 2, 2, 2);
    for (int c = 0; c < 16; ++c) {
      const int n = (c >> 3) & 1, ea = (c >> 2) & 1, s = (c >> 1) & 1, w = c & 1;
      t.at(c, n ^ ea, ea ^ s, s ^ w, w ^ n) = 1;
    }
    e.peps = t;
    e.expected = {prop("single_site_rank", 8, der, "even-parity virtual subspace"),
                  prop("gauss_law_2x2", true, der, "closed loop configurations, equal weights")};
  } else if (name == "czx_state") {
    // qubits i (top-left), j (top-right), k (bottom-right), l (bottom-left);
    // vertical legs pair (left, right) qubits, horizontal legs pair (upper, lower)
    PepsTensor t = PepsTensor::zeros(16, 4, 4, 4, 4);
    for (int c = 0; c < 16; ++c) {
      const int i = (c >> 3) & 1, j = (c >> 2) & 1, k = (c >> 1) & 1, l = c & 1;
      t.at(c, 2 * i + j, 2 * j + k, 2 * l + k, 2 * i + l) = 1;
    }
    e.peps = t;
    e.expected = {prop("dense_nonzero_2x2", 16, der, "one GHZ per plaquette"),
                  prop("plaquette_ghz_2x2", true, lit, "GHZ on every plaquette")};
  } else if (name == "czx_mpu") {
    std::vector<Mat> m(4, Mat::Zero(2, 2));
    m[1] = mat2(1, 1, 0, 0);
    m[2] = mat2(0, 0, 1, -1);
    e.mpo = MpoTensor::from_matrices(2, 2, m);
    e.expected = {prop("unitary", true, lit, "CZX is a product of CZ and X layers"),
                  prop("index", 0.0, der, "no transport", 1e-10),
                  prop("square_is_minus_identity_N2to4", true, der, "(-1)^N from the CZ phases")};
  } else if (name == "shift_mpu") {
    const int d = get_int(p, "d", 2, 8);
    const std::string dir = p.at("direction").get<std::string>();
    if (dir != "left" && dir != "right") throw Error(Errc::InvalidInput, "corpus: direction must be left or right");
    e.mpo = dir == "left" ? mpo_shift_left(d) : mpo_shift_right(d);
    const double idx = (dir == "left" ? 1.0 : -1.0) * std::log2(double(d));
    e.expected = {prop("unitary", true, triv, "permutation of sites"),
                  prop("index", idx, dir == "left" && d == 2 ? lit : der, "left-moving shift has index +log2 d", 1e-10)};
  }
  return e;
}

UniformMps corpus_periodic_mps(const CorpusEntry& e) {
  if (!e.mps) throw Error(Errc::InvalidInput, "corpus: entry '" + e.name + "' is not an MPS");
  if (e.mps->boundary == Boundary::Open) {
    if (e.name == "w")
      throw Error(Errc::Unsupported,
                  "corpus: the W state has no translation-invariant periodic MPS of fixed bond dimension; "
                  "the bond dimension must grow with the system size");
    throw Error(Errc::Unsupported, "corpus: entry '" + e.name + "' is defined with open boundary only");
  }
  return *e.mps;
}

std::optional<OnSiteSymmetry> corpus_symmetry(const CorpusEntry& e) {
  const FiniteGroup z2z2 = FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2));
  if (e.name == "aklt1d") {
    auto rot = [](int k) {
      Mat m = -Mat::Identity(3, 3);
      m(k, k) = 1;
      return m;
    };
    OnSiteSymmetry s;
    s.group = z2z2;
    if (e.parameters.at("basis") == "pauli") {
      s.U = {Mat::Identity(3, 3), rot(0), rot(2), rot(1)};
    } else {
      // pi rotations in the (+1, 0, -1) basis
      Mat rx = Mat::Zero(3, 3), rz = Mat::Zero(3, 3);
      rx(0, 2) = rx(2, 0) = rx(1, 1) = -1;
      rz.diagonal() << -1, 1, -1;
      s.U = {Mat::Identity(3, 3), rx, rz, rz * rx};
    }
    return s;
  }
  if (e.name == "cluster1d") {
    OnSiteSymmetry s;
    s.group = z2z2;
    const Mat I = Mat::Identity(2, 2), X = pauli('x');
    s.U = {kron(I, I), kron(I, X), kron(X, I), kron(X, X)};
    return s;
  }
  return std::nullopt;
}

namespace {

json complex_list_real(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(z.real());
  return a;
}

Vec w_oracle(int N) {
  Vec v = Vec::Zero(1L << N);
  for (int k = 0; k < N; ++k) v[1L << k] = 1;
  return v;
}

std::vector<int> bits(long c, int N) {
  std::vector<int> b(N);
  for (int k = 0; k < N; ++k) b[k] = int((c >> (N - 1 - k)) & 1);
  return b;
}

json actual(const CorpusEntry& e, const std::string& name) {
  if (e.mps) {
    const UniformMps& m = *e.mps;
    if (name == "canonical_blocks") return int(canonical_form(m).blocks.size());
    if (name == "blocking_p") return canonical_form(m).blocking_p;
    if (name == "normal") return is_normal(m).normal;
    if (name == "injectivity_length") return injectivity_length(m);
    if (name == "rgfp_residual") return rgfp_check(m).residual;
    if (name == "dense_nonzero_N4") {
      const Vec v = dense_state(m, 4);
      return int((v.array().abs() > 1e-12).count());
    }
    if (name == "refuses_periodic") {
      try {
        corpus_periodic_mps(e);
        return false;
      } catch (const Error& err) {
        return err.code() == Errc::Unsupported;
      }
    }
    if (name == "dense_matches_w") {
      const int N = e.parameters.at("N").get<int>();
      return (dense_state(m, N) - w_oracle(N)).norm() <= 1e-12;
    }
    if (name == "dense_matches_cz") {
      for (int N = 3; N <= 6; ++N) {
        const Vec v = dense_state(m, N);
        Vec want(1L << N);
        for (long c = 0; c < (1L << N); ++c) {
          const auto b = bits(c, N);
          int s = 0;
          for (int k = 0; k < N; ++k) s += b[k] * b[(k + 1) % N];
          want[c] = ((s & 1) ? -1.0 : 1.0) * std::pow(2.0, -N / 2.0);
        }
        if ((v - want).norm() > 1e-12) return false;
      }
      return true;
    }
    if (name == "transfer_spectrum") {
      const auto t = transfer_operator(m, true);
      std::vector<cplx> sp = t.spectrum;
      for (const auto& z : sp)
        if (std::abs(z.imag()) > 1e-10) return json(nullptr);
      return complex_list_real(sp);
    }
    if (name == "entanglement_spectrum") {
      json a = json::array();
      for (double x : entanglement_spectrum(m).schmidt_squares) a.push_back(x);
      return a;
    }
    if (name == "correlation_length") return correlation_length(m).correlation_length;
    if (name == "time_reversal_index") {
      Mat u = Mat::Identity(m.d(), m.d());
      // K alone in the Cartesian basis, exp(i pi S_y) K in the S_z basis
      if (e.name == "aklt1d" && e.parameters.at("basis") == "sz") {
        u = Mat::Zero(3, 3);
        u(0, 2) = u(2, 0) = 1;
        u(1, 1) = -1;
      }
      return time_reversal_index(m, u);
    }
    if (name == "spt_label") return cocycle_class(detect_symmetry_action(m, *corpus_symmetry(e))).label;
    if (name == "spt_blocked_label")
      return cocycle_class(detect_symmetry_action(block_sites(m, 2), *corpus_symmetry(e))).label;
    if (name == "dense_matches_dimers") {
      for (int N : {4, 6, 8}) {
        // singlet (|01> - |10>) on pairs (0,1),(2,3).. plus the shifted covering
        Vec want = Vec::Zero(1L << N);
        for (int shift = 0; shift < 2; ++shift)
          for (long c = 0; c < (1L << N); ++c) {
            const auto b = bits(c, N);
            double amp = 1;
            for (int k = shift; k < N + shift; k += 2) {
              const int a = b[k % N], bb = b[(k + 1) % N];
              amp *= (a == bb) ? 0.0 : (a == 0 ? 1.0 : -1.0);
            }
            want[c] += amp;
          }
        if ((dense_state(m, N) - want).norm() > 1e-12) return false;
      }
      return true;
    }
  }
  if (e.peps) {
    const PepsTensor& t = *e.peps;
    auto torus = [&](int Lx, int Ly) { return PepsPatch::uniform(t, Lx, Ly, PepsBoundary::Torus); };
    if (name == "dense_nonzero_2x2") {
      const Vec v = peps_dense_state(torus(2, 2));
      return int((v.array().abs() > 1e-12).count());
    }
    if (name == "zz_correlation") {
      Mat Z = Mat::Zero(t.d, t.d);
      for (int i = 0; i < t.d; ++i) Z(i, i) = std::polar(1.0, 2 * M_PI * i / t.d);
      const cplx v = peps_expectation(torus(3, 3), {{0, 0, Z}, {2, 1, Mat(Z.adjoint())}});
      return std::abs(v);
    }
    if (name == "dense_matches_cz_3x3") {
      const Vec v = peps_dense_state(torus(3, 3));
      for (long c = 0; c < 512; ++c) {
        const auto b = bits(c, 9);
        int s = 0;
        for (int y = 0; y < 3; ++y)
          for (int x = 0; x < 3; ++x) s += b[y * 3 + x] * (b[y * 3 + (x + 1) % 3] + b[((y + 1) % 3) * 3 + x]);
        if (std::abs(v[c] - ((s & 1) ? -1.0 : 1.0) / 512.0) > 1e-12) return false;
      }
      return true;
    }
    if (name == "total_spin_2x2" || name == "total_spin_4x2") {
      const bool big = name == "total_spin_4x2";
      const Vec v = peps_dense_state(torus(big ? 4 : 2, 2));
      std::vector<Mat> S;
      if (t.d == 5) S = spin2();
      else
        for (char a : {'x', 'y', 'z'}) S.push_back(pauli(a) / 2.0);
      const Mat S2 = total_spin_squared(S, big ? 8 : 4);
      return (S2 * v).norm() / v.norm();
    }
    if (name == "norm_positive_2x2") return peps_contract(torus(2, 2)).norm2 > 1e-12;
    if (name == "norm_positive_4x2") return peps_contract(torus(4, 2)).norm2 > 1e-12;
    if (name == "zz_gibbs_3x3") {
      const double beta = e.parameters.at("beta").get<double>();
      double Zs = 0, corr = 0;
      for (long c = 0; c < 512; ++c) {
        const auto b = bits(c, 9);
        auto s = [&](int x, int y) { return b[(y % 3) * 3 + x % 3] ? -1.0 : 1.0; };
        double E = 0;
        for (int y = 0; y < 3; ++y)
          for (int x = 0; x < 3; ++x) E -= s(x, y) * (s(x + 1, y) + s(x, y + 1));
        const double w = std::exp(-beta * E);
        Zs += w;
        corr += w * s(0, 0) * s(1, 1);
      }
      const cplx v = peps_expectation(torus(3, 3), {{0, 0, pauli('z')}, {1, 1, pauli('z')}});
      return std::abs(v - corr / Zs) <= 1e-10;
    }
    if (name == "virtual_invariance") {
      const FiniteGroup g = group_by_name(e.parameters.at("group").get<std::string>());
      for (int h = 0; h < g.order; ++h) {
        const Mat L = left_regular(g, h);
        const PepsTensor u = t.leg_transformed("t", L).leg_transformed("r", L).leg_transformed("d", L).leg_transformed("l", L);
        for (std::size_t k = 0; k < t.data.data().size(); ++k)
          if (std::abs(u.data.data()[k] - t.data.data()[k]) > 1e-14) return false;
      }
      return true;
    }
    if (name == "sector_labels")
      return int(sector_labels(group_by_name(e.parameters.at("group").get<std::string>())).size());
    if (name == "sector_rank_3x3")
      return quantum_double_sectors(group_by_name(e.parameters.at("group").get<std::string>()), 3, 3).rank;
    if (name == "single_site_rank") return numerical_rank(svd(t.data.as_matrix({"p"}, {"t", "r", "d", "l"})).s, tol::rank());
    if (name == "gauss_law_2x2") {
      // every bond joins two edges of each neighbour; their parities must agree
      const Vec v = peps_dense_state(torus(2, 2));
      auto edge = [](long cfg, int site, int e) { return int((cfg >> (4 * (3 - site) + (3 - e))) & 1); };
      for (long c = 0; c < (1L << 16); ++c) {
        bool ok = true;
        for (int y = 0; y < 2 && ok; ++y)
          for (int x = 0; x < 2 && ok; ++x) {
            const int s = y * 2 + x, right = y * 2 + (x + 1) % 2, down = ((y + 1) % 2) * 2 + x;
            // r leg: E xor S here, W xor N at the right neighbour; d leg: S xor W here, N xor E below
            ok &= (edge(c, s, 1) ^ edge(c, s, 2)) == (edge(c, right, 3) ^ edge(c, right, 0));
            ok &= (edge(c, s, 2) ^ edge(c, s, 3)) == (edge(c, down, 0) ^ edge(c, down, 1));
          }
        if (std::abs(v[c] - (ok ? 1.0 : 0.0)) > 1e-12) return false;
      }
      return true;
    }
    if (name == "plaquette_ghz_2x2") {
      const Vec v = peps_dense_state(torus(2, 2));
      auto q = [](long cfg, int site, int k) { return int((cfg >> (4 * (3 - site) + (3 - k))) & 1); };
      for (long c = 0; c < (1L << 16); ++c) {
        bool ok = true;
        for (int y = 0; y < 2; ++y)
          for (int x = 0; x < 2; ++x) {
            // plaquette at the bottom-right corner of (x, y)
            const int a = y * 2 + x, b = y * 2 + (x + 1) % 2, cc = ((y + 1) % 2) * 2 + x, dd = ((y + 1) % 2) * 2 + (x + 1) % 2;
            const int v0 = q(c, a, 2);
            ok &= q(c, b, 3) == v0 && q(c, cc, 1) == v0 && q(c, dd, 0) == v0;
          }
        if (std::abs(v[c] - (ok ? 1.0 : 0.0)) > 1e-12) return false;
      }
      return true;
    }
  }
  if (e.mpo) {
    const MpoTensor& o = *e.mpo;
    if (name == "unitary") return is_unitary_mpu(o).unitary;
    if (name == "index") {
      const auto r = mpu_index(o);
      return r.index ? json(*r.index) : json(nullptr);
    }
    if (name == "square_is_minus_identity_N2to4") {
      const MpoTensor sq = mpo_compose(o, o);
      for (int N = 2; N <= 4; ++N) {
        const Mat m = mpo_dense(sq, N);
        const double sign = (N % 2) ? -1.0 : 1.0;
        if ((m - sign * Mat::Identity(m.rows(), m.cols())).norm() > 1e-12) return false;
      }
      return true;
    }
  }
  throw Error(Errc::InvalidInput, "corpus: no check for property '" + name + "' of '" + e.name + "'");
}

bool matches(const json& want, const json& got, double tol) {
  if (got.is_null()) return false;
  if (want.is_array()) {
    if (!got.is_array() || got.size() != want.size()) return false;
    std::vector<double> a, b;
    for (const auto& x : want) a.push_back(x.get<double>());
    for (const auto& x : got) b.push_back(x.get<double>());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t k = 0; k < a.size(); ++k)
      if (std::abs(a[k] - b[k]) > std::max(tol, 0.0)) return false;
    return true;
  }
  if (tol > 0 && want.is_number() && got.is_number()) return std::abs(want.get<double>() - got.get<double>()) <= tol;
  return want == got;
}

}  // namespace

CorpusReport validate_entry(const CorpusEntry& e) {
  CorpusReport rep;
  for (const auto& p : e.expected) {
    CorpusCheck c;
    c.entry = e.name;
    c.property = p.name;
    c.expected = p.value;
    try {
      c.actual = actual(e, p.name);
      c.passed = matches(p.value, c.actual, p.tolerance);
    } catch (const Error& err) {
      c.passed = false;
      c.detail = std::string(errc_name(err.code())) + ": " + err.what();
    }
    rep.all_passed &= c.passed;
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

CorpusReport validate_corpus() {
  CorpusReport rep;
  for (const auto& item : kCatalog) {
    std::vector<json> variants = {json::object()};
    if (item.name == "aklt1d") variants.push_back({{"basis", "sz"}});
    if (item.name == "ghz") variants.push_back({{"d", 3}});
    if (item.name == "toric_code_dual") variants.push_back({{"group", "z3"}});
    if (item.name == "shift_mpu") variants.push_back({{"direction", "right"}});
    for (const auto& v : variants) {
      CorpusReport r = validate_entry(make(item.name, v));
      rep.all_passed &= r.all_passed;
      for (auto& c : r.checks) rep.checks.push_back(std::move(c));
    }
  }
  return rep;
}

}  // namespace tnkit
