#include "tnkit/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "tnkit/structure.hpp"

namespace tnkit {

namespace {

constexpr double kTwoPi = 2 * M_PI;

double wrap(double x) {
  x = std::fmod(x, kTwoPi);
  if (x < 0) x += kTwoPi;
  if (x >= kTwoPi - 1e-12) x = 0;
  return x;
}

std::vector<Mat> act(const Mat& u, const std::vector<Mat>& A, bool conjugate_input) {
  std::vector<Mat> out(u.rows(), Mat::Zero(A[0].rows(), A[0].cols()));
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < u.cols(); ++j)
      if (u(i, j) != cplx(0)) out[i] += u(i, j) * (conjugate_input ? Mat(A[j].conjugate()) : A[j]);
  return out;
}

Mat mat_pow(Mat m, int k) {
  Mat r = Mat::Identity(m.rows(), m.cols());
  while (k > 0) {
    if (k & 1) r = r * m;
    m = m * m;
    k >>= 1;
  }
  return r;
}

TransferOperator normal_transfer(const UniformMps& mps, const char* who) {
  if (mps.boundary != Boundary::Periodic) throw Error(Errc::InvalidInput, std::string(who) + ": periodic boundary required");
  TransferOperator t = transfer_operator(mps, true);
  if (!transfer_is_normal(t, mps.D())) throw Error(Errc::NonNormal, std::string(who) + ": input is not normal");
  return t;
}

// b = lambda Y a Y^{-1}, Y in the input gauge
GaugeRelation relate(const std::vector<Mat>& a, const std::vector<Mat>& b, const char* who) {
  GaugeRelation rel = compare_states(UniformMps::periodic(a), UniformMps::periodic(b));
  if (rel.verdict == Verdict::Different)
    throw Error(Errc::SymmetryViolated, std::string(who) + ": transformed tensor generates a different state");
  if (!rel.X || rel.x_in_canonical_coordinates || rel.blocking_p != 1)
    throw Error(Errc::Ambiguous, std::string(who) + ": gauge could not be extracted in the input gauge");
  return rel;
}

struct CohomologyData {
  std::vector<int> orders;                 // d_j > 1
  std::vector<std::vector<double>> vinv;   // matching rows of V^{-1}
};

std::mutex g_cache_mutex;
std::map<std::vector<std::vector<int>>, CohomologyData> g_cache;

const CohomologyData& cohomology_data(const FiniteGroup& g) {
  if (g.order > 16) throw Error(Errc::CapExceeded, "cohomology: group order above 16");
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_cache.find(g.mul);
  if (it != g_cache.end()) return it->second;
  const int n = g.order;
  // coboundary C^2 -> C^3 of the bar complex with trivial coefficients
  IntegerMatrix d2(n * n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const int row = (a * n + b) * n + c;
        d2(row, b * n + c) += 1;
        d2(row, g.mul[a][b] * n + c) -= 1;
        d2(row, a * n + g.mul[b][c]) += 1;
        d2(row, a * n + b) -= 1;
      }
  SmithResult s = smith_normal_form(d2, false);
  CohomologyData data;
  for (std::size_t j = 0; j < s.diagonal.size(); ++j) {
    BigInt dj = abs(s.diagonal[j]);
    if (dj > 1) {
      data.orders.push_back(int(dj));
      std::vector<double> row(n * n);
      for (int k = 0; k < n * n; ++k) row[k] = s.Vinv(int(j), k).convert_to<double>();
      data.vinv.push_back(std::move(row));
    }
  }
  return g_cache.emplace(g.mul, std::move(data)).first->second;
}

}  // namespace

double snap_phase(double x, int n, bool* snapped) {
  x = wrap(x);
  const double step = kTwoPi / n;
  const double k = std::round(x / step);
  const bool ok = std::abs(x - k * step) <= 1e-6;
  if (snapped) *snapped = ok;
  return ok ? wrap(k * step) : x;
}

void OnSiteSymmetry::validate() const {
  if (int(U.size()) != group.order) throw Error(Errc::InvalidInput, "symmetry: one matrix per group element required");
  const int d = int(U[0].rows());
  const double tol = tol::rank() * d;
  for (const auto& u : U) {
    if (u.rows() != d || u.cols() != d) throw Error(Errc::DimensionMismatch, "symmetry: matrices must be d x d");
    if ((u.adjoint() * u - Mat::Identity(d, d)).norm() > tol)
      throw Error(Errc::NotUnitary, "symmetry: matrix is not unitary");
  }
  for (int a = 0; a < group.order; ++a)
    for (int b = 0; b < group.order; ++b)
      if ((U[a] * U[b] - U[group.mul[a][b]]).norm() > tol)
        throw Error(Errc::SymmetryViolated, "symmetry: matrices do not represent the group");
}

ProjectiveData projective_data_from(const FiniteGroup& g, std::vector<Mat> X, std::vector<double> phi) {
  ProjectiveData pd;
  pd.group = g;
  const int n = g.order;
  const int grid = 2 * n;
  bool snapped = true;
  for (auto& p : phi) {
    bool ok;
    p = snap_phase(p, grid, &ok);
    snapped = snapped && ok;
  }
  pd.omega.assign(n, std::vector<double>(n, 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Mat& xab = X[g.mul[a][b]];
      Mat prod = X[a] * X[b];
      const int D = int(xab.rows());
      cplx c = (xab.fullPivLu().solve(prod)).trace() / double(D);
      if ((prod - c * xab).norm() > 1e-6 * prod.norm())
        throw Error(Errc::SymmetryViolated, "virtual matrices do not form a projective representation");
      bool ok;
      pd.omega[a][b] = snap_phase(std::arg(c), grid, &ok);
      snapped = snapped && ok;
    }
  if (!snapped) pd.warnings.push_back("phases not on the 2pi/(2|G|) grid; reported raw");
  pd.X = std::move(X);
  pd.phi = std::move(phi);
  return pd;
}

ProjectiveData detect_symmetry_action(const UniformMps& mps, const OnSiteSymmetry& sym) {
  sym.validate();
  if (sym.U[0].rows() != mps.d()) throw Error(Errc::DimensionMismatch, "detect_symmetry_action: d mismatch");
  try {
    normal_transfer(mps, "detect_symmetry_action");
  } catch (const Error& e) {
    if (e.code() == Errc::NonNormal) throw Error(Errc::Ambiguous, "detect_symmetry_action: input is not normal");
    throw;
  }
  const auto A = mps.mats();
  const int D = mps.D();
  std::vector<Mat> X;
  std::vector<double> phi;
  for (int g = 0; g < sym.group.order; ++g) {
    GaugeRelation rel = relate(A, act(sym.U[g], A, false), "detect_symmetry_action");
    // U.A = lambda Y A Y^{-1} = e^{i phi} X^{-1} A X
    Mat x = normalize_gauge(rel.X->inverse());
    X.push_back(x / std::pow(std::abs(x.determinant()), 1.0 / D));
    phi.push_back(std::arg(*rel.scale));
  }
  return projective_data_from(sym.group, std::move(X), std::move(phi));
}

std::vector<int> cohomology_group(const FiniteGroup& g) { return cohomology_data(g).orders; }

double cocycle_defect(const FiniteGroup& g, const std::vector<std::vector<double>>& omega) {
  const int n = g.order;
  if (int(omega.size()) != n) throw Error(Errc::DimensionMismatch, "cocycle: table size");
  double worst = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = omega[b][c] - omega[g.mul[a][b]][c] + omega[a][g.mul[b][c]] - omega[a][b];
        v = wrap(v);
        worst = std::max(worst, std::min(v, kTwoPi - v));
      }
  return worst;
}

std::vector<int> cocycle_label(const FiniteGroup& g, const std::vector<std::vector<double>>& omega) {
  const CohomologyData& cd = cohomology_data(g);
  const int n = g.order;
  std::vector<int> label;
  for (std::size_t j = 0; j < cd.orders.size(); ++j) {
    double x = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) x += cd.vinv[j][a * n + b] * omega[a][b] / kTwoPi;
    x *= cd.orders[j];
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-5)
      throw Error(Errc::CocycleViolated, "cocycle_label: phase table is not a 2-cocycle");
    long v = long(r) % cd.orders[j];
    if (v < 0) v += cd.orders[j];
    label.push_back(int(v));
  }
  return label;
}

CohomologyClass cocycle_class(const ProjectiveData& pd) {
  const FiniteGroup& g = pd.group;
  CohomologyClass cc;
  cc.group_structure = cohomology_group(g);
  cc.label = cocycle_label(g, pd.omega);
  cc.trivial = std::all_of(cc.label.begin(), cc.label.end(), [](int v) { return v == 0; });
  const int e = g.exponent();
  bool commutators_trivial = true;
  for (int a = 0; a < g.order; ++a)
    for (int b = a + 1; b < g.order; ++b) {
      if (g.mul[a][b] != g.mul[b][a]) continue;
      const double ang = pd.omega[a][b] - pd.omega[b][a];
      bool ok;
      const double s = snap_phase(ang, e, &ok);
      if (!ok) throw Error(Errc::Ambiguous, "cocycle_class: commutator phase is not a root of unity");
      cplx z = std::polar(1.0, s);
      if (std::abs(z - 1.0) > 1e-9) commutators_trivial = false;
      else z = 1.0;
      cc.invariants.push_back({a, b, z});
    }
  if (g.abelian() && commutators_trivial != cc.trivial)
    cc.warnings.push_back("commutator phases disagree with the cohomology label");
  for (double p : pd.phi) {
    cc.h1_unit.push_back(wrap(p) / kTwoPi);
    cc.h1_blocked.push_back(wrap(2 * p) / kTwoPi);
  }
  cc.warnings.insert(cc.warnings.end(), pd.warnings.begin(), pd.warnings.end());
  return cc;
}

int time_reversal_index(const UniformMps& mps, const Mat& u) {
  normal_transfer(mps, "time_reversal_index");
  if (u.rows() != mps.d() || u.cols() != mps.d())
    throw Error(Errc::DimensionMismatch, "time_reversal_index: u must be d x d");
  const auto A = mps.mats();
  GaugeRelation rel = relate(A, act(u, A, true), "time_reversal_index");
  const Mat& Y = *rel.X;
  const int D = int(Y.rows());
  Mat M = Y * Y.conjugate();
  const cplx c = M.trace() / double(D);
  if ((M - c * Mat::Identity(D, D)).norm() > 1e-6 * M.norm() || std::abs(c.imag()) > 1e-6 * std::abs(c))
    throw Error(Errc::SymmetryViolated, "time_reversal_index: X conj(X) is not proportional to the identity");
  return c.real() > 0 ? 1 : -1;
}

cplx string_order(const UniformMps& mps, const OnSiteSymmetry& sym, int g, const Mat& R,
                  std::optional<int> L) {
  sym.validate();
  if (g < 0 || g >= sym.group.order) throw Error(Errc::InvalidInput, "string_order: element out of range");
  if (L && *L < 0) throw Error(Errc::InvalidInput, "string_order: negative length");
  TransferOperator t = normal_transfer(mps, "string_order");
  const int d = mps.d();
  if (R.rows() != d || R.cols() != d) throw Error(Errc::DimensionMismatch, "string_order: R must be d x d");

  bool nontrivial = false;
  const double rn = R.squaredNorm();
  for (const auto& u : sym.U) {
    Mat m = u * R * u.adjoint();
    cplx chi = (R.adjoint() * m).trace() / rn;
    if ((m - chi * R).norm() > 1e-8 * std::sqrt(rn))
      throw Error(Errc::NotCovariant, "string_order: R does not transform as a one-dimensional irrep");
    if (std::abs(chi - 1.0) > 1e-8) nontrivial = true;
  }
  if (!nontrivial) throw Error(Errc::NotCovariant, "string_order: R transforms trivially");

  std::vector<Mat> As = mps.mats();
  const double s = std::sqrt(std::abs(t.lambda1));
  for (auto& a : As) a /= s;
  const Mat ER = dressed_transfer(As, R), EU = dressed_transfer(As, sym.U[g]);
  const Vec l = vec_rm(t.rhoL), r = vec_rm(t.rhoR);
  const cplx norm = l.dot(r);
  if (L) return l.dot(ER * mat_pow(EU, *L) * ER * r) / norm;

  EigResult er = eig_general(EU);
  cplx total = 0;
  for (const auto& p : er.pairs) {
    if (std::abs(p.value) < 1 - 1e-8) break;
    if (p.right.size() == 0) throw Error(Errc::Defective, "string_order: defective peripheral spectrum");
    const cplx c = l.dot(ER * p.right) * p.left.dot(ER * r) / norm;
    if (std::abs(p.value - 1.0) <= 1e-8) {
      total += c;
    } else if (std::abs(c) > 1e-12) {
      throw Error(Errc::NotConverged, "string_order: value oscillates with L, no limit");
    }
  }
  return total;
}

SptFixedPoint build_spt_fixed_point(const FiniteGroup& g, const std::vector<std::vector<double>>& omega,
                                    const std::vector<double>& phi) {
  const int n = g.order;
  if (int(phi.size()) != n) throw Error(Errc::DimensionMismatch, "build_spt_fixed_point: phi size");
  if (cocycle_defect(g, omega) > 1e-9)
    throw Error(Errc::CocycleViolated, "build_spt_fixed_point: omega violates the cocycle identity");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double v = wrap(phi[g.mul[a][b]] - phi[a] - phi[b]);
      if (std::min(v, kTwoPi - v) > 1e-9)
        throw Error(Errc::CocycleViolated, "build_spt_fixed_point: phi is not a character");
    }
  const int d = n * n;
  std::vector<Mat> A(d, Mat::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int r = 0; r < n; ++r) A[l * n + r](l, r) = 1.0 / std::sqrt(double(n));

  SptFixedPoint out;
  out.mps = UniformMps::periodic(A);
  out.sym.group = g;
  for (int k = 0; k < n; ++k) {
    Mat x = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a) x(a, g.mul[a][k]) = std::polar(1.0, omega[a][k]);
    out.X.push_back(x);
    Mat u = Mat::Zero(d, d);
    for (int l = 0; l < n; ++l)
      for (int r = 0; r < n; ++r)
        u(l * n + r, g.mul[l][k] * n + g.mul[r][k]) = std::polar(1.0, phi[k] - omega[l][k] + omega[r][k]);
    out.sym.U.push_back(u);
  }
  return out;
}

RgfpReport rgfp_check(const UniformMps& mps) {
  if (mps.boundary != Boundary::Periodic) throw Error(Errc::InvalidInput, "rgfp_check: periodic boundary required");
  RgfpReport rep;
  const auto A0 = mps.mats();
  const Mat E0 = mixed_transfer(A0, A0);
  const cplx l1 = eig_general(E0).pairs[0].value;
  if (std::abs(l1) == 0) throw Error(Errc::InvalidInput, "rgfp_check: nilpotent tensor");
  const Mat E = E0 / l1;
  rep.residual = spectral_norm(E * E - E);
  rep.fixed_point = rep.residual <= tol::eq();

  const int d = mps.d(), D = mps.D();
  std::vector<Mat> A = A0;
  for (auto& a : A) a /= std::sqrt(std::abs(l1));
  Mat M1(d, D * D), M2(d * d, D * D);
  for (int i = 0; i < d; ++i) {
    M1.row(i) = vec_rm(A[i]).transpose();
    for (int j = 0; j < d; ++j) M2.row(i * d + j) = vec_rm(A[i] * A[j]).transpose();
  }
  const Mat G1 = M1.adjoint() * M1, G2 = M2.adjoint() * M2;
  rep.isometry_residual = (G2 - G1).norm() / G1.norm();
  rep.isometry = rep.isometry_residual <= tol::rank();
  return rep;
}

}  // namespace tnkit
