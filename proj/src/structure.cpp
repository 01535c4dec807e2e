#include "tnkit/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tnkit {

namespace {

struct Leaf {
  Mat V;                 // columns in the original bond space
  std::vector<Mat> B;
  bool nilpotent = false;
  double radius = 0;
  int period = 1;
};

struct SplitCtx {
  std::vector<Leaf> leaves;
  double margin = 16;
  double scale = 0;  // largest |A^i| of the input; blocks below eq() of it are roundoff
};

std::vector<Mat> restrict_to(const std::vector<Mat>& B, const Mat& Q) {
  std::vector<Mat> out;
  out.reserve(B.size());
  for (const auto& b : B) out.push_back(Q.adjoint() * b * Q);
  return out;
}

Mat complement(const Mat& Q) {
  const int D = int(Q.rows());
  Mat P = Mat::Identity(D, D) - Q * Q.adjoint();
  return range_basis(P, 0.5).leftCols(D - Q.cols());
}

// Span of products of length k vanishes for some k <= D.
bool generates_nilpotent(const std::vector<Mat>& B) {
  const int D = int(B[0].rows());
  double scale = 0;
  for (const auto& b : B) scale = std::max(scale, spectral_norm(b));
  if (scale == 0) return true;
  std::vector<Mat> basis;
  for (const auto& b : B) basis.push_back(b / scale);
  for (int k = 0; k < D; ++k) {
    Mat cols(D * D, Eigen::Index(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) cols.col(j) = vec_rm(basis[j]);
    SvdResult s = svd(cols);
    int r = 0;
    for (int j = 0; j < s.s.size(); ++j)
      if (s.s[j] > 1e-10) ++r;
    if (r == 0) return true;
    std::vector<Mat> next;
    for (int j = 0; j < r; ++j) {
      Mat x = unvec_rm(s.U.col(j), D, D);
      for (const auto& b : B) next.push_back(x * b / scale);
    }
    basis.swap(next);
  }
  return false;
}

// Support of a PSD matrix, recording how far its spectrum sits from the cut.
Mat psd_support(const Mat& rho, double& margin) {
  HermEig he = herm_eig(hermitize(rho));
  const double top = he.values.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int k = 0; k < he.values.size(); ++k) {
    const double x = he.values[k] / top;
    if (x > 0) margin = std::min(margin, std::abs(std::log10(x / tol::rank())));
    if (x > tol::rank()) keep.push_back(k);
  }
  if (margin < 2)
    throw Error(Errc::Ambiguous, "canonical_form: fixed-point rank within " + std::to_string(margin) +
                                     " decades of the rank cut");
  Mat out(rho.rows(), Eigen::Index(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(j) = he.vectors.col(keep[j]);
  return out;
}

Mat phase_fixed(Mat x) {
  x = hermitize(x);
  if (x.trace().real() < 0) x = -x;
  return x;
}

bool is_psd(const Mat& h) {
  HermEig he = herm_eig(h);
  const double top = he.values.cwiseAbs().maxCoeff();
  return top > 0 && he.values.minCoeff() >= -1e-9 * top;
}

void split(const std::vector<Mat>& B, const Mat& V, SplitCtx& ctx) {
  const int D = int(B[0].rows());
  const Mat E = mixed_transfer(B, B);
  const EigResult er = eig_general(E);
  const double r = std::abs(er.pairs[0].value);
  const double enorm = spectral_norm(E);

  double bnorm = 0;
  for (const auto& b : B) bnorm = std::max(bnorm, spectral_norm(b));

  Leaf leaf;
  leaf.V = V;
  leaf.B = B;
  if (enorm == 0 || bnorm <= tol::eq() * ctx.scale || (r < 1e-2 * enorm && generates_nilpotent(B))) {
    leaf.nilpotent = true;
    ctx.leaves.push_back(std::move(leaf));
    return;
  }
  leaf.radius = r;

  auto descend = [&](const Mat& S) {
    Mat C = complement(S);
    split(restrict_to(B, S), V * S, ctx);
    split(restrict_to(B, C), V * C, ctx);
  };

  std::vector<const EigenPair*> top;
  bool defective = false;
  int peripheral = 0;
  for (const auto& p : er.pairs) {
    if (std::abs(p.value) >= r * (1 - 1e-7)) ++peripheral;
    if (std::abs(p.value - r) <= 1e-7 * r) {
      top.push_back(&p);
      if (p.right.size() == 0) defective = true;
    }
  }
  if (top.empty()) throw Error(Errc::NotConverged, "canonical_form: no positive peripheral eigenvalue");

  if (D > 1) {
    const Vec vi = vec_rm(Mat::Identity(D, D));
    std::vector<Mat> fixed;  // hermitian right fixed points
    for (const auto* p : top)
      if (p->right.size()) {
        Mat x = unvec_rm(p->right, D, D);
        fixed.push_back(hermitize(x));
        fixed.push_back(hermitize(cplx(0, 1) * x));
      }

    Mat rhoR;
    if (!defective) {
      Vec vr = Vec::Zero(D * D);
      for (const auto* p : top) vr += p->right * p->left.dot(vi);
      rhoR = phase_fixed(unvec_rm(vr, D, D));
    } else {
      for (const auto& f : fixed)
        if (f.norm() > 1e-8 && is_psd(phase_fixed(f))) {
          rhoR = phase_fixed(f);
          break;
        }
      if (rhoR.size() == 0)
        throw Error(Errc::Ambiguous, "canonical_form: degenerate Jordan structure at the spectral radius");
    }

    Mat S = psd_support(rhoR, ctx.margin);
    if (S.cols() < D) return descend(S);

    if (!defective) {
      Vec vl = Vec::Zero(D * D);
      for (const auto* p : top) vl += p->left * p->right.dot(vi);
      Mat rhoL = phase_fixed(unvec_rm(vl, D, D));
      Mat L = psd_support(rhoL, ctx.margin);
      if (L.cols() < D) return descend(complement(L));
    }

    if (top.size() > 1) {
      // a second fixed point; H - t rho is PSD and singular
      const double rr = rhoR.squaredNorm();
      Mat best;
      double bn = 0;
      for (const auto& f : fixed) {
        Mat h = f - ((rhoR.adjoint() * f).trace() / rr) * rhoR;
        if (h.norm() > bn) {
          bn = h.norm();
          best = hermitize(h);
        }
      }
      if (bn < 1e-8 * rhoR.norm())
        throw Error(Errc::Ambiguous, "canonical_form: degenerate fixed points not separable");
      HermEig re = herm_eig(rhoR);
      RVec is = re.values.cwiseInverse().cwiseSqrt();
      Mat ri = re.vectors * is.cast<cplx>().asDiagonal() * re.vectors.adjoint();
      HermEig we = herm_eig(hermitize(ri * best * ri));
      Mat rho2 = best - we.values[0] * rhoR;
      Mat S2 = psd_support(rho2, ctx.margin);
      if (S2.cols() < D && S2.cols() > 0) return descend(S2);
      throw Error(Errc::Ambiguous, "canonical_form: degenerate fixed point did not split the block");
    }
  }

  leaf.period = peripheral;
  ctx.leaves.push_back(std::move(leaf));
}

CanonicalForm assemble(const UniformMps& mps, const SplitCtx& ctx) {
  CanonicalForm cf;
  cf.d = mps.d();
  cf.rank_margin = ctx.margin;
  const int D = mps.D();
  cf.gauge = Mat(D, D);
  int col = 0;
  for (const auto& lf : ctx.leaves) {
    const int k = int(lf.V.cols());
    cf.gauge.middleCols(col, k) = lf.V;
    if (lf.nilpotent) {
      cf.dropped_dim += k;
    } else {
      CanonicalBlock b;
      b.mu = std::sqrt(lf.radius);
      std::vector<Mat> a;
      for (const auto& m : lf.B) a.push_back(m / b.mu);
      b.tensor = MpsTensor::from_matrices(a);
      b.offset = col;
      cf.blocks.push_back(std::move(b));
      cf.periods.push_back(lf.period);
    }
    col += k;
  }
  return cf;
}

SplitCtx decompose(const UniformMps& mps) {
  SplitCtx ctx;
  for (const auto& a : mps.mats()) ctx.scale = std::max(ctx.scale, spectral_norm(a));
  split(mps.mats(), Mat::Identity(mps.D(), mps.D()), ctx);
  return ctx;
}

}  // namespace

CanonicalForm canonical_form(const UniformMps& mps) {
  if (mps.boundary != Boundary::Periodic)
    throw Error(Errc::InvalidInput, "canonical_form: periodic boundary required");
  SplitCtx ctx = decompose(mps);
  int p = 1;
  for (const auto& lf : ctx.leaves)
    if (!lf.nilpotent) p = std::lcm(p, lf.period);
  CanonicalForm cf = assemble(mps, ctx);
  if (cf.blocks.empty()) throw Error(Errc::InvalidInput, "canonical_form: tensor generates the zero state");
  if (p == 1) return cf;

  const int D = mps.D();
  if (p > D * D) throw Error(Errc::NotConverged, "canonical_form: period exceeds D^2");
  SplitCtx bctx = decompose(block_sites(mps, p));
  for (const auto& lf : bctx.leaves)
    if (!lf.nilpotent && lf.period != 1)
      throw Error(Errc::NotConverged, "canonical_form: blocked tensor still periodic");
  CanonicalForm out = assemble(block_sites(mps, p), bctx);
  out.blocking_p = p;
  out.periods = cf.periods;
  out.rank_margin = std::min(out.rank_margin, cf.rank_margin);
  return out;
}

NormalityReport is_normal(const UniformMps& mps) {
  NormalityReport rep;
  TransferOperator t;
  try {
    t = transfer_operator(mps, true);
  } catch (const Error& e) {
    if (e.code() == Errc::Defective) {
      rep.defective = true;
      return rep;
    }
    if (e.code() == Errc::InvalidInput) return rep;  // nilpotent
    throw;
  }
  rep.peripheral = t.peripheral;
  rep.peripheral_count = int(t.peripheral.size());
  rep.defective = t.peripheral_defective;
  auto rank_of = [](const Mat& rho) {
    RVec ev = herm_eig(rho).values;
    return numerical_rank(ev.cwiseMax(0.0), tol::rank());
  };
  rep.rank_rhoL = rank_of(t.rhoL);
  rep.rank_rhoR = rank_of(t.rhoR);
  rep.normal = transfer_is_normal(t, mps.D());
  return rep;
}

int injectivity_bound(int D) {
  int lg = 0;
  while ((1 << lg) < D) ++lg;
  return 2 * D * D * (6 + lg);
}

int injectivity_length(const UniformMps& mps) {
  TransferOperator t = transfer_operator(mps, true);
  const int D = mps.D();
  if (!transfer_is_normal(t, D)) throw Error(Errc::NonNormal, "injectivity_length: input is not normal");
  const double s = std::sqrt(std::abs(t.lambda1));
  std::vector<Mat> A = mps.mats();
  for (auto& a : A) a /= s;

  Mat cols(D * D, Eigen::Index(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i) cols.col(i) = vec_rm(A[i]);
  Mat basis = range_basis(cols, tol::rank());
  const int bound = injectivity_bound(D);
  for (int L = 1; L <= bound; ++L) {
    if (basis.cols() == D * D) return L;
    Mat next(D * D, basis.cols() * Eigen::Index(A.size()));
    int c = 0;
    for (int k = 0; k < basis.cols(); ++k) {
      Mat x = unvec_rm(basis.col(k), D, D);
      for (const auto& a : A) next.col(c++) = vec_rm(x * a);
    }
    basis = range_basis(next, tol::rank());
  }
  throw Error(Errc::NotConverged, "injectivity_length: span not full within the bound");
}

Mat normalize_gauge(const Mat& X) {
  Eigen::Index r = 0, c = 0;
  X.cwiseAbs().maxCoeff(&r, &c);
  if (X(r, c) == cplx(0)) return X;
  return X / X(r, c);
}

GaugeMatch match_normal(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  GaugeMatch m;
  if (a.size() != b.size() || a[0].rows() != b[0].rows()) return m;
  const int D = int(a[0].rows());
  const EigResult er = eig_general(mixed_transfer(b, a));
  const auto& lead = er.pairs[0];
  m.leading_modulus = std::abs(lead.value);
  if (m.leading_modulus <= 1 - 1e-3) return m;
  if (std::abs(m.leading_modulus - 1) > 1e-6 || lead.right.size() == 0)
    throw Error(Errc::Ambiguous, "equivalence test: leading mixed eigenvalue modulus " +
                                     std::to_string(m.leading_modulus) + " is neither 1 nor clearly below");
  TransferOperator ta = transfer_operator(UniformMps::periodic(a), true);
  Mat M = unvec_rm(lead.right, D, D);
  // X rho = M
  Mat X = ta.rhoR.fullPivLu().solve(M.adjoint()).adjoint();
  m.X = normalize_gauge(X);
  m.lambda = lead.value / m.leading_modulus;
  Eigen::FullPivLU<Mat> lu(m.X);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (b[i] - m.lambda * m.X * a[i] * lu.inverse()).squaredNorm();
    den += b[i].squaredNorm();
  }
  m.residual = std::sqrt(num / den);
  if (m.residual > 1e-6)
    throw Error(Errc::Ambiguous, "equivalence test: gauge residual " + std::to_string(m.residual));
  m.equivalent = true;
  return m;
}

BasisOfNormalTensors basis_of_normal_tensors(const CanonicalForm& cf) {
  BasisOfNormalTensors out;
  for (std::size_t k = 0; k < cf.blocks.size(); ++k) {
    const auto& blk = cf.blocks[k];
    const auto mats = blk.tensor.matrices();
    bool placed = false;
    for (std::size_t j = 0; j < out.members.size() && !placed; ++j) {
      GaugeMatch g = match_normal(out.members[j].matrices(), mats);
      if (!g.equivalent) continue;
      out.multiplicities[j].push_back({int(k), blk.mu, g.X, std::arg(g.lambda)});
      placed = true;
    }
    if (!placed) {
      out.members.push_back(blk.tensor);
      const int D = blk.tensor.Dl;
      out.multiplicities.push_back({{int(k), blk.mu, Mat::Identity(D, D), 0.0}});
    }
  }
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Equal: return "Equal";
    case Verdict::Proportional: return "Proportional";
    case Verdict::Different: return "Different";
  }
  return "?";
}

namespace {

CanonicalForm canonical_at(const UniformMps& mps, int p, int own_p) {
  if (p == own_p) return canonical_form(mps);
  CanonicalForm cf = canonical_form(block_sites(mps, p));
  cf.blocking_p = p * cf.blocking_p;
  return cf;
}

struct Coef {
  int member;   // member index in a's basis
  cplx c;       // mu e^{i phi}
  int block;    // canonical block index
  Mat X;        // block = e^{i phi} X member X^{-1}
};

}  // namespace

GaugeRelation compare_states(const UniformMps& a, const UniformMps& b) {
  if (a.boundary != Boundary::Periodic || b.boundary != Boundary::Periodic)
    throw Error(Errc::InvalidInput, "compare_states: periodic boundary required");
  GaugeRelation rel;
  if (a.d() != b.d()) {
    rel.note = "physical dimensions differ";
    return rel;
  }
  CanonicalForm ca = canonical_form(a);
  CanonicalForm cb = canonical_form(b);
  const int p = std::lcm(ca.blocking_p, cb.blocking_p);
  if (ca.blocking_p != p) ca = canonical_at(a, p, ca.blocking_p);
  if (cb.blocking_p != p) cb = canonical_at(b, p, cb.blocking_p);
  rel.blocking_p = p;
  rel.z_orders = ca.periods;

  BasisOfNormalTensors bnt = basis_of_normal_tensors(ca);
  std::vector<Coef> A, B;
  for (std::size_t j = 0; j < bnt.members.size(); ++j)
    for (const auto& r : bnt.multiplicities[j])
      A.push_back({int(j), r.mu * std::polar(1.0, r.phi), r.block, r.X});
  for (std::size_t k = 0; k < cb.blocks.size(); ++k) {
    const auto mats = cb.blocks[k].tensor.matrices();
    bool found = false;
    for (std::size_t j = 0; j < bnt.members.size() && !found; ++j) {
      GaugeMatch g = match_normal(bnt.members[j].matrices(), mats);
      if (!g.equivalent) continue;
      B.push_back({int(j), cb.blocks[k].mu * g.lambda, int(k), g.X});
      found = true;
    }
    if (!found) {
      rel.note = "a normal block of the second state has no counterpart";
      return rel;
    }
  }
  if (A.size() != B.size()) {
    rel.note = "block multiplicities differ";
    return rel;
  }

  // multiset of B coefficients equals lambda times that of A, member by member
  auto try_lambda = [&](cplx lam, std::vector<int>& pairing) {
    pairing.assign(B.size(), -1);
    std::vector<bool> used(A.size(), false);
    for (std::size_t k = 0; k < B.size(); ++k) {
      for (std::size_t q = 0; q < A.size(); ++q) {
        if (used[q] || A[q].member != B[k].member) continue;
        if (std::abs(lam * A[q].c - B[k].c) <= 1e-6 * std::abs(B[k].c)) {
          used[q] = true;
          pairing[k] = int(q);
          break;
        }
      }
      if (pairing[k] < 0) return false;
    }
    return true;
  };
  std::vector<cplx> cands;
  for (const auto& q : A)
    if (q.member == B[0].member) cands.push_back(B[0].c / q.c);
  std::sort(cands.begin(), cands.end(),
            [](cplx x, cplx y) { return std::abs(x - 1.0) < std::abs(y - 1.0); });
  std::vector<int> pairing;
  bool ok = false;
  cplx lam;
  for (cplx c : cands)
    if (try_lambda(c, pairing)) {
      ok = true;
      lam = c;
      break;
    }
  if (!ok) {
    rel.note = "block weights are not proportional";
    return rel;
  }
  const bool equal = std::abs(lam - 1.0) <= 1e-6;
  if (equal) lam = 1.0;
  rel.verdict = equal ? Verdict::Equal : Verdict::Proportional;
  rel.scale = lam;
  rel.phase = std::arg(lam);

  // X in canonical coordinates: block k of b from block q of a is Y_k X_q^{-1}
  int Da = 0, Db = 0;
  for (const auto& blk : ca.blocks) Da += blk.tensor.Dl;
  for (const auto& blk : cb.blocks) Db += blk.tensor.Dl;
  std::vector<int> offa, offb;
  for (int s = 0, k = 0; k < int(ca.blocks.size()); s += ca.blocks[k].tensor.Dl, ++k) offa.push_back(s);
  for (int s = 0, k = 0; k < int(cb.blocks.size()); s += cb.blocks[k].tensor.Dl, ++k) offb.push_back(s);
  Mat Z = Mat::Zero(Db, Da);
  for (std::size_t k = 0; k < B.size(); ++k) {
    const Coef& qb = B[k];
    const Coef& qa = A[pairing[k]];
    const int n = cb.blocks[qb.block].tensor.Dl;
    Z.block(offb[qb.block], offa[qa.block], n, n) = qb.X * qa.X.inverse();
  }

  const auto am = (p == 1 ? a : block_sites(a, p)).mats();
  const auto bm = (p == 1 ? b : block_sites(b, p)).mats();
  bool direct = false;
  if (ca.dropped_dim == 0 && cb.dropped_dim == 0 && Da == Db) {
    Mat X = cb.gauge * Z * ca.gauge.adjoint();
    Mat Xi = X.inverse();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < am.size(); ++i) {
      num += (bm[i] - lam * X * am[i] * Xi).squaredNorm();
      den += bm[i].squaredNorm();
    }
    if (std::sqrt(num / den) <= 1e-6) {
      rel.X = normalize_gauge(X);
      direct = true;
    }
  }
  if (!direct) {
    rel.X = Z;
    rel.x_in_canonical_coordinates = true;
    rel.note = "gauge relates the canonical forms";
  }
  if (p > 1) {
    if (!rel.note.empty()) rel.note += "; ";
    rel.note += "relation holds for the " + std::to_string(p) + "-site blocked tensors";
  }
  return rel;
}

}  // namespace tnkit
