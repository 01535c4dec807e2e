#include "tnkit/peps.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace tnkit {

namespace {

const std::vector<std::string> kLegs = {"t", "r", "d", "l"};

using Shape = std::vector<std::pair<std::string, int>>;

Shape shape_of(const DenseTensor& t) {
  Shape s;
  for (int k = 0; k < t.rank(); ++k) s.emplace_back(t.labels()[k], t.shape()[k]);
  return s;
}

// Greedy growth from `start`: always absorb the neighbour giving the smallest result.
// Returns the order and its peak intermediate size.
std::pair<std::vector<int>, double> plan_from(const std::vector<Shape>& nodes, int start) {
  Shape blob = nodes[start];
  std::vector<bool> used(nodes.size(), false);
  used[start] = true;
  std::vector<int> order = {start};
  double peak = 0;
  for (std::size_t step = 1; step < nodes.size(); ++step) {
    int best = -1;
    bool best_shared = false;
    double best_size = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (used[j]) continue;
      bool sh = false;
      double size = 1;
      for (const auto& [l, d] : blob) {
        bool common = false;
        for (const auto& [m, e] : nodes[j]) common |= (m == l);
        if (common) sh = true;
        else size *= d;
      }
      for (const auto& [m, e] : nodes[j]) {
        bool common = false;
        for (const auto& [l, d] : blob) common |= (m == l);
        if (!common) size *= e;
      }
      if (best < 0 || (sh && !best_shared) || (sh == best_shared && size < best_size)) {
        best = int(j);
        best_shared = sh;
        best_size = size;
      }
    }
    Shape next;
    for (const auto& [l, d] : blob) {
      bool common = false;
      for (const auto& [m, e] : nodes[best]) common |= (m == l);
      if (!common) next.emplace_back(l, d);
    }
    for (const auto& [m, e] : nodes[best]) {
      bool common = false;
      for (const auto& [l, d] : blob) common |= (m == l);
      if (!common) next.emplace_back(m, e);
    }
    blob = std::move(next);
    used[best] = true;
    order.push_back(best);
    peak = std::max(peak, best_size);
  }
  return {order, peak};
}

// Exact search over blob orders for small networks: minimises the largest
// intermediate, then the summed sizes. Sizes are kept as logs.
std::pair<std::vector<int>, double> plan_exact(const std::vector<Shape>& nodes) {
  const int n = int(nodes.size());
  std::map<std::string, std::vector<int>> owners;
  for (int v = 0; v < n; ++v)
    for (const auto& [l, d] : nodes[v]) owners[l].push_back(v);
  // per node: (log dim, other endpoint or -1)
  std::vector<std::vector<std::pair<double, int>>> legs(n);
  for (int v = 0; v < n; ++v)
    for (const auto& [l, d] : nodes[v]) {
      int other = -1;
      for (int u : owners[l])
        if (u != v) other = u;
      legs[v].emplace_back(std::log(double(d)), other);
    }
  const std::size_t full = (std::size_t(1) << n);
  std::vector<double> logsize(full, 0), peak(full, 0), total(full, 0);
  std::vector<int> last(full, -1);
  for (std::size_t S = 1; S < full; ++S) {
    const int v = __builtin_ctzll(S);
    const std::size_t rest = S & (S - 1);
    double ls = logsize[rest];
    for (const auto& [ld, u] : legs[v]) ls += (u >= 0 && (rest >> u & 1)) ? -ld : ld;
    logsize[S] = ls;
    if (rest == 0) {
      peak[S] = -1e300;
      last[S] = v;
      continue;
    }
    peak[S] = 1e300;
    for (std::size_t T = S; T; T &= T - 1) {
      const int w = __builtin_ctzll(T);
      const std::size_t prev = S & ~(std::size_t(1) << w);
      const double pk = std::max(peak[prev], ls);
      const double tot = total[prev] + std::exp(ls);
      if (pk < peak[S] - 1e-9 || (pk < peak[S] + 1e-9 && tot < total[S])) {
        peak[S] = pk;
        total[S] = tot;
        last[S] = w;
      }
    }
  }
  std::vector<int> order;
  for (std::size_t S = full - 1; S; S &= ~(std::size_t(1) << last[S])) order.push_back(last[S]);
  std::reverse(order.begin(), order.end());
  return {order, std::exp(peak[full - 1])};
}

DenseTensor contract_network(std::vector<DenseTensor> nodes) {
  if (nodes.empty()) return DenseTensor({}, {}, {cplx(1)});
  std::vector<Shape> shapes;
  for (const auto& n : nodes) shapes.push_back(shape_of(n));
  std::pair<std::vector<int>, double> best;
  if (nodes.size() <= 18) {
    best = plan_exact(shapes);
  } else {
    for (int s = 0; s < int(nodes.size()); ++s) {
      auto cand = plan_from(shapes, s);
      if (s == 0 || cand.second < best.second) best = std::move(cand);
    }
  }
  if (best.second > double(caps().max_tensor_entries))
    throw Error(Errc::CapExceeded, "peps: intermediate contraction exceeds tensor-size cap");
  DenseTensor blob = std::move(nodes[best.first[0]]);
  for (std::size_t k = 1; k < best.first.size(); ++k) blob = contract_shared(blob, nodes[best.first[k]]);
  return blob;
}

// Flat data in the given label order; leftover labels must be dangling (extent 1).
std::vector<cplx> ordered_data(const DenseTensor& t, const std::vector<std::string>& order) {
  std::vector<std::string> full = order;
  for (int k = 0; k < t.rank(); ++k) {
    const auto& l = t.labels()[k];
    if (std::find(order.begin(), order.end(), l) != order.end()) continue;
    if (t.shape()[k] != 1) throw Error(Errc::InvalidInput, "peps: unexpected open leg " + l);
    full.push_back(l);
  }
  return t.permuted(full).data();
}

struct Neighbor {
  bool exists = false;
  int x = 0, y = 0;
};

Neighbor neighbor(const PepsPatch& p, int x, int y, int leg) {
  static const int dx[4] = {0, 1, 0, -1};
  static const int dy[4] = {-1, 0, 1, 0};
  int nx = x + dx[leg], ny = y + dy[leg];
  if (p.boundary == PepsBoundary::Torus) {
    nx = (nx + p.Lx) % p.Lx;
    ny = (ny + p.Ly) % p.Ly;
    return {true, nx, ny};
  }
  if (nx < 0 || ny < 0 || nx >= p.Lx || ny >= p.Ly) return {false, 0, 0};
  return {true, nx, ny};
}

// h{x}_{y}: bond right of (x, y); v{x}_{y}: bond below (x, y).
std::string bond_label(const PepsPatch& p, int x, int y, int leg) {
  Neighbor n = neighbor(p, x, y, leg);
  if (!n.exists) return "dangle" + kLegs[leg] + std::to_string(x) + "_" + std::to_string(y);
  switch (leg) {
    case 0: return "v" + std::to_string(n.x) + "_" + std::to_string(n.y);
    case 1: return "h" + std::to_string(x) + "_" + std::to_string(y);
    case 2: return "v" + std::to_string(x) + "_" + std::to_string(y);
    default: return "h" + std::to_string(n.x) + "_" + std::to_string(n.y);
  }
}

std::string phys_label(const PepsPatch& p, int x, int y) { return "p" + std::to_string(y * p.Lx + x); }

DenseTensor ket(const PepsPatch& p, int x, int y) {
  std::vector<std::pair<std::string, std::string>> m = {{"p", phys_label(p, x, y)}};
  for (int k = 0; k < 4; ++k) m.emplace_back(kLegs[k], bond_label(p, x, y, k));
  return p.at(x, y).data.relabeled(m);
}

DenseTensor double_layer(const PepsPatch& p, int x, int y, const Mat* op) {
  const PepsTensor& A = p.at(x, y);
  std::vector<std::pair<std::string, std::string>> mk, mb;
  for (int k = 0; k < 4; ++k) {
    const std::string b = bond_label(p, x, y, k);
    mk.emplace_back(kLegs[k], b);
    mb.emplace_back(kLegs[k], b + "*");
  }
  DenseTensor k = (op ? A.physical_transformed(*op) : A).data.relabeled(mk);
  DenseTensor b = A.data.conj().relabeled(mb);
  return contract(k, b, {{"p", "p"}});
}

std::vector<std::pair<int, int>> sites_in(const PepsPatch& p, const Rect& r, bool inside) {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < p.Ly; ++y)
    for (int x = 0; x < p.Lx; ++x)
      if (r.contains(x, y) == inside) out.emplace_back(x, y);
  return out;
}

void check_rect(const PepsPatch& p, const Rect& r) {
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > p.Lx || r.y1 > p.Ly || r.x0 >= r.x1 || r.y0 >= r.y1)
    throw Error(Errc::InvalidInput, "peps: region outside the patch or empty");
}

}  // namespace

PepsTensor PepsTensor::zeros(int d, int Dt, int Dr, int Dd, int Dl) {
  PepsTensor t;
  t.d = d;
  t.Dt = Dt;
  t.Dr = Dr;
  t.Dd = Dd;
  t.Dl = Dl;
  t.data = DenseTensor({"p", "t", "r", "d", "l"}, {d, Dt, Dr, Dd, Dl});
  return t;
}

PepsTensor PepsTensor::from_data(int d, int Dt, int Dr, int Dd, int Dl, std::vector<cplx> data) {
  if (std::int64_t(data.size()) != std::int64_t(d) * Dt * Dr * Dd * Dl)
    throw Error(Errc::DimensionMismatch, "PepsTensor: data size does not match dimensions");
  PepsTensor t = zeros(d, Dt, Dr, Dd, Dl);
  t.data.data() = std::move(data);
  return t;
}

cplx& PepsTensor::at(int i, int t, int r, int dn, int l) { return data.at({i, t, r, dn, l}); }
cplx PepsTensor::at(int i, int t, int r, int dn, int l) const { return data.at({i, t, r, dn, l}); }

PepsTensor PepsTensor::leg_transformed(const std::string& leg, const Mat& m) const {
  if (std::find(kLegs.begin(), kLegs.end(), leg) == kLegs.end())
    throw Error(Errc::InvalidInput, "PepsTensor: unknown leg " + leg);
  if (m.rows() != data.extent(leg)) throw Error(Errc::DimensionMismatch, "PepsTensor: leg map rows");
  DenseTensor mt = DenseTensor::from_matrix(m, {"old"}, {int(m.rows())}, {"new"}, {int(m.cols())});
  DenseTensor out = contract(data, mt, {{leg, "old"}}).relabeled({{"new", leg}}).permuted({"p", "t", "r", "d", "l"});
  PepsTensor t;
  t.d = d;
  t.Dt = out.extent("t");
  t.Dr = out.extent("r");
  t.Dd = out.extent("d");
  t.Dl = out.extent("l");
  t.data = std::move(out);
  return t;
}

PepsTensor PepsTensor::physical_transformed(const Mat& op) const {
  if (op.cols() != d) throw Error(Errc::DimensionMismatch, "PepsTensor: operator dimension");
  DenseTensor ot = DenseTensor::from_matrix(op, {"new"}, {int(op.rows())}, {"old"}, {int(op.cols())});
  DenseTensor out = contract(ot, data, {{"old", "p"}}).relabeled({{"new", "p"}});
  PepsTensor t = *this;
  t.d = int(op.rows());
  t.data = std::move(out);
  return t;
}

PepsPatch PepsPatch::uniform(const PepsTensor& t, int Lx, int Ly, PepsBoundary b) {
  PepsPatch p;
  p.Lx = Lx;
  p.Ly = Ly;
  p.boundary = b;
  p.tensors.assign(std::size_t(Lx) * Ly, t);
  p.validate();
  return p;
}

PepsPatch PepsPatch::open_with_boundary(const PepsTensor& t, int Lx, int Ly, const Vec& top, const Vec& right,
                                        const Vec& down, const Vec& left) {
  PepsPatch p;
  p.Lx = Lx;
  p.Ly = Ly;
  p.boundary = PepsBoundary::Open;
  for (int y = 0; y < Ly; ++y)
    for (int x = 0; x < Lx; ++x) {
      PepsTensor s = t;
      if (y == 0) s = s.leg_transformed("t", Mat(top));
      if (x == Lx - 1) s = s.leg_transformed("r", Mat(right));
      if (y == Ly - 1) s = s.leg_transformed("d", Mat(down));
      if (x == 0) s = s.leg_transformed("l", Mat(left));
      p.tensors.push_back(std::move(s));
    }
  p.validate();
  return p;
}

void PepsPatch::validate() const {
  if (Lx < 1 || Ly < 1) throw Error(Errc::InvalidInput, "PepsPatch: empty lattice");
  if (boundary == PepsBoundary::Torus && (Lx < 2 || Ly < 2))
    throw Error(Errc::InvalidInput, "PepsPatch: torus needs Lx, Ly >= 2");
  if (tensors.size() != std::size_t(Lx) * Ly) throw Error(Errc::DimensionMismatch, "PepsPatch: tensor count");
  for (int y = 0; y < Ly; ++y)
    for (int x = 0; x < Lx; ++x) {
      const PepsTensor& a = at(x, y);
      const std::vector<int> want = {a.d, a.Dt, a.Dr, a.Dd, a.Dl};
      if (a.data.shape() != want) throw Error(Errc::DimensionMismatch, "PepsPatch: tensor shape fields");
      const int dims[4] = {a.Dt, a.Dr, a.Dd, a.Dl};
      for (int k = 0; k < 4; ++k) {
        Neighbor n = neighbor(*this, x, y, k);
        if (!n.exists) {
          if (dims[k] != 1) throw Error(Errc::DimensionMismatch, "PepsPatch: open boundary leg must have dimension 1");
          continue;
        }
        const PepsTensor& b = at(n.x, n.y);
        const int opp[4] = {b.Dd, b.Dl, b.Dt, b.Dr};
        if (opp[k] != dims[k]) throw Error(Errc::DimensionMismatch, "PepsPatch: neighbouring bond dimensions differ");
      }
    }
}

ContractionResult peps_contract(const PepsPatch& p, bool amplitudes) {
  p.validate();
  ContractionResult res;
  std::vector<DenseTensor> nodes;
  // column-major order: the greedy sweep then follows column transfers
  for (int x = 0; x < p.Lx; ++x)
    for (int y = 0; y < p.Ly; ++y) nodes.push_back(double_layer(p, x, y, nullptr));
  res.norm2 = ordered_data(contract_network(std::move(nodes)), {})[0].real();
  if (amplitudes) res.amplitudes = peps_dense_state(p);
  return res;
}

Vec peps_dense_state(const PepsPatch& p) {
  p.validate();
  double total = 1;
  for (const auto& t : p.tensors) total *= t.d;
  if (total > double(caps().max_tensor_entries))
    throw Error(Errc::CapExceeded, "peps_dense_state: physical dimension exceeds cap");
  std::vector<DenseTensor> nodes;
  std::vector<std::string> order;
  for (int x = 0; x < p.Lx; ++x)
    for (int y = 0; y < p.Ly; ++y) nodes.push_back(ket(p, x, y));
  for (int y = 0; y < p.Ly; ++y)
    for (int x = 0; x < p.Lx; ++x) order.push_back(phys_label(p, x, y));
  std::vector<cplx> d = ordered_data(contract_network(std::move(nodes)), order);
  return Eigen::Map<Vec>(d.data(), Eigen::Index(d.size()));
}

cplx peps_expectation(const PepsPatch& p, const std::vector<PlacedOp>& ops) {
  p.validate();
  std::vector<Mat> site_op(p.tensors.size());
  std::vector<bool> has(p.tensors.size(), false);
  for (const auto& o : ops) {
    if (o.x < 0 || o.y < 0 || o.x >= p.Lx || o.y >= p.Ly)
      throw Error(Errc::InvalidInput, "peps_expectation: operator placed outside the patch");
    const std::size_t s = std::size_t(o.y) * p.Lx + o.x;
    if (o.op.rows() != p.tensors[s].d || o.op.cols() != p.tensors[s].d)
      throw Error(Errc::DimensionMismatch, "peps_expectation: operator dimension");
    site_op[s] = has[s] ? Mat(site_op[s] * o.op) : o.op;
    has[s] = true;
  }
  std::vector<DenseTensor> num, den;
  for (int x = 0; x < p.Lx; ++x)
    for (int y = 0; y < p.Ly; ++y) {
      const std::size_t s = std::size_t(y) * p.Lx + x;
      num.push_back(double_layer(p, x, y, has[s] ? &site_op[s] : nullptr));
      den.push_back(double_layer(p, x, y, nullptr));
    }
  const cplx n = ordered_data(contract_network(std::move(den)), {})[0];
  if (std::abs(n) == 0) throw Error(Errc::InvalidInput, "peps_expectation: state has zero norm");
  return ordered_data(contract_network(std::move(num)), {})[0] / n;
}

std::vector<BoundaryLeg> region_legs(const PepsPatch& p, const Rect& r) {
  check_rect(p, r);
  std::vector<BoundaryLeg> out;
  for (auto [x, y] : sites_in(p, r, true)) {
    const PepsTensor& a = p.at(x, y);
    const int dims[4] = {a.Dt, a.Dr, a.Dd, a.Dl};
    for (int k = 0; k < 4; ++k) {
      Neighbor n = neighbor(p, x, y, k);
      if (!n.exists || r.contains(n.x, n.y)) continue;
      out.push_back({x, y, kLegs[k], dims[k]});
    }
  }
  return out;
}

namespace {

std::vector<std::string> leg_labels(const PepsPatch& p, const std::vector<BoundaryLeg>& legs) {
  std::vector<std::string> out;
  for (const auto& l : legs) {
    const int k = int(std::find(kLegs.begin(), kLegs.end(), l.leg) - kLegs.begin());
    out.push_back(bond_label(p, l.x, l.y, k));
  }
  return out;
}

// T(beta, beta') = sum_j B_{j beta} conj(B_{j beta'}), i.e. conj(B^dagger B).
Mat complement_t(const PepsPatch& p, const Rect& r) {
  const auto legs = region_legs(p, r);
  const auto labels = leg_labels(p, legs);
  std::vector<std::string> bra;
  for (const auto& l : labels) bra.push_back(l + "*");
  std::vector<DenseTensor> nodes;
  for (auto [x, y] : sites_in(p, r, false)) nodes.push_back(double_layer(p, x, y, nullptr));
  long dim = 1;
  for (const auto& l : legs) dim *= l.dim;
  if (nodes.empty()) return Mat::Ones(1, 1);
  std::vector<std::string> order = labels;
  order.insert(order.end(), bra.begin(), bra.end());
  std::vector<cplx> d = ordered_data(contract_network(std::move(nodes)), order);
  return Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(d.data(), dim, dim);
}

}  // namespace

Mat region_map(const PepsPatch& p, const Rect& r) {
  p.validate();
  const auto legs = region_legs(p, r);
  std::vector<std::string> order;
  std::vector<DenseTensor> nodes;
  long rows = 1, cols = 1;
  for (auto [x, y] : sites_in(p, r, true)) {
    nodes.push_back(ket(p, x, y));
    order.push_back(phys_label(p, x, y));
    rows *= p.at(x, y).d;
  }
  for (const auto& l : legs) cols *= l.dim;
  if (double(rows) * double(cols) > double(caps().max_tensor_entries))
    throw Error(Errc::CapExceeded, "region_map: region map exceeds tensor-size cap");
  const auto labels = leg_labels(p, legs);
  order.insert(order.end(), labels.begin(), labels.end());
  std::vector<cplx> d = ordered_data(contract_network(std::move(nodes)), order);
  return Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(d.data(), rows, cols);
}

Mat complement_gram(const PepsPatch& p, const Rect& r) {
  p.validate();
  return complement_t(p, r).transpose();
}

InjectivityReport peps_region_injectivity(const PepsPatch& p, const Rect& r) {
  const Mat A = region_map(p, r);
  InjectivityReport rep;
  rep.boundary_dim = long(A.cols());
  rep.rank = numerical_rank(svd(A).s, tol::rank());
  rep.injective = rep.rank == rep.boundary_dim;
  return rep;
}

Mat region_density_matrix(const PepsPatch& p, const Rect& r) {
  const Mat A = region_map(p, r);
  const Mat T = complement_t(p, r);
  Mat rho = hermitize(A * T * A.adjoint());
  const double tr = rho.trace().real();
  if (!(tr > 0)) throw Error(Errc::InvalidInput, "region_density_matrix: state has zero norm");
  return rho / tr;
}

double von_neumann_entropy(const Mat& rho) {
  const RVec ev = herm_eig(rho).values;
  double s = 0;
  for (int k = 0; k < ev.size(); ++k)
    if (ev[k] > 1e-14) s -= ev[k] * std::log(ev[k]);
  return s;
}

BoundaryState region_boundary_state(const PepsPatch& p, const Rect& r) {
  BoundaryState bs;
  bs.region = r;
  bs.legs = region_legs(p, r);
  const Mat A = region_map(p, r);
  const Mat T = complement_t(p, r);
  const SvdResult sv = svd(A);
  const int k = numerical_rank(sv.s, tol::rank());
  const Mat V = sv.V.leftCols(k);
  const Mat sigA = V * sv.s.head(k).cast<cplx>().asDiagonal() * V.adjoint();
  bs.isometry = sv.U.leftCols(k) * V.adjoint();
  bs.support = V;
  Mat sigma = hermitize(sigA * T * sigA);
  const double tr = sigma.trace().real();
  if (!(tr > 0)) throw Error(Errc::InvalidInput, "region_boundary_state: state has zero norm");
  bs.sigma = sigma / tr;
  const RVec ev = herm_eig(bs.sigma).values;
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  for (int j = int(ev.size()) - 1; j >= 0; --j) {
    const double v = std::max(ev[j], 0.0);
    bs.spectrum.push_back(v);
    if (v > tol::rank() * top) {
      ++bs.rank;
      bs.entanglement_hamiltonian_spectrum.push_back(-std::log(v));
      bs.entropy -= v * std::log(v);
    }
  }
  return bs;
}

}  // namespace tnkit
