#include "tnkit/quantum_double.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace tnkit {

Mat left_regular(const FiniteGroup& g, int h) {
  Mat m = Mat::Zero(g.order, g.order);
  for (int k = 0; k < g.order; ++k) m(g.mult(h, k), k) = 1;
  return m;
}

PepsTensor quantum_double_tensor(const FiniteGroup& g) {
  const int n = g.order;
  PepsTensor t = PepsTensor::zeros(n * n, n, n, n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r)
      for (int d = 0; d < n; ++d) {
        const int a = g.mult(g.inv[c], r), b = g.mult(g.inv[c], d);
        t.at(a * n + b, c, r, d, c) = 1;
      }
  return t;
}

PepsPatch quantum_double_patch(const FiniteGroup& g, int Lx, int Ly) {
  return PepsPatch::uniform(quantum_double_tensor(g), Lx, Ly, PepsBoundary::Torus);
}

std::vector<SectorLabel> sector_labels(const FiniteGroup& g) {
  std::vector<SectorLabel> out;
  auto classes = g.conjugacy_classes();
  std::sort(classes.begin(), classes.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  for (int c = 0; c < int(classes.size()); ++c) {
    const int h = classes[c][0];
    const auto z = g.centralizer(h);
    const CharacterTable ct = character_table(g.subgroup(z));
    for (int a = 0; a < int(ct.dims.size()); ++a) out.push_back({h, c, a, ct.dims[a], z});
  }
  return out;
}

PepsPatch quantum_double_with_strings(const FiniteGroup& g, int Lx, int Ly, int horizontal, int vertical,
                                      const StringPlacement& at) {
  if (at.row < 0 || at.row >= Ly || at.column < 0 || at.column >= Lx)
    throw Error(Errc::InvalidInput, "quantum_double: string placement outside the lattice");
  PepsPatch p = quantum_double_patch(g, Lx, Ly);
  const int above = g.mult(g.mult(horizontal, vertical), g.inv[horizontal]);
  // an upper site reading colour b through L_g sees g b: new[.., b, ..] = old[.., g b, ..]
  const Mat Lg = left_regular(g, horizontal);
  for (int x = 0; x < Lx; ++x) p.at(x, at.row) = p.at(x, at.row).leg_transformed("d", Lg);
  for (int y = 0; y < Ly; ++y) {
    const Mat Lh = left_regular(g, y <= at.row ? above : vertical);
    p.at(at.column, y) = p.at(at.column, y).leg_transformed("r", Lh);
  }
  return p;
}

SectorBasis quantum_double_sectors(const FiniteGroup& g, int Lx, int Ly, int jobs) {
  SectorBasis sb;
  sb.group = g;
  sb.Lx = Lx;
  sb.Ly = Ly;
  sb.labels = sector_labels(g);
  double phys = std::pow(double(g.order) * g.order, double(Lx) * Ly);
  if (phys > double(caps().max_tensor_entries))
    throw Error(Errc::CapExceeded, "quantum_double_sectors: dense states exceed cap");
  auto build = [&](const SectorLabel& lab) {
    const CharacterTable ct = character_table(g.subgroup(lab.centralizer));
    Vec psi;
    for (int k = 0; k < int(lab.centralizer.size()); ++k) {
      const int gk = lab.centralizer[k];
      const Vec s = peps_dense_state(quantum_double_with_strings(g, Lx, Ly, gk, lab.flux, sb.placement));
      const cplx w = std::conj(ct.value(lab.irrep, k));
      psi = psi.size() ? Vec(psi + w * s) : Vec(w * s);
    }
    const double n = psi.norm();
    if (n > tol::rank()) psi /= n;
    return psi;
  };
  const int nl = int(sb.labels.size());
  sb.states.resize(nl);
  jobs = std::max(1, std::min(jobs, nl));
  if (jobs == 1) {
    for (int a = 0; a < nl; ++a) sb.states[a] = build(sb.labels[a]);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (int a = next++; a < nl; a = next++) {
          try {
            sb.states[a] = build(sb.labels[a]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!err) err = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  const int m = int(sb.states.size());
  sb.gram = Mat(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) sb.gram(a, b) = sb.states[a].dot(sb.states[b]);
  const RVec ev = herm_eig(sb.gram).values;
  sb.min_gram_eigenvalue = ev.size() ? ev.minCoeff() : 0.0;
  for (int k = 0; k < ev.size(); ++k)
    if (ev[k] > tol::rank()) ++sb.rank;
  return sb;
}

TopologicalEntropy topological_entropy(const FiniteGroup& g, int Lx, int Ly, const Rect& region) {
  const PepsPatch p = quantum_double_patch(g, Lx, Ly);
  TopologicalEntropy te;
  const auto legs = region_legs(p, region);
  te.boundary_legs = int(legs.size());
  // t and l legs carry the site's own colour, r and d legs the neighbour's
  std::set<std::pair<int, int>> colours;
  for (const auto& l : legs) {
    int x = l.x, y = l.y;
    if (l.leg == "r") x = (x + 1) % Lx;
    if (l.leg == "d") y = (y + 1) % Ly;
    colours.insert({x, y});
  }
  te.effective_boundary = int(colours.size());
  te.entropy = von_neumann_entropy(region_density_matrix(p, region));
  te.gamma = te.effective_boundary * std::log(double(g.order)) - te.entropy;
  return te;
}

}  // namespace tnkit
