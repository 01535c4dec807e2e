#include "tnkit/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tnkit {

FiniteGroup FiniteGroup::from_table(const std::vector<std::vector<int>>& table, std::string name) {
  const int n = int(table.size());
  if (n == 0) throw Error(Errc::InvalidInput, "group: empty table");
  for (const auto& row : table) {
    if (int(row.size()) != n) throw Error(Errc::InvalidInput, "group: table is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw Error(Errc::InvalidInput, "group: entry out of range");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw Error(Errc::InvalidInput, "group: table is not associative");
  int e = -1;
  for (int a = 0; a < n && e < 0; ++a) {
    bool ok = true;
    for (int b = 0; b < n && ok; ++b) ok = table[a][b] == b && table[b][a] == b;
    if (ok) e = a;
  }
  if (e < 0) throw Error(Errc::InvalidInput, "group: no identity");
  FiniteGroup g;
  g.order = n;
  g.mul = table;
  g.identity = e;
  g.inv.assign(n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (table[a][b] == e && table[b][a] == e) g.inv[a] = b;
  for (int a = 0; a < n; ++a)
    if (g.inv[a] < 0) throw Error(Errc::InvalidInput, "group: element without inverse");
  g.name = std::move(name);
  return g;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw Error(Errc::InvalidInput, "group: cyclic order must be positive");
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return from_table(t, "Z" + std::to_string(n));
}

FiniteGroup FiniteGroup::product(const FiniteGroup& a, const FiniteGroup& b) {
  const int n = a.order * b.order;
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  // element (x, y) -> x * |B| + y
  for (int x1 = 0; x1 < a.order; ++x1)
    for (int y1 = 0; y1 < b.order; ++y1)
      for (int x2 = 0; x2 < a.order; ++x2)
        for (int y2 = 0; y2 < b.order; ++y2)
          t[x1 * b.order + y1][x2 * b.order + y2] = a.mul[x1][x2] * b.order + b.mul[y1][y2];
  return from_table(t, a.name + "x" + b.name);
}

FiniteGroup FiniteGroup::symmetric(int n) {
  if (n < 1 || n > 4) throw Error(Errc::CapExceeded, "group: symmetric group limited to n <= 4");
  std::vector<std::vector<int>> perms;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const int m = int(perms.size());
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      // (a*b)(k) = a(b(k))
      std::vector<int> c(n);
      for (int k = 0; k < n; ++k) c[k] = perms[a][perms[b][k]];
      t[a][b] = int(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  return from_table(t, "S" + std::to_string(n));
}

FiniteGroup FiniteGroup::dihedral(int n) {
  if (n < 1) throw Error(Errc::InvalidInput, "group: dihedral order must be positive");
  const int m = 2 * n;
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const int sa = a / n, ka = a % n, sb = b / n, kb = b % n;
      // s^sa r^ka s^sb r^kb = s^(sa+sb) r^(+-ka + kb)
      const int k = ((sb ? -ka : ka) + kb + 2 * n) % n;
      t[a][b] = ((sa + sb) % 2) * n + k;
    }
  return from_table(t, "D" + std::to_string(n));
}

bool FiniteGroup::abelian() const {
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < a; ++b)
      if (mul[a][b] != mul[b][a]) return false;
  return true;
}

int FiniteGroup::element_order(int g) const {
  int k = 1, x = g;
  while (x != identity) {
    x = mul[x][g];
    ++k;
  }
  return k;
}

int FiniteGroup::exponent() const {
  int e = 1;
  for (int g = 0; g < order; ++g) e = std::lcm(e, element_order(g));
  return e;
}

std::vector<std::vector<int>> FiniteGroup::conjugacy_classes() const {
  std::vector<int> seen(order, 0);
  std::vector<std::vector<int>> out;
  for (int g = 0; g < order; ++g) {
    if (seen[g]) continue;
    std::vector<int> cls;
    for (int x = 0; x < order; ++x) {
      int c = mul[mul[x][g]][inv[x]];
      if (!seen[c]) {
        seen[c] = 1;
        cls.push_back(c);
      }
    }
    std::sort(cls.begin(), cls.end());
    out.push_back(cls);
  }
  return out;
}

std::vector<int> FiniteGroup::centralizer(int h) const {
  std::vector<int> out;
  for (int x = 0; x < order; ++x)
    if (mul[x][h] == mul[h][x]) out.push_back(x);
  return out;
}

FiniteGroup FiniteGroup::subgroup(const std::vector<int>& elements) const {
  const int n = int(elements.size());
  std::vector<int> pos(order, -1);
  for (int k = 0; k < n; ++k) pos[elements[k]] = k;
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int c = pos[mul[elements[a]][elements[b]]];
      if (c < 0) throw Error(Errc::InvalidInput, "group: subset is not closed");
      t[a][b] = c;
    }
  return from_table(t, name + "_sub");
}

FiniteGroup group_by_name(const std::string& name) {
  std::vector<FiniteGroup> parts;
  std::size_t start = 0;
  while (start <= name.size()) {
    std::size_t end = name.find('x', start);
    if (end == std::string::npos) end = name.size();
    const std::string tok = name.substr(start, end - start);
    if (tok.size() < 2) throw Error(Errc::InvalidInput, "group: cannot parse '" + name + "'");
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(tok.substr(1), &used);
      if (used != tok.size() - 1) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidInput, "group: cannot parse '" + name + "'");
    }
    if (n < 1) throw Error(Errc::InvalidInput, "group: order must be positive in '" + name + "'");
    switch (tok[0]) {
      case 'z': parts.push_back(FiniteGroup::cyclic(n)); break;
      case 's': parts.push_back(FiniteGroup::symmetric(n)); break;
      case 'd': parts.push_back(FiniteGroup::dihedral(n)); break;
      default: throw Error(Errc::InvalidInput, "group: unknown family in '" + name + "'");
    }
    start = end + 1;
  }
  FiniteGroup g = parts[0];
  for (std::size_t k = 1; k < parts.size(); ++k) g = FiniteGroup::product(g, parts[k]);
  g.name = name;
  return g;
}

CharacterTable character_table(const FiniteGroup& g) {
  CharacterTable ct;
  ct.classes = g.conjugacy_classes();
  std::sort(ct.classes.begin(), ct.classes.end(),
            [&](const auto& a, const auto& b) { return a[0] < b[0]; });
  const int k = int(ct.classes.size());
  ct.class_of.assign(g.order, -1);
  for (int c = 0; c < k; ++c)
    for (int x : ct.classes[c]) ct.class_of[x] = c;
  const int ce = ct.class_of[g.identity];

  // structure constants: C_j C_l = sum_m c[j][l][m] C_m
  std::vector<Mat> M(k, Mat::Zero(k, k));
  for (int j = 0; j < k; ++j)
    for (int m = 0; m < k; ++m) {
      const int z = ct.classes[m][0];
      for (int x : ct.classes[j]) {
        const int y = g.mul[g.inv[x]][z];
        M[j](ct.class_of[y], m) += 1.0;
      }
    }
  // w_l = |C_l| chi(l) / chi(1) satisfies w_j w_l = sum_m c_jlm w_m, i.e. w is a
  // common eigenvector of the matrices (c_jlm)_{lm}.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.5, 1.5);
  Mat T = Mat::Zero(k, k);
  for (int j = 0; j < k; ++j) T += uni(rng) * M[j];
  Eigen::ComplexEigenSolver<Mat> es(T);
  std::vector<std::vector<cplx>> chis;
  for (int r = 0; r < k; ++r) {
    Vec w = es.eigenvectors().col(r);
    if (std::abs(w[ce]) < 1e-12) throw Error(Errc::NotConverged, "character_table: degenerate class algebra");
    w /= w[ce];
    double s = 0;
    for (int c = 0; c < k; ++c) s += std::norm(w[c]) / double(ct.classes[c].size());
    const double dim = std::sqrt(double(g.order) / s);
    std::vector<cplx> chi(k);
    for (int c = 0; c < k; ++c) chi[c] = dim * w[c] / double(ct.classes[c].size());
    chis.push_back(chi);
  }
  // trivial first, then by dimension
  std::sort(chis.begin(), chis.end(), [&](const auto& a, const auto& b) {
    const bool ta = std::abs(a[0] - 1.0) < 1e-8 && std::all_of(a.begin(), a.end(), [](cplx v) {
      return std::abs(v - 1.0) < 1e-8;
    });
    const bool tb = std::abs(b[0] - 1.0) < 1e-8 && std::all_of(b.begin(), b.end(), [](cplx v) {
      return std::abs(v - 1.0) < 1e-8;
    });
    if (ta != tb) return ta;
    return a[ce].real() < b[ce].real() - 0.5;
  });
  for (auto& chi : chis) {
    for (auto& v : chi) {
      if (std::abs(v.real() - std::round(v.real())) < 1e-9) v.real(std::round(v.real()));
      if (std::abs(v.imag() - std::round(v.imag())) < 1e-9) v.imag(std::round(v.imag()));
    }
    ct.dims.push_back(int(std::lround(chi[ce].real())));
  }
  ct.chi = std::move(chis);
  return ct;
}

}  // namespace tnkit
