#include "tnkit/io.hpp"

#include <cstdio>

namespace tnkit::io {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::InvalidInput, "json: " + msg); }

const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) bad(what + ": missing \"" + key + "\"");
  return j.at(key);
}

int dim(const json& dims, const char* key, const std::string& what) {
  const json& v = field(dims, key, what + " dims");
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > (1 << 20))
    bad(what + ": dims." + key + " must be a positive integer");
  return v.get<int>();
}

void expect_kind(const json& j, const char* kind) {
  const json& k = field(j, "kind", kind);
  if (!k.is_string() || k.get<std::string>() != kind) bad(std::string("expected kind \"") + kind + "\"");
}

Vec vector_from(const json& j, std::size_t n, const std::string& what) {
  const auto v = parse_complex_array(j, n, what);
  Vec out(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) out[Eigen::Index(k)] = v[k];
  return out;
}

json vector_to(const Vec& v) { return complex_array(std::vector<cplx>(v.data(), v.data() + v.size())); }

}  // namespace

json complex_array(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(json::array({z.real(), z.imag()}));
  return a;
}

std::vector<cplx> parse_complex_array(const json& j, std::size_t expected, const std::string& what) {
  if (!j.is_array()) bad(what + ": data must be an array of [re, im] pairs");
  if (j.size() != expected)
    bad(what + ": data has " + std::to_string(j.size()) + " entries, expected " + std::to_string(expected));
  std::vector<cplx> out;
  out.reserve(expected);
  for (const auto& z : j) {
    if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
      bad(what + ": every entry must be [re, im]");
    out.emplace_back(z[0].get<double>(), z[1].get<double>());
  }
  return out;
}

json to_json(const Mat& m) {
  std::vector<cplx> v;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
  return {{"kind", "matrix"}, {"dims", {{"rows", m.rows()}, {"cols", m.cols()}}}, {"data", complex_array(v)}};
}

Mat matrix_from_json(const json& j) {
  const json& dims = field(j, "dims", "matrix");
  const int r = dim(dims, "rows", "matrix"), c = dim(dims, "cols", "matrix");
  const auto v = parse_complex_array(field(j, "data", "matrix"), std::size_t(r) * c, "matrix");
  Mat m(r, c);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < c; ++b) m(a, b) = v[std::size_t(a) * c + b];
  return m;
}

json to_json(const UniformMps& m) {
  json j = {{"kind", "mps"},
            {"boundary", m.boundary == Boundary::Open ? "open" : "periodic"},
            {"dims", {{"p", m.tensor.d}, {"l", m.tensor.Dl}, {"r", m.tensor.Dr}}},
            {"data", complex_array(m.tensor.data.data())}};
  if (m.boundary == Boundary::Open) {
    j["lvec"] = vector_to(m.l);
    j["rvec"] = vector_to(m.r);
  }
  return j;
}

UniformMps mps_from_json(const json& j) {
  expect_kind(j, "mps");
  const json& dims = field(j, "dims", "mps");
  const int d = dim(dims, "p", "mps"), Dl = dim(dims, "l", "mps"), Dr = dim(dims, "r", "mps");
  if (Dl != Dr) bad("mps: uniform tensors need dims.l == dims.r");
  const auto v = parse_complex_array(field(j, "data", "mps"), std::size_t(d) * Dl * Dr, "mps");
  std::vector<Mat> mats(d, Mat(Dl, Dr));
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < Dl; ++a)
      for (int b = 0; b < Dr; ++b) mats[i](a, b) = v[(std::size_t(i) * Dl + a) * Dr + b];
  const std::string bc = j.value("boundary", "periodic");
  if (bc == "periodic") return UniformMps::periodic(mats);
  if (bc != "open") bad("mps: boundary must be \"periodic\" or \"open\"");
  return UniformMps::open(mats, vector_from(field(j, "lvec", "mps"), Dl, "mps lvec"),
                          vector_from(field(j, "rvec", "mps"), Dr, "mps rvec"));
}

json to_json(const MpoTensor& o) {
  return {{"kind", "mpo"},
          {"dims", {{"out", o.d_out}, {"in", o.d_in}, {"left", o.D}, {"right", o.D}}},
          {"data", complex_array(o.data.data())}};
}

MpoTensor mpo_from_json(const json& j) {
  expect_kind(j, "mpo");
  const json& dims = field(j, "dims", "mpo");
  const int dout = dim(dims, "out", "mpo"), din = dim(dims, "in", "mpo");
  const int Dl = dim(dims, "left", "mpo"), Dr = dim(dims, "right", "mpo");
  if (Dl != Dr) bad("mpo: uniform tensors need dims.left == dims.right");
  const auto v = parse_complex_array(field(j, "data", "mpo"), std::size_t(dout) * din * Dl * Dr, "mpo");
  std::vector<Mat> mats(std::size_t(dout) * din, Mat(Dl, Dr));
  for (std::size_t k = 0; k < mats.size(); ++k)
    for (int a = 0; a < Dl; ++a)
      for (int b = 0; b < Dr; ++b) mats[k](a, b) = v[(k * Dl + a) * Dr + b];
  return MpoTensor::from_matrices(dout, din, mats);
}

json tensor_to_json(const PepsTensor& t) {
  return {{"dims", {{"p", t.d}, {"t", t.Dt}, {"r", t.Dr}, {"d", t.Dd}, {"l", t.Dl}}},
          {"data", complex_array(t.data.data())}};
}

PepsTensor peps_tensor_from_json(const json& j) {
  const json& dims = field(j, "dims", "peps tensor");
  const int p = dim(dims, "p", "peps"), t = dim(dims, "t", "peps"), r = dim(dims, "r", "peps");
  const int d = dim(dims, "d", "peps"), l = dim(dims, "l", "peps");
  const std::int64_t n = std::int64_t(p) * t * r * d * l;
  if (n > caps().max_tensor_entries) throw Error(Errc::CapExceeded, "json: peps tensor exceeds the entry cap");
  return PepsTensor::from_data(p, t, r, d, l, parse_complex_array(field(j, "data", "peps tensor"), n, "peps tensor"));
}

json to_json(const PepsPatch& p) {
  json ts = json::array();
  for (const auto& t : p.tensors) ts.push_back(tensor_to_json(t));
  return {{"kind", "peps"},
          {"Lx", p.Lx},
          {"Ly", p.Ly},
          {"boundary", p.boundary == PepsBoundary::Torus ? "torus" : "open"},
          {"tensors", ts}};
}

PepsPatch peps_from_json(const json& j) {
  expect_kind(j, "peps");
  PepsPatch p;
  const json& lx = field(j, "Lx", "peps");
  const json& ly = field(j, "Ly", "peps");
  if (!lx.is_number_integer() || !ly.is_number_integer() || lx.get<int>() < 1 || ly.get<int>() < 1)
    bad("peps: Lx and Ly must be positive integers");
  p.Lx = lx.get<int>();
  p.Ly = ly.get<int>();
  const std::string bc = j.value("boundary", "torus");
  if (bc == "torus") p.boundary = PepsBoundary::Torus;
  else if (bc == "open") p.boundary = PepsBoundary::Open;
  else bad("peps: boundary must be \"torus\" or \"open\"");
  const json& ts = field(j, "tensors", "peps");
  if (!ts.is_array() || (ts.size() != 1 && ts.size() != std::size_t(p.Lx) * p.Ly))
    bad("peps: tensors must have 1 or Lx*Ly entries");
  for (const auto& t : ts) p.tensors.push_back(peps_tensor_from_json(t));
  if (ts.size() == 1) {
    const PepsTensor t = p.tensors[0];
    p.tensors.assign(std::size_t(p.Lx) * p.Ly, t);
  }
  p.validate();
  return p;
}

json to_json(const FiniteGroup& g) { return {{"kind", "group"}, {"name", g.name}, {"table", g.mul}}; }

FiniteGroup group_from_json(const json& j) {
  if (j.is_string()) return group_by_name(j.get<std::string>());
  const json& t = field(j, "table", "group");
  std::vector<std::vector<int>> table;
  try {
    table = t.get<std::vector<std::vector<int>>>();
  } catch (const json::exception&) {
    bad("group: table must be a square array of integers");
  }
  return FiniteGroup::from_table(table, j.value("name", ""));
}

json to_json(const OnSiteSymmetry& s) {
  json us = json::array();
  for (const auto& u : s.U) us.push_back(to_json(u));
  return {{"kind", "symmetry"}, {"group", to_json(s.group)}, {"U", us}};
}

OnSiteSymmetry symmetry_from_json(const json& j) {
  expect_kind(j, "symmetry");
  OnSiteSymmetry s;
  s.group = group_from_json(field(j, "group", "symmetry"));
  const json& us = field(j, "U", "symmetry");
  if (!us.is_array() || int(us.size()) != s.group.order) bad("symmetry: need one matrix U per group element");
  for (const auto& u : us) s.U.push_back(matrix_from_json(u));
  s.validate();
  return s;
}

json to_json(const std::vector<PlacedOp>& ops) {
  json a = json::array();
  for (const auto& o : ops) a.push_back({{"x", o.x}, {"y", o.y}, {"op", to_json(o.op)}});
  return {{"kind", "ops"}, {"ops", a}};
}

std::vector<PlacedOp> ops_from_json(const json& j) {
  expect_kind(j, "ops");
  const json& a = field(j, "ops", "ops");
  if (!a.is_array()) bad("ops: \"ops\" must be an array");
  std::vector<PlacedOp> out;
  for (const auto& o : a) {
    const json& x = field(o, "x", "ops");
    const json& y = field(o, "y", "ops");
    if (!x.is_number_integer() || !y.is_number_integer()) bad("ops: x and y must be integers");
    out.push_back({x.get<int>(), y.get<int>(), matrix_from_json(field(o, "op", "ops"))});
  }
  return out;
}

json to_json(const CorpusEntry& e) {
  json ex = json::array();
  for (const auto& p : e.expected)
    ex.push_back({{"name", p.name}, {"value", p.value}, {"tag", p.tag}, {"anchor", p.anchor}, {"tolerance", p.tolerance}});
  json t;
  if (e.mps) t = to_json(*e.mps);
  if (e.peps) t = to_json(PepsPatch{2, 2, PepsBoundary::Torus, {*e.peps}});
  if (e.mpo) t = to_json(*e.mpo);
  return {{"kind", "corpus_entry"},
          {"name", e.name},
          {"entry_kind", corpus_kind_name(e.kind)},
          {"parameters", e.parameters},
          {"tensor", t},
          {"expected", ex}};
}

CorpusEntry corpus_entry_from_json(const json& j) {
  expect_kind(j, "corpus_entry");
  CorpusEntry e;
  e.name = field(j, "name", "corpus_entry").get<std::string>();
  e.parameters = field(j, "parameters", "corpus_entry");
  const std::string k = field(j, "entry_kind", "corpus_entry").get<std::string>();
  const json& t = field(j, "tensor", "corpus_entry");
  if (k == "mps") {
    e.kind = CorpusKind::Mps;
    e.mps = mps_from_json(t);
  } else if (k == "peps") {
    e.kind = CorpusKind::Peps;
    const json& ts = field(t, "tensors", "peps");
    if (!ts.is_array() || ts.size() != 1) bad("corpus_entry: a peps entry holds a single tensor");
    e.peps = peps_tensor_from_json(ts[0]);
  } else if (k == "mpo") {
    e.kind = CorpusKind::Mpo;
    e.mpo = mpo_from_json(t);
  } else {
    bad("corpus_entry: unknown entry_kind \"" + k + "\"");
  }
  for (const auto& p : field(j, "expected", "corpus_entry"))
    e.expected.push_back({p.at("name").get<std::string>(), p.at("value"), p.at("tag").get<std::string>(),
                          p.at("anchor").get<std::string>(), p.at("tolerance").get<double>()});
  return e;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

}  // namespace tnkit::io
