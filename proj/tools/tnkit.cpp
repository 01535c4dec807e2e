#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tnkit/hamiltonian.hpp"
#include "tnkit/io.hpp"
#include "tnkit/quantum_double.hpp"
#include "tnkit/structure.hpp"

using namespace tnkit;
using nlohmann::json;

namespace {

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json cjson(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(cjson(z));
  return a;
}

struct Report {
  std::string command;
  json inputs = json::array();
  json parameters = json::object();
  json results = json::object();
  json verdicts = json::object();
};

struct Globals {
  std::string out;
  double tol = tol::kEqDefault;
  int jobs = 1;
  unsigned seed = 1;
  bool stdin_used = false;
};

Globals G;

std::string read_all(const std::string& path) {
  if (path == "-") {
    if (G.stdin_used) throw Error(Errc::InvalidInput, "only one input can come from stdin");
    G.stdin_used = true;
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::InvalidInput, "cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

json load(Report& r, const std::string& role, const std::string& path) {
  if (path.empty()) throw Error(Errc::InvalidInput, "missing input --" + role);
  const std::string text = read_all(path);
  r.inputs.push_back({{"role", role}, {"path", path}, {"fnv1a", io::fnv1a_hex(text)}});
  return json::parse(text);
}

Rect parse_rect(const std::string& s) {
  Rect r;
  char c1, c2, c3;
  std::istringstream in(s);
  if (!(in >> r.x0 >> c1 >> r.y0 >> c2 >> r.x1 >> c3 >> r.y1) || c1 != ',' || c2 != ',' || c3 != ',' || !in.eof())
    throw Error(Errc::InvalidInput, "region must be x0,y0,x1,y1");
  return r;
}

json rect_json(const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "open") return Boundary::Open;
  throw Error(Errc::InvalidInput, "boundary must be periodic or open");
}

void emit(const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (G.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(G.out, std::ios::binary);
  if (!f) throw Error(Errc::InvalidInput, "cannot write " + G.out);
  f << text;
}

void apply_cap_env() {
  const char* v = std::getenv("TNKIT_CAP_QUBITS");
  if (!v || !*v) return;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 30) throw Error(Errc::InvalidInput, "TNKIT_CAP_QUBITS must be an integer in [1, 30]");
  Caps c = caps();
  c.ed_max_log2 = int(n);
  c.ed_dense_log2 = std::min(12, int(n));
  set_caps(c);
}

int exit_code(Errc c) { return (c == Errc::CapExceeded || c == Errc::NotConverged) ? 3 : 2; }

void fail(const std::string& code, const std::string& msg) {
  std::cerr << json({{"error", {{"code", code}, {"message", msg}}}}).dump() << "\n";
}

json mps_summary(const UniformMps& m) { return io::to_json(m); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tnkit: tensor network analyses on small uniform MPS, MPO and PEPS"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", G.out, "write the report here instead of stdout");
  app.add_option("--tol", G.tol, "equality tolerance; the rank tolerance is 100x this")->check(CLI::PositiveNumber);
  app.add_option("--jobs", G.jobs, "threads for independent sub-analyses")->check(CLI::Range(1, 256));
  app.add_option("--seed", G.seed, "seed for randomised steps");

  // shared option storage
  std::string in, a_path, b_path, sym_path, u_path, r_path, ops_path, mpo_path, region_s, group_s = "z2";
  std::string boundary_s = "periodic", action, name, what = "tensor";
  std::vector<std::string> params;
  int L = 2, N = 6, nev = 6, blocking = 2, n_knabe = 4, g_index = 1, lx = 3, ly = 3;
  std::optional<int> length;
  bool raw = false, emit_matrix = false, keep_basis = false;

  std::map<std::string, std::function<void(Report&)>> handlers;
  auto sub = [&](const std::string& nm, const std::string& desc) { return app.add_subcommand(nm, desc); };
  auto with_in = [&](CLI::App* s, const std::string& desc = "input tensor JSON, - for stdin") {
    s->add_option("--in", in, desc)->required();
    return s;
  };

  // ---- MPS structure
  with_in(sub("canonical", "canonical form: blocks, weights, blocking period"));
  handlers["canonical"] = [&](Report& r) {
    const CanonicalForm cf = canonical_form(io::mps_from_json(load(r, "in", in)));
    json blocks = json::array();
    for (const auto& b : cf.blocks)
      blocks.push_back({{"mu", b.mu}, {"D", b.tensor.Dl}, {"tensor", mps_summary(UniformMps::periodic(b.tensor.matrices()))}});
    r.results = {{"blocking_p", cf.blocking_p}, {"d", cf.d},           {"blocks", blocks},
                 {"dropped_dim", cf.dropped_dim}, {"periods", cf.periods}, {"rank_margin", cf.rank_margin},
                 {"gauge", io::to_json(cf.gauge)}};
    r.verdicts["number_of_blocks"] = cf.blocks.size();
  };

  {
    auto* s = sub("compare", "gauge relation between two MPS");
    s->add_option("--a", a_path, "first MPS")->required();
    s->add_option("--b", b_path, "second MPS")->required();
  }
  handlers["compare"] = [&](Report& r) {
    const UniformMps a = io::mps_from_json(load(r, "a", a_path));
    const UniformMps b = io::mps_from_json(load(r, "b", b_path));
    const GaugeRelation g = compare_states(a, b);
    r.results = {{"blocking_p", g.blocking_p}, {"z_orders", g.z_orders}, {"note", g.note},
                 {"x_in_canonical_coordinates", g.x_in_canonical_coordinates}};
    if (g.X) r.results["gauge"] = io::to_json(*g.X);
    if (g.phase) r.results["phase"] = *g.phase;
    if (g.scale) r.results["scale"] = cjson(*g.scale);
    r.verdicts["verdict"] = verdict_name(g.verdict);
  };

  with_in(sub("normal", "normality test"));
  handlers["normal"] = [&](Report& r) {
    const NormalityReport n = is_normal(io::mps_from_json(load(r, "in", in)));
    r.results = {{"peripheral_count", n.peripheral_count}, {"rank_rhoL", n.rank_rhoL}, {"rank_rhoR", n.rank_rhoR},
                 {"defective", n.defective},               {"peripheral", cjson(n.peripheral)}};
    r.verdicts["normal"] = n.normal;
  };

  with_in(sub("injectivity", "injectivity length"));
  handlers["injectivity"] = [&](Report& r) {
    const UniformMps m = io::mps_from_json(load(r, "in", in));
    const int l0 = injectivity_length(m), bound = injectivity_bound(m.D());
    r.results = {{"injectivity_length", l0}, {"bound", bound}};
    r.verdicts["within_bound"] = l0 <= bound;
  };

  {
    auto* s = with_in(sub("transfer", "transfer operator spectrum"));
    s->add_flag("--raw", raw, "do not normalise by the leading eigenvalue");
  }
  handlers["transfer"] = [&](Report& r) {
    const TransferOperator t = transfer_operator(io::mps_from_json(load(r, "in", in)), !raw);
    r.parameters["normalized"] = !raw;
    r.results = {{"eigenvalues", cjson(t.spectrum)}, {"lambda1", cjson(t.lambda1)},
                 {"peripheral", cjson(t.peripheral)}, {"peripheral_defective", t.peripheral_defective}};
  };

  with_in(sub("entspec", "half-chain entanglement spectrum and Renyi entropies"));
  handlers["entspec"] = [&](Report& r) {
    const EntanglementData e = entanglement_spectrum(io::mps_from_json(load(r, "in", in)));
    json renyi = json::array();
    for (const auto& [a, s] : e.renyi) renyi.push_back({{"alpha", a}, {"entropy", s}});
    r.results = {{"schmidt_squares", e.schmidt_squares}, {"renyi", renyi}};
  };

  with_in(sub("corrlen", "correlation length"));
  handlers["corrlen"] = [&](Report& r) {
    const EntanglementData e = correlation_length(io::mps_from_json(load(r, "in", in)));
    r.results = {{"correlation_length", e.correlation_length_infinite ? json(nullptr) : json(e.correlation_length)},
                 {"infinite", e.correlation_length_infinite}};
  };

  // ---- symmetry
  for (const char* nm : {"symmetry", "spt"}) {
    auto* s = with_in(sub(nm, std::string(nm) == "spt" ? "SPT class from the virtual projective action"
                                                       : "virtual action of an on-site symmetry"));
    s->add_option("--sym", sym_path, "symmetry JSON")->required();
  }
  handlers["symmetry"] = [&](Report& r) {
    const UniformMps m = io::mps_from_json(load(r, "in", in));
    const ProjectiveData pd = detect_symmetry_action(m, io::symmetry_from_json(load(r, "sym", sym_path)));
    json X = json::array();
    for (const auto& x : pd.X) X.push_back(io::to_json(x));
    r.results = {{"X", X}, {"phi", pd.phi}, {"omega", pd.omega}, {"warnings", pd.warnings}};
  };
  handlers["spt"] = [&](Report& r) {
    const UniformMps m = io::mps_from_json(load(r, "in", in));
    const CohomologyClass c =
        cocycle_class(detect_symmetry_action(m, io::symmetry_from_json(load(r, "sym", sym_path))));
    json inv = json::array();
    for (const auto& p : c.invariants) inv.push_back({{"g", p.g}, {"h", p.h}, {"value", cjson(p.value)}});
    r.results = {{"group_structure", c.group_structure}, {"label", c.label},         {"invariants", inv},
                 {"h1_unit", c.h1_unit},                 {"h1_blocked", c.h1_blocked}, {"warnings", c.warnings}};
    r.verdicts["trivial"] = c.trivial;
  };

  {
    auto* s = with_in(sub("tr-index", "time-reversal index for T = u K"));
    s->add_option("--u", u_path, "matrix JSON for u (default identity)");
  }
  handlers["tr-index"] = [&](Report& r) {
    const UniformMps m = io::mps_from_json(load(r, "in", in));
    const Mat u = u_path.empty() ? Mat(Mat::Identity(m.d(), m.d())) : io::matrix_from_json(load(r, "u", u_path));
    r.verdicts["index"] = time_reversal_index(m, u);
  };

  {
    auto* s = with_in(sub("string-order", "string order parameter <R U_g ... U_g R>"));
    s->add_option("--sym", sym_path, "symmetry JSON")->required();
    s->add_option("--g", g_index, "group element index");
    s->add_option("--r", r_path, "end operator matrix JSON")->required();
    s->add_option("--length", length, "string length (default: infinite)");
  }
  handlers["string-order"] = [&](Report& r) {
    const UniformMps m = io::mps_from_json(load(r, "in", in));
    const OnSiteSymmetry sym = io::symmetry_from_json(load(r, "sym", sym_path));
    const Mat R = io::matrix_from_json(load(r, "r", r_path));
    r.parameters = {{"g", g_index}, {"length", length ? json(*length) : json("infinite")}};
    r.results["value"] = cjson(string_order(m, sym, g_index, R, length));
  };

  with_in(sub("spt-build", "fixed-point MPS with a prescribed cocycle"),
          "cocycle JSON: {\"kind\":\"cocycle\",\"group\":...,\"omega\":[[...]],\"phi\":[...]}");
  handlers["spt-build"] = [&](Report& r) {
    const json j = load(r, "in", in);
    if (j.value("kind", "") != "cocycle") throw Error(Errc::InvalidInput, "json: expected kind \"cocycle\"");
    const FiniteGroup g = io::group_from_json(j.at("group"));
    const auto omega = j.at("omega").get<std::vector<std::vector<double>>>();
    const auto phi = j.contains("phi") ? j.at("phi").get<std::vector<double>>() : std::vector<double>(g.order, 0.0);
    const SptFixedPoint fp = build_spt_fixed_point(g, omega, phi);
    const CohomologyClass c = cocycle_class(detect_symmetry_action(fp.mps, fp.sym));
    const RgfpReport rg = rgfp_check(fp.mps);
    r.results = {{"mps", io::to_json(fp.mps)},
                 {"symmetry", io::to_json(fp.sym)},
                 {"requested_label", cocycle_label(g, omega)},
                 {"detected_label", c.label},
                 {"rgfp_residual", rg.residual}};
    r.verdicts["round_trip"] = cocycle_label(g, omega) == c.label;
    r.verdicts["fixed_point"] = rg.fixed_point;
  };

  with_in(sub("rgfp", "renormalisation fixed-point test"));
  handlers["rgfp"] = [&](Report& r) {
    const RgfpReport rg = rgfp_check(io::mps_from_json(load(r, "in", in)));
    r.results = {{"residual", rg.residual}, {"isometry_residual", rg.isometry_residual}};
    r.verdicts = {{"fixed_point", rg.fixed_point}, {"isometry", rg.isometry}};
  };

  // ---- parent Hamiltonians
  auto ham_opts = [&](CLI::App* s) {
    with_in(s);
    s->add_option("--L", L, "interaction length")->check(CLI::Range(1, 12));
  };
  {
    auto* s = sub("parent-ham", "parent Hamiltonian projector");
    ham_opts(s);
    s->add_flag("--emit-matrix", emit_matrix, "include the projector");
  }
  handlers["parent-ham"] = [&](Report& r) {
    const ParentHamiltonian h = parent_hamiltonian(io::mps_from_json(load(r, "in", in)), L);
    r.parameters["L"] = L;
    r.results = {{"d", h.d}, {"kernel_dim", h.kernel_dim}, {"warnings", h.warnings}};
    if (emit_matrix) r.results["h"] = io::to_json(h.h);
  };
  {
    auto* s = sub("ground-space", "ground space of the parent Hamiltonian on N sites");
    ham_opts(s);
    s->add_option("--N", N, "number of sites")->check(CLI::Range(1, 40));
    s->add_option("--boundary", boundary_s, "periodic or open");
    s->add_option("--nev", nev, "eigenpairs requested")->check(CLI::Range(1, 64));
    s->add_flag("--keep-basis", keep_basis, "include ground-space vectors");
  }
  handlers["ground-space"] = [&](Report& r) {
    const UniformMps m = io::mps_from_json(load(r, "in", in));
    const GroundSpaceReport g =
        ground_space(parent_hamiltonian(m, L), N, parse_boundary(boundary_s), nev, keep_basis, G.seed);
    r.parameters = {{"L", L}, {"N", N}, {"boundary", boundary_s}, {"nev", nev}};
    r.results = {{"dimension", g.dimension},
                 {"dimension_is_lower_bound", g.dimension_is_lower_bound},
                 {"energies", g.energies},
                 {"method", g.method},
                 {"max_residual", g.max_residual}};
    if (keep_basis) {
      json b = json::array();
      for (const auto& v : g.basis) b.push_back(cjson(std::vector<cplx>(v.data(), v.data() + v.size())));
      r.results["basis"] = b;
    }
    r.verdicts["frustration_free"] = g.frustration_free < 0 ? json(nullptr) : json(g.frustration_free == 1);
  };
  auto gap_json = [](Report& r, const GapCertificate& c) {
    r.results = {{"method", c.method},   {"blocking", c.blocking},   {"n", c.n},
                 {"c", c.c},             {"measured", c.measured},   {"threshold", c.threshold},
                 {"threshold_weak", c.threshold_weak}, {"margin", c.margin}, {"note", c.note}};
    r.verdicts["gapped"] = c.verdict;
  };
  {
    auto* s = sub("gap-martingale", "martingale gap certificate");
    ham_opts(s);
    s->add_option("--blocking", blocking, "sites per block")->check(CLI::Range(1, 12));
  }
  handlers["gap-martingale"] = [&](Report& r) {
    const ParentHamiltonian h = parent_hamiltonian(io::mps_from_json(load(r, "in", in)), L);
    r.parameters = {{"L", L}, {"blocking", blocking}};
    gap_json(r, martingale_certificate(h, blocking));
  };
  {
    auto* s = sub("gap-knabe", "finite-size (Knabe) gap certificate");
    ham_opts(s);
    s->add_option("--n", n_knabe, "open chain length of the local gap")->check(CLI::Range(2, 20));
  }
  handlers["gap-knabe"] = [&](Report& r) {
    const ParentHamiltonian h = parent_hamiltonian(io::mps_from_json(load(r, "in", in)), L);
    r.parameters = {{"L", L}, {"n", n_knabe}};
    gap_json(r, knabe_certificate(h, n_knabe));
  };

  // ---- MPO
  {
    auto* s = with_in(sub("mpo-apply", "apply an MPO to an MPS"));
    s->add_option("--mpo", mpo_path, "MPO JSON")->required();
  }
  handlers["mpo-apply"] = [&](Report& r) {
    const MpoTensor o = io::mpo_from_json(load(r, "mpo", mpo_path));
    const UniformMps m = io::mps_from_json(load(r, "in", in));
    r.results["mps"] = io::to_json(mpo_apply(o, m));
  };
  auto mpu_json = [](Report& r, const MpuReport& m) {
    r.results = {{"blocking_used", m.blocking_used}, {"rank_left", m.rank_left}, {"rank_right", m.rank_right},
                 {"dense_checked_up_to", m.dense_checked_up_to}, {"note", m.note}, {"warnings", m.warnings}};
    r.verdicts["unitary"] = m.unitary;
    r.verdicts["index"] = m.index ? json(*m.index) : json(nullptr);
  };
  with_in(sub("mpu-check", "is the MPO a unitary for every N"));
  handlers["mpu-check"] = [&](Report& r) { mpu_json(r, is_unitary_mpu(io::mpo_from_json(load(r, "in", in)))); };
  with_in(sub("mpu-index", "index of a matrix product unitary (log2 units)"));
  handlers["mpu-index"] = [&](Report& r) { mpu_json(r, mpu_index(io::mpo_from_json(load(r, "in", in)))); };
  with_in(sub("mpo-reduce", "canonical reduction of an MPO"));
  handlers["mpo-reduce"] = [&](Report& r) {
    const MpoReduction red = mpo_reduce(io::mpo_from_json(load(r, "in", in)));
    json blocks = json::array();
    for (const auto& b : red.blocks) blocks.push_back({{"mu", b.mu}, {"D", b.tensor.D}, {"tensor", io::to_json(b.tensor)}});
    r.results = {{"blocking_p", red.blocking_p}, {"blocks", blocks}, {"dropped_dim", red.dropped_dim}};
  };

  // ---- PEPS
  with_in(sub("peps-norm", "exact norm of a PEPS patch"));
  handlers["peps-norm"] = [&](Report& r) {
    const PepsPatch p = io::peps_from_json(load(r, "in", in));
    r.results["norm2"] = peps_contract(p).norm2;
  };
  {
    auto* s = with_in(sub("peps-expect", "expectation value of a product of local operators"));
    s->add_option("--ops", ops_path, "ops JSON")->required();
  }
  handlers["peps-expect"] = [&](Report& r) {
    const PepsPatch p = io::peps_from_json(load(r, "in", in));
    r.results["value"] = cjson(peps_expectation(p, io::ops_from_json(load(r, "ops", ops_path))));
  };
  {
    auto* s = with_in(sub("peps-boundary", "region injectivity and boundary state"));
    s->add_option("--region", region_s, "x0,y0,x1,y1 (half-open)")->required();
    s->add_flag("--emit-matrix", emit_matrix, "include sigma");
  }
  handlers["peps-boundary"] = [&](Report& r) {
    const PepsPatch p = io::peps_from_json(load(r, "in", in));
    const Rect rect = parse_rect(region_s);
    r.parameters["region"] = rect_json(rect);
    const InjectivityReport inj = peps_region_injectivity(p, rect);
    const BoundaryState b = region_boundary_state(p, rect);
    json legs = json::array();
    for (const auto& l : b.legs) legs.push_back({{"x", l.x}, {"y", l.y}, {"leg", l.leg}, {"dim", l.dim}});
    r.results = {{"legs", legs},
                 {"boundary_dim", inj.boundary_dim},
                 {"region_map_rank", inj.rank},
                 {"sigma_rank", b.rank},
                 {"entropy", b.entropy},
                 {"spectrum", b.spectrum},
                 {"entanglement_hamiltonian_spectrum", b.entanglement_hamiltonian_spectrum}};
    if (emit_matrix) r.results["sigma"] = io::to_json(b.sigma);
    r.verdicts["injective"] = inj.injective;
  };

  // ---- quantum doubles
  {
    auto* s = sub("sectors", "topological sectors of a quantum double on a torus");
    s->add_option("--group", group_s, "group name (z<n>, s<n>, d<n>, products with x)");
    s->add_option("--lx", lx)->check(CLI::Range(2, 16));
    s->add_option("--ly", ly)->check(CLI::Range(2, 16));
  }
  handlers["sectors"] = [&](Report& r) {
    const SectorBasis sb = quantum_double_sectors(group_by_name(group_s), lx, ly, G.jobs);
    r.parameters = {{"group", group_s}, {"lx", lx}, {"ly", ly}};
    json labels = json::array();
    for (const auto& l : sb.labels)
      labels.push_back({{"flux", l.flux}, {"class_index", l.class_index}, {"irrep", l.irrep}, {"irrep_dim", l.irrep_dim}});
    r.results = {{"labels", labels}, {"min_gram_eigenvalue", sb.min_gram_eigenvalue}, {"gram", io::to_json(sb.gram)}};
    r.verdicts["rank"] = sb.rank;
  };
  {
    auto* s = sub("tee", "topological entanglement entropy of a quantum double region");
    s->add_option("--group", group_s, "group name");
    s->add_option("--lx", lx)->check(CLI::Range(2, 16));
    s->add_option("--ly", ly)->check(CLI::Range(2, 16));
    s->add_option("--region", region_s, "x0,y0,x1,y1 (half-open)")->required();
  }
  handlers["tee"] = [&](Report& r) {
    const Rect rect = parse_rect(region_s);
    const TopologicalEntropy te = topological_entropy(group_by_name(group_s), lx, ly, rect);
    r.parameters = {{"group", group_s}, {"lx", lx}, {"ly", ly}, {"region", rect_json(rect)}};
    r.results = {{"entropy", te.entropy}, {"boundary_legs", te.boundary_legs},
                 {"effective_boundary", te.effective_boundary}, {"gamma", te.gamma}};
  };

  // ---- corpus
  {
    auto* s = sub("corpus", "built-in example tensors");
    s->add_option("action", action, "list | show | validate | export")->required()->check(
        CLI::IsMember({"list", "show", "validate", "export"}));
    s->add_option("name", name, "entry name");
    s->add_option("--param", params, "entry parameter key=value (JSON value or bare string)");
    s->add_option("--what", what, "export: tensor | symmetry | entry")->check(CLI::IsMember({"tensor", "symmetry", "entry"}));
    s->add_option("--lx", lx, "export: PEPS patch width")->check(CLI::Range(1, 16));
    s->add_option("--ly", ly, "export: PEPS patch height")->check(CLI::Range(1, 16));
  }
  std::optional<json> raw_output;
  handlers["corpus"] = [&](Report& r) {
    if (action == "list") {
      json items = json::array();
      for (const auto& c : corpus_catalog())
        items.push_back({{"name", c.name}, {"kind", corpus_kind_name(c.kind)}, {"summary", c.summary}, {"defaults", c.defaults}});
      r.results["entries"] = items;
      return;
    }
    auto check_json = [](const CorpusCheck& c) {
      return json{{"entry", c.entry}, {"property", c.property}, {"passed", c.passed},
                  {"expected", c.expected}, {"actual", c.actual}, {"detail", c.detail}};
    };
    if (action == "validate" && name.empty()) {
      const CorpusReport rep = validate_corpus();
      json checks = json::array();
      for (const auto& c : rep.checks) checks.push_back(check_json(c));
      r.results["checks"] = checks;
      r.verdicts["all_passed"] = rep.all_passed;
      return;
    }
    if (name.empty()) throw Error(Errc::InvalidInput, "corpus " + action + " needs an entry name");
    json pj = json::object();
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw Error(Errc::InvalidInput, "--param expects key=value");
      const std::string v = kv.substr(eq + 1);
      json parsed = json::parse(v, nullptr, false);
      pj[kv.substr(0, eq)] = parsed.is_discarded() ? json(v) : parsed;
    }
    const CorpusEntry e = make(name, pj);
    r.parameters = {{"name", name}, {"parameters", e.parameters}};
    if (action == "show") {
      r.results["entry"] = io::to_json(e);
    } else if (action == "validate") {
      const CorpusReport rep = validate_entry(e);
      json checks = json::array();
      for (const auto& c : rep.checks) checks.push_back(check_json(c));
      r.results["checks"] = checks;
      r.verdicts["all_passed"] = rep.all_passed;
    } else if (what == "entry") {
      raw_output = io::to_json(e);
    } else if (what == "symmetry") {
      const auto s = corpus_symmetry(e);
      if (!s) throw Error(Errc::InvalidInput, "corpus: entry '" + name + "' carries no symmetry");
      raw_output = io::to_json(*s);
    } else if (e.mps) {
      raw_output = io::to_json(*e.mps);
    } else if (e.peps) {
      raw_output = io::to_json(PepsPatch::uniform(*e.peps, lx, ly, PepsBoundary::Torus));
    } else {
      raw_output = io::to_json(*e.mpo);
    }
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("invalid_input", e.what());
    return 2;
  }

  Report rep;
  rep.command = app.get_subcommands().front()->get_name();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    apply_cap_env();
    tol::set(G.tol);
    handlers.at(rep.command)(rep);
    if (raw_output) {
      emit(*raw_output);
      return 0;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit({{"command", rep.command},
          {"inputs", rep.inputs},
          {"parameters", rep.parameters},
          {"results", rep.results},
          {"verdicts", rep.verdicts},
          {"tolerances", {{"eq", tol::eq()}, {"rank", tol::rank()}}},
          {"caps", {{"ed_dense_log2", caps().ed_dense_log2}, {"ed_max_log2", caps().ed_max_log2},
                    {"max_tensor_entries", caps().max_tensor_entries}}},
          {"seed", G.seed},
          {"jobs", G.jobs},
          {"wall_time", wall}});
  } catch (const Error& e) {
    fail(errc_name(e.code()), e.what());
    return exit_code(e.code());
  } catch (const json::exception& e) {
    fail("invalid_input", std::string("json: ") + e.what());
    return 2;
  } catch (const std::exception& e) {
    fail("internal", e.what());
    return 1;
  }
  return 0;
}
