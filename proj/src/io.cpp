#include "qg/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qg {

namespace {

constexpr double kChop = 1e-14;

double chop(double x) { return std::abs(x) < kChop ? 0.0 : x; }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int as_index(const json& v, int bound, const char* what) {
  if (!v.is_number_integer()) throw IoError(std::string(what) + ": index must be an integer");
  long long i = v.get<long long>();
  if (i < 0 || i >= bound) throw IoError(std::string(what) + ": index " + std::to_string(i) + " out of range");
  return static_cast<int>(i);
}

double as_real(const json& v, const char* what) {
  if (!v.is_number()) throw IoError(std::string(what) + ": coefficient must be a number");
  return v.get<double>();
}

const json& entry_list(const json& j, const char* key, size_t width) {
  const json& a = field(j, key);
  if (!a.is_array()) throw IoError(std::string(key) + " must be an array");
  for (const json& e : a)
    if (!e.is_array() || e.size() != width)
      throw IoError(std::string(key) + ": every entry needs " + std::to_string(width) + " components");
  return a;
}

json complex_entries(const Mat& M) {
  json out = json::array();
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) {
      double re = chop(M(i, j).real()), im = chop(M(i, j).imag());
      if (re != 0 || im != 0) out.push_back({i, j, re, im});
    }
  return out;
}

Mat read_entries(const json& j, const char* key, int rows, int cols) {
  Mat M = Mat::Zero(rows, cols);
  for (const json& e : entry_list(j, key, 4))
    M(as_index(e[0], rows, key), as_index(e[1], cols, key)) += cd(as_real(e[2], key), as_real(e[3], key));
  return M;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> labels_or_default(const std::vector<std::string>& given, int n, const std::string& prefix) {
  if (static_cast<int>(given.size()) == n) return given;
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json wha_to_json(const WeakHopfAlgebra& W) {
  const int D = W.dim();
  json j;
  j["format"] = "WHA-JSON";
  j["version"] = 1;
  if (!W.name.empty()) j["name"] = W.name;
  j["blocks"] = W.B.dims();
  j["basis"] = "matrix-units";
  json delta = json::array();
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < D; ++i)
      for (int l = 0; l < D; ++l) {
        cd c = W.delta(i * D + l, k);
        double re = chop(c.real()), im = chop(c.imag());
        if (re != 0 || im != 0) delta.push_back({i, l, k, re, im});
      }
  j["delta"] = delta;
  json eps = json::array();
  for (int i = 0; i < D; ++i) {
    double re = chop(W.eps(i).real()), im = chop(W.eps(i).imag());
    if (re != 0 || im != 0) eps.push_back({i, re, im});
  }
  j["eps"] = eps;
  j["antipode"] = complex_entries(W.S);
  j["star"] = complex_entries(W.star);
  return j;
}

WeakHopfAlgebra wha_from_json(const json& j) {
  if (!j.is_object()) throw IoError("WHA-JSON must be an object");
  if (j.contains("version") && j.at("version") != 1) throw IoError("unsupported WHA-JSON version");
  if (j.contains("basis") && j.at("basis") != "matrix-units") throw IoError("basis must be \"matrix-units\"");
  const json& blocks = field(j, "blocks");
  if (!blocks.is_array() || blocks.empty()) throw IoError("blocks must be a nonempty array");
  std::vector<int> dims;
  for (const json& b : blocks) {
    if (!b.is_number_integer() || b.get<long long>() < 1 || b.get<long long>() > 4096)
      throw IoError("block sizes must be positive integers");
    dims.push_back(b.get<int>());
  }
  MultiMatrix B(dims);
  const int D = B.dim();
  Mat delta = Mat::Zero(static_cast<Eigen::Index>(D) * D, D);
  for (const json& e : entry_list(j, "delta", 5)) {
    int i = as_index(e[0], D, "delta"), l = as_index(e[1], D, "delta"), k = as_index(e[2], D, "delta");
    delta(i * D + l, k) += cd(as_real(e[3], "delta"), as_real(e[4], "delta"));
  }
  Vec eps = Vec::Zero(D);
  for (const json& e : entry_list(j, "eps", 3)) eps(as_index(e[0], D, "eps")) += cd(as_real(e[1], "eps"), as_real(e[2], "eps"));
  Mat S = read_entries(j, "antipode", D, D);
  Mat star = read_entries(j, "star", D, D);
  std::string name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : "";
  return WeakHopfAlgebra(B, delta, eps, S, star, name);
}

LoadedWha load_wha(const json& j, double tol) {
  LoadedWha r{wha_from_json(j), {}};
  r.axioms = verify_axioms(r.W, tol);
  return r;
}

json matrix_to_json(const Mat& M) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json rr = json::array(), ri = json::array();
    for (int c = 0; c < M.cols(); ++c) {
      rr.push_back(chop(M(i, c).real()));
      ri.push_back(chop(M(i, c).imag()));
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"rows", M.rows()}, {"cols", M.cols()}, {"re", re}, {"im", im}};
}

Mat matrix_from_json(const json& j) {
  const json& r = field(j, "rows");
  const json& c = field(j, "cols");
  if (!r.is_number_integer() || !c.is_number_integer() || r.get<long long>() < 0 || c.get<long long>() < 0)
    throw IoError("matrix: rows and cols must be nonnegative integers");
  const int rows = r.get<int>(), cols = c.get<int>();
  const json& re = field(j, "re");
  const json* im = j.contains("im") ? &j.at("im") : nullptr;
  if (!re.is_array() || static_cast<int>(re.size()) != rows || (im && (!im->is_array() || static_cast<int>(im->size()) != rows)))
    throw IoError("matrix: row count does not match");
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!re[i].is_array() || static_cast<int>(re[i].size()) != cols) throw IoError("matrix: column count does not match");
    if (im && (!(*im)[i].is_array() || static_cast<int>((*im)[i].size()) != cols))
      throw IoError("matrix: column count does not match");
    for (int k = 0; k < cols; ++k) M(i, k) = cd(as_real(re[i][k], "matrix"), im ? as_real((*im)[i][k], "matrix") : 0.0);
  }
  return M;
}

json bratteli_to_json(const BratteliDiagram& d) {
  const int r = static_cast<int>(d.matrix.rows()), c = static_cast<int>(d.matrix.cols());
  json m = json::array();
  for (int i = 0; i < r; ++i) {
    json row = json::array();
    for (int k = 0; k < c; ++k) row.push_back(d.matrix(i, k));
    m.push_back(row);
  }
  json j;
  j["lower"] = labels_or_default(d.lower, r, "a");
  j["upper"] = labels_or_default(d.upper, c, "b");
  j["lower_dims"] = d.lower_dims;
  j["upper_dims"] = d.upper_dims;
  j["matrix"] = m;
  j["norm_sq"] = d.norm_sq();
  return j;
}

BratteliDiagram bratteli_from_json(const json& j) {
  BratteliDiagram d;
  try {
    d.lower = field(j, "lower").get<std::vector<std::string>>();
    d.upper = field(j, "upper").get<std::vector<std::string>>();
    if (j.contains("lower_dims")) d.lower_dims = j.at("lower_dims").get<std::vector<int>>();
    if (j.contains("upper_dims")) d.upper_dims = j.at("upper_dims").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw IoError(std::string("Bratteli diagram: ") + e.what());
  }
  const json& m = field(j, "matrix");
  const int r = static_cast<int>(d.lower.size()), c = static_cast<int>(d.upper.size());
  if (!m.is_array() || static_cast<int>(m.size()) != r) throw IoError("Bratteli diagram: matrix needs one row per lower vertex");
  d.matrix = IMat::Zero(r, c);
  for (int i = 0; i < r; ++i) {
    if (!m[i].is_array() || static_cast<int>(m[i].size()) != c)
      throw IoError("Bratteli diagram: matrix needs one column per upper vertex");
    for (int k = 0; k < c; ++k) {
      if (!m[i][k].is_number_integer() || m[i][k].get<long long>() < 0)
        throw IoError("Bratteli diagram: multiplicities must be nonnegative integers");
      d.matrix(i, k) = m[i][k].get<int>();
    }
  }
  if ((!d.lower_dims.empty() && static_cast<int>(d.lower_dims.size()) != r) ||
      (!d.upper_dims.empty() && static_cast<int>(d.upper_dims.size()) != c))
    throw IoError("Bratteli diagram: dimension lists do not match the vertex lists");
  return d;
}

std::string bratteli_to_dot(const BratteliDiagram& d, const std::string& name, int marked_upper) {
  const int r = static_cast<int>(d.matrix.rows()), c = static_cast<int>(d.matrix.cols());
  auto lower = labels_or_default(d.lower, r, "a");
  auto upper = labels_or_default(d.upper, c, "b");
  auto lname = [&](int i) { return quote("L:" + lower[i]); };
  auto uname = [&](int k) { return quote("U:" + upper[k]); };
  auto dim_label = [](const std::string& s, const std::vector<int>& dims, int i) {
    return i < static_cast<int>(dims.size()) ? s + " (" + std::to_string(dims[i]) + ")" : s;
  };
  std::ostringstream o;
  o << "graph " << quote(name) << " {\n  rankdir=TB;\n  node [shape=circle];\n";
  o << "  { rank=same;";
  for (int i = 0; i < r; ++i) o << " " << lname(i) << " [label=" << quote(dim_label(lower[i], d.lower_dims, i)) << "];";
  o << " }\n  { rank=same;";
  for (int k = 0; k < c; ++k) {
    o << " " << uname(k) << " [label=" << quote(dim_label(upper[k], d.upper_dims, k));
    if (k == marked_upper) o << ", shape=doublecircle";
    o << "];";
  }
  o << " }\n";
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k)
      for (int m = 0; m < d.matrix(i, k); ++m) o << "  " << lname(i) << " -- " << uname(k) << ";\n";
  o << "}\n";
  return o.str();
}

std::string bratteli_to_csv(const BratteliDiagram& d) {
  const int r = static_cast<int>(d.matrix.rows()), c = static_cast<int>(d.matrix.cols());
  auto lower = labels_or_default(d.lower, r, "a");
  auto upper = labels_or_default(d.upper, c, "b");
  std::ostringstream o;
  o << "lower/upper";
  for (const auto& u : upper) o << "," << u;
  o << "\n";
  for (int i = 0; i < r; ++i) {
    o << lower[i];
    for (int k = 0; k < c; ++k) o << "," << d.matrix(i, k);
    o << "\n";
  }
  return o.str();
}

json principal_graph_to_json(const PrincipalGraph& g) {
  json j;
  j["component"] = bratteli_to_json(g.component);
  j["full"] = bratteli_to_json(g.full);
  j["root"] = g.root;
  j["root_label"] = g.root >= 0 && g.root < static_cast<int>(g.component.upper.size()) ? json(g.component.upper[g.root]) : json();
  j["lower_index"] = g.lower_index;
  j["upper_index"] = g.upper_index;
  j["norm_sq"] = g.norm_sq;
  j["crossed_agrees"] = g.crossed_agrees;
  j["depth_two"] = g.depth_two;
  return j;
}

std::string principal_graph_to_dot(const PrincipalGraph& g) {
  return bratteli_to_dot(g.component, "principal_graph", g.root);
}

std::vector<std::pair<int, int>> covering_relations(const std::vector<CoidealSubalgebra>& cs) {
  const int n = static_cast<int>(cs.size());
  std::vector<std::vector<bool>> lt(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      lt[a][b] = a != b && cs[a].dim() < cs[b].dim() && contained(cs[a].Q, cs[b].Q);
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (!lt[a][b]) continue;
      bool covered = true;
      for (int m = 0; m < n && covered; ++m)
        if (lt[a][m] && lt[m][b]) covered = false;
      if (covered) out.emplace_back(a, b);
    }
  return out;
}

json lattice_to_json(const std::vector<CoidealSubalgebra>& cs) {
  json nodes = json::array(), edges = json::array();
  for (size_t i = 0; i < cs.size(); ++i)
    nodes.push_back({{"id", i},
                     {"dim", cs[i].dim()},
                     {"side", cs[i].side == Side::Left ? "left" : "right"},
                     {"connected", cs[i].connected},
                     {"residual", cs[i].residuals.worst()}});
  for (auto [a, b] : covering_relations(cs)) edges.push_back({a, b});
  return {{"nodes", nodes}, {"edges", edges}};
}

std::string lattice_to_dot(const std::vector<CoidealSubalgebra>& cs) {
  std::ostringstream o;
  o << "digraph coideals {\n  rankdir=BT;\n  node [shape=box];\n";
  for (size_t i = 0; i < cs.size(); ++i)
    o << "  n" << i << " [label=" << quote("I" + std::to_string(i) + " dim " + std::to_string(cs[i].dim())) << "];\n";
  for (auto [a, b] : covering_relations(cs)) o << "  n" << a << " -> n" << b << ";\n";
  o << "}\n";
  return o.str();
}

json galois_to_json(const GaloisReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"dim_I", e.dim_I},
                       {"dim_crossed", e.dim_K},
                       {"dim_delta", e.dim_delta},
                       {"center_check", e.center_check},
                       {"commutant_check", e.commutant_check},
                       {"literal_center_dim", e.literal_center_dim},
                       {"expected_center_dim", e.expected_center_dim},
                       {"basic_construction", e.basic_construction},
                       {"expectation_props", e.expectation_props},
                       {"generates", e.generates}});
  json j = lattice_to_json(r.coideals);
  j["entries"] = entries;
  j["injective"] = r.injective;
  j["order_preserving"] = r.order_preserving;
  j["meets_joins"] = r.meets_joins;
  j["delta_bijective"] = r.delta_bijective;
  j["delta_order_reversing"] = r.delta_order_reversing;
  j["delta_round_trip"] = r.delta_round_trip;
  j["pass"] = r.pass();
  j["failure"] = r.failure;
  return j;
}

json tower_summary_to_json(const Tower& T) {
  json levels = json::array();
  for (int l = 0; l <= T.levels(); ++l)
    levels.push_back({{"level", l}, {"blocks", T.algebras[l].dims()}, {"dim", T.algebras[l].dim()}});
  const TowerResiduals& r = T.residuals;
  json j;
  j["levels"] = levels;
  j["lambda"] = T.lambda;
  j["index"] = T.index();
  j["path_model"] = T.path_model;
  j["jones_generated"] = T.jones_generated;
  j["residuals"] = {{"jones", r.jones},
                    {"commutation", r.commutation},
                    {"projection", r.projection},
                    {"markov", r.markov},
                    {"expectation", r.expectation},
                    {"worst", r.worst()}};
  if (T.path_model) j["graph"] = graph_to_json(T.graph);
  return j;
}

json depth_to_json(const DepthReport& r) {
  return {{"k", r.k}, {"commutant_dims", r.commutant_dims}, {"center_dims", r.center_dims}, {"depth", r.depth}};
}

json axioms_to_json(const AxiomReport& r) {
  json res = json::object();
  for (const auto& [n, v] : r.residuals) res[n] = v;
  return {{"tol", r.tol}, {"pass", r.pass()}, {"worst", r.worst()}, {"worst_axiom", r.worst_name()}, {"residuals", res}};
}

json extraction_to_json(const Extraction& X) {
  const ExtractionReport& r = X.report;
  json j;
  j["k"] = X.k;
  j["dim_B"] = X.B.dim();
  j["blocks"] = X.B.B.dims();
  j["dim_Bt"] = X.dim_Bt;
  j["dim_Bs"] = X.dim_Bs;
  j["dim_I"] = X.I.cols();
  j["biconnected"] = X.biconnected;
  j["principal_computed"] = X.principal_computed;
  if (X.principal_computed) j["principal_graph"] = principal_graph_to_json(X.principal);
  j["principal_norm_sq"] = X.principal_norm_sq;
  j["norm_sq_counital"] = X.norm_sq_counital;
  j["norm_sq_target"] = X.norm_sq_target;
  j["axioms"] = axioms_to_json(X.axioms);
  j["checks"] = {{"pairing_min_singular", r.pairing_min_singular},
                 {"pairing_max_singular", r.pairing_max_singular},
                 {"counit_pairing", r.counit_pairing},
                 {"j_solve", r.j_solve},
                 {"j_involutive", r.j_involutive},
                 {"j_antimultiplicative", r.j_antimultiplicative},
                 {"dual_product", r.dual_product},
                 {"dual_unit", r.dual_unit},
                 {"dual_involution", r.dual_involution},
                 {"dual_involution_plain", r.dual_involution_plain},
                 {"twist_min_eigenvalue", r.twist_min_eigenvalue},
                 {"twist_hermitian", r.twist_hermitian},
                 {"separability_target_source", r.separability_target_source},
                 {"separability_jones", r.separability_jones},
                 {"separability_jones_symmetric", r.separability_jones_symmetric},
                 {"target_gap", r.target_gap},
                 {"source_gap", r.source_gap},
                 {"center_before", r.center_before},
                 {"center_after", r.center_after}};
  const MultiStepData& m = r.multi;
  j["multi_step"] = {{"f1_projection", m.f1_projection}, {"f2_projection", m.f2_projection},
                     {"tau_f1", m.tau_f1},               {"tau_f2", m.tau_f2},
                     {"f1_expectation", m.f1_expectation}, {"f2_expectation", m.f2_expectation}};
  return j;
}

json groupoid_to_json(const Groupoid& G) {
  json t = json::array();
  for (int i = 0; i < G.size(); ++i) {
    json row = json::array();
    for (int k = 0; k < G.size(); ++k) row.push_back(G.table(i, k));
    t.push_back(row);
  }
  return {{"elements", labels_or_default(G.names, G.size(), "g")}, {"multiplication", t}};
}

Groupoid groupoid_from_json(const json& j) {
  Groupoid G;
  try {
    G.names = field(j, "elements").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw IoError(std::string("elements: ") + e.what());
  }
  const int n = static_cast<int>(G.names.size());
  if (n == 0) throw IoError("elements must be nonempty");
  const json& t = field(j, "multiplication");
  if (!t.is_array() || static_cast<int>(t.size()) != n) throw IoError("multiplication table needs one row per element");
  G.table = IMat::Constant(n, n, -1);
  for (int a = 0; a < n; ++a) {
    if (!t[a].is_array() || static_cast<int>(t[a].size()) != n) throw IoError("multiplication table must be square");
    for (int b = 0; b < n; ++b) {
      const json& v = t[a][b];
      if (v.is_string()) {
        auto it = std::find(G.names.begin(), G.names.end(), v.get<std::string>());
        if (it == G.names.end()) throw IoError("multiplication table: unknown element " + v.get<std::string>());
        G.table(a, b) = static_cast<int>(it - G.names.begin());
      } else if (v.is_null()) {
        G.table(a, b) = -1;
      } else if (v.is_number_integer() && v.get<long long>() == -1) {
        G.table(a, b) = -1;
      } else {
        G.table(a, b) = as_index(v, n, "multiplication");
      }
    }
  }
  return G;
}

json graph_to_json(const RootedGraph& g) {
  json edges = json::array();
  for (int u = 0; u < g.size(); ++u)
    for (int v = u; v < g.size(); ++v)
      for (int m = 0; m < g.adj(u, v); ++m) edges.push_back({u, v});
  return {{"vertices", labels_or_default(g.names, g.size(), "v")}, {"edges", edges}, {"root", g.root}};
}

RootedGraph graph_from_json(const json& j) {
  RootedGraph g;
  const json& vs = field(j, "vertices");
  if (vs.is_number_integer()) {
    if (vs.get<long long>() < 1 || vs.get<long long>() > 4096) throw IoError("vertices: count out of range");
    g.names = labels_or_default({}, vs.get<int>(), "v");
  } else {
    try {
      g.names = vs.get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw IoError(std::string("vertices: ") + e.what());
    }
  }
  const int n = static_cast<int>(g.names.size());
  if (n == 0) throw IoError("vertices must be nonempty");
  auto vertex = [&](const json& v, const char* what) {
    if (v.is_string()) {
      auto it = std::find(g.names.begin(), g.names.end(), v.get<std::string>());
      if (it == g.names.end()) throw IoError(std::string(what) + ": unknown vertex " + v.get<std::string>());
      return static_cast<int>(it - g.names.begin());
    }
    return as_index(v, n, what);
  };
  g.adj = IMat::Zero(n, n);
  const json& es = field(j, "edges");
  if (!es.is_array()) throw IoError("edges must be an array");
  for (const json& e : es) {
    if (!e.is_array() || e.size() != 2) throw IoError("edges: each edge is a pair of vertices");
    int u = vertex(e[0], "edges"), v = vertex(e[1], "edges");
    if (u == v) throw IoError("edges: loops are not allowed");
    g.adj(u, v) += 1;
    g.adj(v, u) += 1;
  }
  g.root = j.contains("root") ? vertex(j.at("root"), "root") : 0;
  try {
    g.validate();
  } catch (const AlgebraError& e) {
    throw IoError(e.what());
  }
  return g;
}

}  // namespace qg
