// qgtool: batch frontend for the quantum groupoid library.
//
// Exit codes: 0 success, 1 a mathematical check failed or a precondition does not hold,
// 2 unreadable or malformed input, bad usage, or an input above --max-dim.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qg/io.hpp"

using namespace qg;
namespace fs = std::filesystem;

namespace {

// Input rejected before any computation; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string out;
  std::string format = "json";
  std::string task;
  std::string kind = "group-algebra";
  std::string coideal;
  std::string mode = "brute";
  std::string example;
  double tol = kDefaultTol;
  int max_dim = 64;
  int k = 1;

  void validate() const {
    if (!(tol > 0)) throw UsageError("--tol must be positive");
    if (max_dim < 1) throw UsageError("--max-dim must be positive");
    if (k < 0) throw UsageError("--k must be nonnegative");
  }
};

enum class InputKind { Wha, Groupoid, Graph, Bratteli, PrincipalGraph, Lattice };

InputKind detect(const json& j) {
  if (!j.is_object()) throw IoError("input must be a JSON object");
  if (j.contains("blocks") && j.contains("delta")) return InputKind::Wha;
  if (j.contains("elements") && j.contains("multiplication")) return InputKind::Groupoid;
  if (j.contains("vertices") && j.contains("edges")) return InputKind::Graph;
  if (j.contains("component") && j.contains("root")) return InputKind::PrincipalGraph;
  if (j.contains("lower") && j.contains("upper") && j.contains("matrix")) return InputKind::Bratteli;
  if (j.contains("nodes") && j.contains("edges")) return InputKind::Lattice;
  throw IoError("unrecognized input: expected WHA-JSON, a group(oid) presentation, a graph, a Bratteli diagram, a "
                "principal graph or a coideal lattice");
}

ExampleKind example_kind(const std::string& s) {
  static const std::map<std::string, ExampleKind> m = {{"group-algebra", ExampleKind::GroupAlgebra},
                                                       {"function-algebra", ExampleKind::FunctionAlgebra},
                                                       {"groupoid-algebra", ExampleKind::GroupoidAlgebra},
                                                       {"groupoid-function-algebra", ExampleKind::GroupoidFunctionAlgebra}};
  auto it = m.find(s);
  if (it == m.end()) throw UsageError("unknown --kind " + s);
  return it->second;
}

Groupoid named_example(const std::string& s) {
  if (s == "s3") return symmetric_group3();
  if (s.rfind("cyclic:", 0) == 0) return cyclic_group(std::stoi(s.substr(7)));
  if (s.rfind("pair:", 0) == 0) return pair_groupoid(std::stoi(s.substr(5)));
  throw UsageError("unknown --example " + s + " (use s3, cyclic:N or pair:N)");
}

void check_dim(int d, const RunConfig& cfg, const std::string& what) {
  if (d > cfg.max_dim)
    throw UsageError(what + " has dimension " + std::to_string(d) + ", above --max-dim " + std::to_string(cfg.max_dim));
}

// Quantum groupoid from WHA-JSON (axioms re-verified) or from a group(oid) presentation.
WeakHopfAlgebra load_algebra(const json& j, const RunConfig& cfg) {
  InputKind kind = detect(j);
  if (kind == InputKind::Groupoid) {
    Groupoid G = groupoid_from_json(j);
    try {
      G.validate();
    } catch (const AlgebraError& e) {
      throw IoError(std::string("group(oid) presentation: ") + e.what());
    }
    check_dim(G.size(), cfg, "the group(oid) algebra");
    return build_example(example_kind(cfg.kind), G, cfg.tol);
  }
  if (kind != InputKind::Wha) throw IoError("this command needs WHA-JSON or a group(oid) presentation");
  WeakHopfAlgebra W = wha_from_json(j);
  check_dim(W.dim(), cfg, "the input");
  AxiomReport ax = verify_axioms(W, cfg.tol);
  if (!ax.pass())
    throw AlgebraError("input fails the axiom " + ax.worst_name() + " (residual " + std::to_string(ax.worst()) + ")");
  return W;
}

class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  void write(const std::string& file, const std::string& text) {
    if (dir_.empty()) {
      std::cout << text;
      return;
    }
    write_text_file((fs::path(dir_) / file).string(), text);
    std::cerr << "wrote " << (fs::path(dir_) / file).string() << "\n";
  }
  void json_file(const std::string& file, const json& j) { write(file, dump_json(j)); }

 private:
  std::string dir_;
};

int cmd_verify(const RunConfig& cfg) {
  json j = read_json_file(cfg.input);
  if (detect(j) != InputKind::Wha) throw IoError("verify needs WHA-JSON input");
  WeakHopfAlgebra W = wha_from_json(j);
  check_dim(W.dim(), cfg, "the input");
  AxiomReport ax = verify_axioms(W, cfg.tol);
  json report = axioms_to_json(ax);
  for (const auto& [name, r] : ax.residuals)
    std::cout << (r <= cfg.tol ? "pass " : "FAIL ") << name << " " << r << "\n";
  bool ok = ax.pass();
  if (ok) {
    std::optional<InvarianceReport> inv;
    try {
      inv = check_strong_invariance(W);
    } catch (const AlgebraError&) {
      HaarFunctional h = haar_functional_solve(W);
      inv = check_strong_invariance(W, &h.phi);
    }
    std::cout << (inv->worst() <= cfg.tol ? "pass " : "FAIL ") << "strong_invariance " << inv->worst() << "\n";
    report["strong_invariance"] = {{"phi_left", inv->phi_left},
                                   {"phi_right", inv->phi_right},
                                   {"tau_left", inv->tau_left},
                                   {"tau_right", inv->tau_right},
                                   {"tau_checked", inv->tau_checked}};
    if (!inv->tau_checked) std::cout << "note: disconnected algebra, tau identities not checked\n";
    ok = inv->worst() <= cfg.tol;
  }
  report["pass"] = ok;
  if (!cfg.out.empty()) write_text_file(cfg.out, dump_json(report));
  std::cout << (ok ? "all checks pass" : "failed: " + ax.worst_name()) << "\n";
  return ok ? 0 : 1;
}

int cmd_build(const RunConfig& cfg) {
  Groupoid G;
  if (!cfg.example.empty()) {
    G = named_example(cfg.example);
  } else {
    if (cfg.input.empty()) throw UsageError("build needs a presentation file or --example");
    json j = read_json_file(cfg.input);
    if (detect(j) != InputKind::Groupoid) throw IoError("build needs a group(oid) presentation");
    G = groupoid_from_json(j);
    try {
      G.validate();
    } catch (const AlgebraError& e) {
      throw IoError(std::string("group(oid) presentation: ") + e.what());
    }
  }
  check_dim(G.size(), cfg, "the group(oid) algebra");
  WeakHopfAlgebra W = build_example(example_kind(cfg.kind), G, cfg.tol);
  std::string text = dump_json(wha_to_json(W));
  if (cfg.out.empty())
    std::cout << text;
  else
    write_text_file(cfg.out, text);
  return 0;
}

int task_coideals(const json& in, const RunConfig& cfg, Outputs& out) {
  WeakHopfAlgebra W = load_algebra(in, cfg);
  CoidealContext ctx(W, cfg.tol);
  EnumerationMode mode = cfg.mode == "conjugacy" ? EnumerationMode::UpToConjugacy : EnumerationMode::Brute;
  auto cs = enumerate_coideals(ctx, mode, cfg.max_dim);
  out.json_file("lattice.json", lattice_to_json(cs));
  if (cfg.format == "dot") out.write("lattice.dot", lattice_to_dot(cs));
  std::cerr << cs.size() << " coideals\n";
  return 0;
}

int task_galois(const json& in, const RunConfig& cfg, Outputs& out) {
  WeakHopfAlgebra W = load_algebra(in, cfg);
  CoidealContext ctx(W, cfg.tol);
  GaloisReport r = galois_verify(ctx, cfg.tol);
  out.json_file("galois.json", galois_to_json(r));
  if (cfg.format == "dot") out.write("lattice.dot", lattice_to_dot(r.coideals));
  if (!r.pass()) std::cerr << "galois check failed: " << r.failure << "\n";
  return r.pass() ? 0 : 1;
}

int task_principal_graph(const json& in, const RunConfig& cfg, Outputs& out) {
  WeakHopfAlgebra W = load_algebra(in, cfg);
  CoidealContext ctx(W, cfg.tol);
  Mat span = Mat::Identity(W.dim(), W.dim());
  if (!cfg.coideal.empty()) {
    span = matrix_from_json(read_json_file(cfg.coideal));
    if (span.rows() != W.dim()) throw IoError("coideal basis must have one row per coordinate of B");
  }
  CoidealSubalgebra K = check_coideal(ctx, orth(span), Side::Left);
  PrincipalGraph g = principal_graph(ctx, K, true);
  out.json_file("principal_graph.json", principal_graph_to_json(g));
  if (cfg.format == "dot") out.write("principal_graph.dot", principal_graph_to_dot(g));
  if (cfg.format == "csv") out.write("principal_graph.csv", bratteli_to_csv(g.component));
  std::cerr << "norm^2 " << g.norm_sq << "\n";
  return 0;
}

int task_dual(const json& in, const RunConfig& cfg, Outputs& out) {
  WeakHopfAlgebra W = load_algebra(in, cfg);
  DualData d = dualize(W, cfg.tol);
  AxiomReport ax = verify_axioms(d.Wd, cfg.tol);
  PairingReport pr = check_pairing(W, d.Wd, d.pairing.P);
  out.json_file("dual.json", wha_to_json(d.Wd));
  out.json_file("pairing.json", {{"matrix", matrix_to_json(d.pairing.P)},
                                 {"residual", pr.worst()},
                                 {"condition", pr.condition},
                                 {"axioms", axioms_to_json(ax)}});
  return ax.pass() && pr.worst() <= cfg.tol ? 0 : 1;
}

int task_tower_extract(const json& in, const RunConfig& cfg, Outputs& out) {
  if (detect(in) != InputKind::Graph) throw IoError("tower-extract needs a graph {vertices, edges, root}");
  RootedGraph g = graph_from_json(in);
  DepthReport walks = depth_from_graph(g);
  // dim B = dim N' cap M_{2k+1}, the closed walks of length 2(2k+2) at the root.
  size_t slot = static_cast<size_t>(2 * cfg.k + 2);
  if (slot < walks.commutant_dims.size()) check_dim(static_cast<int>(walks.commutant_dims[slot]), cfg, "the extracted algebra");
  Tower T = path_tower(g, 3 * cfg.k + 3, cfg.tol);
  out.json_file("tower.json", tower_summary_to_json(T));
  out.json_file("depth.json", depth_to_json(depth_from_graph(g, cfg.k)));
  Extraction X = extract_wha(T, cfg.k, cfg.tol);
  out.json_file("wha.json", wha_to_json(X.B));
  out.json_file("extraction.json", extraction_to_json(X));
  if (X.principal_computed && cfg.format == "dot") out.write("principal_graph.dot", principal_graph_to_dot(X.principal));
  if (X.principal_computed && cfg.format == "csv") out.write("principal_graph.csv", bratteli_to_csv(X.principal.component));
  std::cerr << "dim B " << X.B.dim() << ", principal graph norm^2 " << X.principal_norm_sq << "\n";
  return X.axioms.pass() ? 0 : 1;
}

int cmd_analyze(const RunConfig& cfg) {
  json in = read_json_file(cfg.input);
  Outputs out(cfg.out);
  if (cfg.task == "coideals") return task_coideals(in, cfg, out);
  if (cfg.task == "galois") return task_galois(in, cfg, out);
  if (cfg.task == "principal-graph") return task_principal_graph(in, cfg, out);
  if (cfg.task == "dual") return task_dual(in, cfg, out);
  if (cfg.task == "tower-extract") return task_tower_extract(in, cfg, out);
  throw UsageError("unknown task " + cfg.task);
}

int cmd_export(const RunConfig& cfg) {
  json in = read_json_file(cfg.input);
  InputKind kind = detect(in);
  std::string text;
  const std::string& f = cfg.format;
  auto refuse = [&]() -> std::string { throw UsageError("format " + f + " is not available for this input"); };
  switch (kind) {
    case InputKind::Wha:
      text = f == "json" ? dump_json(wha_to_json(wha_from_json(in))) : refuse();
      break;
    case InputKind::Groupoid:
      text = f == "json" ? dump_json(groupoid_to_json(groupoid_from_json(in))) : refuse();
      break;
    case InputKind::Graph: {
      RootedGraph g = graph_from_json(in);
      if (f == "json") {
        text = dump_json(graph_to_json(g));
      } else if (f == "dot") {
        std::ostringstream o;
        o << "graph \"graph\" {\n";
        for (int v = 0; v < g.size(); ++v)
          o << "  v" << v << " [label=\"" << g.names[v] << "\"" << (v == g.root ? ", shape=doublecircle" : "") << "];\n";
        for (int u = 0; u < g.size(); ++u)
          for (int v = u; v < g.size(); ++v)
            for (int m = 0; m < g.adj(u, v); ++m) o << "  v" << u << " -- v" << v << ";\n";
        o << "}\n";
        text = o.str();
      } else {
        refuse();
      }
      break;
    }
    case InputKind::Bratteli: {
      BratteliDiagram d = bratteli_from_json(in);
      text = f == "json" ? dump_json(bratteli_to_json(d)) : f == "dot" ? bratteli_to_dot(d) : bratteli_to_csv(d);
      break;
    }
    case InputKind::PrincipalGraph: {
      BratteliDiagram d = bratteli_from_json(in.at("component"));
      int root = in.at("root").is_number_integer() ? in.at("root").get<int>() : -1;
      text = f == "json" ? dump_json(in) : f == "dot" ? bratteli_to_dot(d, "principal_graph", root) : bratteli_to_csv(d);
      break;
    }
    case InputKind::Lattice: {
      if (f == "json") {
        text = dump_json(in);
        break;
      }
      if (f != "dot") refuse();
      std::ostringstream o;
      o << "digraph coideals {\n  rankdir=BT;\n  node [shape=box];\n";
      for (const json& n : in.at("nodes"))
        o << "  n" << n.at("id").get<int>() << " [label=\"I" << n.at("id").get<int>() << " dim " << n.at("dim").get<int>()
          << "\"];\n";
      for (const json& e : in.at("edges")) o << "  n" << e.at(0).get<int>() << " -> n" << e.at(1).get<int>() << ";\n";
      o << "}\n";
      text = o.str();
      break;
    }
  }
  if (cfg.out.empty())
    std::cout << text;
  else
    write_text_file(cfg.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Finite quantum groupoids: axiom checks, coideals, principal graphs and Jones tower extraction"};
  app.require_subcommand(1);
  app.add_option("--tol", cfg.tol, "numerical tolerance")->capture_default_str();
  app.add_option("--max-dim", cfg.max_dim, "largest accepted algebra dimension")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "check the axioms of a WHA-JSON file (exit 0 iff they hold)");
  verify->add_option("input", cfg.input, "WHA-JSON file")->required();
  verify->add_option("--out", cfg.out, "write the report as JSON");

  auto* build = app.add_subcommand("build", "build a quantum groupoid from a group(oid) presentation");
  build->add_option("input", cfg.input, "presentation JSON {elements, multiplication}");
  build->add_option("--example", cfg.example, "s3, cyclic:N or pair:N instead of a file");
  build->add_option("--kind", cfg.kind, "group-algebra, function-algebra, groupoid-algebra or groupoid-function-algebra")
      ->capture_default_str();
  build->add_option("--out", cfg.out, "output WHA-JSON file (stdout if omitted)");

  auto* analyze = app.add_subcommand("analyze", "run an analysis and write its artifacts");
  analyze->add_option("input", cfg.input, "WHA-JSON, presentation or graph JSON")->required();
  analyze->add_option("--task", cfg.task, "analysis to run")
      ->required()
      ->check(CLI::IsMember({"coideals", "galois", "principal-graph", "dual", "tower-extract"}));
  analyze->add_option("--out", cfg.out, "output directory (stdout if omitted)");
  analyze->add_option("--format", cfg.format, "extra artifact format next to JSON")
      ->check(CLI::IsMember({"json", "dot", "csv"}))
      ->capture_default_str();
  analyze->add_option("--kind", cfg.kind, "structure built from a presentation input")->capture_default_str();
  analyze->add_option("--k", cfg.k, "tower-extract: use the inclusion N subset M_k")->capture_default_str();
  analyze->add_option("--coideal", cfg.coideal, "principal-graph: dense matrix JSON spanning K (default K = B)");
  analyze->add_option("--mode", cfg.mode, "coideals: enumeration mode")
      ->check(CLI::IsMember({"brute", "conjugacy"}))
      ->capture_default_str();

  auto* exp = app.add_subcommand("export", "convert an artifact (JSON to JSON, DOT or CSV)");
  exp->add_option("input", cfg.input, "artifact JSON")->required();
  exp->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "dot", "csv"}))->capture_default_str();
  exp->add_option("--out", cfg.out, "output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.validate();
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (*verify) return cmd_verify(cfg);
    if (*build) return cmd_build(cfg);
    if (*analyze) return cmd_analyze(cfg);
    if (*exp) return cmd_export(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const AlgebraError& e) {
    std::cerr << "failed: " << (cfg.task.empty() ? cfg.command : cfg.task) << ": " << e.what() << "\n";
    return 1;
  }
  return 2;
}
