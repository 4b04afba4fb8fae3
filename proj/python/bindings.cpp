#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qg/io.hpp"

namespace py = pybind11;
using namespace qg;

namespace {

// Reports cross the boundary as JSON text; the Python layer turns them into dicts.
std::string text(const json& j) { return j.dump(); }

ExampleKind example_kind(const std::string& s) {
  if (s == "group-algebra") return ExampleKind::GroupAlgebra;
  if (s == "function-algebra") return ExampleKind::FunctionAlgebra;
  if (s == "groupoid-algebra") return ExampleKind::GroupoidAlgebra;
  if (s == "groupoid-function-algebra") return ExampleKind::GroupoidFunctionAlgebra;
  throw py::value_error("unknown kind " + s);
}

Groupoid named(const std::string& s) {
  if (s == "s3") return symmetric_group3();
  if (s.rfind("cyclic:", 0) == 0) return cyclic_group(std::stoi(s.substr(7)));
  if (s.rfind("pair:", 0) == 0) return pair_groupoid(std::stoi(s.substr(5)));
  throw py::value_error("unknown example " + s + " (use s3, cyclic:N or pair:N)");
}

RootedGraph graph_from(const std::string& text) { return graph_from_json(json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite quantum groupoids: structure tensors, duals, coideals, principal graphs and Jones towers";

  py::register_exception<AlgebraError>(m, "AlgebraError");
  py::register_exception<IoError>(m, "IoError");

  py::class_<WeakHopfAlgebra>(m, "WeakHopfAlgebra")
      .def_property_readonly("dim", &WeakHopfAlgebra::dim)
      .def_property_readonly("blocks", [](const WeakHopfAlgebra& W) { return W.B.dims(); })
      .def_readonly("name", &WeakHopfAlgebra::name)
      .def_readonly("delta", &WeakHopfAlgebra::delta, "D^2 x D coproduct, row i * D + j")
      .def_readonly("eps", &WeakHopfAlgebra::eps)
      .def_readonly("antipode", &WeakHopfAlgebra::S)
      .def_readonly("star", &WeakHopfAlgebra::star, "x* = star @ conj(x)")
      .def("unit", &WeakHopfAlgebra::unit)
      .def("mul", [](const WeakHopfAlgebra& W, const Vec& x, const Vec& y) { return W.B.mul(x, y); })
      .def("coproduct", &WeakHopfAlgebra::coproduct)
      .def("eps_t", &WeakHopfAlgebra::eps_t)
      .def("eps_s", &WeakHopfAlgebra::eps_s)
      .def("to_json", [](const WeakHopfAlgebra& W) { return dump_json(wha_to_json(W)); })
      .def("__repr__", [](const WeakHopfAlgebra& W) {
        std::string b;
        for (int n : W.B.dims()) b += (b.empty() ? "" : ", ") + std::to_string(n);
        return "<WeakHopfAlgebra " + (W.name.empty() ? std::string("") : W.name + " ") + "dim " +
               std::to_string(W.dim()) + " blocks [" + b + "]>";
      });

  m.def(
      "build_example", [](const std::string& kind, const std::string& example, double tol) {
        return build_example(example_kind(kind), named(example), tol);
      },
      py::arg("kind"), py::arg("example"), py::arg("tol") = kDefaultTol);
  m.def(
      "build_from_presentation",
      [](const std::string& kind, const std::string& presentation, double tol) {
        Groupoid G = groupoid_from_json(json::parse(presentation));
        G.validate();
        return build_example(example_kind(kind), G, tol);
      },
      py::arg("kind"), py::arg("presentation_json"), py::arg("tol") = kDefaultTol);
  m.def("wha_from_json", [](const std::string& s) { return wha_from_json(json::parse(s)); }, py::arg("text"));

  m.def(
      "_verify_axioms", [](const WeakHopfAlgebra& W, double tol) { return text(axioms_to_json(verify_axioms(W, tol))); },
      py::arg("W"), py::arg("tol") = kDefaultTol);
  m.def(
      "haar_projection", [](const WeakHopfAlgebra& W, double tol) { return haar_projection(W, tol).p; }, py::arg("W"),
      py::arg("tol") = kDefaultTol);
  m.def(
      "haar_functional",
      [](const WeakHopfAlgebra& W) {
        try {
          return haar_functional(W).phi;
        } catch (const AlgebraError&) {
          return haar_functional_solve(W).phi;
        }
      },
      py::arg("W"));
  m.def(
      "_strong_invariance",
      [](const WeakHopfAlgebra& W, std::optional<Vec> phi) {
        InvarianceReport r = phi ? check_strong_invariance(W, &*phi) : check_strong_invariance(W);
        return text({{"phi_left", r.phi_left},
                     {"phi_right", r.phi_right},
                     {"tau_left", r.tau_left},
                     {"tau_right", r.tau_right},
                     {"tau_checked", r.tau_checked},
                     {"worst", r.worst()}});
      },
      py::arg("W"), py::arg("phi") = py::none());
  m.def(
      "dual", [](const WeakHopfAlgebra& W, double tol) {
        DualData d = dualize(W, tol);
        return py::make_tuple(d.Wd, d.pairing.P);
      },
      py::arg("W"), py::arg("tol") = kDefaultTol, "B* and the pairing matrix P with <phi, b> = phi^T P b");
  m.def(
      "bidual_residual", [](const WeakHopfAlgebra& W, double tol) { return bidual_isomorphism(W, tol).residual; },
      py::arg("W"), py::arg("tol") = kDefaultTol);
  m.def(
      "heisenberg_blocks", [](const WeakHopfAlgebra& W, double tol) { return heisenberg_double(W, dualize(W, tol), tol).alg.dims(); },
      py::arg("W"), py::arg("tol") = kDefaultTol);

  m.def(
      "_coideals",
      [](const WeakHopfAlgebra& W, bool conjugacy, int max_dim, double tol) {
        CoidealContext ctx(W, tol);
        auto cs = enumerate_coideals(ctx, conjugacy ? EnumerationMode::UpToConjugacy : EnumerationMode::Brute, max_dim);
        std::vector<Mat> bases;
        for (const auto& c : cs) bases.push_back(c.Q);
        return py::make_tuple(text(lattice_to_json(cs)), bases);
      },
      py::arg("W"), py::arg("conjugacy") = false, py::arg("max_dim") = 16, py::arg("tol") = kDefaultTol);
  m.def(
      "_galois", [](const WeakHopfAlgebra& W, double tol) {
        CoidealContext ctx(W, tol);
        return text(galois_to_json(galois_verify(ctx, tol)));
      },
      py::arg("W"), py::arg("tol") = kDefaultTol);
  m.def(
      "_principal_graph",
      [](const WeakHopfAlgebra& W, std::optional<Mat> span, double tol) {
        CoidealContext ctx(W, tol);
        Mat Q = span ? orth(*span) : Mat::Identity(W.dim(), W.dim());
        PrincipalGraph g = principal_graph(ctx, check_coideal(ctx, Q, Side::Left), true);
        return py::make_tuple(text(principal_graph_to_json(g)), principal_graph_to_dot(g));
      },
      py::arg("W"), py::arg("coideal") = py::none(), py::arg("tol") = kDefaultTol);

  m.def(
      "_depth_from_graph", [](const std::string& g, int k) { return text(depth_to_json(depth_from_graph(graph_from(g), k))); },
      py::arg("graph_json"), py::arg("k") = 0);
  m.def("reduced_depth_formula", &reduced_depth_formula, py::arg("n"), py::arg("k"));
  m.def(
      "_tower_summary",
      [](const std::string& g, int levels, double tol) { return text(tower_summary_to_json(path_tower(graph_from(g), levels, tol))); },
      py::arg("graph_json"), py::arg("levels"), py::arg("tol") = kDefaultTol);
  m.def(
      "_extract",
      [](const std::string& g, int k, double tol) {
        Tower T = path_tower(graph_from(g), 3 * k + 3, tol);
        Extraction X = extract_wha(T, k, tol);
        return py::make_tuple(X.B, text(extraction_to_json(X)));
      },
      py::arg("graph_json"), py::arg("k"), py::arg("tol") = kDefaultTol);
}
