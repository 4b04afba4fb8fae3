#pragma once
// Serialization: WHA-JSON v1, Bratteli diagrams (JSON, DOT, CSV), coideal lattices,
// tower summaries, dense complex matrices and the group(oid)/graph presentation inputs.

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qg/coideal.hpp"
#include "qg/tower.hpp"

namespace qg {

using json = nlohmann::json;

// Malformed or schema-violating input.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
// Two-space indented, keys sorted, trailing newline.
std::string dump_json(const json& j);

// WHA-JSON v1. Coefficients with |re|, |im| below 1e-14 are written as 0 and entries that
// vanish are dropped, so export(import(export(W))) == export(W) byte for byte.
json wha_to_json(const WeakHopfAlgebra& W);
// Schema errors throw IoError; axioms are not checked here (see load_wha).
WeakHopfAlgebra wha_from_json(const json& j);
struct LoadedWha {
  WeakHopfAlgebra W;
  AxiomReport axioms;
};
LoadedWha load_wha(const json& j, double tol = kDefaultTol);

json matrix_to_json(const Mat& M);  // {"rows", "cols", "re": [[...]], "im": [[...]]}
Mat matrix_from_json(const json& j);

json bratteli_to_json(const BratteliDiagram& d);
BratteliDiagram bratteli_from_json(const json& j);
// Lower blocks on the top rank, upper blocks on the bottom rank, one edge per unit of
// multiplicity. marked_upper >= 0 draws that upper vertex as a double circle.
std::string bratteli_to_dot(const BratteliDiagram& d, const std::string& name = "bratteli", int marked_upper = -1);
// Multiplicity table: header "lower/upper,<upper labels>", one row per lower block.
std::string bratteli_to_csv(const BratteliDiagram& d);

json principal_graph_to_json(const PrincipalGraph& g);
std::string principal_graph_to_dot(const PrincipalGraph& g);

// Nodes are the coideals (dimension, side, connectivity, worst residual); edges are covering
// relations of the inclusion order, from the smaller to the larger coideal.
json lattice_to_json(const std::vector<CoidealSubalgebra>& coideals);
std::string lattice_to_dot(const std::vector<CoidealSubalgebra>& coideals);
std::vector<std::pair<int, int>> covering_relations(const std::vector<CoidealSubalgebra>& coideals);

json galois_to_json(const GaloisReport& r);
json tower_summary_to_json(const Tower& T);
json depth_to_json(const DepthReport& r);
json extraction_to_json(const Extraction& X);
json axioms_to_json(const AxiomReport& r);

// {"elements": [names], "multiplication": [[index or -1]]} (-1 marks non-composable pairs).
json groupoid_to_json(const Groupoid& G);
Groupoid groupoid_from_json(const json& j);
// {"vertices": [names], "edges": [[u, v], ...], "root": index or name}; a repeated edge adds
// multiplicity.
json graph_to_json(const RootedGraph& g);
RootedGraph graph_from_json(const json& j);

}  // namespace qg
