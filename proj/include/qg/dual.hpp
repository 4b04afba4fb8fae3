#pragma once
// Duality B <-> B*, dual actions, crossed products and their traces.

#include <vector>

#include "qg/wha.hpp"

namespace qg {

// <phi, b> = phi^T P b with phi in block coordinates of B* and b in block coordinates of B.
struct Pairing {
  Mat P;
  double min_singular = 0, max_singular = 0;
};

struct DualData {
  WeakHopfAlgebra Wd;
  Pairing pairing;
  double semisimplicity_margin = 0;
};

// Builds B* on the dual basis and realizes it as a multimatrix algebra.
DualData dualize(const WeakHopfAlgebra& W, double tol = kDefaultTol);

struct PairingReport {
  double product = 0, coproduct = 0, antipode = 0, involution = 0, unit = 0, counit = 0;
  double condition = 0;  // smallest / largest singular value of the form
  double worst() const;
};
PairingReport check_pairing(const WeakHopfAlgebra& W, const WeakHopfAlgebra& Wd, const Mat& P);

// The canonical map B -> B** in coordinates, with the worst structure-intertwining residual.
struct BidualIsomorphism {
  WeakHopfAlgebra Wdd;
  Mat iso;
  double residual = 0;
};
BidualIsomorphism bidual_isomorphism(const WeakHopfAlgebra& W, double tol = kDefaultTol);
// Worst residual of T intertwining every structure map of W1 with W2.
double isomorphism_residual(const WeakHopfAlgebra& W1, const WeakHopfAlgebra& W2, const Mat& T);

bool dual_is_connected(const WeakHopfAlgebra& W);

// acts[b] is the matrix of x -> e_b |> x on the target algebra.
struct ActionData {
  MultiMatrix target;
  Mat target_star;
  std::vector<Mat> acts;
  Mat act(const Vec& b) const;
};

struct ActionReport {
  double unital = 0, associative = 0, module_algebra = 0, star = 0, counital = 0;
  double worst() const;
};
ActionReport check_action(const WeakHopfAlgebra& W, const ActionData& a);

// a |> phi = phi_(1) <phi_(2), a> (left action of B on B*), and phi <| a = <phi_(1), a> phi_(2).
struct DualActions {
  ActionData left;                  // B acting on B*
  std::vector<Mat> right;           // right[a]: phi -> phi <| e_a
  std::vector<Mat> dual_on_B_left;  // dual_on_B_left[k]: b -> b_(1) <e^k, b_(2)>
  std::vector<Mat> dual_on_B_right; // dual_on_B_right[k]: b -> <e^k, b_(1)> b_(2)
};
DualActions dual_actions(const WeakHopfAlgebra& W, const DualData& d);

// A ><| I for a left coideal *-subalgebra I (orthonormal basis QI in B coordinates).
struct CrossedProduct {
  MultiMatrix alg;
  int dA = 0, dI = 0;
  Mat QI;
  Mat Qc;    // orthonormal complement of the relations in A (x) I coordinates (x * dI + b)
  Mat T, Tinv;  // class coordinates <-> block coordinates of alg
  Mat embed_A;  // column x: [e_x (x) 1]
  Mat embed_I;  // column b: [1 (x) QI_b]
  double well_defined = 0;  // products of relations stay in the relation space
  double star_closure = 0, homomorphism = 0;
  Vec element(const Vec& x, const Vec& b) const;  // [x (x) b] in alg coordinates, b in B coordinates
};
CrossedProduct crossed_product(const WeakHopfAlgebra& W, const ActionData& action, const Mat& QI,
                               double tol = kDefaultTol);
CrossedProduct heisenberg_double(const WeakHopfAlgebra& W, const DualData& d, double tol = kDefaultTol);

// Fixed points {x : b |> x = eps_t(b) |> x for all b}; b ranges over the columns of `span` when given.
SubAlgebra fixed_points(const WeakHopfAlgebra& W, const ActionData& a, const Mat* span = nullptr);

struct CrossedTrace {
  Vec functional;  // tau(y) = functional^T y in alg coordinates
  std::vector<double> weights;
  double trace_residual = 0, relation_residual = 0;
  bool faithful = false;
};
// tau([x (x) b]) = tau_A(x) tau(H b) with tau_A given by block weights on the target.
CrossedTrace crossed_trace(const WeakHopfAlgebra& W, const ActionData& action, const CrossedProduct& cp,
                           const std::vector<double>& target_weights);

}  // namespace qg
