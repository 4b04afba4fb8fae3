#pragma once
// Finite Jones towers N = A_0 subset A_1 subset ... subset A_m, multi-step Jones projections,
// depth from walk counting or from relative commutants, and extraction of a quantum groupoid
// from the depth-two data of N subset M_k.
//
// Level indexing: level 0 is N and level j + 1 is M_j. The Jones projection e_i lives in
// level i + 1 and implements the expectation onto level i - 1.

#include <string>
#include <vector>

#include "qg/corep.hpp"

namespace qg {

struct RootedGraph {
  IMat adj;  // symmetric, nonnegative
  int root = 0;
  std::vector<std::string> names;
  int size() const { return static_cast<int>(adj.rows()); }
  void validate() const;  // throws AlgebraError for asymmetric, negative or disconnected input
};

// Path graph A_n rooted at an end, and D_n (n >= 4) rooted at the end of its long arm.
RootedGraph path_graph(int n);
RootedGraph dynkin_d(int n);
// Bipartite graph of an inclusion whose lower algebra is a factor, rooted at that factor.
RootedGraph inclusion_graph(const BratteliDiagram& d);

struct TowerResiduals {
  double jones = 0;        // e_i e_{i+-1} e_i = lambda e_i
  double commutation = 0;  // [e_i, e_j] = 0 for |i - j| >= 2
  double projection = 0;   // e_i = e_i^2 = e_i^*
  double markov = 0;       // tau(w e_{i+1}) = lambda tau(w) for w in level i + 1
  double expectation = 0;  // e_i x e_i = E_{level i-1}(x) e_i for x in level i
  double worst() const;
};

struct Tower {
  std::vector<MultiMatrix> algebras;  // level j as an abstract multimatrix algebra
  std::vector<Mat> inclusions;        // level j coordinates -> top coordinates
  std::vector<Vec> e;                 // e[i - 1] = e_i in top coordinates
  std::vector<double> weights;        // Markov trace on the top level, tau(1) = 1
  double lambda = 0;                  // index^{-1}
  bool path_model = false;            // levels are the relative commutants N' cap M_{j-1} of a graph
  bool jones_generated = false;       // every level is generated by the Jones projections
  RootedGraph graph;                  // set for path models
  TowerResiduals residuals;

  int levels() const { return static_cast<int>(algebras.size()) - 1; }
  const MultiMatrix& top() const { return algebras.back(); }
  double index() const { return 1.0 / lambda; }
  const Vec& jones(int i) const { return e.at(static_cast<size_t>(i - 1)); }
  cd tau(const Vec& x) const { return top().trace(x, weights); }
  // Orthonormal basis of level j inside the top level.
  Mat level(int j) const;
  // M_i' cap M_j (i >= -1, with M_{-1} = N) as an orthonormal basis in top coordinates.
  Mat relative_commutant(int i, int j) const;
};

// Tower over A_0 subset A_1 (A_0 given by an orthonormal basis QS in A_1 coordinates) with
// levels 0..m, obtained by m - 1 basic constructions. Throws for a disconnected inclusion or
// when an invariant fails.
Tower jones_tower(const MultiMatrix& A1, const Mat& QS, int levels, double tol = kDefaultTol);
// Path-algebra model: level j is spanned by pairs of paths of length j from the root with a
// common end, the trace and the Jones projections come from the Perron-Frobenius data.
// Simple graphs only.
Tower path_tower(const RootedGraph& g, int levels, double tol = kDefaultTol);
TowerResiduals tower_residuals(const Tower& T);

struct MultiStepData {
  int k = 0;
  Vec f1, f2;
  double f1_projection = 0, f2_projection = 0;
  double tau_f1 = 0, tau_f2 = 0;                // deviation from lambda^{k+1}
  double f1_expectation = 0, f2_expectation = 0;  // f x f = E(x) f on the relevant level
};
// f1 = lambda^{-k(k+1)/2} (e_{k+1} ... e_1)(e_{k+2} ... e_2) ... (e_{2k+1} ... e_{k+1}), and f2 the
// same product shifted by k + 1. Needs at least 3k + 3 levels.
MultiStepData multi_step_data(const Tower& T, int k, double tol = kDefaultTol);

struct DepthReport {
  int k = 0;
  std::vector<long long> commutant_dims;  // dim N' cap P_{j-1} for j = 1, 2, ... with P = M_k
  std::vector<int> center_dims;           // dim Z(N' cap P_{j-1}) for j = 0, 1, ...
  int depth = -1;                         // -1 when the samples do not determine it
};
// Composed inclusion N subset M_k of the subfactor with the given principal graph.
DepthReport depth_from_graph(const RootedGraph& g, int k = 0);
// Same data read off the tower; uses every sample the tower provides.
DepthReport depth_from_tower(const Tower& T, int k = 0);
// ceil((n - 1) / (k + 1)) + 1.
int reduced_depth_formula(int n, int k);

struct ExtractionReport {
  MultiStepData multi;
  double pairing_min_singular = 0, pairing_max_singular = 0;
  double counit_pairing = 0;        // eps(b) = <1, b>
  double j_solve = 0;               // least-squares residual of the trace-form system for j
  double j_involutive = 0, j_antimultiplicative = 0;
  // A -> B* through the pairing. The involution of B* pulls back to a -> g^{-1} a^dagger g for a
  // positive g in A (involution_twist); dual_involution is the residual of that identity and
  // dual_involution_plain compares with the plain adjoint of A.
  double dual_product = 0, dual_unit = 0, dual_involution = 0, dual_involution_plain = 0;
  double twist_min_eigenvalue = 0, twist_hermitian = 0;
  double separability_target_source = 0;  // Delta(yz) = (z (x) y)(S (x) id) P_{B_t}
  double separability_jones = 0;           // Delta(e_{2k+2}) with the H^{-1}-weighted element of I
  double separability_jones_symmetric = 0; // the same with the symmetric element (diagnostic)
  double target_gap = 0, source_gap = 0;   // B_t and B_s against eps_t(B) and eps_s(B)
  int center_before = 0, center_after = 0; // dim Z(N' cap M_k) and dim Z(N' cap M_{3k+2})
};

struct Extraction {
  int k = 0;
  WeakHopfAlgebra B;
  MultiMatrix A;       // N' cap M_{2k+1}
  Pairing pairing;     // <a, b> = a^T P b in block coordinates of A and B
  Vec involution_twist;  // g in A, normalized to trace n_a on each block
  Mat I, I_prime;      // M_k' cap M_{2k+2} and G^{1/2} I G^{-1/2}, orthonormal in B coordinates
  int dim_Bt = 0, dim_Bs = 0;
  AxiomReport axioms;
  bool biconnected = false;
  // delta(I') subset B*, computed when B is biconnected (G and the trivial representation need it).
  bool principal_computed = false;
  PrincipalGraph principal;
  double principal_norm_sq = 0;
  double norm_sq_counital = 0;  // B*_t subset B*, the K = B case
  double norm_sq_target = 0;    // B_t subset B
  ExtractionReport report;
};
// Needs at least 3k + 3 levels and depth at most two for N subset M_k. Throws AlgebraError when
// the precondition fails or when the axioms fail.
Extraction extract_wha(const Tower& T, int k, double tol = kDefaultTol);

}  // namespace qg
