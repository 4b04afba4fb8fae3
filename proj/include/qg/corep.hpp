#pragma once
// Comodules, relative Hopf (bi)modules, their tensor products and duals, and the
// combinatorial invariants built from them (principal graphs, double cosets, index norms).

#include <string>
#include <vector>

#include "qg/coideal.hpp"

namespace qg {

// A finite-dimensional B-comodule with an inner product.
//
// coact(b * n + k, j) is the coefficient of e_b (x) v_k in the coaction of v_j for a left
// comodule, and of v_k (x) e_b for a right one. The inner product is (v, w) = w^* inner v,
// linear in the first slot.
struct Comodule {
  int n = 0;
  Mat coact;
  Mat inner;
  Side side = Side::Left;
  // D x n coefficient matrix of the coaction of v_j.
  Mat leg(int j) const;
  cd ip(const Vec& v, const Vec& w) const { return (w.adjoint() * inner * v)(0); }
};

struct ComoduleReport {
  double coassociativity = 0, counit = 0, inner_product = 0;
  double worst() const;
};
ComoduleReport check_comodule(const WeakHopfAlgebra& W, const Comodule& V);

// Worst residual of the unitarity identity over all basis pairs. For left comodules
// (v2^(1))^* (v1, v2^(2)) = S(v1^(1)) G (v1^(2), v2); for right comodules
// v1^(2) (v1^(1), v2) = G^{-1} S((v2^(2))^*) (v1, v2^(1)).
double unitary_check(const WeakHopfAlgebra& W, const Comodule& V);

// A left comodule v_k -> g_k (x) v_k conjugated by an invertible change of basis.
Comodule graded_comodule(const WeakHopfAlgebra& W, const std::vector<Vec>& grades, const Mat& basis_change);

// Left comodules are right B*-modules through v <| x = <x, v^(1)> v^(2); right comodules
// are left B*-modules through x |> v = v^(1) <x, v^(2)>. acts[x] is the matrix of e^x.
struct DualModule {
  std::vector<Mat> acts;
  bool right_module = true;
  Mat act(const Vec& x) const;
};
DualModule comodule_to_module(const WeakHopfAlgebra& W, const DualData& d, const Comodule& V);
Comodule module_to_comodule(const WeakHopfAlgebra& W, const DualData& d, const DualModule& M, const Mat& inner,
                            Side side);
// Worst violation of the module axioms (unit and associativity in the stated order).
double module_residual(const MultiMatrix& A, const DualModule& M, const Vec& unit);

// Multiplicity of each simple block of A in the module, from ranks of the central projections.
// Throws AlgebraError when the action is not a unital homomorphism at tol.
std::vector<int> simples_and_multiplicities(const MultiMatrix& A, const DualModule& M, double tol = kDefaultTol);

// Intertwiner spaces. Columns are vec(T) (column-major) of maps T : V1 -> V2.
Mat comodule_hom(const WeakHopfAlgebra& W, const Comodule& V1, const Comodule& V2);
Mat module_hom(const DualModule& M1, const DualModule& M2);

// Left comodule with a left H-action and a right K-action (H, K left coideal *-subalgebras).
struct RelativeHopfModule {
  Comodule V;
  Mat QH, QK;               // orthonormal bases in B coordinates
  std::vector<Mat> left;    // left[c]: v -> QH_c |> v
  std::vector<Mat> right;   // right[c]: v -> v <| QK_c
  Mat act_left(const Vec& h) const;
  Mat act_right(const Vec& k) const;
  int dim() const { return V.n; }
};

struct RelativeHopfReport {
  ComoduleReport comodule;
  double left_module = 0, right_module = 0, bimodule = 0;
  double commutation = 0;   // coaction of h |> v <| k against h_(1) v^(1) k_(1) (x) h_(2) |> v^(2) <| k_(2)
  double target_bimodule = 0;  // eps(z1 v^(1) z2) v^(2) against the given actions of B_t
  double star_left = 0, star_right = 0;  // the actions are *-representations for the inner product
  double unitarity = 0;
  double worst() const;
};
RelativeHopfReport check_relative_hopf(const WeakHopfAlgebra& W, const RelativeHopfModule& M);

// Carrier span(QV) (closed under left multiplication by H, right multiplication by K and with
// Delta(V) in B (x) V), actions by multiplication, coaction Delta, inner product tau(w^* v).
RelativeHopfModule multiplication_object(const WeakHopfAlgebra& W, const Mat& QH, const Mat& QV, const Mat& QK,
                                         double tol = kDefaultTol);

// Left action of B_t induced by the coaction: z |> v = eps(z v^(1)) v^(2); right: eps(v^(1) z) v^(2).
Mat induced_target_action(const WeakHopfAlgebra& W, const Comodule& V, const Vec& z, bool left);

// Right relative (B, K) Hopf modules (H = B_t) as right modules over B* >< K.
struct CrossedModule {
  std::vector<Mat> acts;  // acts[i]: v -> v . f_i for the block basis f_i of the crossed product
  Mat act(const Vec& y) const;
};
CrossedModule to_crossed_module(const WeakHopfAlgebra& W, const DualData& d, const CrossedProduct& cp,
                                const RelativeHopfModule& M);
RelativeHopfModule from_crossed_module(const WeakHopfAlgebra& W, const DualData& d, const CrossedProduct& cp,
                                       const CrossedModule& X, const Mat& inner);
double crossed_module_residual(const CrossedProduct& cp, const CrossedModule& X);

struct RelativeHopfBridge {
  CrossedProduct cp;
  std::vector<RelativeHopfModule> simples;  // one per block of B* >< K
  std::vector<double> compatibility;        // check_relative_hopf worst per simple
  std::vector<double> round_trip;           // back to the crossed module
  BratteliDiagram restriction;              // B* subset B* >< K
};
RelativeHopfBridge relative_hopf_bridge(const CoidealContext& ctx, const CoidealSubalgebra& K);

// Block of B* carrying the trivial representation phi -> (z -> eps_t(phi z)) on B*_t.
int trivial_representation_block(const WeakHopfAlgebra& Wd, double tol = kDefaultTol);

struct PrincipalGraph {
  BratteliDiagram full;       // delta(K) subset B*
  BratteliDiagram component;  // connected component of the trivial representation
  std::vector<int> lower_index, upper_index;  // component vertices inside `full`
  int root = -1;              // column of the trivial representation in `component`
  double norm_sq = 0;
  bool crossed_agrees = false;  // agrees with the transpose of B* subset B* >< K
  bool depth_two = false;       // K = B, where delta(K) = B*_t
};
PrincipalGraph principal_graph(const CoidealContext& ctx, const CoidealSubalgebra& K, bool cross_check = true);

// Rooted isomorphism of bipartite graphs (lower x upper incidence matrices), brute force
// over vertex permutations; sides of at most 8 vertices.
bool bipartite_isomorphic(const IMat& A, int root_a, const IMat& B, int root_b);

struct PositivityReport {
  IMat lambda, lambda_dual;        // B_t subset B and B*_t subset B*
  IMat gram, gram_dual;            // Lambda Lambda^t
  bool positive = false, positive_dual = false;
  double norm_sq = 0, norm_sq_dual = 0;
  bool biconnected = false;
  std::string violation;  // empty when both Gram matrices are entrywise positive
};
PositivityReport positivity_and_norm(const WeakHopfAlgebra& W, const DualData& d);

// Simple objects of relative (C[G], H-K) Hopf bimodules, from the blocks of C(G) >< (H x K).
struct DoubleCosetReport {
  int double_cosets = 0;   // direct enumeration of H\G/K
  int supports = 0;        // distinct supports of simple objects in G
  int simple_objects = 0;  // blocks
  int stabilizer_classes = 0;  // sum over double cosets of the class number of H cap gKg^{-1}
  std::vector<std::vector<int>> cosets;
  double certification = 0;  // worst check_relative_hopf over the simples
  bool supports_are_cosets = false;
};
DoubleCosetReport double_coset_analysis(const GroupoidAlgebraData& B, const Groupoid& G, const std::vector<int>& H,
                                        const std::vector<int>& K, double tol = kDefaultTol);
// Number of simple objects up to support; throws AlgebraError when it differs from |H\G/K|.
int double_coset_count(const GroupoidAlgebraData& B, const Groupoid& G, const std::vector<int>& H,
                       const std::vector<int>& K, double tol = kDefaultTol);

// Relative tensor product V (x)_L W of V in C_{H-L} and W in C_{L-K}, on the quotient of
// V (x) W by the null space of the L-valued inner product. Carrier coordinates are orthonormal.
struct TensorProduct {
  RelativeHopfModule M;
  Mat lift;     // carrier -> V (x) W coordinates (index i * nW + j)
  Mat project;  // V (x) W -> carrier
  int relation_rank = 0;   // rank of span{(v <| l) (x) w - v (x) (l |> w)}
  int null_dim = 0;        // nullity of the Gram matrix
  double well_defined = 0; // structure maps preserve the null space
  RelativeHopfReport report;
};
TensorProduct relative_tensor(const WeakHopfAlgebra& W, const RelativeHopfModule& V, const RelativeHopfModule& Wm,
                              double tol = kDefaultTol);

// Conjugate object: k |> vbar <| h = bar(h^* |> v <| k^*), coaction vbar -> (v^(1))^* (x) vbar^(2).
RelativeHopfModule dual_object(const WeakHopfAlgebra& W, const RelativeHopfModule& V);
RelativeHopfModule direct_sum(const RelativeHopfModule& A, const RelativeHopfModule& B);

// Morphisms between objects with the same H and K.
Mat relative_hom(const WeakHopfAlgebra& W, const RelativeHopfModule& A, const RelativeHopfModule& B);

struct Isomorphism {
  Mat U;                  // unitary intertwiner A -> B (empty when none was found)
  double intertwining = 0, unitarity = 0, conditioning = 0;
  int hom_dim = 0;
  bool found = false;
};
// Generic element of the intertwiner space made unitary by polar decomposition.
Isomorphism find_isomorphism(const WeakHopfAlgebra& W, const RelativeHopfModule& A, const RelativeHopfModule& B,
                             double tol = kDefaultTol);
double intertwining_residual(const WeakHopfAlgebra& W, const RelativeHopfModule& A, const RelativeHopfModule& B,
                             const Mat& T);

}  // namespace qg
