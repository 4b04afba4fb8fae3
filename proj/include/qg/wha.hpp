#pragma once
// Weak Hopf C*-algebras (finite quantum groupoids) given by structure tensors
// over a multimatrix algebra.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qg/mma.hpp"

namespace qg {

// Coproducts are D x D coefficient matrices: X(i, j) multiplies e_i (x) e_j.
class WeakHopfAlgebra {
 public:
  MultiMatrix B;
  Mat delta;  // D^2 x D, row i * D + j
  Vec eps;    // eps(x) = eps^T x
  Mat S;
  Mat star;  // x* = star conj(x)
  std::string name;

  WeakHopfAlgebra() = default;
  WeakHopfAlgebra(MultiMatrix alg, Mat delta_, Vec eps_, Mat S_, Mat star_, std::string name_ = {});

  int dim() const { return B.dim(); }
  Vec st(const Vec& x) const { return star * x.conjugate(); }
  Mat coproduct(const Vec& b) const;
  cd counit(const Vec& b) const { return eps.transpose() * b; }
  Vec unit() const { return B.unit(); }

  // Products in B (x) B and B (x) B (x) B.
  Mat mul2(const Mat& X, const Mat& Y) const;
  Vec mul3(const Vec& X, const Vec& Y) const;
  Mat star2(const Mat& X) const;

  Vec eps_t(const Vec& b) const;
  Vec eps_s(const Vec& b) const;
  Mat eps_t_mat() const;
  Mat eps_s_mat() const;

  // Shared canonical data, computed on first request.
  mutable std::shared_ptr<const struct CanonicalData> canon_cache;
};

struct AxiomReport {
  std::vector<std::pair<std::string, double>> residuals;
  double tol = kDefaultTol;
  bool pass() const;
  double worst() const;
  std::string worst_name() const;
  double get(const std::string& n) const;
};

AxiomReport verify_axioms(const WeakHopfAlgebra& W, double tol = kDefaultTol);

struct CounitalMaps {
  Mat eps_t, eps_s;
  double idempotent_t, idempotent_s, antipode_intertwining;
};
CounitalMaps counital_maps(const WeakHopfAlgebra& W);

struct CounitalSubalgebras {
  Mat Bt, Bs;  // orthonormal bases
  bool connected = false;
  bool biconnected = false;
  double commutation_residual = 0;
  double antipode_gap = 0;  // gap between S(B_t) and B_s
};
CounitalSubalgebras counital_subalgebras(const WeakHopfAlgebra& W, bool with_dual = true);
bool is_connected(const WeakHopfAlgebra& W);

struct CanonicalData {
  MarkovTrace tau;  // Markov trace of B_t subset B, tau(1) = dim B_t
  Vec H, SH, G, Ginv;
  Vec phi;  // phi(x) = phi^T x
  double s2_residual = 0;
  double grouplike_residual = 0;
  double sg_residual = 0;  // S(G) = G^{-1}
  double h_defining_residual = 0;
};

// H, G, tau, phi for a connected quantum groupoid. Throws if S^2 != Ad G.
const CanonicalData& canonical_elements(const WeakHopfAlgebra& W, double tol = kDefaultTol);

struct HaarProjection {
  Vec p;
  int solution_dim = 0;  // dimension of the homogeneous solution space (0 = unique)
  double system_residual = 0;
  double projection_residual = 0;
};
HaarProjection haar_projection(const WeakHopfAlgebra& W, double tol = kDefaultTol);

struct HaarFunctional {
  Vec phi;
  std::vector<double> tau_weights;
  double invariance = 0, antipode = 0, counit = 0;
  double positivity = 0;       // most negative eigenvalue of phi(x* y), clipped at 0
  double independent_gap = 0;  // distance to the independent linear solve
  int solution_dim = 0;
};
HaarFunctional haar_functional(const WeakHopfAlgebra& W, double tol = kDefaultTol);
// Solves the three defining relations of phi directly (works for disconnected B).
HaarFunctional haar_functional_solve(const WeakHopfAlgebra& W);
double haar_functional_residual(const WeakHopfAlgebra& W, const Vec& phi);

struct InvarianceReport {
  double phi_left = 0, phi_right = 0, tau_left = 0, tau_right = 0;
  // The tau identities need the Markov trace and G, which exist for connected B only; with a
  // supplied phi on a disconnected B just the phi identities are checked.
  bool tau_checked = true;
  double worst() const;
};
InvarianceReport check_strong_invariance(const WeakHopfAlgebra& W, const Vec* phi_override = nullptr);

// Finite groupoid presentation: table(i, j) = index of i*j, or -1 when not composable.
struct Groupoid {
  IMat table;
  std::vector<std::string> names;
  int size() const { return static_cast<int>(table.rows()); }
  std::vector<int> identities() const;
  int inverse(int g) const;
  void validate() const;  // throws AlgebraError
};

Groupoid cyclic_group(int n);
Groupoid symmetric_group3();
Groupoid pair_groupoid(int k);
Groupoid group_from_permutations(const std::vector<std::vector<int>>& perms);
// Subgroup closure of generators inside a group given by its table.
std::vector<int> subgroup_generated(const Groupoid& G, const std::vector<int>& gens);

enum class ExampleKind { GroupAlgebra, FunctionAlgebra, GroupoidAlgebra, GroupoidFunctionAlgebra };

// Builds the standard structure and verifies every axiom (throws on failure).
WeakHopfAlgebra build_example(ExampleKind kind, const Groupoid& data, double tol = kDefaultTol);

// For group(oid) algebras: block coordinates of each arrow g.
struct GroupoidAlgebraData {
  WeakHopfAlgebra W;
  Mat arrow;  // column g: the element g in block coordinates
};
GroupoidAlgebraData groupoid_algebra(const Groupoid& G);
WeakHopfAlgebra groupoid_function_algebra(const Groupoid& G);

WeakHopfAlgebra direct_sum(const WeakHopfAlgebra& A, const WeakHopfAlgebra& B);

// Transports a structure along an algebra isomorphism given by T (old -> new coordinates).
WeakHopfAlgebra transport(const WeakHopfAlgebra& W, const MultiMatrix& alg, const Mat& T, const Mat& Tinv);

}  // namespace qg
