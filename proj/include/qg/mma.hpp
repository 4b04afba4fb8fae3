#pragma once
// Finite-dimensional C*-algebras as direct sums of full matrix algebras.
//
// Elements are coordinate vectors over the matrix-unit basis: block a
// occupies n_a^2 consecutive coordinates, stored row-major.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qg/linalg.hpp"

namespace qg {

using RowMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct AlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class MultiMatrix {
 public:
  MultiMatrix() = default;
  explicit MultiMatrix(std::vector<int> block_dims);

  int dim() const { return D_; }
  int size() const { return N_; }  // sum of n_a
  int num_blocks() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  int offset(int a) const { return offs_[a]; }
  int block_of(int i) const { return blk_[i]; }
  int index(int a, int r, int c) const { return offs_[a] + r * dims_[a] + c; }
  // Index of the basis element e_i e_j, or -1 if the product vanishes.
  int prod_index(int i, int j) const;
  int adj_index(int i) const;

  Vec unit() const;
  Vec basis(int i) const;
  Vec central_projection(int a) const;

  Mat block(const Vec& x, int a) const;
  Vec from_blocks(const std::vector<Mat>& bl) const;
  Vec mul(const Vec& x, const Vec& y) const;
  Vec adj(const Vec& x) const;
  Mat full(const Vec& x) const;
  Vec from_full(const Mat& M) const;
  // Matrices of x -> a x and x -> x a.
  Mat left_mat(const Vec& a) const;
  Mat right_mat(const Vec& a) const;
  // Sum_a w_a Tr(block_a(x)).
  cd trace(const Vec& x, const std::vector<double>& w) const;
  cd block_trace(const Vec& x, int a) const;
  // Coordinate weights w_{block(i)} for each coordinate.
  RVec coord_weights(const std::vector<double>& w) const;
  // Inverse (or pseudo-inverse on each block) of an element.
  Vec inverse(const Vec& x) const;
  // Power of a positive element computed blockwise.
  Vec power(const Vec& x, double p) const;
  // Matrix of the conjugate-linear map x -> x^dagger in the form x^dagger = S conj(x).
  Mat adjoint_star() const;
  std::vector<std::string> block_labels(const std::string& prefix) const;

  bool operator==(const MultiMatrix& o) const { return dims_ == o.dims_; }

 private:
  std::vector<int> dims_, offs_, blk_;
  int D_ = 0, N_ = 0;
};

MultiMatrix construct_algebra(const std::vector<int>& shape);

struct MatrixUnitFamily {
  int n = 0;
  std::vector<Vec> f;  // f[r * n + s] = f_{rs}
  const Vec& at(int r, int s) const { return f[static_cast<size_t>(r * n + s)]; }
  Vec sum_diag() const;
};

// Residual of multiplicative and adjoint closure of span(Q).
double closure_residual(const MultiMatrix& A, const Mat& Q);

struct SubAlgebra {
  MultiMatrix ambient;
  Mat Q;  // orthonormal basis (coordinate inner product)
  bool unital = true;
  int dim() const { return static_cast<int>(Q.cols()); }
};

// Builds a subalgebra from a spanning set and certifies closure.
SubAlgebra make_subalgebra(const MultiMatrix& A, const Mat& span, double tol = kDefaultTol);
// Smallest unital *-subalgebra containing gens.
SubAlgebra generated_subalgebra(const MultiMatrix& A, const std::vector<Vec>& gens, bool unital = true);
Mat generated_span(const MultiMatrix& A, const Mat& gens, bool unital = true);

// Center of span(Q) as an orthonormal basis. When gens is given, span(Q) must be the unital
// *-algebra they generate and centrality is tested against the generators only.
Mat center_of(const MultiMatrix& A, const Mat& Q, const Mat* gens = nullptr);

// Closure of span(Q) under products and adjoints. With gens (columns of Q being products of
// generators), checks 1, gens, Q^* and Q gens instead of all pairwise products.
double closure_residual(const MultiMatrix& A, const Mat& Q, const Mat* gens);

std::vector<MatrixUnitFamily> decompose_matrix_units(const MultiMatrix& A, const Mat& Q, double tol = kDefaultTol,
                                                     unsigned seed = 0, const Mat* gens = nullptr);
// Worst residual of the matrix-unit relations.
double matrix_unit_residual(const MultiMatrix& A, const std::vector<MatrixUnitFamily>& fams, const Vec& unit);

// Abstract multimatrix model of a subalgebra.
struct Realization {
  MultiMatrix alg;
  std::vector<MatrixUnitFamily> fams;
  Mat embed;     // alg.dim() columns: the image of each matrix unit in the ambient algebra
  Mat restrict;  // alg coordinates of an ambient element of the subalgebra
};
Realization realize_subalgebra(const MultiMatrix& A, const Mat& Q, double tol = kDefaultTol,
                               const Mat* gens = nullptr);

SubAlgebra relative_commutant(const SubAlgebra& S, double tol = kDefaultTol);
Mat commutant_span(const MultiMatrix& A, const Mat& gens);

struct BratteliDiagram {
  std::vector<std::string> lower, upper;
  std::vector<int> lower_dims, upper_dims;
  IMat matrix;  // rows: lower blocks, cols: upper blocks
  double norm_sq() const;
  bool consistent() const;
};

BratteliDiagram inclusion_data(const MultiMatrix& A, const Mat& QS, double tol = kDefaultTol);
BratteliDiagram inclusion_data(const MultiMatrix& A, const std::vector<MatrixUnitFamily>& fams);

struct MarkovTrace {
  std::vector<double> weights;  // per block of the ambient algebra
  double index = 0;
  double value_on_one = 0;
  BratteliDiagram diagram;
};
// norm = tau(1). Throws for a disconnected inclusion.
MarkovTrace markov_trace(const MultiMatrix& A, const Mat& QS, double norm, double tol = kDefaultTol);
MarkovTrace markov_trace_from_diagram(const BratteliDiagram& d, double norm);

// tau-orthogonal projection onto span(Q) as a D x D matrix.
Mat conditional_expectation(const MultiMatrix& A, const std::vector<double>& w, const Mat& Q);

struct ConditionalExpectationReport {
  double idempotent, unital, trace_preserving, bimodular, positive;
  double worst() const;
};
ConditionalExpectationReport check_conditional_expectation(const MultiMatrix& A, const std::vector<double>& w,
                                                           const Mat& Q, const Mat& E);

struct BasicConstruction {
  MultiMatrix A2;
  Mat embed;  // A coordinates -> A2 coordinates
  Vec e;      // Jones projection in A2
  std::vector<double> weights2;
  double lambda = 0;  // index^{-1}
  double jones_residual = 0;   // e x e = E(x) e
  double markov_residual = 0;  // extension trace restricts to tau
  BratteliDiagram lower;       // S subset A
  BratteliDiagram upper;       // A subset A2
};
BasicConstruction basic_construction(const MultiMatrix& A, const Mat& QS, const std::vector<double>& w,
                                     double tol = kDefaultTol);

struct SeparabilityElement {
  Mat P;  // P(i, j): coefficient of e_i (x) e_j in D^op (x) D
  double left_module, right_module, multiplication, idempotent, uniqueness_gap;
  double literal_symmetric;  // residual of (x1 (x) 1) P (x2 (x) 1) = (x2 (x) 1) P (x1 (x) 1)
};
SeparabilityElement separability_element(const MultiMatrix& D);
// Product in D^op (x) D for coefficient matrices.
Mat op_tensor_mul(const MultiMatrix& D, const Mat& X, const Mat& Y);

struct IndexElement {
  Vec H;
  double defining_residual, central_residual;
  double min_eigenvalue;
};
IndexElement index_element(const MultiMatrix& A, const std::vector<double>& w, const Mat& QS,
                           double tol = kDefaultTol);

// Abstract finite-dimensional *-algebra given by structure constants:
// e_i e_j = sum_k L[i](k, j) e_k, x* = star conj(x).
struct StructureConstants {
  int dim = 0;
  std::vector<Mat> L;
  Mat star;
  Vec unit;
  Vec mul(const Vec& x, const Vec& y) const;
  Vec adj(const Vec& x) const { return star * x.conjugate(); }
};

struct StarRealization {
  MultiMatrix alg;
  Mat T;     // abstract coordinates -> block coordinates
  Mat Tinv;  // block coordinates -> abstract coordinates
  double semisimplicity_margin = 0;
  double homomorphism_residual = 0;
};
// Realizes a finite-dimensional C*-algebra through its left regular representation.
StarRealization realize_star_algebra(const StructureConstants& sc, double tol = kDefaultTol);

}  // namespace qg
