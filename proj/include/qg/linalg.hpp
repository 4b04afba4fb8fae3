#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace qg {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using IMat = Eigen::MatrixXi;

inline constexpr double kDefaultTol = 1e-9;

// Relative threshold used for rank decisions: singular values below
// rtol * max(1, s_max) are treated as zero.
inline constexpr double kRankTol = 1e-9;

// Orthonormal basis (columns) of the column span of M.
Mat orth(const Mat& M, double rtol = kRankTol);
// Orthonormal basis of the null space of M.
Mat null_space(const Mat& M, double rtol = kRankTol);
// Orthonormal basis of the intersection of two column spans.
Mat intersect(const Mat& Q1, const Mat& Q2, double rtol = kRankTol);
// Orthonormal basis of span(Q1) + span(Q2).
Mat span_sum(const Mat& Q1, const Mat& Q2, double rtol = kRankTol);
// Orthogonal projection of x onto the span of the orthonormal columns of Q.
Vec project(const Mat& Q, const Vec& x);
// Distance of x from span(Q) (Q orthonormal).
double dist_to_span(const Mat& Q, const Vec& x);
// ||P1 - P2|| (spectral) for orthonormal bases; 0 iff equal subspaces.
double subspace_gap(const Mat& Q1, const Mat& Q2);
// True iff span(Q1) is contained in span(Q2) within tol.
bool span_contains(const Mat& Q2, const Mat& Q1, double tol = 1e-8);

Mat hstack(const std::vector<Vec>& cols, Eigen::Index rows);
Mat vstack(const std::vector<Mat>& blocks, Eigen::Index cols);
Mat hcat(const std::vector<Mat>& blocks, Eigen::Index rows);

struct HermEig {
  RVec w;  // ascending
  Mat V;
};
// Eigendecomposition of the Hermitian part (M + M^H)/2.
HermEig eigh(const Mat& M);

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& M) {
  return M.size() ? static_cast<double>(M.cwiseAbs().maxCoeff()) : 0.0;
}
double spectral_norm(const Mat& M);
double min_singular(const Mat& M);
int rank(const Mat& M, double rtol = kRankTol);

// Groups sorted eigenvalues into clusters whose spread is below gap.
std::vector<std::vector<int>> cluster_sorted(const RVec& w, double gap);

// Matrix function of a Hermitian positive (semi)definite matrix, entrywise on
// eigenvalues; eigenvalues below cutoff are mapped to 0 when p < 0.
Mat herm_power(const Mat& M, double p, double cutoff = 1e-12);

// Integer connectivity test for the bipartite graph with biadjacency L.
bool bipartite_connected(const IMat& L);

std::string fmt_double(double x, int prec = 3);

}  // namespace qg
