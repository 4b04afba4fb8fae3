#include "qg/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

namespace qg {

namespace {
double thresh(double smax, double rtol) { return rtol * std::max(1.0, smax); }
}  // namespace

namespace {

// Singular vectors of a tall matrix. BDCSVD is fast but Eigen 3.4.0 occasionally returns
// wrong vectors for inputs with many repeated singular values, so results are validated
// and recomputed with JacobiSVD when the check fails.
struct TallSvd {
  RVec s;
  Mat U;  // thin left vectors
  Mat V;  // right vectors, full when requested and thin otherwise
};

TallSvd tall_svd(const Mat& T, bool full_v) {
  const unsigned opts = Eigen::ComputeThinU | (full_v ? Eigen::ComputeFullV : Eigen::ComputeThinV);
  auto run = [&](auto&& svd) { return TallSvd{svd.singularValues(), svd.matrixU(), svd.matrixV()}; };
  TallSvd r = run(Eigen::BDCSVD<Mat>(T, opts));
  bool ok = r.s.allFinite() && r.U.allFinite() && r.V.allFinite();
  if (ok) {
    const Eigen::Index p = r.s.size();
    const double scale = std::max(1.0, p ? r.s(0) : 0.0);
    Mat recon = r.U * r.s.cast<cd>().asDiagonal() * r.V.leftCols(p).adjoint();
    double err = (T - recon).cwiseAbs().maxCoeff();
    double orthU = (r.U.adjoint() * r.U - Mat::Identity(r.U.cols(), r.U.cols())).cwiseAbs().maxCoeff();
    double orthV = (r.V.adjoint() * r.V - Mat::Identity(r.V.cols(), r.V.cols())).cwiseAbs().maxCoeff();
    ok = err < 1e-10 * scale && orthU < 1e-10 && orthV < 1e-10;
  }
  if (!ok) r = run(Eigen::JacobiSVD<Mat>(T, opts));
  return r;
}

}  // namespace

Mat orth(const Mat& M, double rtol) {
  if (M.cols() == 0 || M.rows() == 0) return Mat(M.rows(), 0);
  if (M.cols() > M.rows()) {
    // For wide inputs the column space is spanned by the leading right vectors of M^*.
    TallSvd r = tall_svd(M.adjoint(), true);
    double t = thresh(r.s(0), rtol);
    int k = 0;
    while (k < r.s.size() && r.s(k) > t) ++k;
    return r.V.leftCols(k);
  }
  TallSvd r = tall_svd(M, false);
  if (r.s.size() == 0) return Mat(M.rows(), 0);
  double t = thresh(r.s(0), rtol);
  int k = 0;
  while (k < r.s.size() && r.s(k) > t) ++k;
  return r.U.leftCols(k);
}

Mat null_space(const Mat& M, double rtol) {
  const Eigen::Index n = M.cols();
  if (M.rows() == 0) return Mat::Identity(n, n);
  if (n == 0) return Mat(0, 0);
  // Work with the triangular factor when M is very tall: the null space is the
  // same and the SVD stays n x n.
  if (M.rows() > 4 * n && M.rows() > 512) {
    Mat R = Eigen::HouseholderQR<Mat>(M).matrixQR().topRows(n).triangularView<Eigen::Upper>();
    return null_space(R, rtol);
  }
  if (M.rows() < n) {
    // Null space of a wide matrix: complement of the row space.
    Mat rows = orth(M.adjoint(), rtol);
    if (rows.cols() == 0) return Mat::Identity(n, n);
    Mat Q = Eigen::HouseholderQR<Mat>(rows).householderQ() * Mat::Identity(n, n);
    return Q.rightCols(n - rows.cols());
  }
  TallSvd r = tall_svd(M, true);
  double smax = r.s.size() ? r.s(0) : 0.0;
  double t = thresh(smax, rtol);
  int k = 0;
  while (k < r.s.size() && r.s(k) > t) ++k;
  return r.V.rightCols(n - k);
}

Mat intersect(const Mat& Q1, const Mat& Q2, double rtol) {
  if (Q1.cols() == 0 || Q2.cols() == 0) return Mat(Q1.rows(), 0);
  Mat M(Q1.rows(), Q1.cols() + Q2.cols());
  M << Q1, -Q2;
  Mat N = null_space(M, rtol);
  if (N.cols() == 0) return Mat(Q1.rows(), 0);
  return orth(Q1 * N.topRows(Q1.cols()), rtol);
}

Mat span_sum(const Mat& Q1, const Mat& Q2, double rtol) {
  Mat M(Q1.rows(), Q1.cols() + Q2.cols());
  M << Q1, Q2;
  return orth(M, rtol);
}

Vec project(const Mat& Q, const Vec& x) { return Q * (Q.adjoint() * x); }

double dist_to_span(const Mat& Q, const Vec& x) { return (x - project(Q, x)).norm(); }

double subspace_gap(const Mat& Q1, const Mat& Q2) {
  if (Q1.cols() != Q2.cols()) return 1.0;
  if (Q1.cols() == 0) return 0.0;
  Mat d = Q1 * Q1.adjoint() - Q2 * Q2.adjoint();
  return spectral_norm(d);
}

bool span_contains(const Mat& Q2, const Mat& Q1, double tol) {
  for (Eigen::Index i = 0; i < Q1.cols(); ++i)
    if (dist_to_span(Q2, Q1.col(i)) > tol) return false;
  return true;
}

Mat hstack(const std::vector<Vec>& cols, Eigen::Index rows) {
  Mat M(rows, static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = cols[i];
  return M;
}

Mat hcat(const std::vector<Mat>& blocks, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Mat M(rows, cols);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    M.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  return M;
}

Mat vstack(const std::vector<Mat>& blocks, Eigen::Index cols) {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  Mat M(rows, cols);
  Eigen::Index r = 0;
  for (const auto& b : blocks) {
    M.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return M;
}

HermEig eigh(const Mat& M) {
  Mat h = (M + M.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}


double spectral_norm(const Mat& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<Mat> svd(M);
  return svd.singularValues()(0);
}

double min_singular(const Mat& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<Mat> svd(M);
  const RVec& s = svd.singularValues();
  return s(s.size() - 1);
}

int rank(const Mat& M, double rtol) { return static_cast<int>(orth(M, rtol).cols()); }

std::vector<std::vector<int>> cluster_sorted(const RVec& w, double gap) {
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < w.size(); ++i) {
    if (!groups.empty() && std::abs(w(i) - w(groups.back().front())) < gap)
      groups.back().push_back(i);
    else
      groups.push_back({i});
  }
  return groups;
}

Mat herm_power(const Mat& M, double p, double cutoff) {
  HermEig e = eigh(M);
  Vec d(e.w.size());
  for (int i = 0; i < e.w.size(); ++i) {
    double x = e.w(i);
    d(i) = (x > cutoff) ? std::pow(x, p) : (p < 0 ? 0.0 : std::pow(std::max(x, 0.0), p));
  }
  return e.V * d.asDiagonal() * e.V.adjoint();
}

bool bipartite_connected(const IMat& L) {
  const int r = static_cast<int>(L.rows()), c = static_cast<int>(L.cols());
  if (r + c == 0) return true;
  std::vector<char> seen(r + c, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (v < r) {
      for (int j = 0; j < c; ++j)
        if (L(v, j) != 0 && !seen[r + j]) seen[r + j] = 1, q.push(r + j);
    } else {
      for (int i = 0; i < r; ++i)
        if (L(i, v - r) != 0 && !seen[i]) seen[i] = 1, q.push(i);
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
}

std::string fmt_double(double x, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", prec, x);
  return buf;
}

}  // namespace qg
