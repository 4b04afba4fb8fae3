#include "qg/mma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qg {

MultiMatrix::MultiMatrix(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw AlgebraError("empty block shape");
  for (int n : dims_) {
    if (n <= 0) throw AlgebraError("block dimensions must be positive");
    offs_.push_back(D_);
    for (int k = 0; k < n * n; ++k) blk_.push_back(static_cast<int>(offs_.size()) - 1);
    D_ += n * n;
    N_ += n;
  }
}

MultiMatrix construct_algebra(const std::vector<int>& shape) { return MultiMatrix(shape); }

int MultiMatrix::prod_index(int i, int j) const {
  int a = blk_[i], b = blk_[j];
  if (a != b) return -1;
  int n = dims_[a];
  int ri = (i - offs_[a]) / n, ci = (i - offs_[a]) % n;
  int rj = (j - offs_[a]) / n, cj = (j - offs_[a]) % n;
  if (ci != rj) return -1;
  return index(a, ri, cj);
}

int MultiMatrix::adj_index(int i) const {
  int a = blk_[i], n = dims_[a];
  int r = (i - offs_[a]) / n, c = (i - offs_[a]) % n;
  return index(a, c, r);
}

Vec MultiMatrix::unit() const {
  Vec u = Vec::Zero(D_);
  for (int a = 0; a < num_blocks(); ++a)
    for (int r = 0; r < dims_[a]; ++r) u(index(a, r, r)) = 1.0;
  return u;
}

Vec MultiMatrix::basis(int i) const {
  Vec e = Vec::Zero(D_);
  e(i) = 1.0;
  return e;
}

Vec MultiMatrix::central_projection(int a) const {
  Vec u = Vec::Zero(D_);
  for (int r = 0; r < dims_[a]; ++r) u(index(a, r, r)) = 1.0;
  return u;
}

Mat MultiMatrix::block(const Vec& x, int a) const {
  int n = dims_[a];
  return Eigen::Map<const RowMat>(x.data() + offs_[a], n, n);
}

Vec MultiMatrix::from_blocks(const std::vector<Mat>& bl) const {
  Vec v(D_);
  for (int a = 0; a < num_blocks(); ++a) {
    int n = dims_[a];
    Eigen::Map<RowMat>(v.data() + offs_[a], n, n) = bl[a];
  }
  return v;
}

Vec MultiMatrix::mul(const Vec& x, const Vec& y) const {
  Vec v(D_);
  for (int a = 0; a < num_blocks(); ++a) {
    int n = dims_[a];
    Eigen::Map<const RowMat> X(x.data() + offs_[a], n, n), Y(y.data() + offs_[a], n, n);
    Eigen::Map<RowMat>(v.data() + offs_[a], n, n).noalias() = X * Y;
  }
  return v;
}

Vec MultiMatrix::adj(const Vec& x) const {
  Vec v(D_);
  for (int a = 0; a < num_blocks(); ++a) {
    int n = dims_[a];
    Eigen::Map<const RowMat> X(x.data() + offs_[a], n, n);
    Eigen::Map<RowMat>(v.data() + offs_[a], n, n) = X.adjoint();
  }
  return v;
}

Mat MultiMatrix::full(const Vec& x) const {
  Mat M = Mat::Zero(N_, N_);
  int o = 0;
  for (int a = 0; a < num_blocks(); ++a) {
    M.block(o, o, dims_[a], dims_[a]) = block(x, a);
    o += dims_[a];
  }
  return M;
}

Vec MultiMatrix::from_full(const Mat& M) const {
  std::vector<Mat> bl;
  int o = 0;
  for (int a = 0; a < num_blocks(); ++a) {
    bl.push_back(M.block(o, o, dims_[a], dims_[a]));
    o += dims_[a];
  }
  return from_blocks(bl);
}

Mat MultiMatrix::left_mat(const Vec& a) const {
  Mat M = Mat::Zero(D_, D_);
  for (int j = 0; j < D_; ++j)
    for (int i = 0; i < D_; ++i) {
      if (a(i) == cd(0)) continue;
      int k = prod_index(i, j);
      if (k >= 0) M(k, j) += a(i);
    }
  return M;
}

Mat MultiMatrix::right_mat(const Vec& a) const {
  Mat M = Mat::Zero(D_, D_);
  for (int j = 0; j < D_; ++j)
    for (int i = 0; i < D_; ++i) {
      if (a(i) == cd(0)) continue;
      int k = prod_index(j, i);
      if (k >= 0) M(k, j) += a(i);
    }
  return M;
}

cd MultiMatrix::block_trace(const Vec& x, int a) const {
  cd s = 0;
  for (int r = 0; r < dims_[a]; ++r) s += x(index(a, r, r));
  return s;
}

cd MultiMatrix::trace(const Vec& x, const std::vector<double>& w) const {
  cd s = 0;
  for (int a = 0; a < num_blocks(); ++a) s += w[a] * block_trace(x, a);
  return s;
}

RVec MultiMatrix::coord_weights(const std::vector<double>& w) const {
  RVec c(D_);
  for (int i = 0; i < D_; ++i) c(i) = w[blk_[i]];
  return c;
}

Vec MultiMatrix::inverse(const Vec& x) const {
  std::vector<Mat> bl;
  for (int a = 0; a < num_blocks(); ++a)
    bl.push_back(block(x, a).completeOrthogonalDecomposition().pseudoInverse());
  return from_blocks(bl);
}

Vec MultiMatrix::power(const Vec& x, double p) const {
  std::vector<Mat> bl;
  for (int a = 0; a < num_blocks(); ++a) bl.push_back(herm_power(block(x, a), p));
  return from_blocks(bl);
}

Mat MultiMatrix::adjoint_star() const {
  Mat S = Mat::Zero(D_, D_);
  for (int i = 0; i < D_; ++i) S(adj_index(i), i) = 1.0;
  return S;
}

std::vector<std::string> MultiMatrix::block_labels(const std::string& prefix) const {
  std::vector<std::string> out;
  for (int a = 0; a < num_blocks(); ++a) out.push_back(prefix + std::to_string(a));
  return out;
}

Vec MatrixUnitFamily::sum_diag() const {
  Vec s = Vec::Zero(f.front().size());
  for (int r = 0; r < n; ++r) s += at(r, r);
  return s;
}

double closure_residual(const MultiMatrix& A, const Mat& Q, const Mat* gens) {
  const Eigen::Index r = Q.cols();
  if (r == 0) return 0;
  auto worst_leak = [&](const Mat& P) {
    if (P.cols() == 0) return 0.0;
    Mat res = P - Q * (Q.adjoint() * P);
    return res.colwise().norm().maxCoeff();
  };
  Mat adj(A.dim(), r);
  for (Eigen::Index i = 0; i < r; ++i) adj.col(i) = A.adj(Q.col(i));
  double res = worst_leak(adj);
  if (gens) {
    res = std::max({res, worst_leak(*gens), worst_leak(Mat(A.unit()))});
    Mat prod(A.dim(), r);
    for (Eigen::Index g = 0; g < gens->cols(); ++g) {
      for (Eigen::Index i = 0; i < r; ++i) prod.col(i) = A.mul(Q.col(i), gens->col(g));
      res = std::max(res, worst_leak(prod));
    }
    return res;
  }
  Mat prod(A.dim(), r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) prod.col(j) = A.mul(Q.col(i), Q.col(j));
    res = std::max(res, worst_leak(prod));
  }
  return res;
}

double closure_residual(const MultiMatrix& A, const Mat& Q) { return closure_residual(A, Q, nullptr); }

Mat generated_span(const MultiMatrix& A, const Mat& gens, bool unital) {
  std::vector<Vec> g;
  for (int i = 0; i < gens.cols(); ++i) {
    g.push_back(gens.col(i));
    g.push_back(A.adj(gens.col(i)));
  }
  Mat Q;
  {
    std::vector<Vec> start = g;
    if (unital) start.push_back(A.unit());
    Q = orth(hstack(start, A.dim()));
  }
  Mat G = orth(hstack(g, A.dim()));
  // Words in the generators: close under left multiplication by generators.
  while (true) {
    std::vector<Vec> cols;
    for (int i = 0; i < Q.cols(); ++i) cols.push_back(Q.col(i));
    for (int j = 0; j < G.cols(); ++j)
      for (int i = 0; i < Q.cols(); ++i) cols.push_back(A.mul(G.col(j), Q.col(i)));
    Mat Q2 = orth(hstack(cols, A.dim()));
    if (Q2.cols() == Q.cols()) return Q2;
    Q = Q2;
  }
}

SubAlgebra generated_subalgebra(const MultiMatrix& A, const std::vector<Vec>& gens, bool unital) {
  Mat G = hstack(gens, A.dim());
  return SubAlgebra{A, generated_span(A, G, unital), unital};
}

SubAlgebra make_subalgebra(const MultiMatrix& A, const Mat& span, double tol) {
  Mat Q = orth(span);
  double r = closure_residual(A, Q);
  if (r > tol * std::max<double>(1.0, static_cast<double>(A.size())) * 10)
    throw AlgebraError("subspace is not a *-subalgebra (closure residual " + fmt_double(r) + ")");
  bool unital = dist_to_span(Q, A.unit()) < 1e-8;
  return SubAlgebra{A, Q, unital};
}

Mat center_of(const MultiMatrix& A, const Mat& Q, const Mat* gens) {
  const int r = static_cast<int>(Q.cols());
  const Mat& test = gens ? *gens : Q;
  // Commutators of a closed subspace stay inside it, so the equations are taken in Q coordinates.
  std::vector<Mat> rows;
  for (Eigen::Index j = 0; j < test.cols(); ++j) {
    Mat C(A.dim(), r);
    for (int i = 0; i < r; ++i) C.col(i) = A.mul(Q.col(i), test.col(j)) - A.mul(test.col(j), Q.col(i));
    Mat leak = C - Q * (Q.adjoint() * C);
    rows.push_back(leak.norm() > 1e-8 * std::max(1.0, C.norm()) ? C : Mat(Q.adjoint() * C));
  }
  Mat N = null_space(vstack(rows, r));
  return orth(Q * N);
}

namespace {

std::vector<Vec> projections_of_cluster(const MultiMatrix& A, const HermEig& e,
                                        const std::vector<std::vector<int>>& groups) {
  std::vector<Vec> out;
  for (const auto& idx : groups) {
    Mat V(e.V.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t c = 0; c < idx.size(); ++c) V.col(static_cast<Eigen::Index>(c)) = e.V.col(idx[c]);
    out.push_back(A.from_full(V * V.adjoint()));
  }
  return out;
}

}  // namespace

std::vector<MatrixUnitFamily> decompose_matrix_units(const MultiMatrix& A, const Mat& Q, double tol,
                                                     unsigned seed, const Mat* gens) {
  std::mt19937_64 rng(12345u + seed);
  std::uniform_real_distribution<double> U12(1.0, 2.0), Um(-1.0, 1.0);
  const int r = static_cast<int>(Q.cols());
  if (r == 0) return {};
  double cres = closure_residual(A, Q, gens);
  if (cres > 1e-6) throw AlgebraError("matrix units requested for a non-closed subspace (residual " + fmt_double(cres) + ")");

  Vec e = project(Q, A.unit());  // unit of the subalgebra
  Mat Z = center_of(A, Q, gens);
  Vec z = Vec::Zero(A.dim());
  for (int i = 0; i < Z.cols(); ++i) z += Z.col(i) * cd(U12(rng), U12(rng));
  z = (z + A.adj(z)) / 2.0;
  double zn = spectral_norm(A.full(z));
  z += (3.0 * zn + 1.0) * e;  // separates the subalgebra's support from its complement
  HermEig ez = eigh(A.full(z));
  double scale = std::max(1.0, ez.w.cwiseAbs().maxCoeff());
  auto groups = cluster_sorted(ez.w, 1e-7 * scale);
  std::vector<Vec> cps;
  for (auto& p : projections_of_cluster(A, ez, groups)) {
    if (dist_to_span(Q, p) > 1e-6) continue;
    if (A.mul(e, p).norm() < 1e-6) continue;
    cps.push_back(p);
  }

  std::vector<MatrixUnitFamily> fams;
  for (const Vec& P : cps) {
    std::vector<Vec> cv;
    for (int i = 0; i < r; ++i) cv.push_back(A.mul(A.mul(P, Q.col(i)), P));
    Mat corner = orth(hstack(cv, A.dim()));
    Vec h = Vec::Zero(A.dim());
    for (int i = 0; i < corner.cols(); ++i) h += corner.col(i) * cd(Um(rng), Um(rng));
    h = (h + A.adj(h)) / 2.0;
    HermEig ep = eigh(A.full(P));
    std::vector<int> keep;
    for (int i = 0; i < ep.w.size(); ++i)
      if (ep.w(i) > 0.5) keep.push_back(i);
    Mat Ur(ep.V.rows(), static_cast<Eigen::Index>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c) Ur.col(static_cast<Eigen::Index>(c)) = ep.V.col(keep[c]);
    HermEig eh = eigh(Ur.adjoint() * A.full(h) * Ur);
    HermEig lifted{eh.w, Ur * eh.V};
    double hs = std::max(1.0, eh.w.cwiseAbs().maxCoeff());
    auto hg = cluster_sorted(eh.w, 1e-7 * hs);
    std::vector<Vec> diag = projections_of_cluster(A, lifted, hg);
    const int n = static_cast<int>(diag.size());
    MatrixUnitFamily F;
    F.n = n;
    F.f.assign(static_cast<size_t>(n * n), Vec());
    F.f[0] = diag[0];
    for (int s = 1; s < n; ++s) {
      Vec best;
      double bn = -1;
      for (int i = 0; i < corner.cols(); ++i) {
        Vec y = A.mul(A.mul(diag[0], corner.col(i)), diag[s]);
        double nv = y.norm();
        if (nv > bn) bn = nv, best = y;
      }
      Vec yy = A.mul(best, A.adj(best));
      double mu = diag[0].dot(yy).real() / diag[0].squaredNorm();
      F.f[static_cast<size_t>(s)] = best / std::sqrt(mu);
    }
    for (int s = 1; s < n; ++s) F.f[static_cast<size_t>(s * n)] = A.adj(F.at(0, s));
    for (int a = 1; a < n; ++a)
      for (int b = 1; b < n; ++b) F.f[static_cast<size_t>(a * n + b)] = A.mul(F.at(a, 0), F.at(0, b));
    fams.push_back(std::move(F));
  }
  double res = matrix_unit_residual(A, fams, e);
  if (res > std::max(tol, 1e-7) * 100)
    throw AlgebraError("matrix-unit extraction failed (residual " + fmt_double(res) + ")");
  return fams;
}

double matrix_unit_residual(const MultiMatrix& A, const std::vector<MatrixUnitFamily>& fams, const Vec& unit) {
  double res = 0;
  Vec s = Vec::Zero(A.dim());
  int total = 0;
  for (const auto& F : fams) total += F.n * F.n;
  if (total > 100 || A.dim() > 2000) {
    // Generating relations: f_rc = f_r0 f_0c, f_0c f_u0 = [c = u] f_00, f_r0 f_00 = f_r0,
    // f_rc = P f_rc P for the family sum P, and P_a P_b = 0 across families.
    std::vector<Vec> P;
    for (const auto& F : fams) P.push_back(F.sum_diag());
    for (size_t a = 0; a < fams.size(); ++a) {
      const auto& F = fams[a];
      s += P[a];
      for (int r = 0; r < F.n; ++r) {
        res = std::max(res, max_abs(A.mul(F.at(r, 0), F.at(0, 0)) - F.at(r, 0)));
        for (int c = 0; c < F.n; ++c) {
          const Vec& f = F.at(r, c);
          res = std::max(res, max_abs(A.adj(f) - F.at(c, r)));
          res = std::max(res, max_abs(A.mul(F.at(r, 0), F.at(0, c)) - f));
          Vec expect = r == c ? F.at(0, 0) : Vec::Zero(A.dim());
          res = std::max(res, max_abs(A.mul(F.at(0, r), F.at(c, 0)) - expect));
          res = std::max(res, max_abs(A.mul(A.mul(P[a], f), P[a]) - f));
        }
      }
      for (size_t b = 0; b < fams.size(); ++b)
        if (b != a) res = std::max(res, max_abs(A.mul(P[a], P[b])));
    }
    return std::max(res, max_abs(s - unit));
  }
  for (size_t a = 0; a < fams.size(); ++a) {
    const auto& F = fams[a];
    s += F.sum_diag();
    for (int r = 0; r < F.n; ++r)
      for (int c = 0; c < F.n; ++c) {
        res = std::max(res, max_abs(A.adj(F.at(r, c)) - F.at(c, r)));
        for (size_t b = 0; b < fams.size(); ++b) {
          const auto& G = fams[b];
          for (int u = 0; u < G.n; ++u)
            for (int v = 0; v < G.n; ++v) {
              Vec p = A.mul(F.at(r, c), G.at(u, v));
              Vec expect = (a == b && c == u) ? F.at(r, v) : Vec::Zero(A.dim());
              res = std::max(res, max_abs(p - expect));
            }
        }
      }
  }
  return std::max(res, max_abs(s - unit));
}

Realization realize_subalgebra(const MultiMatrix& A, const Mat& Q, double tol, const Mat* gens) {
  Realization R;
  R.fams = decompose_matrix_units(A, Q, tol, 0, gens);
  std::vector<int> dims;
  for (auto& f : R.fams) dims.push_back(f.n);
  R.alg = MultiMatrix(dims);
  R.embed = Mat(A.dim(), R.alg.dim());
  R.restrict = Mat(R.alg.dim(), A.dim());
  for (int a = 0; a < R.alg.num_blocks(); ++a) {
    const auto& F = R.fams[a];
    for (int r = 0; r < F.n; ++r)
      for (int s = 0; s < F.n; ++s) {
        int k = R.alg.index(a, r, s);
        R.embed.col(k) = F.at(r, s);
        R.restrict.row(k) = F.at(r, s).adjoint() / F.at(s, s).squaredNorm();
      }
  }
  return R;
}

Mat commutant_span(const MultiMatrix& A, const Mat& gens) {
  std::vector<Mat> rows;
  for (int i = 0; i < gens.cols(); ++i) rows.push_back(A.right_mat(gens.col(i)) - A.left_mat(gens.col(i)));
  if (rows.empty()) return Mat::Identity(A.dim(), A.dim());
  return null_space(vstack(rows, A.dim()));
}

SubAlgebra relative_commutant(const SubAlgebra& S, double) {
  return SubAlgebra{S.ambient, commutant_span(S.ambient, S.Q), true};
}

double BratteliDiagram::norm_sq() const {
  if (matrix.size() == 0) return 0;
  RMat M = matrix.cast<double>();
  RMat G = M.transpose() * M;
  Eigen::SelfAdjointEigenSolver<RMat> es(G);
  return es.eigenvalues().maxCoeff();
}

bool BratteliDiagram::consistent() const {
  for (int j = 0; j < matrix.cols(); ++j) {
    int s = 0;
    for (int i = 0; i < matrix.rows(); ++i) s += matrix(i, j) * lower_dims[i];
    if (s != upper_dims[j]) return false;
  }
  return true;
}

BratteliDiagram inclusion_data(const MultiMatrix& A, const std::vector<MatrixUnitFamily>& fams) {
  BratteliDiagram d;
  d.matrix = IMat::Zero(static_cast<int>(fams.size()), A.num_blocks());
  for (size_t i = 0; i < fams.size(); ++i) {
    d.lower.push_back("s" + std::to_string(i));
    d.lower_dims.push_back(fams[i].n);
    for (int j = 0; j < A.num_blocks(); ++j)
      d.matrix(static_cast<int>(i), j) = static_cast<int>(std::lround(A.block_trace(fams[i].at(0, 0), j).real()));
  }
  d.upper = A.block_labels("a");
  d.upper_dims = A.dims();
  return d;
}

BratteliDiagram inclusion_data(const MultiMatrix& A, const Mat& QS, double tol) {
  if (dist_to_span(QS, A.unit()) > 1e-8) throw AlgebraError("inclusion data requires a unital subalgebra");
  return inclusion_data(A, decompose_matrix_units(A, QS, tol));
}

MarkovTrace markov_trace_from_diagram(const BratteliDiagram& d, double norm) {
  if (!bipartite_connected(d.matrix)) throw AlgebraError("disconnected inclusion: Markov trace is not unique");
  RMat L = d.matrix.cast<double>();
  RMat G = L.transpose() * L;
  Eigen::SelfAdjointEigenSolver<RMat> es(G);
  int m = static_cast<int>(G.rows());
  RVec t = es.eigenvectors().col(m - 1).cwiseAbs();
  MarkovTrace mt;
  mt.index = es.eigenvalues()(m - 1);
  double s = 0;
  for (int a = 0; a < m; ++a) s += d.upper_dims[a] * t(a);
  for (int a = 0; a < m; ++a) mt.weights.push_back(t(a) * norm / s);
  mt.value_on_one = norm;
  mt.diagram = d;
  return mt;
}

MarkovTrace markov_trace(const MultiMatrix& A, const Mat& QS, double norm, double tol) {
  return markov_trace_from_diagram(inclusion_data(A, QS, tol), norm);
}

Mat conditional_expectation(const MultiMatrix& A, const std::vector<double>& w, const Mat& Q) {
  for (double x : w)
    if (!(x > 0)) throw AlgebraError("trace is not faithful");
  RVec cw = A.coord_weights(w);
  Mat WQ = cw.asDiagonal() * Q;
  Mat G = Q.adjoint() * WQ;
  return Q * G.ldlt().solve(WQ.adjoint());
}

double ConditionalExpectationReport::worst() const {
  return std::max({idempotent, unital, trace_preserving, bimodular, positive});
}

ConditionalExpectationReport check_conditional_expectation(const MultiMatrix& A, const std::vector<double>& w,
                                                           const Mat& Q, const Mat& E) {
  ConditionalExpectationReport r{};
  r.idempotent = max_abs(E * E - E);
  r.unital = max_abs(E * A.unit() - A.unit());
  for (int i = 0; i < A.dim(); ++i) {
    Vec x = A.basis(i);
    r.trace_preserving = std::max(r.trace_preserving, std::abs(A.trace(E * x, w) - A.trace(x, w)));
    Vec xx = A.mul(A.adj(x), x);
    HermEig ev = eigh(A.full(E * xx));
    r.positive = std::max(r.positive, std::max(0.0, -ev.w.minCoeff()));
    for (int a = 0; a < Q.cols(); ++a)
      for (int b = 0; b < Q.cols(); ++b) {
        Vec lhs = E * A.mul(A.mul(Q.col(a), x), Q.col(b));
        Vec rhs = A.mul(A.mul(Q.col(a), E * x), Q.col(b));
        r.bimodular = std::max(r.bimodular, max_abs(lhs - rhs));
      }
  }
  return r;
}

BasicConstruction basic_construction(const MultiMatrix& A, const Mat& QS, const std::vector<double>& w,
                                     double tol) {
  BasicConstruction bc;
  const int D = A.dim();
  auto sf = decompose_matrix_units(A, QS, tol);
  bc.lower = inclusion_data(A, sf);
  if (!bipartite_connected(bc.lower.matrix)) throw AlgebraError("basic construction needs a connected inclusion");
  double index = bc.lower.norm_sq();
  bc.lambda = 1.0 / index;

  Mat E = conditional_expectation(A, w, QS);
  RVec s = A.coord_weights(w).cwiseSqrt();
  Mat Sd = s.cast<cd>().asDiagonal();
  Mat Sdi = s.cwiseInverse().cast<cd>().asDiagonal();
  Mat eop = Sd * E * Sdi;
  if (max_abs(eop - eop.adjoint()) > 1e-8) throw AlgebraError("expectation is not self-adjoint in the GNS space");
  std::vector<Mat> lam(D);
  for (int i = 0; i < D; ++i) lam[i] = Sd * A.left_mat(A.basis(i)) * Sdi;

  MultiMatrix big({D});
  auto vecm = [&](const Mat& M) { return big.from_blocks({M}); };
  std::vector<Vec> span;
  for (int i = 0; i < D; ++i) span.push_back(vecm(lam[i]));
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) span.push_back(vecm(lam[i] * eop * lam[j]));
  // <A, e> = span(A e A) has dimension sum_j (sum_a Lambda(j, a) n_a)^2, so a sketched range with
  // that many columns is enough once the projection residual confirms it.
  long long expected = 0;
  for (int j = 0; j < bc.lower.matrix.rows(); ++j) {
    long long m = 0;
    for (int a = 0; a < A.num_blocks(); ++a) m += static_cast<long long>(bc.lower.matrix(j, a)) * A.dims()[a];
    expected += m * m;
  }
  Mat S2 = hstack(span, big.dim());
  Mat Q2;
  if (expected + 8 < S2.cols()) {
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> nd;
    Mat Om(S2.cols(), expected + 8);
    for (int r = 0; r < Om.rows(); ++r)
      for (int c = 0; c < Om.cols(); ++c) Om(r, c) = cd(nd(rng), nd(rng));
    Q2 = orth(S2 * Om);
    if (Q2.cols() != expected || (S2 - Q2 * (Q2.adjoint() * S2)).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, S2.cwiseAbs().maxCoeff()))
      Q2.resize(0, 0);
  }
  if (Q2.size() == 0) Q2 = orth(S2);
  if (Q2.cols() != expected) Q2 = generated_span(big, Q2, true);
  Realization R = realize_subalgebra(big, Q2, tol);

  // Order the blocks of A2 by the S-block they come from: z e = e q_j.
  const int nb = R.alg.num_blocks();
  std::vector<int> order(nb, -1);
  Vec ev = vecm(eop);
  for (int b = 0; b < nb; ++b) {
    Vec z = R.fams[b].sum_diag();
    for (size_t j = 0; j < sf.size(); ++j) {
      Vec qj = vecm(Sd * A.left_mat(sf[j].sum_diag()) * Sdi);
      if (big.mul(big.mul(z, ev), qj).norm() > 0.5) order[j] = b;
    }
  }
  for (int j = 0; j < nb; ++j)
    if (std::count(order.begin(), order.end(), order[j]) != 1 || order[j] < 0)
      throw AlgebraError("basic construction: block matching failed");
  std::vector<MatrixUnitFamily> fams;
  for (int j = 0; j < nb; ++j) fams.push_back(R.fams[order[j]]);
  std::vector<int> dims;
  for (auto& f : fams) dims.push_back(f.n);
  bc.A2 = MultiMatrix(dims);
  Mat restrict(bc.A2.dim(), big.dim());
  for (int a = 0; a < nb; ++a)
    for (int r = 0; r < fams[a].n; ++r)
      for (int c = 0; c < fams[a].n; ++c)
        restrict.row(bc.A2.index(a, r, c)) = fams[a].at(r, c).adjoint() / fams[a].at(c, c).squaredNorm();
  bc.embed = Mat(bc.A2.dim(), D);
  for (int i = 0; i < D; ++i) bc.embed.col(i) = restrict * vecm(lam[i]);
  bc.e = restrict * ev;

  for (size_t j = 0; j < sf.size(); ++j)
    bc.weights2.push_back(bc.lambda * A.trace(sf[j].at(0, 0), w).real());

  for (int i = 0; i < D; ++i) {
    Vec x = bc.embed.col(i);
    Vec lhs = bc.A2.mul(bc.A2.mul(bc.e, x), bc.e);
    Vec rhs = bc.A2.mul(bc.embed * (E * A.basis(i)), bc.e);
    bc.jones_residual = std::max(bc.jones_residual, max_abs(lhs - rhs));
    bc.markov_residual = std::max(bc.markov_residual, std::abs(bc.A2.trace(x, bc.weights2) - A.trace(A.basis(i), w)));
  }
  bc.upper.lower = A.block_labels("a");
  bc.upper.lower_dims = A.dims();
  bc.upper.upper = bc.A2.block_labels("b");
  bc.upper.upper_dims = bc.A2.dims();
  bc.upper.matrix = IMat::Zero(A.num_blocks(), nb);
  for (int a = 0; a < A.num_blocks(); ++a) {
    Vec p = bc.embed.col(A.index(a, 0, 0));
    for (int b = 0; b < nb; ++b) bc.upper.matrix(a, b) = static_cast<int>(std::lround(bc.A2.block_trace(p, b).real()));
  }
  if (bc.markov_residual > tol * 1e3)
    throw AlgebraError("supplied trace is not Markov for the inclusion (residual " + fmt_double(bc.markov_residual) + ")");
  return bc;
}

Mat op_tensor_mul(const MultiMatrix& D, const Mat& X, const Mat& Y) {
  // (a (x) b)(c (x) d) = (c a) (x) (b d) in D^op (x) D
  const int n = D.dim();
  Mat Z = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (X(a, b) == cd(0)) continue;
      for (int c = 0; c < n; ++c) {
        int ca = D.prod_index(c, a);
        if (ca < 0) continue;
        for (int d = 0; d < n; ++d) {
          if (Y(c, d) == cd(0)) continue;
          int bd = D.prod_index(b, d);
          if (bd < 0) continue;
          Z(ca, bd) += X(a, b) * Y(c, d);
        }
      }
    }
  return Z;
}

namespace {
Vec contract_mul(const MultiMatrix& D, const Mat& P) {
  Vec v = Vec::Zero(D.dim());
  for (int i = 0; i < D.dim(); ++i)
    for (int j = 0; j < D.dim(); ++j) {
      if (P(i, j) == cd(0)) continue;
      int k = D.prod_index(i, j);
      if (k >= 0) v(k) += P(i, j);
    }
  return v;
}
Mat outer1(const Vec& x, const Vec& y) { return x * y.transpose(); }
}  // namespace

SeparabilityElement separability_element(const MultiMatrix& D) {
  const int n = D.dim();
  SeparabilityElement s{};
  s.P = Mat::Zero(n, n);
  for (int a = 0; a < D.num_blocks(); ++a) {
    int m = D.dims()[a];
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) s.P(D.index(a, r, c), D.index(a, c, r)) = 1.0 / m;
  }
  Vec one = D.unit();
  s.multiplication = max_abs(contract_mul(D, s.P) - one);
  s.idempotent = max_abs(op_tensor_mul(D, s.P, s.P) - s.P);
  for (int i = 0; i < n; ++i) {
    Vec x = D.basis(i);
    s.left_module = std::max(s.left_module, max_abs(op_tensor_mul(D, outer1(x, one), s.P) -
                                                    op_tensor_mul(D, outer1(one, x), s.P)));
    s.right_module = std::max(s.right_module, max_abs(op_tensor_mul(D, s.P, outer1(x, one)) -
                                                      op_tensor_mul(D, s.P, outer1(one, x))));
    for (int j = 0; j < n; ++j) {
      Vec y = D.basis(j);
      Mat l = op_tensor_mul(D, op_tensor_mul(D, outer1(x, one), s.P), outer1(y, one));
      Mat r = op_tensor_mul(D, op_tensor_mul(D, outer1(y, one), s.P), outer1(x, one));
      s.literal_symmetric = std::max(s.literal_symmetric, max_abs(l - r));
    }
  }
  // Independent solve: the linear system of both module properties plus m(P) = 1.
  std::vector<Vec> cols;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Mat E = Mat::Zero(n, n);
      E(a, b) = 1.0;
      std::vector<Vec> parts;
      for (int i = 0; i < n; ++i) {
        Vec x = D.basis(i);
        Mat l = op_tensor_mul(D, outer1(x, one), E) - op_tensor_mul(D, outer1(one, x), E);
        Mat r = op_tensor_mul(D, E, outer1(x, one)) - op_tensor_mul(D, E, outer1(one, x));
        parts.push_back(Eigen::Map<const Vec>(l.data(), l.size()));
        parts.push_back(Eigen::Map<const Vec>(r.data(), r.size()));
      }
      parts.push_back(contract_mul(D, E));
      Eigen::Index len = 0;
      for (auto& p : parts) len += p.size();
      Vec c(len);
      Eigen::Index o = 0;
      for (auto& p : parts) c.segment(o, p.size()) = p, o += p.size();
      cols.push_back(c);
    }
  Mat M = hstack(cols, cols.front().size());
  Vec rhs = Vec::Zero(M.rows());
  rhs.tail(n) = one;
  if (null_space(M).cols() != 0) {
    s.uniqueness_gap = 1.0;
  } else {
    Vec sol = M.completeOrthogonalDecomposition().solve(rhs);
    Mat Ps = Eigen::Map<const Mat>(sol.data(), n, n).transpose();
    s.uniqueness_gap = max_abs(Ps - s.P);
  }
  return s;
}

IndexElement index_element(const MultiMatrix& A, const std::vector<double>& w, const Mat& QS, double tol) {
  auto fams = decompose_matrix_units(A, QS, tol);
  IndexElement ie{};
  ie.H = Vec::Zero(A.dim());
  for (auto& F : fams) {
    double t = A.trace(F.at(0, 0), w).real();
    if (!(t > tol)) throw AlgebraError("trace is degenerate on the subalgebra");
    ie.H += (F.n / t) * F.sum_diag();
  }
  for (int i = 0; i < QS.cols(); ++i) {
    Vec z = QS.col(i);
    cd treg = (QS.adjoint() * A.left_mat(z) * QS).trace();
    ie.defining_residual = std::max(ie.defining_residual, std::abs(A.trace(A.mul(ie.H, z), w) - treg));
    ie.central_residual = std::max(ie.central_residual, max_abs(A.mul(ie.H, z) - A.mul(z, ie.H)));
  }
  Vec Hs = project(QS, A.unit());
  // smallest eigenvalue on the support of the subalgebra unit
  HermEig eu = eigh(A.full(Hs));
  std::vector<Vec> sup;
  for (int i = 0; i < eu.w.size(); ++i)
    if (eu.w(i) > 0.5) sup.push_back(eu.V.col(i));
  Mat Us = hstack(sup, A.size());
  ie.min_eigenvalue = eigh(Us.adjoint() * A.full(ie.H) * Us).w.minCoeff();
  return ie;
}

Vec StructureConstants::mul(const Vec& x, const Vec& y) const {
  Mat Lx = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    if (x(i) != cd(0)) Lx += x(i) * L[i];
  return Lx * y;
}

StarRealization realize_star_algebra(const StructureConstants& sc, double tol) {
  const int D = sc.dim;
  StarRealization out;
  Vec trL(D);
  for (int i = 0; i < D; ++i) trL(i) = sc.L[i].trace();
  Mat Gram(D, D);
  std::vector<Vec> st(D);
  for (int i = 0; i < D; ++i) {
    Vec e = Vec::Zero(D);
    e(i) = 1.0;
    st[i] = sc.adj(e);
  }
  for (int i = 0; i < D; ++i) {
    Mat Li = Mat::Zero(D, D);
    for (int k = 0; k < D; ++k)
      if (st[i](k) != cd(0)) Li += st[i](k) * sc.L[k];
    // Gram(i, j) = Tr_reg(e_i^* e_j) = trL . (L_{e_i^*} e_j)
    Gram.row(i) = trL.transpose() * Li;
  }
  HermEig ge = eigh(Gram);
  out.semisimplicity_margin = ge.w(0) / std::max(1e-300, ge.w(D - 1));
  if (!(ge.w(0) > tol * ge.w(D - 1)))
    throw AlgebraError("algebra is not a C*-algebra (Gram margin " + fmt_double(out.semisimplicity_margin) + ")");
  Mat W = ge.V * ge.w.cwiseSqrt().cwiseInverse().cast<cd>().asDiagonal();
  Mat Winv = ge.w.cwiseSqrt().cast<cd>().asDiagonal() * ge.V.adjoint();
  MultiMatrix big({D});
  std::vector<Vec> reps(D);
  for (int i = 0; i < D; ++i) reps[i] = big.from_blocks({Winv * sc.L[i] * W});
  Mat Q = orth(hstack(reps, big.dim()));
  // Two seeded generic elements generate a finite-dimensional semisimple algebra, which keeps the
  // closure and center computations linear in D; the full check is the fallback.
  std::mt19937_64 rng(777u);
  std::normal_distribution<double> gauss;
  Mat gens(big.dim(), 2);
  for (int g = 0; g < 2; ++g) {
    Vec c(D);
    for (int i = 0; i < D; ++i) c(i) = cd(gauss(rng), gauss(rng));
    gens.col(g) = hstack(reps, big.dim()) * c;
  }
  Realization R;
  bool generated = false;
  try {
    R = realize_subalgebra(big, Q, tol, &gens);
    generated = R.alg.dim() == D;
  } catch (const AlgebraError&) {
  }
  if (!generated) R = realize_subalgebra(big, Q, tol);
  out.alg = R.alg;
  out.T = Mat(R.alg.dim(), D);
  for (int i = 0; i < D; ++i) out.T.col(i) = R.restrict * reps[i];
  out.Tinv = out.T.inverse();
  double res = 0;
  for (int i = 0; i < D; ++i) {
    Vec ei = Vec::Zero(D);
    ei(i) = 1.0;
    res = std::max(res, max_abs(out.T * sc.adj(ei) - out.alg.adj(out.T.col(i))));
    for (int j = 0; j < D; ++j) {
      Vec ej = Vec::Zero(D);
      ej(j) = 1.0;
      res = std::max(res, max_abs(out.T * sc.mul(ei, ej) - out.alg.mul(out.T.col(i), out.T.col(j))));
    }
  }
  out.homomorphism_residual = res;
  return out;
}

}  // namespace qg
