#include "qg/corep.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace qg {

namespace {

Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

Vec trace_functional(const WeakHopfAlgebra& W) {
  const CanonicalData& cd = canonical_elements(W);
  const MultiMatrix& B = W.B;
  Vec t = Vec::Zero(B.dim());
  for (int a = 0; a < B.num_blocks(); ++a)
    for (int r = 0; r < B.dims()[a]; ++r) t(B.index(a, r, r)) = cd.tau.weights[a];
  return t;
}

cd ev(const Vec& f, const Vec& x) { return (f.transpose() * x)(0); }

// Columns of the matrix of a linear map on n2 x n1 matrices (column-major vec).
Mat linear_map_matrix(Eigen::Index n2, Eigen::Index n1, const std::function<Vec(const Mat&)>& f) {
  std::vector<Vec> cols;
  for (Eigen::Index l = 0; l < n1; ++l)
    for (Eigen::Index m = 0; m < n2; ++m) {
      Mat E = Mat::Zero(n2, n1);
      E(m, l) = 1.0;
      cols.push_back(f(E));
    }
  if (cols.empty()) return Mat(0, 0);
  return hstack(cols, cols.front().size());
}

Vec flatten(const std::vector<Mat>& parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.size();
  Vec v(n);
  Eigen::Index o = 0;
  for (const auto& p : parts) {
    v.segment(o, p.size()) = Eigen::Map<const Vec>(p.data(), p.size());
    o += p.size();
  }
  return v;
}

Mat coact_from_legs(const std::vector<Mat>& legs, int D, int n) {
  Mat C = Mat::Zero(static_cast<Eigen::Index>(D) * n, n);
  for (int j = 0; j < n; ++j)
    for (int b = 0; b < D; ++b)
      for (int k = 0; k < n; ++k) C(b * n + k, j) = legs[j](b, k);
  return C;
}

// Adjoint of an operator for the inner product (v, w) = w^* M v.
Mat adjoint_for(const Mat& M, const Mat& T) { return M.ldlt().solve(T.adjoint() * M); }

Mat block_sum(const Mat& A, const Mat& B) {
  Mat R = Mat::Zero(A.rows() + B.rows(), A.cols() + B.cols());
  R.topLeftCorner(A.rows(), A.cols()) = A;
  R.bottomRightCorner(B.rows(), B.cols()) = B;
  return R;
}

// Multiplicity of block a of the subalgebra in block b of C, where column x of embed is the image
// of basis element x of the subalgebra `sub`. Rows keep the block labels of `sub`.
IMat restriction_matrix(const MultiMatrix& sub, const Mat& embed, const MultiMatrix& C) {
  IMat R = IMat::Zero(sub.num_blocks(), C.num_blocks());
  for (int a = 0; a < sub.num_blocks(); ++a) {
    Vec p = embed * sub.central_projection(a);
    for (int b = 0; b < C.num_blocks(); ++b) {
      // Tr(p in block b) = multiplicity * n_a.
      R(a, b) = static_cast<int>(std::lround(C.block_trace(p, b).real() / sub.dims()[a]));
    }
  }
  return R;
}

}  // namespace

Mat Comodule::leg(int j) const {
  const Eigen::Index D = n ? coact.rows() / n : 0;
  Mat X(D, n);
  for (Eigen::Index b = 0; b < D; ++b)
    for (int k = 0; k < n; ++k) X(b, k) = coact(b * n + k, j);
  return X;
}

double ComoduleReport::worst() const { return std::max({coassociativity, counit, inner_product}); }

ComoduleReport check_comodule(const WeakHopfAlgebra& W, const Comodule& V) {
  ComoduleReport r;
  const int D = W.dim(), n = V.n;
  if (n == 0) return r;
  std::vector<Mat> legs(n);
  for (int j = 0; j < n; ++j) legs[j] = V.leg(j);
  for (int j = 0; j < n; ++j) {
    const Mat& X = legs[j];
    Mat lhs = W.delta * X;  // (Delta (x) id) or (id (x) Delta), row i * D + j'
    Mat rhs = Mat::Zero(static_cast<Eigen::Index>(D) * D, n);
    for (int i = 0; i < D; ++i)
      for (int jj = 0; jj < D; ++jj)
        for (int k = 0; k < n; ++k) {
          // left: coefficient at e_i (x) e_jj (x) v_k' is sum_k X(i, k) X_k(jj, k');
          // right: coefficient at v_k' (x) e_i (x) e_jj is sum_k X(jj, k) X_k(i, k').
          cd c = V.side == Side::Left ? X(i, k) : X(jj, k);
          if (c == cd(0)) continue;
          rhs.row(i * D + jj) += c * (V.side == Side::Left ? legs[k].row(jj) : legs[k].row(i));
        }
    r.coassociativity = std::max(r.coassociativity, max_abs(lhs - rhs));
    RVec unitv = RVec::Zero(n);
    unitv(j) = 1;
    r.counit = std::max(r.counit, max_abs(Vec(X.transpose() * W.eps) - unitv.cast<cd>()));
  }
  r.inner_product = max_abs(V.inner - V.inner.adjoint());
  HermEig e = eigh(V.inner);
  if (e.w.size() && e.w(0) <= 0) r.inner_product = std::max(r.inner_product, -e.w(0) + 1e-300);
  return r;
}

double unitary_check(const WeakHopfAlgebra& W, const Comodule& V) {
  const CanonicalData& cd = canonical_elements(W);
  const Mat& M = V.inner;
  double worst = 0;
  std::vector<Mat> legs(V.n);
  for (int j = 0; j < V.n; ++j) legs[j] = V.leg(j);
  for (int a = 0; a < V.n; ++a)
    for (int c = 0; c < V.n; ++c) {
      Vec y = legs[c].conjugate() * M.col(a);
      Vec z = legs[a] * M.row(c).transpose();
      Vec lhs, rhs;
      if (V.side == Side::Left) {
        lhs = W.star * y;
        rhs = W.B.mul(W.S * z, cd.G);
      } else {
        lhs = z;
        rhs = W.B.mul(cd.Ginv, W.S * (W.star * y));
      }
      worst = std::max(worst, max_abs(lhs - rhs));
    }
  return worst;
}

Comodule graded_comodule(const WeakHopfAlgebra& W, const std::vector<Vec>& grades, const Mat& T) {
  const int n = static_cast<int>(grades.size()), D = W.dim();
  if (T.rows() != n || T.cols() != n) throw AlgebraError("basis change has the wrong shape");
  Mat Tinv = T.inverse();
  std::vector<Mat> legs(n, Mat::Zero(D, n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) legs[j] += T(k, j) * grades[k] * Tinv.col(k).transpose();
  Comodule V;
  V.n = n;
  V.coact = coact_from_legs(legs, D, n);
  V.inner = T.adjoint() * T;
  return V;
}

Mat DualModule::act(const Vec& x) const {
  Mat R = Mat::Zero(acts.empty() ? 0 : acts[0].rows(), acts.empty() ? 0 : acts[0].cols());
  for (size_t i = 0; i < acts.size(); ++i)
    if (x(static_cast<Eigen::Index>(i)) != cd(0)) R += x(static_cast<Eigen::Index>(i)) * acts[i];
  return R;
}

DualModule comodule_to_module(const WeakHopfAlgebra& W, const DualData& d, const Comodule& V) {
  const int D = W.dim();
  DualModule M;
  M.right_module = V.side == Side::Left;
  M.acts.assign(D, Mat::Zero(V.n, V.n));
  for (int j = 0; j < V.n; ++j) {
    Mat X = V.leg(j);           // D x n
    Mat R = d.pairing.P * X;    // R(x, k) = sum_b P(x, b) X(b, k)
    for (int x = 0; x < D; ++x) M.acts[x].col(j) = R.row(x).transpose();
  }
  return M;
}

Comodule module_to_comodule(const WeakHopfAlgebra& W, const DualData& d, const DualModule& M, const Mat& inner,
                            Side side) {
  const int D = W.dim();
  const int n = M.acts.empty() ? 0 : static_cast<int>(M.acts[0].rows());
  Mat Pinv = d.pairing.P.inverse();
  std::vector<Mat> legs(n, Mat::Zero(D, n));
  for (int j = 0; j < n; ++j) {
    Mat R(D, n);
    for (int x = 0; x < D; ++x) R.row(x) = M.acts[x].col(j).transpose();
    legs[j] = Pinv * R;
  }
  Comodule V;
  V.n = n;
  V.side = side;
  V.coact = coact_from_legs(legs, D, n);
  V.inner = inner;
  return V;
}

double module_residual(const MultiMatrix& A, const DualModule& M, const Vec& unit) {
  if (M.acts.empty()) return 0;
  const Eigen::Index n = M.acts[0].rows();
  double r = max_abs(M.act(unit) - Mat::Identity(n, n));
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j) {
      int p = A.prod_index(i, j);
      Mat lhs = p >= 0 ? M.acts[p] : Mat::Zero(n, n);
      Mat rhs = M.right_module ? Mat(M.acts[j] * M.acts[i]) : Mat(M.acts[i] * M.acts[j]);
      r = std::max(r, max_abs(lhs - rhs));
    }
  return r;
}

std::vector<int> simples_and_multiplicities(const MultiMatrix& A, const DualModule& M, double tol) {
  std::vector<int> mult(A.num_blocks(), 0);
  if (M.acts.empty() || M.acts[0].rows() == 0) return mult;
  double r = module_residual(A, M, A.unit());
  if (r > 1e3 * tol) throw AlgebraError("action is not a unital homomorphism (residual " + fmt_double(r) + ")");
  for (int a = 0; a < A.num_blocks(); ++a) {
    int rk = rank(M.act(A.central_projection(a)), 1e-8);
    if (rk % A.dims()[a] != 0) throw AlgebraError("central projection rank is not a multiple of the block size");
    mult[a] = rk / A.dims()[a];
  }
  return mult;
}

Mat comodule_hom(const WeakHopfAlgebra& W, const Comodule& V1, const Comodule& V2) {
  std::vector<Mat> L1(V1.n), L2(V2.n);
  for (int j = 0; j < V1.n; ++j) L1[j] = V1.leg(j);
  for (int j = 0; j < V2.n; ++j) L2[j] = V2.leg(j);
  const int D = W.dim();
  Mat A = linear_map_matrix(V2.n, V1.n, [&](const Mat& T) {
    std::vector<Mat> parts;
    for (int j = 0; j < V1.n; ++j) {
      Mat lhs = L1[j] * T.transpose();  // (id (x) T) rho1(v_j)
      Mat rhs = Mat::Zero(D, V2.n);
      for (int l = 0; l < V2.n; ++l) rhs += T(l, j) * L2[l];
      parts.push_back(lhs - rhs);
    }
    return flatten(parts);
  });
  return null_space(A, 1e-8);
}

Mat module_hom(const DualModule& M1, const DualModule& M2) {
  const Eigen::Index n1 = M1.acts.empty() ? 0 : M1.acts[0].rows();
  const Eigen::Index n2 = M2.acts.empty() ? 0 : M2.acts[0].rows();
  Mat A = linear_map_matrix(n2, n1, [&](const Mat& T) {
    std::vector<Mat> parts;
    for (size_t x = 0; x < M1.acts.size(); ++x) parts.push_back(T * M1.acts[x] - M2.acts[x] * T);
    return flatten(parts);
  });
  return null_space(A, 1e-8);
}

Mat RelativeHopfModule::act_left(const Vec& h) const {
  Vec c = QH.adjoint() * h;
  Mat R = Mat::Zero(V.n, V.n);
  for (Eigen::Index i = 0; i < c.size(); ++i) R += c(i) * left[static_cast<size_t>(i)];
  return R;
}

Mat RelativeHopfModule::act_right(const Vec& k) const {
  Vec c = QK.adjoint() * k;
  Mat R = Mat::Zero(V.n, V.n);
  for (Eigen::Index i = 0; i < c.size(); ++i) R += c(i) * right[static_cast<size_t>(i)];
  return R;
}

double RelativeHopfReport::worst() const {
  return std::max({comodule.worst(), left_module, right_module, bimodule, commutation, target_bimodule, star_left,
                   star_right, unitarity});
}

Mat induced_target_action(const WeakHopfAlgebra& W, const Comodule& V, const Vec& z, bool left) {
  Vec u = (left ? W.B.left_mat(z) : W.B.right_mat(z)).transpose() * W.eps;
  Mat R(V.n, V.n);
  for (int j = 0; j < V.n; ++j) R.col(j) = V.leg(j).transpose() * u;
  return R;
}

RelativeHopfReport check_relative_hopf(const WeakHopfAlgebra& W, const RelativeHopfModule& M) {
  RelativeHopfReport r;
  const MultiMatrix& B = W.B;
  const int D = W.dim(), n = M.V.n;
  r.comodule = check_comodule(W, M.V);
  if (n == 0) return r;
  const Mat I = Mat::Identity(n, n);
  r.left_module = max_abs(M.act_left(W.unit()) - I);
  r.right_module = max_abs(M.act_right(W.unit()) - I);
  for (Eigen::Index a = 0; a < M.QH.cols(); ++a)
    for (Eigen::Index b = 0; b < M.QH.cols(); ++b)
      r.left_module = std::max(r.left_module, max_abs(M.act_left(B.mul(M.QH.col(a), M.QH.col(b))) -
                                                      M.left[a] * M.left[b]));
  for (Eigen::Index a = 0; a < M.QK.cols(); ++a)
    for (Eigen::Index b = 0; b < M.QK.cols(); ++b)
      r.right_module = std::max(r.right_module, max_abs(M.act_right(B.mul(M.QK.col(a), M.QK.col(b))) -
                                                        M.right[b] * M.right[a]));
  for (const auto& L : M.left)
    for (const auto& R : M.right) r.bimodule = std::max(r.bimodule, max_abs(L * R - R * L));

  // rho(h |> v) = sum h_(1) v^(1) (x) h_(2) |> v^(2), and the mirrored identity for k.
  std::vector<Mat> Lb(D), Rb(D);
  for (int i = 0; i < D; ++i) Lb[i] = B.left_mat(B.basis(i)), Rb[i] = B.right_mat(B.basis(i));
  for (Eigen::Index a = 0; a < M.QH.cols(); ++a) {
    Mat X = W.coproduct(M.QH.col(a));
    Mat Op = Mat::Zero(static_cast<Eigen::Index>(D) * n, static_cast<Eigen::Index>(D) * n);
    for (int i = 0; i < D; ++i) {
      Vec second = X.row(i).transpose();
      if (max_abs(second) == 0) continue;
      Op += kron(Lb[i], M.act_left(second));
    }
    r.commutation = std::max(r.commutation, max_abs(M.V.coact * M.left[a] - Op * M.V.coact));
  }
  for (Eigen::Index a = 0; a < M.QK.cols(); ++a) {
    Mat X = W.coproduct(M.QK.col(a));
    Mat Op = Mat::Zero(static_cast<Eigen::Index>(D) * n, static_cast<Eigen::Index>(D) * n);
    for (int i = 0; i < D; ++i) {
      Vec second = X.row(i).transpose();
      if (max_abs(second) == 0) continue;
      Op += kron(Rb[i], M.act_right(second));
    }
    r.commutation = std::max(r.commutation, max_abs(M.V.coact * M.right[a] - Op * M.V.coact));
  }

  Mat Bt = counital_subalgebras(W, false).Bt;
  for (Eigen::Index c = 0; c < Bt.cols(); ++c) {
    Vec z = Bt.col(c);
    r.target_bimodule = std::max(r.target_bimodule, max_abs(induced_target_action(W, M.V, z, true) - M.act_left(z)));
    r.target_bimodule = std::max(r.target_bimodule, max_abs(induced_target_action(W, M.V, z, false) - M.act_right(z)));
  }
  for (Eigen::Index a = 0; a < M.QH.cols(); ++a)
    r.star_left = std::max(r.star_left, max_abs(M.act_left(W.st(M.QH.col(a))) - adjoint_for(M.V.inner, M.left[a])));
  for (Eigen::Index a = 0; a < M.QK.cols(); ++a)
    r.star_right =
        std::max(r.star_right, max_abs(M.act_right(W.st(M.QK.col(a))) - adjoint_for(M.V.inner, M.right[a])));
  r.unitarity = unitary_check(W, M.V);
  return r;
}

RelativeHopfModule multiplication_object(const WeakHopfAlgebra& W, const Mat& QH, const Mat& QV, const Mat& QK,
                                         double tol) {
  const MultiMatrix& B = W.B;
  const int D = W.dim();
  Mat Q = orth(QV);
  const int n = static_cast<int>(Q.cols());
  auto leak = [&](const Vec& x) { return (x - Q * (Q.adjoint() * x)).norm(); };
  double worst = 0;
  RelativeHopfModule M;
  M.QH = orth(QH);
  M.QK = orth(QK);
  std::vector<Mat> legs(n);
  for (int j = 0; j < n; ++j) {
    Mat X = W.coproduct(Q.col(j));
    for (int i = 0; i < D; ++i) worst = std::max(worst, leak(X.row(i).transpose()));
    legs[j] = X * Q.conjugate();
  }
  for (Eigen::Index c = 0; c < M.QH.cols(); ++c) {
    Mat L = B.left_mat(M.QH.col(c)) * Q;
    for (int j = 0; j < n; ++j) worst = std::max(worst, leak(L.col(j)));
    M.left.push_back(Q.adjoint() * L);
  }
  for (Eigen::Index c = 0; c < M.QK.cols(); ++c) {
    Mat R = B.right_mat(M.QK.col(c)) * Q;
    for (int j = 0; j < n; ++j) worst = std::max(worst, leak(R.col(j)));
    M.right.push_back(Q.adjoint() * R);
  }
  if (worst > 1e3 * tol) throw AlgebraError("carrier is not stable under the actions and the coaction (residual " +
                                            fmt_double(worst) + ")");
  Vec t = trace_functional(W);
  M.V.n = n;
  M.V.side = Side::Left;
  M.V.coact = coact_from_legs(legs, D, n);
  M.V.inner = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M.V.inner(j, i) = ev(t, B.mul(W.st(Q.col(j)), Q.col(i)));
  return M;
}

Mat CrossedModule::act(const Vec& y) const {
  Mat R = Mat::Zero(acts.empty() ? 0 : acts[0].rows(), acts.empty() ? 0 : acts[0].cols());
  for (size_t i = 0; i < acts.size(); ++i)
    if (y(static_cast<Eigen::Index>(i)) != cd(0)) R += y(static_cast<Eigen::Index>(i)) * acts[i];
  return R;
}

CrossedModule to_crossed_module(const WeakHopfAlgebra& W, const DualData& d, const CrossedProduct& cp,
                                const RelativeHopfModule& M) {
  DualModule Rd = comodule_to_module(W, d, M.V);
  std::vector<Mat> RK(cp.dI);
  for (int b = 0; b < cp.dI; ++b) RK[b] = M.act_right(cp.QI.col(b));
  CrossedModule X;
  for (int i = 0; i < cp.alg.dim(); ++i) {
    Vec u = cp.Qc * cp.Tinv.col(i);
    Mat A = Mat::Zero(M.V.n, M.V.n);
    for (int x = 0; x < cp.dA; ++x)
      for (int b = 0; b < cp.dI; ++b) {
        cd c = u(x * cp.dI + b);
        if (std::abs(c) > 1e-15) A += c * RK[b] * Rd.acts[x];
      }
    X.acts.push_back(A);
  }
  return X;
}

double crossed_module_residual(const CrossedProduct& cp, const CrossedModule& X) {
  DualModule M{X.acts, true};
  return module_residual(cp.alg, M, cp.alg.unit());
}

RelativeHopfModule from_crossed_module(const WeakHopfAlgebra& W, const DualData& d, const CrossedProduct& cp,
                                       const CrossedModule& X, const Mat& inner) {
  const int D = W.dim();
  DualModule Rd;
  Rd.right_module = true;
  for (int x = 0; x < D; ++x) Rd.acts.push_back(X.act(cp.embed_A.col(x)));
  RelativeHopfModule M;
  M.V = module_to_comodule(W, d, Rd, inner, Side::Left);
  M.QK = cp.QI;
  for (int b = 0; b < cp.dI; ++b) M.right.push_back(X.act(cp.embed_I.col(b)));
  M.QH = counital_subalgebras(W, false).Bt;
  for (Eigen::Index c = 0; c < M.QH.cols(); ++c) M.left.push_back(induced_target_action(W, M.V, M.QH.col(c), true));
  return M;
}

RelativeHopfBridge relative_hopf_bridge(const CoidealContext& ctx, const CoidealSubalgebra& K) {
  const WeakHopfAlgebra& W = ctx.W();
  RelativeHopfBridge br{crossed_product(W, ctx.actions().left, K.Q, ctx.tol()), {}, {}, {}, {}};
  const CrossedProduct& cp = br.cp;
  const MultiMatrix& C = cp.alg;
  for (int a = 0; a < C.num_blocks(); ++a) {
    const int m = C.dims()[a];
    CrossedModule X;
    X.acts.assign(C.dim(), Mat::Zero(m, m));
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) X.acts[C.index(a, r, c)](c, r) = 1.0;
    RelativeHopfModule M = from_crossed_module(W, ctx.dual(), cp, X, Mat::Identity(m, m));
    RelativeHopfReport rep = check_relative_hopf(W, M);
    br.compatibility.push_back(std::max({rep.comodule.coassociativity, rep.comodule.counit, rep.left_module,
                                         rep.right_module, rep.bimodule, rep.commutation, rep.target_bimodule}));
    CrossedModule back = to_crossed_module(W, ctx.dual(), cp, M);
    double rt = 0;
    for (int i = 0; i < C.dim(); ++i) rt = std::max(rt, max_abs(back.acts[i] - X.acts[i]));
    br.round_trip.push_back(rt);
    br.simples.push_back(std::move(M));
  }
  br.restriction = inclusion_data(C, orth(cp.embed_A));
  return br;
}

int trivial_representation_block(const WeakHopfAlgebra& Wd, double tol) {
  const MultiMatrix& A = Wd.B;
  Mat Bt = counital_subalgebras(Wd, false).Bt;
  std::vector<int> hits;
  for (int a = 0; a < A.num_blocks(); ++a)
    if (Wd.eps_t(A.central_projection(a)).norm() > 1e3 * tol) hits.push_back(a);
  if (hits.size() != 1 || A.dims()[hits[0]] != Bt.cols())
    throw AlgebraError("trivial representation not found among the blocks (" + std::to_string(hits.size()) +
                       " blocks meet the target counital subalgebra)");
  return hits[0];
}

PrincipalGraph principal_graph(const CoidealContext& ctx, const CoidealSubalgebra& K, bool cross_check) {
  const WeakHopfAlgebra& Wd = ctx.dual().Wd;
  PrincipalGraph g;
  DeltaResult dr = delta_map(ctx, K);
  g.full = inclusion_data(Wd.B, dr.image.Q, ctx.tol());
  const int root = trivial_representation_block(Wd, ctx.tol());
  const IMat& L = g.full.matrix;
  const int r = static_cast<int>(L.rows()), c = static_cast<int>(L.cols());
  std::vector<char> seen_l(r, 0), seen_u(c, 0);
  std::vector<int> stack{-(root + 1)};  // negative entries are upper vertices
  seen_u[root] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (v < 0) {
      int u = -v - 1;
      for (int i = 0; i < r; ++i)
        if (L(i, u) && !seen_l[i]) seen_l[i] = 1, stack.push_back(i);
    } else {
      for (int u = 0; u < c; ++u)
        if (L(v, u) && !seen_u[u]) seen_u[u] = 1, stack.push_back(-(u + 1));
    }
  }
  for (int i = 0; i < r; ++i)
    if (seen_l[i]) g.lower_index.push_back(i);
  for (int u = 0; u < c; ++u)
    if (seen_u[u]) g.upper_index.push_back(u);
  BratteliDiagram& comp = g.component;
  comp.matrix = IMat(g.lower_index.size(), g.upper_index.size());
  for (size_t i = 0; i < g.lower_index.size(); ++i) {
    comp.lower.push_back(g.full.lower[g.lower_index[i]]);
    comp.lower_dims.push_back(g.full.lower_dims[g.lower_index[i]]);
    for (size_t u = 0; u < g.upper_index.size(); ++u) comp.matrix(i, u) = L(g.lower_index[i], g.upper_index[u]);
  }
  for (size_t u = 0; u < g.upper_index.size(); ++u) {
    comp.upper.push_back(g.full.upper[g.upper_index[u]]);
    comp.upper_dims.push_back(g.full.upper_dims[g.upper_index[u]]);
    if (g.upper_index[u] == root) g.root = static_cast<int>(u);
  }
  g.norm_sq = comp.norm_sq();
  if (K.dim() == ctx.W().dim()) {
    Mat Bdt = counital_subalgebras(Wd, false).Bt;
    g.depth_two = same_subspace(dr.image.Q, Bdt);
  }
  if (cross_check) {
    CrossedProduct cp = crossed_product(ctx.W(), ctx.actions().left, K.Q, ctx.tol());
    IMat R = restriction_matrix(Wd.B, cp.embed_A, cp.alg);  // B* blocks x crossed blocks
    // B* blocks carry the same labels on both sides; compare the other side as multisets of rows.
    auto rows_of = [](const IMat& M) {
      std::multiset<std::vector<int>> s;
      for (Eigen::Index i = 0; i < M.rows(); ++i) {
        std::vector<int> row(M.cols());
        for (Eigen::Index j = 0; j < M.cols(); ++j) row[j] = M(i, j);
        s.insert(row);
      }
      return s;
    };
    IMat Rt = R.transpose();
    g.crossed_agrees = Rt.cols() == L.cols() && rows_of(Rt) == rows_of(L);
  }
  return g;
}

bool bipartite_isomorphic(const IMat& A, int root_a, const IMat& B, int root_b) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
  const int c = static_cast<int>(A.cols());
  if (c > 8 || A.rows() > 64) throw AlgebraError("graph too large for the brute-force isomorphism test");
  auto sorted_rows = [](const IMat& M, const std::vector<int>& perm) {
    std::vector<std::vector<int>> rows;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      std::vector<int> row(perm.size());
      for (size_t j = 0; j < perm.size(); ++j) row[j] = M(i, perm[j]);
      rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  std::vector<int> id(c);
  std::iota(id.begin(), id.end(), 0);
  const auto target = sorted_rows(B, id);
  std::vector<int> perm = id;
  do {
    if (root_a >= 0 && root_b >= 0 && perm[root_b] != root_a) continue;
    if (sorted_rows(A, perm) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

PositivityReport positivity_and_norm(const WeakHopfAlgebra& W, const DualData& d) {
  PositivityReport p;
  CounitalSubalgebras cs = counital_subalgebras(W);
  p.biconnected = cs.biconnected;
  BratteliDiagram b = inclusion_data(W.B, cs.Bt);
  BratteliDiagram bd = inclusion_data(d.Wd.B, counital_subalgebras(d.Wd, false).Bt);
  p.lambda = b.matrix;
  p.lambda_dual = bd.matrix;
  p.gram = p.lambda * p.lambda.transpose();
  p.gram_dual = p.lambda_dual * p.lambda_dual.transpose();
  p.positive = p.gram.size() && p.gram.minCoeff() > 0;
  p.positive_dual = p.gram_dual.size() && p.gram_dual.minCoeff() > 0;
  p.norm_sq = b.norm_sq();
  p.norm_sq_dual = bd.norm_sq();
  if (!p.positive) p.violation = "Lambda Lambda^t has a zero entry for B_t in B";
  if (!p.positive_dual) p.violation += std::string(p.violation.empty() ? "" : "; ") +
                                       "Lambda Lambda^t has a zero entry for B*_t in B*";
  return p;
}

namespace {

void check_subgroup(const Groupoid& G, const std::vector<int>& H) {
  std::set<int> s(H.begin(), H.end());
  for (int a : H) {
    if (!s.count(G.inverse(a))) throw AlgebraError("subset is not a subgroup");
    for (int b : H)
      if (!s.count(G.table(a, b))) throw AlgebraError("subset is not a subgroup");
  }
}

int conjugacy_class_count(const Groupoid& G, const std::vector<int>& S) {
  std::set<int> seen;
  int classes = 0;
  for (int x : S) {
    if (seen.count(x)) continue;
    ++classes;
    for (int s : S) seen.insert(G.table(G.table(s, x), G.inverse(s)));
  }
  return classes;
}

}  // namespace

DoubleCosetReport double_coset_analysis(const GroupoidAlgebraData& Bd, const Groupoid& G, const std::vector<int>& H,
                                        const std::vector<int>& K, double tol) {
  check_subgroup(G, H);
  check_subgroup(G, K);
  const WeakHopfAlgebra& W = Bd.W;
  const int n = G.size(), nh = static_cast<int>(H.size()), nk = static_cast<int>(K.size()), ng = nh * nk;
  std::map<int, int> hpos, kpos;
  for (int i = 0; i < nh; ++i) hpos[H[i]] = i;
  for (int i = 0; i < nk; ++i) kpos[K[i]] = i;
  const int e = G.identities().at(0);
  // Gamma = H x K acting on G by (h, k) . x = h x k^{-1}; gamma = a * nk + b.
  auto move = [&](int gamma, int x) { return G.table(G.table(H[gamma / nk], x), G.inverse(K[gamma % nk])); };
  auto compose = [&](int g1, int g2) {
    return hpos[G.table(H[g1 / nk], H[g2 / nk])] * nk + kpos[G.table(K[g1 % nk], K[g2 % nk])];
  };

  DoubleCosetReport rep;
  std::vector<int> coset_of(n, -1), reps;
  for (int g = 0; g < n; ++g) {
    if (coset_of[g] >= 0) continue;
    std::set<int> dc;
    for (int h : H)
      for (int k : K) dc.insert(G.table(G.table(h, g), k));
    for (int x : dc) coset_of[x] = static_cast<int>(rep.cosets.size());
    rep.cosets.emplace_back(dc.begin(), dc.end());
    reps.push_back(g);
    std::vector<int> stab;
    for (int h : H)
      for (int k : K)
        if (G.table(G.table(h, g), G.inverse(k)) == g) stab.push_back(h);
    rep.stabilizer_classes += conjugacy_class_count(G, stab);
  }
  rep.double_cosets = static_cast<int>(rep.cosets.size());

  // C(G) >< Gamma on the sum over double cosets HgK of l^2(Gamma): delta_x multiplies by
  // [gamma . g = x] and u_gamma translates. This representation is faithful.
  const int nc = rep.double_cosets;
  MultiMatrix amb(std::vector<int>(nc, ng));
  auto delta_img = [&](int x) {
    std::vector<Mat> bl(nc, Mat::Zero(ng, ng));
    for (int r = 0; r < nc; ++r)
      for (int gm = 0; gm < ng; ++gm)
        if (move(gm, reps[r]) == x) bl[r](gm, gm) = 1.0;
    return amb.from_blocks(bl);
  };
  auto unitary_img = [&](int gamma) {
    std::vector<Mat> bl(nc, Mat::Zero(ng, ng));
    for (int r = 0; r < nc; ++r)
      for (int gm = 0; gm < ng; ++gm) bl[r](compose(gamma, gm), gm) = 1.0;
    return amb.from_blocks(bl);
  };
  std::vector<Vec> deltas(n), units(ng), basis;
  for (int x = 0; x < n; ++x) deltas[x] = delta_img(x);
  for (int gm = 0; gm < ng; ++gm) units[gm] = unitary_img(gm);
  for (int x = 0; x < n; ++x)
    for (int gm = 0; gm < ng; ++gm) basis.push_back(amb.mul(deltas[x], units[gm]));
  Mat Q = orth(hstack(basis, amb.dim()));
  if (Q.cols() != n * ng) throw AlgebraError("representation of the crossed product is not faithful");
  // Every basis element delta_x u_gamma is a product of these generators.
  auto minimal_generators = [&](const std::vector<int>& S) {
    std::vector<int> gs;
    for (int x : S) {
      std::vector<int> span = subgroup_generated(G, gs);
      if (std::find(span.begin(), span.end(), x) == span.end()) gs.push_back(x);
    }
    return gs;
  };
  std::vector<Vec> gen(deltas);
  for (int h : minimal_generators(H)) gen.push_back(units[hpos[h] * nk + kpos[e]]);
  for (int k : minimal_generators(K)) gen.push_back(units[hpos[e] * nk + kpos[k]]);
  Mat gens = hstack(gen, amb.dim());
  Realization R = realize_subalgebra(amb, Q, tol, &gens);

  const MultiMatrix& A = R.alg;
  rep.simple_objects = A.num_blocks();
  std::set<std::vector<int>> supports;
  rep.supports_are_cosets = true;
  Mat arrowH(W.dim(), nh), arrowK(W.dim(), nk);
  for (int a = 0; a < nh; ++a) arrowH.col(a) = Bd.arrow.col(H[a]);
  for (int b = 0; b < nk; ++b) arrowK.col(b) = Bd.arrow.col(K[b]);
  Mat QH = orth(arrowH), QK = orth(arrowK);
  Mat cH = arrowH.colPivHouseholderQr().solve(QH), cK = arrowK.colPivHouseholderQr().solve(QK);
  for (int blk = 0; blk < A.num_blocks(); ++blk) {
    Vec c = R.embed * A.central_projection(blk);
    std::vector<int> supp;
    for (int g = 0; g < n; ++g)
      if (amb.mul(deltas[g], c).norm() > 1e-8) supp.push_back(g);
    supports.insert(supp);
    std::set<int> cs;
    for (int g : supp) cs.insert(coset_of[g]);
    if (cs.size() != 1 || supp.size() != rep.cosets[*cs.begin()].size()) rep.supports_are_cosets = false;

    // The simple module as a relative Hopf bimodule over C[G].
    const int m = A.dims()[blk];
    auto act = [&](const Vec& y) { return Mat(A.block(R.restrict * y, blk)); };
    RelativeHopfModule M;
    M.QH = QH;
    M.QK = QK;
    std::vector<Mat> legs(m, Mat::Zero(W.dim(), m));
    for (int g = 0; g < n; ++g) {
      Mat P = act(deltas[g]);
      for (int j = 0; j < m; ++j) legs[j] += Bd.arrow.col(g) * P.col(j).transpose();
    }
    M.V.n = m;
    M.V.coact = coact_from_legs(legs, W.dim(), m);
    M.V.inner = Mat::Identity(m, m);
    for (Eigen::Index q = 0; q < QH.cols(); ++q) {
      Mat L = Mat::Zero(m, m);
      for (int a = 0; a < nh; ++a) L += cH(a, q) * act(units[a * nk + kpos[e]]);
      M.left.push_back(L);
    }
    for (Eigen::Index q = 0; q < QK.cols(); ++q) {
      Mat Rm = Mat::Zero(m, m);
      for (int b = 0; b < nk; ++b) Rm += cK(b, q) * act(units[hpos[e] * nk + kpos[G.inverse(K[b])]]);
      M.right.push_back(Rm);
    }
    rep.certification = std::max(rep.certification, check_relative_hopf(W, M).worst());
  }
  rep.supports = static_cast<int>(supports.size());
  return rep;
}

int double_coset_count(const GroupoidAlgebraData& B, const Groupoid& G, const std::vector<int>& H,
                       const std::vector<int>& K, double tol) {
  DoubleCosetReport r = double_coset_analysis(B, G, H, K, tol);
  if (!r.supports_are_cosets || r.supports != r.double_cosets)
    throw AlgebraError("simple objects (" + std::to_string(r.supports) + " supports) disagree with " +
                       std::to_string(r.double_cosets) + " double cosets");
  return r.supports;
}

TensorProduct relative_tensor(const WeakHopfAlgebra& W, const RelativeHopfModule& V, const RelativeHopfModule& Wm,
                              double tol) {
  if (!same_subspace(V.QK, Wm.QH)) throw AlgebraError("middle coideals of the tensor factors differ");
  const MultiMatrix& B = W.B;
  const int D = W.dim(), nV = V.V.n, nW = Wm.V.n, N = nV * nW;
  const Mat& QL = V.QK;
  const int dL = static_cast<int>(QL.cols());
  Vec t = trace_functional(W);
  Mat Tm(dL, dL);
  for (int a = 0; a < dL; ++a)
    for (int b = 0; b < dL; ++b) Tm(a, b) = ev(t, B.mul(QL.col(a), QL.col(b)));
  Eigen::FullPivLU<Mat> lu(Tm);
  // L-valued forms: tau(l <v_i, v_j>_L) = (v_i <| l, v_j) and tau(l <w_k, w_l>_L) = (l |> w_k, w_l).
  std::vector<Mat> lv(dL), lw(dL);
  for (int a = 0; a < dL; ++a) {
    lv[a] = V.V.inner * V.act_right(QL.col(a));    // (j, i) entry: (v_i <| q_a, v_j)
    lw[a] = Wm.V.inner * Wm.act_left(QL.col(a));   // (l, k) entry: (q_a |> w_k, w_l)
  }
  Mat CV(dL, nV * nV), CW(dL, nW * nW);
  for (int i = 0; i < nV; ++i)
    for (int j = 0; j < nV; ++j) {
      Vec rhs(dL);
      for (int a = 0; a < dL; ++a) rhs(a) = lv[a](j, i);
      CV.col(i * nV + j) = lu.solve(rhs);
    }
  for (int k = 0; k < nW; ++k)
    for (int l = 0; l < nW; ++l) {
      Vec rhs(dL);
      for (int a = 0; a < dL; ++a) rhs(a) = lw[a](l, k);
      CW.col(k * nW + l) = lu.solve(rhs);
    }
  Mat Val = CV.transpose() * Tm * CW;
  Mat G(N, N);
  for (int i = 0; i < nV; ++i)
    for (int j = 0; j < nV; ++j)
      for (int k = 0; k < nW; ++k)
        for (int l = 0; l < nW; ++l) G(j * nW + l, i * nW + k) = Val(i * nV + j, k * nW + l);

  TensorProduct tp;
  HermEig e = eigh(G);
  const double top = e.w.size() ? std::max(std::abs(e.w(0)), std::abs(e.w(e.w.size() - 1))) : 0.0;
  std::vector<int> keep, drop;
  for (int i = 0; i < e.w.size(); ++i) (e.w(i) > 1e-9 * std::max(1.0, top) ? keep : drop).push_back(i);
  const int r = static_cast<int>(keep.size());
  tp.null_dim = N - r;
  Mat Up(N, r), N0(N, static_cast<Eigen::Index>(drop.size()));
  RVec mu(r);
  for (int c = 0; c < r; ++c) Up.col(c) = e.V.col(keep[c]), mu(c) = e.w(keep[c]);
  for (size_t c = 0; c < drop.size(); ++c) N0.col(static_cast<Eigen::Index>(c)) = e.V.col(drop[c]);
  tp.project = mu.cwiseSqrt().cast<cd>().asDiagonal() * Up.adjoint();
  tp.lift = Up * mu.cwiseSqrt().cwiseInverse().cast<cd>().asDiagonal();

  std::vector<Vec> rel;
  for (int a = 0; a < dL; ++a) {
    Mat Rv = V.act_right(QL.col(a)), Lw = Wm.act_left(QL.col(a));
    for (int i = 0; i < nV; ++i)
      for (int k = 0; k < nW; ++k) {
        Vec ek = Vec::Zero(nW), ei = Vec::Zero(nV);
        ek(k) = 1.0;
        ei(i) = 1.0;
        Vec x(N);
        Vec u = Rv.col(i), w = Lw.col(k);
        for (int p = 0; p < nV; ++p)
          for (int q = 0; q < nW; ++q) x(p * nW + q) = u(p) * ek(q) - ei(p) * w(q);
        rel.push_back(x);
      }
  }
  tp.relation_rank = rel.empty() ? 0 : rank(hstack(rel, N), 1e-9);

  // Coaction on V (x) W: v^(1) w^(1) (x) v^(2) (x) w^(2).
  std::vector<Mat> LV(nV), LW(nW);
  for (int i = 0; i < nV; ++i) LV[i] = V.V.leg(i);
  for (int k = 0; k < nW; ++k) LW[k] = Wm.V.leg(k);
  std::vector<std::array<int, 3>> prods;
  for (int b = 0; b < D; ++b)
    for (int b2 = 0; b2 < D; ++b2) {
      int p = B.prod_index(b, b2);
      if (p >= 0) prods.push_back({b, b2, p});
    }
  std::vector<Mat> Y(N, Mat::Zero(D, N));
  for (int i = 0; i < nV; ++i)
    for (int k = 0; k < nW; ++k) {
      Mat& y = Y[i * nW + k];
      for (const auto& pr : prods) {
        auto rv = LV[i].row(pr[0]);
        auto rw = LW[k].row(pr[1]);
        if (max_abs(rv) == 0 || max_abs(rw) == 0) continue;
        for (int m = 0; m < nV; ++m)
          if (rv(m) != cd(0)) y.row(pr[2]).segment(m * nW, nW) += rv(m) * rw;
      }
    }
  auto coact_of = [&](const Vec& x) {
    Mat Z = Mat::Zero(D, N);
    for (int s = 0; s < N; ++s)
      if (x(s) != cd(0)) Z += x(s) * Y[s];
    return Z;
  };
  std::vector<Mat> legs(r);
  for (int m = 0; m < r; ++m) legs[m] = coact_of(tp.lift.col(m)) * tp.project.transpose();
  RelativeHopfModule& M = tp.M;
  M.V.n = r;
  M.V.side = Side::Left;
  M.V.coact = coact_from_legs(legs, D, r);
  M.V.inner = Mat::Identity(r, r);
  M.QH = V.QH;
  M.QK = Wm.QK;
  const Mat IW = Mat::Identity(nW, nW), IV = Mat::Identity(nV, nV);
  for (const auto& L : V.left) {
    Mat op = kron(L, IW);
    M.left.push_back(tp.project * op * tp.lift);
    if (N0.cols()) tp.well_defined = std::max(tp.well_defined, max_abs(tp.project * op * N0));
  }
  for (const auto& R : Wm.right) {
    Mat op = kron(IV, R);
    M.right.push_back(tp.project * op * tp.lift);
    if (N0.cols()) tp.well_defined = std::max(tp.well_defined, max_abs(tp.project * op * N0));
  }
  for (Eigen::Index c = 0; c < N0.cols(); ++c)
    tp.well_defined = std::max(tp.well_defined, max_abs(coact_of(N0.col(c)) * tp.project.transpose()));
  tp.report = check_relative_hopf(W, M);
  (void)tol;
  return tp;
}

RelativeHopfModule dual_object(const WeakHopfAlgebra& W, const RelativeHopfModule& V) {
  RelativeHopfModule M;
  const int n = V.V.n, D = W.dim();
  std::vector<Mat> legs(n);
  for (int i = 0; i < n; ++i) legs[i] = W.star * V.V.leg(i).conjugate();
  M.V.n = n;
  M.V.side = Side::Left;
  M.V.coact = coact_from_legs(legs, D, n);
  M.V.inner = V.V.inner.conjugate();
  M.QH = V.QK;
  M.QK = V.QH;
  for (Eigen::Index c = 0; c < V.QK.cols(); ++c) M.left.push_back(V.act_right(W.st(V.QK.col(c))).conjugate());
  for (Eigen::Index c = 0; c < V.QH.cols(); ++c) M.right.push_back(V.act_left(W.st(V.QH.col(c))).conjugate());
  return M;
}

RelativeHopfModule direct_sum(const RelativeHopfModule& A, const RelativeHopfModule& B) {
  if (!same_subspace(A.QH, B.QH) || !same_subspace(A.QK, B.QK))
    throw AlgebraError("direct sum needs the same coideals on both sides");
  const int nA = A.V.n, nB = B.V.n, n = nA + nB;
  const Eigen::Index D = nA ? A.V.coact.rows() / nA : (nB ? B.V.coact.rows() / nB : 0);
  std::vector<Mat> legs(n, Mat::Zero(D, n));
  for (int j = 0; j < nA; ++j) legs[j].leftCols(nA) = A.V.leg(j);
  for (int j = 0; j < nB; ++j) legs[nA + j].rightCols(nB) = B.V.leg(j);
  RelativeHopfModule M;
  M.V.n = n;
  M.V.side = A.V.side;
  M.V.coact = coact_from_legs(legs, static_cast<int>(D), n);
  M.V.inner = block_sum(A.V.inner, B.V.inner);
  M.QH = A.QH;
  M.QK = A.QK;
  for (Eigen::Index c = 0; c < A.QH.cols(); ++c) M.left.push_back(block_sum(A.left[c], B.act_left(A.QH.col(c))));
  for (Eigen::Index c = 0; c < A.QK.cols(); ++c) M.right.push_back(block_sum(A.right[c], B.act_right(A.QK.col(c))));
  return M;
}

namespace {

Vec intertwining_vector(const RelativeHopfModule& A, const RelativeHopfModule& B, const std::vector<Mat>& LA,
                        const std::vector<Mat>& LB, const Mat& T) {
  std::vector<Mat> parts;
  const Eigen::Index D = LA.empty() ? (LB.empty() ? 0 : LB[0].rows()) : LA[0].rows();
  for (int j = 0; j < A.V.n; ++j) {
    Mat rhs = Mat::Zero(D, B.V.n);
    for (int l = 0; l < B.V.n; ++l) rhs += T(l, j) * LB[l];
    parts.push_back(LA[j] * T.transpose() - rhs);
  }
  for (Eigen::Index c = 0; c < A.QH.cols(); ++c) parts.push_back(T * A.left[c] - B.act_left(A.QH.col(c)) * T);
  for (Eigen::Index c = 0; c < A.QK.cols(); ++c) parts.push_back(T * A.right[c] - B.act_right(A.QK.col(c)) * T);
  return flatten(parts);
}

}  // namespace

Mat relative_hom(const WeakHopfAlgebra& W, const RelativeHopfModule& A, const RelativeHopfModule& B) {
  (void)W;
  if (!same_subspace(A.QH, B.QH) || !same_subspace(A.QK, B.QK)) return Mat(B.V.n * A.V.n, 0);
  std::vector<Mat> LA(A.V.n), LB(B.V.n);
  for (int j = 0; j < A.V.n; ++j) LA[j] = A.V.leg(j);
  for (int j = 0; j < B.V.n; ++j) LB[j] = B.V.leg(j);
  Mat M = linear_map_matrix(B.V.n, A.V.n, [&](const Mat& T) { return intertwining_vector(A, B, LA, LB, T); });
  return null_space(M, 1e-8);
}

double intertwining_residual(const WeakHopfAlgebra& W, const RelativeHopfModule& A, const RelativeHopfModule& B,
                             const Mat& T) {
  (void)W;
  std::vector<Mat> LA(A.V.n), LB(B.V.n);
  for (int j = 0; j < A.V.n; ++j) LA[j] = A.V.leg(j);
  for (int j = 0; j < B.V.n; ++j) LB[j] = B.V.leg(j);
  return max_abs(intertwining_vector(A, B, LA, LB, T));
}

Isomorphism find_isomorphism(const WeakHopfAlgebra& W, const RelativeHopfModule& A, const RelativeHopfModule& B,
                             double tol) {
  Isomorphism iso;
  if (A.V.n != B.V.n) return iso;
  const int n = A.V.n;
  if (n == 0) {
    iso.found = true;
    return iso;
  }
  Mat H = relative_hom(W, A, B);
  iso.hom_dim = static_cast<int>(H.cols());
  if (H.cols() == 0) return iso;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Vec c(H.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = cd(nd(rng), nd(rng));
  Vec t = H * c;
  Mat T = Eigen::Map<Mat>(t.data(), n, n);
  Mat RA = herm_power(A.V.inner, 0.5), RAi = herm_power(A.V.inner, -0.5);
  Mat RB = herm_power(B.V.inner, 0.5), RBi = herm_power(B.V.inner, -0.5);
  Mat Tw = RB * T * RAi;
  Eigen::JacobiSVD<Mat> svd(Tw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  iso.conditioning = s(0) > 0 ? s(s.size() - 1) / s(0) : 0.0;
  if (iso.conditioning < 1e-8) return iso;
  iso.U = RBi * (svd.matrixU() * svd.matrixV().adjoint()) * RA;
  iso.intertwining = intertwining_residual(W, A, B, iso.U);
  iso.unitarity = max_abs(iso.U.adjoint() * B.V.inner * iso.U - A.V.inner);
  iso.found = iso.intertwining < 1e3 * tol && iso.unitarity < 1e3 * tol;
  return iso;
}

}  // namespace qg
