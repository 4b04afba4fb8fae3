#include "qg/coideal.hpp"

#include <algorithm>
#include <cmath>

namespace qg {

namespace {

double leak(const Mat& Q, const Mat& X) {
  if (X.cols() == 0) return 0;
  return max_abs(X - Q * (Q.adjoint() * X));
}

// Closure of a span under products, the designated involution, the unit and coproduct legs.
Mat coideal_closure(const WeakHopfAlgebra& W, const Mat& start, Side side) {
  const MultiMatrix& B = W.B;
  const int D = W.dim();
  Mat Q = orth(start);
  while (true) {
    std::vector<Vec> v;
    v.push_back(W.unit());
    for (int i = 0; i < Q.cols(); ++i) {
      Vec q = Q.col(i);
      v.push_back(q);
      v.push_back(W.st(q));
      Mat M = W.coproduct(q);
      for (int k = 0; k < D; ++k) v.push_back(side == Side::Left ? Vec(M.row(k).transpose()) : Vec(M.col(k)));
      for (int j = 0; j < Q.cols(); ++j) v.push_back(B.mul(q, Q.col(j)));
    }
    Mat Qn = orth(hstack(v, D));
    if (Qn.cols() == Q.cols()) return Qn;
    Q = Qn;
  }
}

Vec support_projection(const MultiMatrix& B, const Vec& x, double tol) {
  std::vector<Mat> bl;
  double scale = 0;
  for (int a = 0; a < B.num_blocks(); ++a) scale = std::max(scale, spectral_norm(B.block(x, a)));
  for (int a = 0; a < B.num_blocks(); ++a) {
    Mat X = B.block(x, a);
    HermEig e = eigh(0.5 * (X + X.adjoint()));
    Mat P = Mat::Zero(X.rows(), X.cols());
    for (int i = 0; i < e.w.size(); ++i)
      if (e.w(i) > tol * std::max(1.0, scale)) P += e.V.col(i) * e.V.col(i).adjoint();
    bl.push_back(P);
  }
  return B.from_blocks(bl);
}

Vec trace_vector(const MultiMatrix& B, const std::vector<double>& w) {
  Vec t(B.dim());
  for (int i = 0; i < B.dim(); ++i) t(i) = B.trace(B.basis(i), w);
  return t;
}

cd ev(const Vec& f, const Vec& x) { return (f.transpose() * x)(0); }

}  // namespace

double CoidealResiduals::worst() const { return std::max({unit, closure, star, coaction, dual_action, counital}); }

CoidealContext::CoidealContext(WeakHopfAlgebra W, double tol) : W_(std::move(W)), tol_(tol) {
  dual_ = dualize(W_, tol_);
  acts_ = dual_actions(W_, dual_);
  Bt_ = orth(W_.eps_t_mat());
  Bs_ = orth(W_.eps_s_mat());
}

const CrossedProduct& CoidealContext::heisenberg() const {
  if (!heis_) heis_ = heisenberg_double(W_, dual_, tol_);
  return *heis_;
}

CoidealResiduals coideal_residuals(const WeakHopfAlgebra& W, const Mat& Q, Side side,
                                   const std::vector<Mat>* dual_action) {
  const MultiMatrix& B = W.B;
  CoidealResiduals r;
  r.unit = dist_to_span(Q, W.unit());
  double worst_co = -1;
  for (int i = 0; i < Q.cols(); ++i) {
    Vec q = Q.col(i);
    r.star = std::max(r.star, dist_to_span(Q, W.st(q)));
    for (int j = 0; j < Q.cols(); ++j) r.closure = std::max(r.closure, dist_to_span(Q, B.mul(q, Q.col(j))));
    Mat M = W.coproduct(q);
    double c = side == Side::Left ? leak(Q, M.transpose()) : leak(Q, M);
    if (c > worst_co) worst_co = c, r.witness = i;
  }
  r.coaction = std::max(0.0, worst_co);
  if (dual_action)
    for (const Mat& A : *dual_action) r.dual_action = std::max(r.dual_action, leak(Q, A * Q));
  Mat C = orth(side == Side::Left ? W.eps_t_mat() : W.eps_s_mat());
  r.counital = leak(Q, C);
  return r;
}

bool coideal_connected(const WeakHopfAlgebra& W, const Mat& Q, Side side) {
  Mat Z = center_of(W.B, Q);
  Mat other = orth(side == Side::Left ? W.eps_s_mat() : W.eps_t_mat());
  return intersect(Z, other).cols() == 1;
}

namespace {

CoidealSubalgebra certify(const WeakHopfAlgebra& W, const Mat& span, Side side, double tol,
                          const std::vector<Mat>* dual_action) {
  CoidealSubalgebra c;
  c.Q = orth(span);
  c.side = side;
  c.residuals = coideal_residuals(W, c.Q, side, dual_action);
  const double thr = 1e3 * tol;
  const CoidealResiduals& r = c.residuals;
  std::string what;
  if (r.unit > thr) what = "unit not contained";
  else if (r.closure > thr) what = "not closed under multiplication";
  else if (r.star > thr) what = "not closed under the involution";
  else if (r.coaction > thr) what = "coproduct leaves B (x) I (witness basis element " + std::to_string(r.witness) + ")";
  else if (r.dual_action > thr) what = "not invariant under the dual action";
  else if (r.counital > thr) what = "does not contain the counital subalgebra";
  if (!what.empty()) throw AlgebraError("coideal check failed: " + what);
  c.connected = coideal_connected(W, c.Q, side);
  return c;
}

}  // namespace

CoidealSubalgebra check_coideal(const CoidealContext& ctx, const Mat& span, Side side) {
  const auto& acts = side == Side::Left ? ctx.actions().dual_on_B_right : ctx.actions().dual_on_B_left;
  return certify(ctx.W(), span, side, ctx.tol(), &acts);
}

CoidealSubalgebra check_coideal(const WeakHopfAlgebra& W, const Mat& span, Side side, double tol) {
  return certify(W, span, side, tol, nullptr);
}

CoidealSubalgebra generated_coideal(const WeakHopfAlgebra& W, const std::vector<Vec>& gens, Side side, double tol) {
  Mat C = orth(side == Side::Left ? W.eps_t_mat() : W.eps_s_mat());
  std::vector<Vec> start(gens);
  for (const Vec& g : gens) start.push_back(W.st(g));
  for (int i = 0; i < C.cols(); ++i) start.push_back(C.col(i));
  start.push_back(W.unit());
  return check_coideal(W, coideal_closure(W, hstack(start, W.dim()), side), side, tol);
}

CoidealSubalgebra meet(const WeakHopfAlgebra& W, const CoidealSubalgebra& a, const CoidealSubalgebra& b, double tol) {
  if (a.side != b.side) throw AlgebraError("meet of coideals of different sides");
  return check_coideal(W, intersect(a.Q, b.Q), a.side, tol);
}

CoidealSubalgebra join(const WeakHopfAlgebra& W, const CoidealSubalgebra& a, const CoidealSubalgebra& b, double tol) {
  if (a.side != b.side) throw AlgebraError("join of coideals of different sides");
  std::vector<Vec> g;
  for (int i = 0; i < a.Q.cols(); ++i) g.push_back(a.Q.col(i));
  for (int i = 0; i < b.Q.cols(); ++i) g.push_back(b.Q.col(i));
  return generated_coideal(W, g, a.side, tol);
}

CoidealSubalgebra tilde_map(const WeakHopfAlgebra& W, const CoidealSubalgebra& I, double tol) {
  const CanonicalData& C = canonical_elements(W, tol);
  Vec Gm = W.B.power(C.G, -0.5), Gp = W.B.power(C.G, 0.5);
  std::vector<Vec> v;
  for (int i = 0; i < I.Q.cols(); ++i) v.push_back(W.B.mul(W.B.mul(Gm, W.S * I.Q.col(i)), Gp));
  return check_coideal(W, hstack(v, W.dim()), I.side == Side::Left ? Side::Right : Side::Left, tol);
}

DeltaResult delta_map(const CoidealContext& ctx, const CoidealSubalgebra& I) {
  if (I.side != Side::Left) throw AlgebraError("delta map is defined on left coideals");
  const WeakHopfAlgebra& W = ctx.W();
  const CrossedProduct& h = ctx.heisenberg();
  const MultiMatrix& M = h.alg;
  CoidealSubalgebra J = tilde_map(W, I, ctx.tol());
  std::vector<Mat> rows;
  for (int j = 0; j < J.Q.cols(); ++j) {
    Vec ij = h.embed_I * J.Q.col(j);
    rows.push_back((M.left_mat(ij) - M.right_mat(ij)) * h.embed_A);
  }
  Mat N = null_space(vstack(rows, static_cast<int>(h.embed_A.cols())));
  DeltaResult out;
  out.image = check_coideal(ctx.dual().Wd, N, Side::Left, ctx.tol());
  std::vector<Mat> back;
  for (int i = 0; i < N.cols(); ++i) {
    Vec a = h.embed_A * N.col(i);
    back.push_back((M.left_mat(a) - M.right_mat(a)) * h.embed_I);
  }
  Mat R = null_space(vstack(back, W.dim()));
  out.round_trip = subspace_gap(R, J.Q);
  return out;
}

double CoidealCanonical::worst() const {
  return std::max({x_defining, lambda_scalar, projection, coproduct_formula, antipode_formula, haar_property, support,
                   target_unit, expectation_scalar, zeta_idempotent});
}

CoidealCanonical canonical_data(const WeakHopfAlgebra& W, const CoidealSubalgebra& I, double tol) {
  if (I.side != Side::Left) throw AlgebraError("canonical data is defined for left coideals");
  if (!coideal_connected(W, I.Q, I.side)) throw AlgebraError("coideal is not connected");
  const MultiMatrix& B = W.B;
  const CanonicalData& C = canonical_elements(W, tol);
  const Mat& Q = I.Q;
  const int n = static_cast<int>(Q.cols());
  Vec tv = trace_vector(B, C.tau.weights);
  CoidealCanonical out;

  Mat Gram(n, n);
  Vec eq(n);
  for (int k = 0; k < n; ++k) {
    eq(k) = W.counit(Q.col(k));
    for (int l = 0; l < n; ++l) Gram(k, l) = ev(tv, B.mul(Q.col(k), Q.col(l)));
  }
  Vec c = Gram.transpose().partialPivLu().solve(eq);
  out.x = Q * c;
  for (int l = 0; l < n; ++l) out.x_defining = std::max(out.x_defining, std::abs(ev(tv, B.mul(out.x, Q.col(l))) - eq(l)));
  out.e = support_projection(B, out.x, 1e-8);

  Vec Hinv = B.inverse(C.H);
  Vec v = W.eps_s(B.mul(Hinv, out.x));
  Vec one = W.unit();
  cd lam = one.dot(v) / one.squaredNorm();
  out.lambda = lam.real();
  out.lambda_scalar = std::max(max_abs(v - lam * one), std::abs(lam.imag()));
  if (out.lambda_scalar > 1e3 * tol || !(out.lambda > 0))
    throw AlgebraError("eps_s(H^-1 x_I) is not a positive scalar (deviation " + fmt_double(out.lambda_scalar) + ")");
  Vec Hmh = B.power(C.H, -0.5), Hh = B.power(C.H, 0.5);
  out.p = B.mul(B.mul(Hmh, out.x), Hmh) / out.lambda;
  out.projection = std::max(max_abs(B.mul(out.p, out.p) - out.p), max_abs(W.st(out.p) - out.p));
  if (out.projection > 1e3 * tol) throw AlgebraError("p_I is not a projection (residual " + fmt_double(out.projection) + ")");

  Realization R = realize_subalgebra(B, Q, tol);
  Mat Dx = Mat::Zero(W.dim(), W.dim());
  for (const MatrixUnitFamily& f : R.fams)
    for (int r = 0; r < f.n; ++r)
      for (int s = 0; s < f.n; ++s) {
        cd ts = ev(tv, f.at(s, s));
        Dx += (B.mul(W.S * f.at(s, r), C.G) / ts) * f.at(r, s).transpose();
      }
  out.coproduct_formula = max_abs(W.coproduct(out.x) - Dx);
  out.antipode_formula = max_abs(W.S * out.x - B.mul(out.x, C.Ginv));
  for (int i = 0; i < n; ++i)
    out.haar_property = std::max(out.haar_property, max_abs(B.mul(Q.col(i), out.e) - B.mul(W.eps_t(Q.col(i)), out.e)));
  out.support = std::max(max_abs(B.mul(out.x, out.e) - out.x), max_abs(B.mul(out.e, out.x) - out.x));
  out.target_unit = max_abs(W.eps_t(B.mul(B.mul(Hh, out.p), Hmh)) - one);
  // E_{B_t}(p) = p_(1) tau(H p_(2))
  Vec tH(W.dim());
  for (int j = 0; j < W.dim(); ++j) tH(j) = ev(tv, B.mul(C.H, B.basis(j)));
  out.expectation_scalar = max_abs(W.coproduct(out.p) * tH - one / out.lambda);
  Vec Gp = B.power(C.G, 0.5), Gm = B.power(C.G, -0.5);
  Vec z(W.dim());
  for (int b = 0; b < W.dim(); ++b) z(b) = ev(tv, B.mul(out.x, B.mul(Gp, B.mul(B.basis(b), Gm)))) / out.lambda;
  for (int b = 0; b < W.dim(); ++b) {
    cd rhs = out.lambda * (z.transpose() * W.coproduct(B.basis(b)) * z)(0);
    out.zeta_idempotent = std::max(out.zeta_idempotent, std::abs(z(b) - rhs));
  }
  return out;
}

double ExpectationReport::worst() const {
  return std::max({range, identity_on_I, trace_preserving, bimodular, idempotent, gns_gap});
}

ExpectationReport conditional_expectation_EI(const WeakHopfAlgebra& W, const CoidealSubalgebra& I, double tol) {
  const MultiMatrix& B = W.B;
  const int D = W.dim();
  const CanonicalData& C = canonical_elements(W, tol);
  CoidealCanonical cd_ = canonical_data(W, I, tol);
  Vec tv = trace_vector(B, C.tau.weights);
  Vec tx(D);
  for (int j = 0; j < D; ++j) tx(j) = ev(tv, B.mul(cd_.x, B.basis(j)));
  ExpectationReport r;
  r.E = Mat(D, D);
  for (int y = 0; y < D; ++y) r.E.col(y) = W.coproduct(B.basis(y)) * tx;
  const Mat& Q = I.Q;
  r.range = leak(Q, r.E);
  r.identity_on_I = max_abs(r.E * Q - Q);
  r.trace_preserving = max_abs(r.E.transpose() * tv - tv);
  r.idempotent = max_abs(r.E * r.E - r.E);
  for (int a = 0; a < Q.cols(); ++a)
    for (int y = 0; y < D; ++y) {
      Vec ey = B.basis(y);
      r.bimodular = std::max(r.bimodular, max_abs(r.E * B.mul(Q.col(a), ey) - B.mul(Q.col(a), r.E.col(y))));
      r.bimodular = std::max(r.bimodular, max_abs(r.E * B.mul(ey, Q.col(a)) - B.mul(r.E.col(y), Q.col(a))));
    }
  r.gns_gap = max_abs(r.E - conditional_expectation(B, C.tau.weights, Q));
  return r;
}

bool contained(const Mat& Q1, const Mat& Q2, double tol) { return Q1.cols() == 0 || leak(Q2, Q1) < tol; }

bool same_subspace(const Mat& Q1, const Mat& Q2, double tol) {
  return Q1.cols() == Q2.cols() && contained(Q1, Q2, tol);
}

namespace {

// Unitary u = sum c_a p_a over minimal projections of a commutative B_s with u I1 u* = I2.
bool source_conjugate(const WeakHopfAlgebra& W, const Mat& Bs, const Mat& Q1, const Mat& Q2, double tol) {
  const MultiMatrix& B = W.B;
  Realization R = realize_subalgebra(B, Bs, tol);
  for (const auto& f : R.fams)
    if (f.n != 1) return false;
  std::vector<Vec> p;
  for (const auto& f : R.fams) p.push_back(f.at(0, 0));
  const int m = static_cast<int>(p.size());
  Mat Perp = Mat::Identity(W.dim(), W.dim()) - Q2 * Q2.adjoint();
  // unknowns d_ab, equations Perp * sum d_ab p_a x p_b = 0 and d_aa = 1
  std::vector<Mat> blocks;
  for (int i = 0; i < Q1.cols(); ++i) {
    Mat A(W.dim(), m * m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) A.col(a * m + b) = Perp * B.mul(B.mul(p[a], Q1.col(i)), p[b]);
    blocks.push_back(A);
  }
  Mat diag = Mat::Zero(m, m * m);
  for (int a = 0; a < m; ++a) diag(a, a * m + a) = 1.0;
  blocks.push_back(diag);
  Mat A = vstack(blocks, m * m);
  Vec rhs = Vec::Zero(A.rows());
  rhs.tail(m).setOnes();
  Vec d = A.completeOrthogonalDecomposition().solve(rhs);
  if (max_abs(A * d - rhs) > 1e-6) return false;
  std::vector<cd> c(m);
  for (int a = 0; a < m; ++a) {
    cd v = d(a * m);
    if (std::abs(v) < 1e-6) return false;
    c[a] = v / std::abs(v);
  }
  Vec u = Vec::Zero(W.dim());
  for (int a = 0; a < m; ++a) u += c[a] * p[a];
  std::vector<Vec> img;
  for (int i = 0; i < Q1.cols(); ++i) img.push_back(B.mul(B.mul(u, Q1.col(i)), W.st(u)));
  return same_subspace(orth(hstack(img, W.dim())), Q2);
}

}  // namespace

std::vector<CoidealSubalgebra> enumerate_coideals(const CoidealContext& ctx, EnumerationMode mode, int max_dim) {
  const WeakHopfAlgebra& W = ctx.W();
  if (W.dim() > max_dim) throw AlgebraError("dimension " + std::to_string(W.dim()) + " exceeds enumeration bound");
  const MultiMatrix& Bd = ctx.dual().Wd.B;
  std::vector<CoidealSubalgebra> out;
  auto add = [&](const CoidealSubalgebra& c) {
    for (const auto& o : out)
      if (same_subspace(o.Q, c.Q)) return false;
    out.push_back(c);
    return true;
  };
  add(generated_coideal(W, {}, Side::Left, ctx.tol()));
  add(check_coideal(ctx, Mat::Identity(W.dim(), W.dim()), Side::Left));
  // minimal invariant pieces: images of minimal projections of B* under the dual action
  for (int a = 0; a < Bd.num_blocks(); ++a)
    for (int r = 0; r < Bd.dims()[a]; ++r) {
      Vec f = Bd.basis(Bd.index(a, r, r));
      Mat act = Mat::Zero(W.dim(), W.dim());
      for (int k = 0; k < W.dim(); ++k)
        if (f(k) != cd(0)) act += f(k) * ctx.actions().dual_on_B_right[k];
      Mat img = orth(act);
      std::vector<Vec> g;
      for (int i = 0; i < img.cols(); ++i) g.push_back(img.col(i));
      add(generated_coideal(W, g, Side::Left, ctx.tol()));
    }
  bool grew = true;
  while (grew) {
    grew = false;
    const size_t n = out.size();
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        if (contained(out[i].Q, out[j].Q) || contained(out[j].Q, out[i].Q)) continue;
        if (add(join(W, out[i], out[j], ctx.tol()))) grew = true;
      }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.dim() < b.dim(); });
  if (mode == EnumerationMode::UpToConjugacy) {
    std::vector<CoidealSubalgebra> reps;
    for (const auto& c : out) {
      bool dup = false;
      for (const auto& r : reps)
        if (r.dim() == c.dim() && source_conjugate(W, ctx.Bs(), r.Q, c.Q, ctx.tol())) dup = true;
      if (!dup) reps.push_back(c);
    }
    return reps;
  }
  return out;
}

GaloisReport galois_verify(const CoidealContext& ctx, double tol) {
  const WeakHopfAlgebra& W = ctx.W();
  const CrossedProduct& h = ctx.heisenberg();
  const MultiMatrix& M = h.alg;
  const WeakHopfAlgebra& Wd = ctx.dual().Wd;
  GaloisReport rep;
  rep.coideals = enumerate_coideals(ctx, EnumerationMode::Brute, 64);
  const auto& L = rep.coideals;
  const size_t n = L.size();
  std::vector<Mat> K(n), deltas(n);
  auto fail = [&](const std::string& s) {
    if (rep.failure.empty()) rep.failure = s;
  };
  for (size_t i = 0; i < n; ++i) {
    std::vector<Vec> prods;
    for (int x = 0; x < h.embed_A.cols(); ++x)
      for (int b = 0; b < L[i].Q.cols(); ++b) prods.push_back(M.mul(h.embed_A.col(x), h.embed_I * L[i].Q.col(b)));
    K[i] = orth(hstack(prods, M.dim()));
  }
  rep.injective = true;
  rep.order_preserving = true;
  rep.meets_joins = true;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i != j && same_subspace(K[i], K[j])) rep.injective = false;
      if (contained(L[i].Q, L[j].Q) != contained(K[i], K[j])) rep.order_preserving = false;
      if (j <= i) continue;
      CoidealSubalgebra m = meet(W, L[i], L[j], tol), jn = join(W, L[i], L[j], tol);
      for (size_t k = 0; k < n; ++k) {
        if (same_subspace(L[k].Q, m.Q) && !same_subspace(K[k], intersect(K[i], K[j]))) rep.meets_joins = false;
        if (same_subspace(L[k].Q, jn.Q) && !same_subspace(K[k], generated_span(M, hcat({K[i], K[j]}, M.dim()), true)))
          rep.meets_joins = false;
      }
    }
  if (!rep.injective) fail("I -> B* >< I is not injective");
  if (!rep.order_preserving) fail("I -> B* >< I is not order preserving");
  if (!rep.meets_joins) fail("meets or joins are not preserved");

  Mat Bs = ctx.Bs();
  for (size_t i = 0; i < n; ++i) {
    const Mat& Q = L[i].Q;
    GaloisEntry e;
    e.dim_I = static_cast<int>(Q.cols());
    e.dim_K = static_cast<int>(K[i].cols());
    Mat Icopy = orth(h.embed_I * Q);
    Mat ZK = center_of(M, K[i]);
    Mat ZIs = intersect(center_of(W.B, Q), Bs);
    e.literal_center_dim = static_cast<int>(ZK.cols());
    e.expected_center_dim = static_cast<int>(ZIs.cols());
    Mat lhs = intersect(ZK, Icopy);
    Mat rhs = ZIs.cols() ? orth(h.embed_I * ZIs) : Mat(M.dim(), 0);
    e.center_check = lhs.cols() == rhs.cols() ? (lhs.cols() ? subspace_gap(lhs, rhs) : 0.0) : 1.0;
    std::vector<Mat> rows;
    for (int x = 0; x < h.embed_A.cols(); ++x) {
      Vec a = h.embed_A.col(x);
      rows.push_back((M.left_mat(a) - M.right_mat(a)) * h.embed_I * Q);
    }
    Mat N = null_space(vstack(rows, static_cast<int>(Q.cols())));
    Mat comm = N.cols() ? orth(h.embed_I * Q * N) : Mat(M.dim(), 0);
    Mat IBs = intersect(Q, Bs);
    Mat expect = IBs.cols() ? orth(h.embed_I * IBs) : Mat(M.dim(), 0);
    e.commutant_check = comm.cols() == expect.cols() ? (comm.cols() ? subspace_gap(comm, expect) : 0.0) : 1.0;
    if (e.center_check > 1e-8) fail("center identity fails for coideal " + std::to_string(i));
    if (e.commutant_check > 1e-8) fail("relative commutant identity fails for coideal " + std::to_string(i));

    DeltaResult dr = delta_map(ctx, L[i]);
    deltas[i] = dr.image.Q;
    rep.delta_round_trip = std::max(rep.delta_round_trip, dr.round_trip);
    e.dim_delta = dr.image.dim();

    if (L[i].connected) {
      CoidealCanonical cc = canonical_data(W, L[i], tol);
      Vec p = h.embed_I * cc.p;
      Mat dcopy = h.embed_A * deltas[i];
      Mat dp(M.dim(), dcopy.cols());
      for (int k = 0; k < dcopy.cols(); ++k) dp.col(k) = M.mul(dcopy.col(k), p);
      auto solver = dp.completeOrthogonalDecomposition();
      const int dA = Wd.dim();
      Mat E(dA, dA);
      for (int x = 0; x < dA; ++x) {
        Vec y = M.mul(M.mul(p, h.embed_A.col(x)), p);
        Vec coef = solver.solve(y);
        e.basic_construction = std::max(e.basic_construction, max_abs(dp * coef - y));
        E.col(x) = deltas[i] * coef;
      }
      const MultiMatrix& A = Wd.B;
      double props = max_abs(E * A.unit() - A.unit());
      props = std::max(props, max_abs(E * E - E));
      props = std::max(props, leak(deltas[i], E));
      for (int a = 0; a < deltas[i].cols(); ++a)
        for (int x = 0; x < dA; ++x) {
          Vec d = deltas[i].col(a), ex = A.basis(x);
          props = std::max(props, max_abs(E * A.mul(d, ex) - A.mul(d, E.col(x))));
          props = std::max(props, max_abs(E * A.mul(ex, d) - A.mul(E.col(x), d)));
        }
      for (int x = 0; x < dA; ++x) {
        Vec ex = A.basis(x);
        Vec pos = E * A.mul(Wd.st(ex), ex);
        for (int b = 0; b < A.num_blocks(); ++b) {
          Mat blk = A.block(pos, b);
          props = std::max(props, std::max(0.0, -eigh(0.5 * (blk + blk.adjoint())).w.minCoeff()));
        }
      }
      e.expectation_props = props;
      Mat gens = hcat({h.embed_A, Mat(p)}, M.dim());
      e.generates = same_subspace(orth(generated_span(M, gens, true)), K[i]);
      if (e.basic_construction > 1e-8 || props > 1e-8) fail("p_I does not implement E onto delta(I) for coideal " + std::to_string(i));
      if (!e.generates) fail("B* and p_I do not generate B* >< I for coideal " + std::to_string(i));
    }
    rep.entries.push_back(e);
  }
  rep.delta_bijective = true;
  rep.delta_order_reversing = true;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i != j && same_subspace(deltas[i], deltas[j])) rep.delta_bijective = false;
      if (contained(L[i].Q, L[j].Q) != contained(deltas[j], deltas[i])) rep.delta_order_reversing = false;
    }
  if (!rep.delta_bijective) fail("delta is not injective");
  if (!rep.delta_order_reversing) fail("delta is not order reversing");
  if (rep.delta_round_trip > 1e-8) fail("delta round trip mismatch");
  return rep;
}

}  // namespace qg
