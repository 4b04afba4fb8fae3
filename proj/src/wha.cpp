#include "qg/wha.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

namespace qg {

// Declared in dual.hpp; used for the biconnectedness flag.
bool dual_is_connected(const WeakHopfAlgebra& W);

WeakHopfAlgebra::WeakHopfAlgebra(MultiMatrix alg, Mat delta_, Vec eps_, Mat S_, Mat star_, std::string name_)
    : B(std::move(alg)), delta(std::move(delta_)), eps(std::move(eps_)), S(std::move(S_)), star(std::move(star_)),
      name(std::move(name_)) {
  const int D = B.dim();
  if (delta.rows() != D * D || delta.cols() != D || eps.size() != D || S.rows() != D || S.cols() != D ||
      star.rows() != D || star.cols() != D)
    throw AlgebraError("structure tensors have inconsistent shapes");
}

Mat WeakHopfAlgebra::coproduct(const Vec& b) const {
  const int D = B.dim();
  Vec v = delta * b;
  Mat X(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) X(i, j) = v(i * D + j);
  return X;
}

Mat WeakHopfAlgebra::mul2(const Mat& X, const Mat& Y) const {
  const int D = B.dim();
  Mat Z = Mat::Zero(D, D);
  std::vector<std::pair<int, int>> nx, ny;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      if (X(i, j) != cd(0)) nx.emplace_back(i, j);
      if (Y(i, j) != cd(0)) ny.emplace_back(i, j);
    }
  for (auto [i, j] : nx)
    for (auto [k, l] : ny) {
      int a = B.prod_index(i, k);
      if (a < 0) continue;
      int b = B.prod_index(j, l);
      if (b < 0) continue;
      Z(a, b) += X(i, j) * Y(k, l);
    }
  return Z;
}

Vec WeakHopfAlgebra::mul3(const Vec& X, const Vec& Y) const {
  const int D = B.dim();
  Vec Z = Vec::Zero(X.size());
  std::vector<int> nx, ny;
  for (int i = 0; i < X.size(); ++i) {
    if (X(i) != cd(0)) nx.push_back(i);
    if (Y(i) != cd(0)) ny.push_back(i);
  }
  for (int p : nx) {
    int i = p / (D * D), j = (p / D) % D, k = p % D;
    for (int q : ny) {
      int a = B.prod_index(i, q / (D * D));
      if (a < 0) continue;
      int b = B.prod_index(j, (q / D) % D);
      if (b < 0) continue;
      int c = B.prod_index(k, q % D);
      if (c < 0) continue;
      Z((a * D + b) * D + c) += X(p) * Y(q);
    }
  }
  return Z;
}

Mat WeakHopfAlgebra::star2(const Mat& X) const { return star * X.conjugate() * star.transpose(); }

Vec WeakHopfAlgebra::eps_t(const Vec& b) const {
  Mat T = mul2(coproduct(unit()), b * unit().transpose());
  return T.transpose() * eps;
}

Vec WeakHopfAlgebra::eps_s(const Vec& b) const {
  Mat T = mul2(unit() * b.transpose(), coproduct(unit()));
  return T * eps;
}

Mat WeakHopfAlgebra::eps_t_mat() const {
  Mat M(dim(), dim());
  for (int i = 0; i < dim(); ++i) M.col(i) = eps_t(B.basis(i));
  return M;
}

Mat WeakHopfAlgebra::eps_s_mat() const {
  Mat M(dim(), dim());
  for (int i = 0; i < dim(); ++i) M.col(i) = eps_s(B.basis(i));
  return M;
}

bool AxiomReport::pass() const { return worst() < tol; }

double AxiomReport::worst() const {
  double w = 0;
  for (auto& [n, r] : residuals) w = std::max(w, r);
  return w;
}

std::string AxiomReport::worst_name() const {
  std::string best;
  double w = -1;
  for (auto& [n, r] : residuals)
    if (r > w) w = r, best = n;
  return best;
}

double AxiomReport::get(const std::string& n) const {
  for (auto& [k, r] : residuals)
    if (k == n) return r;
  throw std::out_of_range("no axiom named " + n);
}

namespace {

// m(id (x) S) applied to a coproduct matrix
Vec m_id_S(const WeakHopfAlgebra& W, const Mat& M) {
  Vec v = Vec::Zero(W.dim());
  for (int j = 0; j < W.dim(); ++j) v += W.B.mul(M.col(j), W.S.col(j));
  return v;
}

Vec m_S_id(const WeakHopfAlgebra& W, const Mat& M) {
  Vec v = Vec::Zero(W.dim());
  for (int i = 0; i < W.dim(); ++i) v += W.B.mul(W.S.col(i), M.row(i).transpose());
  return v;
}

}  // namespace

AxiomReport verify_axioms(const WeakHopfAlgebra& W, double tol) {
  const int D = W.dim();
  const MultiMatrix& B = W.B;
  AxiomReport rep;
  rep.tol = tol;
  const Vec one = W.unit();
  std::vector<Mat> cop(D);
  for (int b = 0; b < D; ++b) cop[b] = W.coproduct(B.basis(b));

  double coassoc = 0, counit = 0, mult = 0, starc = 0, santi = 0, scoanti = 0, s_star = 0;
  double at = 0, as = 0, p2a = 0, p2b = 0, p2c = 0, p2d = 0, star_inv = 0, star_anti = 0;
  Mat deltaT = W.delta.transpose();
  for (int b = 0; b < D; ++b) {
    const Mat& M = cop[b];
    Mat X = W.delta * M;        // (Delta (x) id) Delta(b), rows (i, j)
    Mat Y = M * deltaT;         // (id (x) Delta) Delta(b), cols (j, k)
    // compare entrywise with index ((i D + j) D + k)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) coassoc = std::max(coassoc, std::abs(X(i * D + j, k) - Y(i, j * D + k)));
    counit = std::max({counit, max_abs(M.transpose() * W.eps - B.basis(b)), max_abs(M * W.eps - B.basis(b))});
    starc = std::max(starc, max_abs(W.coproduct(W.st(B.basis(b))) - W.star2(M)));
    scoanti = std::max(scoanti, max_abs(W.coproduct(W.S.col(b)) - W.S * M.transpose() * W.S.transpose()));
    s_star = std::max(s_star, max_abs(W.S * W.st(W.S * W.st(B.basis(b))) - B.basis(b)));
    star_inv = std::max(star_inv, max_abs(W.st(W.st(B.basis(b))) - B.basis(b)));
    at = std::max(at, max_abs(m_id_S(W, M) - W.eps_t(B.basis(b))));
    as = std::max(as, max_abs(m_S_id(W, M) - W.eps_s(B.basis(b))));
    for (int c = 0; c < D; ++c) {
      Vec bc = B.mul(B.basis(b), B.basis(c));
      mult = std::max(mult, max_abs(W.coproduct(bc) - W.mul2(M, cop[c])));
      santi = std::max(santi, max_abs(W.S * bc - B.mul(W.S.col(c), W.S.col(b))));
      star_anti = std::max(star_anti, max_abs(W.st(bc) - B.mul(W.st(B.basis(c)), W.st(B.basis(b)))));
    }
  }
  // Em(x, y) = eps(x y)
  Mat Em(D, D);
  for (int x = 0; x < D; ++x)
    for (int y = 0; y < D; ++y) Em(x, y) = W.counit(B.mul(B.basis(x), B.basis(y)));
  double wc = 0;
  for (int c = 0; c < D; ++c) {
    Mat lhs = Em * cop[c] * Em;
    for (int b = 0; b < D; ++b)
      for (int d = 0; d < D; ++d) {
        cd r = W.counit(B.mul(B.mul(B.basis(b), B.basis(c)), B.basis(d)));
        wc = std::max(wc, std::abs(lhs(b, d) - r));
      }
  }
  Mat d1 = W.coproduct(one);
  Vec A1(D * D * D), A2(D * D * D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j)
      for (int k = 0; k < D; ++k) {
        A1((i * D + j) * D + k) = d1(i, j) * one(k);  // Delta(1) (x) 1
        A2((i * D + j) * D + k) = one(i) * d1(j, k);  // 1 (x) Delta(1)
      }
  Mat X1 = W.delta * d1;
  Vec rhs(D * D * D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j)
      for (int k = 0; k < D; ++k) rhs((i * D + j) * D + k) = X1(i * D + j, k);
  double wu = std::max(max_abs(W.mul3(A1, A2) - rhs), max_abs(W.mul3(A2, A1) - rhs));

  Mat Et = W.eps_t_mat(), Es = W.eps_s_mat();
  for (int b = 0; b < D; ++b) {
    const Mat& M = cop[b];
    Vec eb = B.basis(b);
    for (int c = 0; c < D; ++c) {
      // b eps_t(c) = eps(b_1 c) b_2 ;  eps_s(c) b = b_1 eps(c b_2)
      p2a = std::max(p2a, max_abs(B.mul(eb, Et.col(c)) - M.transpose() * Em.col(c)));
      p2c = std::max(p2c, max_abs(B.mul(Es.col(c), eb) - M * Em.row(c).transpose()));
    }
    // b_1 (x) eps_t(b_2) = 1_1 b (x) 1_2 ;  eps_s(b_1) (x) b_2 = 1_1 (x) b 1_2
    p2b = std::max(p2b, max_abs(M * Et.transpose() - W.mul2(d1, eb * one.transpose())));
    p2d = std::max(p2d, max_abs(Es * M - W.mul2(one * eb.transpose(), d1)));
  }
  rep.residuals = {{"coassociativity", coassoc},
                   {"counit", counit},
                   {"multiplicativity", mult},
                   {"star_compatibility", starc},
                   {"involution", std::max(star_inv, star_anti)},
                   {"weak_counit", wc},
                   {"weak_unit", wu},
                   {"antipode_target", at},
                   {"antipode_source", as},
                   {"antipode_anti_algebra", santi},
                   {"antipode_anti_coalgebra", scoanti},
                   {"counital_target_2p", std::max(p2a, p2b)},
                   {"counital_source_2pp", std::max(p2c, p2d)},
                   {"antipode_star_square", s_star}};
  return rep;
}

CounitalMaps counital_maps(const WeakHopfAlgebra& W) {
  CounitalMaps c;
  c.eps_t = W.eps_t_mat();
  c.eps_s = W.eps_s_mat();
  c.idempotent_t = max_abs(c.eps_t * c.eps_t - c.eps_t);
  c.idempotent_s = max_abs(c.eps_s * c.eps_s - c.eps_s);
  c.antipode_intertwining = max_abs(W.S * c.eps_s - c.eps_t * W.S);
  return c;
}

bool is_connected(const WeakHopfAlgebra& W) {
  Mat Bt = orth(W.eps_t_mat());
  std::vector<Vec> z;
  for (int a = 0; a < W.B.num_blocks(); ++a) z.push_back(W.B.central_projection(a));
  return intersect(Bt, orth(hstack(z, W.dim()))).cols() == 1;
}

CounitalSubalgebras counital_subalgebras(const WeakHopfAlgebra& W, bool with_dual) {
  CounitalSubalgebras c;
  c.Bt = orth(W.eps_t_mat());
  c.Bs = orth(W.eps_s_mat());
  for (int i = 0; i < c.Bt.cols(); ++i)
    for (int j = 0; j < c.Bs.cols(); ++j)
      c.commutation_residual = std::max(c.commutation_residual, max_abs(W.B.mul(c.Bt.col(i), c.Bs.col(j)) -
                                                                          W.B.mul(c.Bs.col(j), c.Bt.col(i))));
  c.antipode_gap = subspace_gap(orth(W.S * c.Bt), c.Bs);
  c.connected = is_connected(W);
  c.biconnected = with_dual && c.connected && dual_is_connected(W);
  return c;
}

const CanonicalData& canonical_elements(const WeakHopfAlgebra& W, double tol) {
  auto cached = std::atomic_load(&W.canon_cache);
  if (cached) return *cached;
  if (!is_connected(W)) throw AlgebraError("canonical elements need a connected quantum groupoid");
  auto cd_ = std::make_shared<CanonicalData>();
  CanonicalData& C = *cd_;
  const MultiMatrix& B = W.B;
  Mat Bt = orth(W.eps_t_mat());
  C.tau = markov_trace(B, Bt, static_cast<double>(Bt.cols()), tol);
  IndexElement ie = index_element(B, C.tau.weights, Bt, tol);
  C.H = ie.H;
  C.h_defining_residual = ie.defining_residual;
  C.SH = W.S * C.H;
  C.G = B.mul(C.H, B.inverse(C.SH));
  C.Ginv = B.inverse(C.G);
  Vec HSH = B.mul(C.H, C.SH);
  RVec cw = B.coord_weights(C.tau.weights);
  C.phi = Vec(B.dim());
  for (int i = 0; i < B.dim(); ++i) C.phi(i) = B.trace(B.mul(HSH, B.basis(i)), C.tau.weights);
  for (int b = 0; b < B.dim(); ++b) {
    Vec eb = B.basis(b);
    C.s2_residual = std::max(C.s2_residual, max_abs(W.S * (W.S * eb) - B.mul(B.mul(C.G, eb), C.Ginv)));
  }
  Mat d1 = W.coproduct(B.unit());
  Mat GG = C.G * C.G.transpose();
  Mat dG = W.coproduct(C.G);
  C.grouplike_residual = std::max(max_abs(dG - W.mul2(GG, d1)), max_abs(dG - W.mul2(d1, GG)));
  C.sg_residual = max_abs(W.S * C.G - C.Ginv);
  double scale = std::max(1.0, max_abs(C.G));
  if (C.s2_residual > 1e3 * tol * scale)
    throw AlgebraError("S^2 is not implemented by G = H S(H)^{-1} (residual " + fmt_double(C.s2_residual) + ")");
  std::shared_ptr<const CanonicalData> done = cd_;
  std::atomic_store(&W.canon_cache, done);
  return *std::atomic_load(&W.canon_cache);
}

HaarProjection haar_projection(const WeakHopfAlgebra& W, double tol) {
  const int D = W.dim();
  const MultiMatrix& B = W.B;
  Mat Et = W.eps_t_mat();
  std::vector<Mat> rows;
  for (int x = 0; x < D; ++x) rows.push_back(B.left_mat(B.basis(x)) - B.left_mat(Et.col(x)));
  rows.push_back(W.S - Mat::Identity(D, D));
  Mat Hom = vstack(rows, D);
  rows.push_back(Et);
  Mat M = vstack(rows, D);
  Vec rhs = Vec::Zero(M.rows());
  rhs.tail(D) = B.unit();
  HaarProjection hp;
  Mat N = null_space(vstack({Hom, Et}, D));
  hp.solution_dim = static_cast<int>(N.cols());
  hp.p = M.completeOrthogonalDecomposition().solve(rhs);
  hp.system_residual = max_abs(M * hp.p - rhs);
  hp.projection_residual = std::max(max_abs(B.mul(hp.p, hp.p) - hp.p), max_abs(W.st(hp.p) - hp.p));
  if (hp.system_residual > 1e3 * tol) throw AlgebraError("no Haar projection: system residual " + fmt_double(hp.system_residual));
  if (hp.solution_dim != 0) throw AlgebraError("Haar projection is not unique");
  return hp;
}

double haar_functional_residual(const WeakHopfAlgebra& W, const Vec& phi) {
  const int D = W.dim();
  Mat Et = W.eps_t_mat();
  double r = 0;
  for (int b = 0; b < D; ++b) {
    Mat M = W.coproduct(W.B.basis(b));
    r = std::max(r, max_abs(M * phi - Et * (M * phi)));
  }
  r = std::max(r, max_abs(W.S.transpose() * phi - phi));
  r = std::max(r, max_abs(Et.transpose() * phi - W.eps));
  return r;
}

namespace {

void fill_phi_checks(const WeakHopfAlgebra& W, HaarFunctional& h) {
  const int D = W.dim();
  Mat Et = W.eps_t_mat();
  for (int b = 0; b < D; ++b) {
    Mat M = W.coproduct(W.B.basis(b));
    h.invariance = std::max(h.invariance, max_abs(M * h.phi - Et * (M * h.phi)));
  }
  h.antipode = max_abs(W.S.transpose() * h.phi - h.phi);
  h.counit = max_abs(Et.transpose() * h.phi - W.eps);
  Mat G(D, D);
  for (int x = 0; x < D; ++x)
    for (int y = 0; y < D; ++y) G(x, y) = h.phi.transpose() * W.B.mul(W.st(W.B.basis(x)), W.B.basis(y));
  h.positivity = std::max(0.0, -eigh(G).w.minCoeff());
}

}  // namespace

HaarFunctional haar_functional_solve(const WeakHopfAlgebra& W) {
  const int D = W.dim();
  Mat Et = W.eps_t_mat();
  std::vector<Mat> rows;
  for (int b = 0; b < D; ++b) {
    Mat M = W.coproduct(W.B.basis(b));
    rows.push_back(M - Et * M);
  }
  rows.push_back(W.S.transpose() - Mat::Identity(D, D));
  rows.push_back(Et.transpose());
  Mat A = vstack(rows, D);
  Vec rhs = Vec::Zero(A.rows());
  rhs.tail(D) = W.eps;
  HaarFunctional h;
  h.solution_dim = static_cast<int>(null_space(A).cols());
  h.phi = A.completeOrthogonalDecomposition().solve(rhs);
  fill_phi_checks(W, h);
  return h;
}

HaarFunctional haar_functional(const WeakHopfAlgebra& W, double tol) {
  const CanonicalData& C = canonical_elements(W, tol);
  HaarFunctional h;
  h.phi = C.phi;
  h.tau_weights = C.tau.weights;
  fill_phi_checks(W, h);
  HaarFunctional ind = haar_functional_solve(W);
  h.solution_dim = ind.solution_dim;
  h.independent_gap = max_abs(ind.phi - h.phi);
  double worst = std::max({h.invariance, h.antipode, h.counit});
  if (worst > 1e3 * tol) throw AlgebraError("Haar functional fails its defining relations: " + fmt_double(worst));
  return h;
}

double InvarianceReport::worst() const { return std::max({phi_left, phi_right, tau_left, tau_right}); }

InvarianceReport check_strong_invariance(const WeakHopfAlgebra& W, const Vec* phi_override) {
  const CanonicalData* C = nullptr;
  try {
    C = &canonical_elements(W);
  } catch (const AlgebraError&) {
    if (!phi_override) throw;
  }
  const MultiMatrix& B = W.B;
  const int D = W.dim();
  Vec phi = phi_override ? *phi_override : C->phi;
  InvarianceReport r;
  r.tau_checked = C != nullptr;
  Vec tauv = Vec::Zero(D);
  if (C)
    for (int i = 0; i < D; ++i) tauv(i) = B.trace(B.basis(i), C->tau.weights);
  std::vector<Mat> cop(D);
  for (int b = 0; b < D; ++b) cop[b] = W.coproduct(B.basis(b));
  for (int x = 0; x < D; ++x)
    for (int y = 0; y < D; ++y) {
      Vec ex = B.basis(x), ey = B.basis(y);
      const Mat &Mx = cop[x], &My = cop[y];
      Vec v(D), u(D), w(D), z(D), vt(D), ut(D), wt(D), zt(D);
      for (int j = 0; j < D; ++j) {
        Vec ej = B.basis(j);
        Vec yj = B.mul(ey, ej), jx = B.mul(ej, ex), jy = B.mul(ej, ey), xj = B.mul(ex, ej);
        v(j) = phi.transpose() * yj;
        u(j) = phi.transpose() * jx;
        w(j) = phi.transpose() * jy;
        z(j) = phi.transpose() * xj;
        vt(j) = tauv.transpose() * yj;
        ut(j) = tauv.transpose() * jx;
        wt(j) = tauv.transpose() * jy;
        zt(j) = tauv.transpose() * xj;
      }
      // x_1 phi(y x_2) = S(y_1) phi(y_2 x)
      r.phi_left = std::max(r.phi_left, max_abs(Mx * v - W.S * (My * u)));
      // phi(x_1 y) x_2 = phi(x y_1) S(y_2)
      r.phi_right = std::max(r.phi_right, max_abs(Mx.transpose() * w - W.S * (My.transpose() * z)));
      if (!C) continue;
      // x_1 tau(y x_2) = S(y_1) G tau(y_2 x)
      r.tau_left = std::max(r.tau_left, max_abs(Mx * vt - B.mul(W.S * (My * ut), C->G)));
      // tau(x_1 y) x_2 = tau(x y_1) G^{-1} S(y_2)
      r.tau_right = std::max(r.tau_right, max_abs(Mx.transpose() * wt - B.mul(C->Ginv, W.S * (My.transpose() * zt))));
    }
  return r;
}

std::vector<int> Groupoid::identities() const {
  std::vector<int> ids;
  for (int i = 0; i < size(); ++i)
    if (table(i, i) == i) ids.push_back(i);
  return ids;
}

int Groupoid::inverse(int g) const {
  auto ids = identities();
  auto is_id = [&](int x) { return std::find(ids.begin(), ids.end(), x) != ids.end(); };
  for (int h = 0; h < size(); ++h)
    if (table(g, h) >= 0 && is_id(table(g, h)) && table(h, g) >= 0 && is_id(table(h, g))) return h;
  throw AlgebraError("element without inverse");
}

void Groupoid::validate() const {
  const int n = size();
  if (n == 0 || table.cols() != n) throw AlgebraError("groupoid table must be square and nonempty");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int ab = table(a, b);
      if (ab < -1 || ab >= n) throw AlgebraError("table entry out of range");
      for (int c = 0; c < n; ++c) {
        int bc = table(b, c);
        int l = (ab >= 0) ? table(ab, c) : -1;
        int r = (bc >= 0) ? table(a, bc) : -1;
        bool ldef = ab >= 0 && l >= 0, rdef = bc >= 0 && r >= 0;
        if (ldef != rdef || (ldef && l != r)) throw AlgebraError("multiplication is not associative");
      }
    }
  auto ids = identities();
  if (ids.empty()) throw AlgebraError("no identity arrows");
  for (int g = 0; g < n; ++g) {
    int left = 0, right = 0;
    for (int e : ids) {
      if (table(e, g) >= 0) {
        if (table(e, g) != g) throw AlgebraError("identity arrow acts nontrivially");
        ++left;
      }
      if (table(g, e) >= 0) {
        if (table(g, e) != g) throw AlgebraError("identity arrow acts nontrivially");
        ++right;
      }
    }
    if (left != 1 || right != 1) throw AlgebraError("each arrow needs unique source and target");
    inverse(g);
  }
}

Groupoid cyclic_group(int n) {
  Groupoid G;
  G.table = IMat(n, n);
  for (int i = 0; i < n; ++i) {
    G.names.push_back("g" + std::to_string(i));
    for (int j = 0; j < n; ++j) G.table(i, j) = (i + j) % n;
  }
  return G;
}

Groupoid group_from_permutations(const std::vector<std::vector<int>>& perms) {
  std::map<std::vector<int>, int> idx;
  for (size_t i = 0; i < perms.size(); ++i) idx[perms[i]] = static_cast<int>(i);
  Groupoid G;
  const int n = static_cast<int>(perms.size());
  G.table = IMat(n, n);
  for (int a = 0; a < n; ++a) {
    std::string nm;
    for (int x : perms[a]) nm += std::to_string(x);
    G.names.push_back(nm);
    for (int b = 0; b < n; ++b) {
      // (a b)(x) = a(b(x))
      std::vector<int> c(perms[a].size());
      for (size_t x = 0; x < c.size(); ++x) c[x] = perms[a][perms[b][x]];
      auto it = idx.find(c);
      if (it == idx.end()) throw AlgebraError("permutation set is not closed");
      G.table(a, b) = it->second;
    }
  }
  return G;
}

Groupoid symmetric_group3() {
  // e, (12), (13), (23), (123), (132) acting on {0,1,2}
  return group_from_permutations({{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}});
}

Groupoid pair_groupoid(int k) {
  Groupoid G;
  const int n = k * k;
  G.table = IMat::Constant(n, n, -1);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) G.names.push_back("(" + std::to_string(a) + "," + std::to_string(b) + ")");
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c) G.table(a * k + b, b * k + c) = a * k + c;
  return G;
}

std::vector<int> subgroup_generated(const Groupoid& G, const std::vector<int>& gens) {
  std::set<int> S(gens.begin(), gens.end());
  for (int e : G.identities()) S.insert(e);
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<int> cur(S.begin(), S.end());
    for (int a : cur)
      for (int b : cur) {
        int c = G.table(a, b);
        if (c >= 0 && S.insert(c).second) grew = true;
      }
  }
  return {S.begin(), S.end()};
}

WeakHopfAlgebra transport(const WeakHopfAlgebra& W, const MultiMatrix& alg, const Mat& T, const Mat& Tinv) {
  Mat TT = Eigen::kroneckerProduct(T, T).eval();
  return WeakHopfAlgebra(alg, TT * W.delta * Tinv, Tinv.transpose() * W.eps, T * W.S * Tinv,
                         T * W.star * Tinv.conjugate(), W.name);
}

GroupoidAlgebraData groupoid_algebra(const Groupoid& G) {
  G.validate();
  const int n = G.size();
  StructureConstants sc;
  sc.dim = n;
  sc.L.assign(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (G.table(i, j) >= 0) sc.L[i](G.table(i, j), j) = 1.0;
  sc.star = Mat::Zero(n, n);
  Mat S = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) sc.star(G.inverse(i), i) = 1.0, S(G.inverse(i), i) = 1.0;
  sc.unit = Vec::Zero(n);
  for (int e : G.identities()) sc.unit(e) = 1.0;
  Mat delta = Mat::Zero(n * n, n);
  for (int i = 0; i < n; ++i) delta(i * n + i, i) = 1.0;
  Vec eps = Vec::Ones(n);
  StarRealization R = realize_star_algebra(sc);
  GroupoidAlgebraData out;
  Mat TT = Eigen::kroneckerProduct(R.T, R.T).eval();
  out.W = WeakHopfAlgebra(R.alg, TT * delta * R.Tinv, R.Tinv.transpose() * eps, R.T * S * R.Tinv,
                          R.T * sc.star * R.Tinv.conjugate());
  out.arrow = R.T;
  return out;
}

WeakHopfAlgebra groupoid_function_algebra(const Groupoid& G) {
  G.validate();
  const int n = G.size();
  MultiMatrix B(std::vector<int>(n, 1));
  Mat delta = Mat::Zero(n * n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (G.table(i, j) >= 0) delta(i * n + j, G.table(i, j)) = 1.0;
  Vec eps = Vec::Zero(n);
  for (int e : G.identities()) eps(e) = 1.0;
  Mat S = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) S(G.inverse(i), i) = 1.0;
  return WeakHopfAlgebra(B, delta, eps, S, B.adjoint_star());
}

WeakHopfAlgebra build_example(ExampleKind kind, const Groupoid& data, double tol) {
  WeakHopfAlgebra W;
  switch (kind) {
    case ExampleKind::GroupAlgebra:
      if (data.identities().size() != 1) throw AlgebraError("group presentation has several identities");
      W = groupoid_algebra(data).W;
      W.name = "group_algebra";
      break;
    case ExampleKind::GroupoidAlgebra:
      W = groupoid_algebra(data).W;
      W.name = "groupoid_algebra";
      break;
    case ExampleKind::FunctionAlgebra:
      if (data.identities().size() != 1) throw AlgebraError("group presentation has several identities");
      W = groupoid_function_algebra(data);
      W.name = "function_algebra";
      break;
    case ExampleKind::GroupoidFunctionAlgebra:
      W = groupoid_function_algebra(data);
      W.name = "groupoid_function_algebra";
      break;
  }
  AxiomReport rep = verify_axioms(W, tol);
  if (!rep.pass()) throw AlgebraError("builder produced a structure failing " + rep.worst_name());
  return W;
}

WeakHopfAlgebra direct_sum(const WeakHopfAlgebra& A, const WeakHopfAlgebra& B) {
  std::vector<int> dims = A.B.dims();
  dims.insert(dims.end(), B.B.dims().begin(), B.B.dims().end());
  MultiMatrix C(dims);
  const int da = A.dim(), db = B.dim(), D = da + db;
  Mat delta = Mat::Zero(D * D, D), S = Mat::Zero(D, D), star = Mat::Zero(D, D);
  Vec eps(D);
  eps << A.eps, B.eps;
  S.topLeftCorner(da, da) = A.S;
  S.bottomRightCorner(db, db) = B.S;
  star.topLeftCorner(da, da) = A.star;
  star.bottomRightCorner(db, db) = B.star;
  for (int k = 0; k < da; ++k)
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j) delta(i * D + j, k) = A.delta(i * da + j, k);
  for (int k = 0; k < db; ++k)
    for (int i = 0; i < db; ++i)
      for (int j = 0; j < db; ++j) delta((da + i) * D + da + j, da + k) = B.delta(i * db + j, k);
  return WeakHopfAlgebra(C, delta, eps, S, star, A.name + "+" + B.name);
}

}  // namespace qg
