#include "qg/tower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unsupported/Eigen/KroneckerProduct>

namespace qg {

namespace {

std::vector<int> bfs_distances(const RootedGraph& g) {
  std::vector<int> dist(g.size(), -1);
  std::queue<int> q;
  dist[g.root] = 0;
  q.push(g.root);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w = 0; w < g.size(); ++w)
      if (g.adj(v, w) > 0 && dist[w] < 0) dist[w] = dist[v] + 1, q.push(w);
  }
  return dist;
}

// Number of vertices at distance <= j from the root with distance = j mod 2.
int parity_ball(const std::vector<int>& dist, int j) {
  int n = 0;
  for (int d : dist)
    if (d <= j && (j - d) % 2 == 0) ++n;
  return n;
}

int depth_from_centers(const std::vector<int>& W) {
  for (size_t m = 1; m + 1 < W.size(); ++m)
    if (W[m - 1] == W[m + 1]) return static_cast<int>(m);
  return -1;
}

Vec product(const MultiMatrix& A, Vec acc, const std::vector<const Vec*>& fs) {
  for (const Vec* f : fs) acc = A.mul(acc, *f);
  return acc;
}

}  // namespace

void RootedGraph::validate() const {
  if (adj.rows() != adj.cols() || adj.rows() == 0) throw AlgebraError("graph: adjacency must be square and nonempty");
  if (root < 0 || root >= size()) throw AlgebraError("graph: root out of range");
  if (adj != adj.transpose()) throw AlgebraError("graph: adjacency is not symmetric");
  if (adj.minCoeff() < 0) throw AlgebraError("graph: negative edge multiplicity");
  for (int d : bfs_distances(*this))
    if (d < 0) throw AlgebraError("graph: disconnected");
}

RootedGraph path_graph(int n) {
  if (n < 1) throw AlgebraError("path graph needs at least one vertex");
  RootedGraph g;
  g.adj = IMat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) g.adj(i, i + 1) = g.adj(i + 1, i) = 1;
  for (int i = 0; i < n; ++i) g.names.push_back("v" + std::to_string(i));
  return g;
}

RootedGraph dynkin_d(int n) {
  if (n < 4) throw AlgebraError("D_n needs n >= 4");
  RootedGraph g = path_graph(n - 1);
  g.adj.conservativeResize(n, n);
  g.adj.row(n - 1).setZero();
  g.adj.col(n - 1).setZero();
  g.adj(n - 3, n - 1) = g.adj(n - 1, n - 3) = 1;
  g.names.push_back("v" + std::to_string(n - 1));
  return g;
}

RootedGraph inclusion_graph(const BratteliDiagram& d) {
  const int r = static_cast<int>(d.matrix.rows()), c = static_cast<int>(d.matrix.cols());
  if (r != 1) throw AlgebraError("inclusion graph needs a factor as the smaller algebra");
  RootedGraph g;
  g.adj = IMat::Zero(r + c, r + c);
  g.adj.block(0, r, r, c) = d.matrix;
  g.adj.block(r, 0, c, r) = d.matrix.transpose();
  for (int i = 0; i < r; ++i) g.names.push_back(i < static_cast<int>(d.lower.size()) ? d.lower[i] : "l" + std::to_string(i));
  for (int j = 0; j < c; ++j) g.names.push_back(j < static_cast<int>(d.upper.size()) ? d.upper[j] : "u" + std::to_string(j));
  g.validate();
  return g;
}

double TowerResiduals::worst() const { return std::max({jones, commutation, projection, markov, expectation}); }

Mat Tower::level(int j) const { return orth(inclusions.at(static_cast<size_t>(j))); }

Mat Tower::relative_commutant(int i, int j) const {
  if (i < -1 || j < i || j + 1 > levels()) throw AlgebraError("relative commutant indices out of range");
  const MultiMatrix& T = top();
  if (path_model) {
    if (i == -1) return level(j + 1);
    if (!jones_generated)
      throw AlgebraError("relative commutants M_i' cap M_j of a path model need a graph whose levels are generated by "
                         "the Jones projections");
    std::vector<Vec> gens;
    for (int t = i + 2; t <= j; ++t) gens.push_back(jones(t));
    if (gens.empty()) return orth(T.unit());
    return generated_span(T, hstack(gens, T.dim()), true);
  }
  Mat L = level(j + 1);
  const Mat& G = inclusions[static_cast<size_t>(i + 1)];
  std::vector<Mat> rows;
  for (int g = 0; g < G.cols(); ++g) {
    Mat C(T.dim(), L.cols());
    for (int l = 0; l < L.cols(); ++l) C.col(l) = T.mul(G.col(g), L.col(l)) - T.mul(L.col(l), G.col(g));
    rows.push_back(C);
  }
  return orth(L * null_space(vstack(rows, L.cols())));
}

TowerResiduals tower_residuals(const Tower& T) {
  TowerResiduals r;
  const MultiMatrix& A = T.top();
  const int ne = static_cast<int>(T.e.size());
  for (int i = 1; i <= ne; ++i) {
    const Vec& ei = T.jones(i);
    r.projection = std::max({r.projection, max_abs(A.mul(ei, ei) - ei), max_abs(A.adj(ei) - ei)});
    for (int j = 1; j <= ne; ++j) {
      const Vec& ej = T.jones(j);
      if (std::abs(i - j) == 1)
        r.jones = std::max(r.jones, max_abs(A.mul(A.mul(ei, ej), ei) - T.lambda * ei));
      else if (std::abs(i - j) >= 2)
        r.commutation = std::max(r.commutation, max_abs(A.mul(ei, ej) - A.mul(ej, ei)));
    }
    // tau(w e_i) = lambda tau(w) for w in level i
    const Mat& W = T.inclusions[static_cast<size_t>(i)];
    for (int c = 0; c < W.cols(); ++c)
      r.markov = std::max(r.markov, std::abs(T.tau(A.mul(W.col(c), ei)) - T.lambda * T.tau(W.col(c))));
    Mat E = conditional_expectation(A, T.weights, T.level(i - 1));
    for (int c = 0; c < W.cols(); ++c) {
      Vec x = W.col(c);
      r.expectation = std::max(r.expectation, max_abs(A.mul(A.mul(ei, x), ei) - A.mul(E * x, ei)));
    }
  }
  return r;
}

Tower jones_tower(const MultiMatrix& A1, const Mat& QS, int levels, double tol) {
  if (levels < 1) throw AlgebraError("a tower needs at least one level above the base");
  Tower T;
  Realization R0 = realize_subalgebra(A1, QS, tol);
  MarkovTrace mt = markov_trace(A1, QS, 1.0, tol);
  T.algebras = {R0.alg, A1};
  T.inclusions = {R0.embed, Mat::Identity(A1.dim(), A1.dim())};
  T.weights = mt.weights;
  T.lambda = 1.0 / mt.index;
  for (int s = 1; s < levels; ++s) {
    const MultiMatrix& cur = T.algebras[static_cast<size_t>(s)];
    BasicConstruction bc = basic_construction(cur, orth(T.inclusions[static_cast<size_t>(s - 1)]), T.weights, tol);
    if (std::abs(bc.lambda - T.lambda) > 1e-8)
      throw AlgebraError("Markov extension changed the index at level " + std::to_string(s + 1));
    for (auto& inc : T.inclusions) inc = bc.embed * inc;
    for (auto& e : T.e) e = bc.embed * e;
    T.algebras.push_back(bc.A2);
    T.inclusions.push_back(Mat::Identity(bc.A2.dim(), bc.A2.dim()));
    T.e.push_back(bc.e);
    T.weights = bc.weights2;
  }
  T.jones_generated = false;
  T.residuals = tower_residuals(T);
  if (T.residuals.worst() > 1e3 * tol)
    throw AlgebraError("tower invariants fail (worst residual " + fmt_double(T.residuals.worst()) + ")");
  return T;
}

Tower path_tower(const RootedGraph& g, int levels, double tol) {
  g.validate();
  if (levels < 1) throw AlgebraError("a tower needs at least one level above the base");
  if (g.adj.maxCoeff() > 1) throw AlgebraError("path towers need a graph without multiple edges");
  const int nv = g.size();
  Eigen::SelfAdjointEigenSolver<RMat> es(g.adj.cast<double>());
  const double beta = es.eigenvalues()(nv - 1);
  RVec mu = es.eigenvectors().col(nv - 1).cwiseAbs();
  if (mu.minCoeff() <= 0) throw AlgebraError("Perron vector is not strictly positive");

  using Path = std::vector<int>;
  std::vector<Path> paths{{g.root}};
  for (int s = 0; s < levels; ++s) {
    std::vector<Path> next;
    for (const Path& p : paths)
      for (int w = 0; w < nv; ++w)
        if (g.adj(p.back(), w)) {
          next.push_back(p);
          next.back().push_back(w);
        }
    paths.swap(next);
  }

  // Paths of length j grouped by end vertex; idx maps a path to (block, row).
  struct Level {
    MultiMatrix alg;
    std::vector<std::vector<Path>> blocks;
    std::map<Path, std::pair<int, int>> idx;
  };
  auto make_level = [&](int j) {
    std::map<int, std::vector<Path>> by_end;
    for (const Path& p : paths) {
      Path q(p.begin(), p.begin() + j + 1);
      auto& v = by_end[q.back()];
      if (std::find(v.begin(), v.end(), q) == v.end()) v.push_back(q);
    }
    Level L;
    std::vector<int> dims;
    for (auto& [v, ps] : by_end) {
      std::sort(ps.begin(), ps.end());
      for (size_t r = 0; r < ps.size(); ++r) L.idx[ps[r]] = {static_cast<int>(L.blocks.size()), static_cast<int>(r)};
      L.blocks.push_back(ps);
      dims.push_back(static_cast<int>(ps.size()));
    }
    L.alg = MultiMatrix(dims);
    return L;
  };

  Tower T;
  T.path_model = true;
  T.graph = g;
  Level top = make_level(levels);
  const MultiMatrix& A = top.alg;
  for (int j = 0; j <= levels; ++j) {
    Level L = make_level(j);
    Mat inc = Mat::Zero(A.dim(), L.alg.dim());
    for (const Path& P : paths) {
      auto [bP, rP] = top.idx.at(P);
      Path pre(P.begin(), P.begin() + j + 1);
      auto [bj, r] = L.idx.at(pre);
      for (size_t c = 0; c < L.blocks[bj].size(); ++c) {
        Path Q = L.blocks[bj][c];
        Q.insert(Q.end(), P.begin() + j + 1, P.end());
        int rQ = top.idx.at(Q).second;
        inc(A.index(bP, rP, rQ), L.alg.index(bj, r, static_cast<int>(c))) = 1.0;
      }
    }
    T.algebras.push_back(L.alg);
    T.inclusions.push_back(inc);
  }
  for (int i = 1; i < levels; ++i) {
    Vec e = Vec::Zero(A.dim());
    for (const Path& P : paths) {
      if (P[i - 1] != P[i + 1]) continue;
      auto [bP, rP] = top.idx.at(P);
      for (int w = 0; w < nv; ++w) {
        if (!g.adj(P[i - 1], w)) continue;
        Path Q = P;
        Q[i] = w;
        int rQ = top.idx.at(Q).second;
        e(A.index(bP, rP, rQ)) = std::sqrt(mu(P[i]) * mu(w)) / (beta * mu(P[i - 1]));
      }
    }
    T.e.push_back(e);
  }
  for (const auto& ps : top.blocks)
    T.weights.push_back(mu(ps.front().back()) / (std::pow(beta, levels) * mu(g.root)));
  T.lambda = 1.0 / (beta * beta);
  // The Jones projections generate every level exactly when the graph is a path rooted at an end.
  T.jones_generated = true;
  for (int v = 0; v < nv; ++v) {
    int deg = static_cast<int>(g.adj.row(v).sum());
    if (deg > 2 || (v == g.root && deg > 1)) T.jones_generated = false;
  }
  T.residuals = tower_residuals(T);
  if (T.residuals.worst() > 1e3 * tol)
    throw AlgebraError("path tower invariants fail (worst residual " + fmt_double(T.residuals.worst()) + ")");
  return T;
}

MultiStepData multi_step_data(const Tower& T, int k, double tol) {
  if (k < 0) throw AlgebraError("k must be nonnegative");
  if (T.levels() < 3 * k + 3) throw AlgebraError("multi-step projections need at least 3k + 3 levels");
  const MultiMatrix& A = T.top();
  MultiStepData m;
  m.k = k;
  const double scale = std::pow(T.lambda, -0.5 * k * (k + 1));
  std::vector<const Vec*> p1, p2;
  for (int j = 0; j <= k; ++j) {
    for (int i = k + 1 + j; i >= j + 1; --i) p1.push_back(&T.jones(i));
    for (int i = 2 * k + 2 + j; i >= k + 2 + j; --i) p2.push_back(&T.jones(i));
  }
  m.f1 = product(A, scale * A.unit(), p1);
  m.f2 = product(A, scale * A.unit(), p2);
  auto proj = [&](const Vec& f) { return std::max(max_abs(A.mul(f, f) - f), max_abs(A.adj(f) - f)); };
  m.f1_projection = proj(m.f1);
  m.f2_projection = proj(m.f2);
  const double lk = std::pow(T.lambda, k + 1);
  m.tau_f1 = std::abs(T.tau(m.f1) - lk);
  m.tau_f2 = std::abs(T.tau(m.f2) - lk);
  auto expectation = [&](const Vec& f, int lower, int upper) {
    Mat E = conditional_expectation(A, T.weights, T.level(lower));
    const Mat& X = T.inclusions[static_cast<size_t>(upper)];
    double r = 0;
    for (int c = 0; c < X.cols(); ++c)
      r = std::max(r, max_abs(A.mul(A.mul(f, X.col(c)), f) - A.mul(E * X.col(c), f)));
    return r;
  };
  m.f1_expectation = expectation(m.f1, 0, k + 1);
  m.f2_expectation = expectation(m.f2, k + 1, 2 * k + 2);
  if (std::max(m.f1_projection, m.f2_projection) > 1e3 * tol)
    throw AlgebraError("multi-step Jones projection residual " + fmt_double(std::max(m.f1_projection, m.f2_projection)));
  return m;
}

DepthReport depth_from_graph(const RootedGraph& g, int k) {
  g.validate();
  if (k < 0) throw AlgebraError("k must be nonnegative");
  std::vector<int> dist = bfs_distances(g);
  for (int v = 0; v < g.size(); ++v)
    for (int w = 0; w < g.size(); ++w)
      if (g.adj(v, w) && (dist[v] + dist[w]) % 2 == 0) throw AlgebraError("graph is not bipartite");
  const int step = k + 1;
  const int maxd = *std::max_element(dist.begin(), dist.end());
  DepthReport r;
  r.k = k;
  // Centers stabilize once the sample passes the diameter; two more samples settle the depth.
  const int samples = maxd / step + 3;
  for (int m = 0; m <= samples; ++m) r.center_dims.push_back(parity_ball(dist, m * step));
  r.depth = depth_from_centers(r.center_dims);

  const int n = g.size();
  std::vector<long long> v(n, 0), nv(n);
  v[g.root] = 1;
  int len = 0;
  for (int j = 1; j + 1 < static_cast<int>(r.center_dims.size()); ++j) {
    while (len < 2 * j * step) {
      for (int a = 0; a < n; ++a) {
        long long s = 0;
        for (int b = 0; b < n; ++b) {
          long long t;
          if (__builtin_mul_overflow(static_cast<long long>(g.adj(a, b)), v[b], &t) || __builtin_add_overflow(s, t, &s))
            throw AlgebraError("walk count overflow");
        }
        nv[a] = s;
      }
      v.swap(nv);
      ++len;
    }
    r.commutant_dims.push_back(v[g.root]);
  }
  return r;
}

DepthReport depth_from_tower(const Tower& T, int k) {
  if (k < 0) throw AlgebraError("k must be nonnegative");
  const int step = k + 1;
  DepthReport r;
  r.k = k;
  r.center_dims.push_back(T.algebras[0].num_blocks());
  for (int j = 1; j * step <= T.levels(); ++j) {
    if (T.path_model) {
      // level j * step is N' cap M_{j step - 1} itself
      const MultiMatrix& L = T.algebras[static_cast<size_t>(j * step)];
      r.commutant_dims.push_back(L.dim());
      r.center_dims.push_back(L.num_blocks());
      continue;
    }
    Mat C = T.relative_commutant(-1, j * step - 1);
    r.commutant_dims.push_back(C.cols());
    r.center_dims.push_back(static_cast<int>(center_of(T.top(), C).cols()));
  }
  r.depth = depth_from_centers(r.center_dims);
  return r;
}

int reduced_depth_formula(int n, int k) {
  if (n < 1 || k < 0) throw AlgebraError("depth formula needs n >= 1 and k >= 0");
  int d = (n - 1 + k) / (k + 1);
  return std::max(d, 1) + 1;
}

Extraction extract_wha(const Tower& T, int k, double tol) {
  Extraction X;
  X.k = k;
  ExtractionReport& rep = X.report;
  rep.multi = multi_step_data(T, k, tol);
  const MultiMatrix& top = T.top();
  const int D = top.dim();
  const std::vector<double>& w = T.weights;
  const Vec& f1 = rep.multi.f1;
  const Vec& f2 = rep.multi.f2;

  rep.center_before = static_cast<int>(center_of(top, T.relative_commutant(-1, k)).cols());
  rep.center_after = static_cast<int>(center_of(top, T.relative_commutant(-1, 3 * k + 2)).cols());
  const int center_base = T.algebras[0].num_blocks();
  const int center_mid = static_cast<int>(center_of(top, T.relative_commutant(-1, 2 * k + 1)).cols());
  if (rep.center_before != rep.center_after && center_base != center_mid)
    throw AlgebraError("depth-two precondition fails: dim Z(N' cap M_k) = " + std::to_string(rep.center_before) +
                       ", dim Z(N' cap M_{3k+2}) = " + std::to_string(rep.center_after));

  const Mat QA = T.relative_commutant(-1, 2 * k + 1);
  const Mat QB = T.relative_commutant(k, 3 * k + 2);
  const Mat QBt = T.relative_commutant(k, 2 * k + 1);
  const Mat QBs = T.relative_commutant(2 * k + 1, 3 * k + 2);
  const Mat QI = T.relative_commutant(k, 2 * k + 2);
  const int dA = static_cast<int>(QA.cols()), d = static_cast<int>(QB.cols());
  if (dA != d) throw AlgebraError("dim A = " + std::to_string(dA) + " differs from dim B = " + std::to_string(d));

  const Vec H = index_element(top, w, QBt, tol).H;
  const Vec Hinv = top.inverse(H);
  const double lk = std::pow(T.lambda, k + 1);
  auto tau = [&](const Vec& x) { return top.trace(x, w); };

  // Pairing <a_i, b_j> = lambda^{-2(k+1)} tau(a_i f2 f1 H b_j) on the orthonormal bases.
  const Vec f2f1H = top.mul(top.mul(f2, f1), H);
  std::vector<Vec> Y(d);
  for (int j = 0; j < d; ++j) Y[j] = top.mul(f2f1H, QB.col(j));
  Mat Pq(dA, d);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < d; ++j) Pq(i, j) = tau(top.mul(QA.col(i), Y[j])) / (lk * lk);
  Vec eps_q(d);
  const Vec f2H = top.mul(f2, H);
  for (int j = 0; j < d; ++j) eps_q(j) = tau(top.mul(f2H, QB.col(j))) / lk;
  Vec one_a = QA.adjoint() * top.unit();
  rep.counit_pairing = max_abs(eps_q - Pq.transpose() * one_a);
  Eigen::JacobiSVD<Mat> psvd(Pq);
  rep.pairing_min_singular = psvd.singularValues()(d - 1);
  rep.pairing_max_singular = psvd.singularValues()(0);
  if (!(rep.pairing_min_singular > tol * rep.pairing_max_singular)) throw AlgebraError("pairing is degenerate");
  const Mat Pinv = Pq.inverse();

  // j through the trace form: c x f2 = (y')^* f2 for every x in A, with y' f2 = b^* x^* f2.
  const Mat EA = conditional_expectation(top, w, QA);
  Mat Msys(static_cast<Eigen::Index>(D) * dA, d);
  for (int i = 0; i < dA; ++i) {
    Vec xf2 = top.mul(QA.col(i), f2);
    for (int c = 0; c < d; ++c) Msys.block(static_cast<Eigen::Index>(i) * D, c, D, 1) = top.mul(QB.col(c), xf2);
  }
  Eigen::ColPivHouseholderQR<Mat> msolve(Msys);
  auto jmap = [&](const Vec& b) {
    Vec R(static_cast<Eigen::Index>(D) * dA);
    Vec bs = top.adj(b);
    for (int i = 0; i < dA; ++i) {
      Vec yp = (EA * top.mul(top.mul(bs, top.adj(QA.col(i))), f2)) / lk;
      R.segment(static_cast<Eigen::Index>(i) * D, D) = top.mul(top.adj(yp), f2);
    }
    Vec c = msolve.solve(R);
    rep.j_solve = std::max(rep.j_solve, max_abs(Msys * c - R));
    return c;
  };
  Mat Jq(d, d), AdH(d, d);
  for (int c = 0; c < d; ++c) {
    Jq.col(c) = jmap(QB.col(c));
    AdH.col(c) = QB.adjoint() * top.mul(top.mul(H, QB.col(c)), Hinv);
  }
  rep.j_involutive = max_abs(Jq * Jq - Mat::Identity(d, d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Vec lhs = QB * (Jq * (QB.adjoint() * top.mul(QB.col(a), QB.col(b))));
      Vec rhs = top.mul(QB * Jq.col(b), QB * Jq.col(a));
      rep.j_antimultiplicative = std::max(rep.j_antimultiplicative, max_abs(lhs - rhs));
    }
  const Mat Sq = Jq * AdH;

  // Delta(b_j) from <a a', b> = <a (x) a', Delta(b)>.
  std::vector<Vec> aa(static_cast<size_t>(dA) * dA);
  for (int i = 0; i < dA; ++i)
    for (int l = 0; l < dA; ++l) aa[static_cast<size_t>(i) * dA + l] = top.mul(QA.col(i), QA.col(l));
  Mat delta_q(static_cast<Eigen::Index>(d) * d, d);
  for (int j = 0; j < d; ++j) {
    Mat Mr(dA, dA);
    for (int i = 0; i < dA; ++i)
      for (int l = 0; l < dA; ++l) Mr(i, l) = tau(top.mul(aa[static_cast<size_t>(i) * dA + l], Y[j])) / (lk * lk);
    Mat C = Pinv * Mr * Pinv.transpose();
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) delta_q(static_cast<Eigen::Index>(p) * d + q, j) = C(p, q);
  }

  // Move to block coordinates of a realization of B.
  Realization RB = realize_subalgebra(top, QB, tol);
  const MultiMatrix& Bm = RB.alg;
  const Mat Tb = RB.restrict * QB;
  const Mat Tbi = QB.adjoint() * RB.embed;
  Mat Tbb = Eigen::kroneckerProduct(Tb, Tb).eval();
  Mat delta = Tbb * delta_q * Tbi;
  Vec eps = Tbi.transpose() * eps_q;
  Mat S = Tb * Sq * Tbi;
  Vec Hb = RB.restrict * H;
  Vec SH = S * Hb;
  Vec SHi = Bm.inverse(SH);
  Mat star(d, d);
  for (int i = 0; i < d; ++i) star.col(i) = Bm.mul(Bm.mul(SHi, Bm.adj(Bm.basis(i))), SH);
  X.B = WeakHopfAlgebra(Bm, delta, eps, S, star, "extracted k=" + std::to_string(k));
  X.axioms = verify_axioms(X.B, tol);
  if (!X.axioms.pass())
    throw AlgebraError("extracted structure fails " + X.axioms.worst_name() + " (" + fmt_double(X.axioms.worst()) + ")");

  // The dual algebra A and the pairing in block coordinates.
  Realization RA = realize_subalgebra(top, QA, tol);
  X.A = RA.alg;
  const Mat Tai = QA.adjoint() * RA.embed;
  X.pairing.P = Tai.transpose() * Pq * Tbi;
  X.pairing.min_singular = rep.pairing_min_singular;
  X.pairing.max_singular = rep.pairing_max_singular;
  DualData dd = dualize(X.B, tol);
  const WeakHopfAlgebra& Wd = dd.Wd;
  const Mat Phi = dd.pairing.P.transpose().inverse() * X.pairing.P.transpose();
  const MultiMatrix& Am = X.A;
  rep.dual_unit = max_abs(Phi * Am.unit() - Wd.unit());
  // psi(a) = Phi^{-1}(Phi(a)^*) against a -> g^{-1} a^dagger g with g > 0 solved blockwise.
  const Mat Psi = Phi.inverse() * Wd.star * Phi.conjugate();
  {
    std::vector<Mat> rows;
    for (int i = 0; i < Am.dim(); ++i) rows.push_back(Am.right_mat(Psi.col(i)) - Am.left_mat(Am.adj(Am.basis(i))));
    const Mat Ng = null_space(vstack(rows, Am.dim()));
    Vec g = Vec::Zero(Am.dim());
    bool unique = true;
    for (int a = 0; a < Am.num_blocks(); ++a) {
      const int o = Am.offset(a), len = Am.dims()[a] * Am.dims()[a];
      Mat part = Mat::Zero(Am.dim(), Ng.cols());
      part.middleRows(o, len) = Ng.middleRows(o, len);
      Mat v = orth(part);
      if (v.cols() != 1) {
        unique = false;
        break;
      }
      cd t = Am.block_trace(v.col(0), a);
      g += v.col(0) * (std::conj(t) / std::abs(t)) * static_cast<double>(Am.dims()[a]) / std::abs(t);
    }
    if (unique) {
      X.involution_twist = g;
      HermEig eg = eigh(Am.full(g));
      rep.twist_min_eigenvalue = eg.w.minCoeff();
      rep.twist_hermitian = max_abs(Am.adj(g) - g);
      const Vec gi = Am.inverse(g);
      for (int i = 0; i < Am.dim(); ++i)
        rep.dual_involution = std::max(
            rep.dual_involution, max_abs(Psi.col(i) - Am.mul(Am.mul(gi, Am.adj(Am.basis(i))), g)));
    } else {
      rep.dual_involution = std::numeric_limits<double>::infinity();
    }
  }
  for (int i = 0; i < Am.dim(); ++i) {
    Vec ei = Am.basis(i);
    rep.dual_involution_plain = std::max(rep.dual_involution_plain, max_abs(Phi * Am.adj(ei) - Wd.st(Phi * ei)));
    for (int l = 0; l < Am.dim(); ++l) {
      Vec el = Am.basis(l);
      rep.dual_product = std::max(rep.dual_product, max_abs(Phi * Am.mul(ei, el) - Wd.B.mul(Phi * ei, Phi * el)));
    }
  }

  // Separability-element formulas for Delta on the generators.
  auto S_top = [&](const Vec& x) -> Vec { return QB * (Sq * (QB.adjoint() * x)); };
  auto coeff = [&](const Vec& x) -> Vec { return QB.adjoint() * x; };
  auto reshape = [&](const Vec& v) {
    Mat M(d, d);
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) M(p, q) = v(static_cast<Eigen::Index>(p) * d + q);
    return M;
  };
  auto fBt = decompose_matrix_units(top, QBt, tol);
  for (int a = 0; a < QBt.cols(); ++a)
    for (int b = 0; b < QBs.cols(); ++b) {
      const Vec z = QBt.col(a), y = QBs.col(b);
      Mat lhs = Mat::Zero(d, d);
      for (const auto& F : fBt)
        for (int r = 0; r < F.n; ++r)
          for (int s = 0; s < F.n; ++s)
            lhs += (1.0 / F.n) * coeff(top.mul(z, S_top(F.at(r, s)))) * coeff(top.mul(F.at(s, r), y)).transpose();
      Mat rhs = reshape(delta_q * coeff(top.mul(y, z)));
      rep.separability_target_source = std::max(rep.separability_target_source, max_abs(lhs - rhs));
    }
  {
    auto fI = decompose_matrix_units(top, QI, tol);
    Mat target = reshape(delta_q * coeff(T.jones(2 * k + 2)));
    Mat weighted = Mat::Zero(d, d), symmetric = Mat::Zero(d, d);
    for (const auto& F : fI) {
      Mat c(F.n, F.n);
      for (int r = 0; r < F.n; ++r)
        for (int s = 0; s < F.n; ++s) c(r, s) = F.at(r, s).dot(Hinv) / F.at(s, s).squaredNorm();
      c /= c.trace();
      Vec q = Vec::Zero(D);
      for (int r = 0; r < F.n; ++r)
        for (int s = 0; s < F.n; ++s) q += c(r, s) * F.at(r, s);
      Vec qs = F.sum_diag() / static_cast<double>(F.n);
      for (int i = 0; i < F.n; ++i)
        for (int j = 0; j < F.n; ++j) {
          Vec left = coeff(S_top(F.at(i, j)));
          weighted += left * coeff(top.mul(F.at(j, i), q)).transpose();
          symmetric += left * coeff(top.mul(F.at(j, i), qs)).transpose();
        }
    }
    rep.separability_jones = max_abs(weighted - target);
    rep.separability_jones_symmetric = max_abs(symmetric - target);
  }

  // Counital subalgebras against the tower copies.
  CounitalSubalgebras cs = counital_subalgebras(X.B);
  X.biconnected = cs.biconnected;
  rep.target_gap = subspace_gap(cs.Bt, orth(RB.restrict * QBt));
  rep.source_gap = subspace_gap(cs.Bs, orth(RB.restrict * QBs));
  X.dim_Bt = static_cast<int>(QBt.cols());
  X.dim_Bs = static_cast<int>(QBs.cols());

  X.I = orth(RB.restrict * QI);
  X.norm_sq_target = inclusion_data(Bm, cs.Bt, tol).norm_sq();
  X.norm_sq_counital = inclusion_data(Wd.B, orth(Wd.eps_t_mat()), tol).norm_sq();
  if (!X.biconnected) return X;

  // Principal graph of I' = G^{1/2} I G^{-1/2}, a left coideal *-subalgebra for the involution above.
  CoidealContext ctx(X.B, tol);
  const Vec& G = canonical_elements(X.B, tol).G;
  Vec Gp = Bm.power(G, 0.5), Gm = Bm.power(G, -0.5);
  Mat Ip(d, X.I.cols());
  for (int c = 0; c < X.I.cols(); ++c) Ip.col(c) = Bm.mul(Bm.mul(Gp, X.I.col(c)), Gm);
  X.I_prime = orth(Ip);
  CoidealSubalgebra K = check_coideal(ctx, X.I_prime, Side::Left);
  X.principal = principal_graph(ctx, K, true);
  X.principal_norm_sq = X.principal.norm_sq;
  X.principal_computed = true;
  return X;
}

}  // namespace qg
