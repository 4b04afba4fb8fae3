#include "qg/dual.hpp"

#include <algorithm>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

namespace qg {

namespace {

Vec unit_vec(int n, int i) {
  Vec v = Vec::Zero(n);
  v(i) = 1.0;
  return v;
}

Vec kron_vec(const Vec& a, const Vec& b) {
  Vec v(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) v.segment(i * b.size(), b.size()) = a(i) * b;
  return v;
}

}  // namespace

DualData dualize(const WeakHopfAlgebra& W, double tol) {
  const MultiMatrix& B = W.B;
  const int D = W.dim();
  StructureConstants sc;
  sc.dim = D;
  sc.L.assign(D, Mat::Zero(D, D));
  // (e^i e^j)(e_k) = Delta(e_k)(i, j)
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j)
      for (int k = 0; k < D; ++k) sc.L[i](k, j) = W.delta(i * D + j, k);
  // <phi*, b> = conj <phi, S(b)*>
  sc.star = (W.star.conjugate() * W.S).transpose();
  sc.unit = W.eps;
  Mat deltad = Mat::Zero(D * D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      int k = B.prod_index(i, j);
      if (k >= 0) deltad(i * D + j, k) = 1.0;
    }
  Vec epsd = B.unit();
  Mat Sd = W.S.transpose();
  StarRealization R;
  try {
    R = realize_star_algebra(sc, tol);
  } catch (const AlgebraError& e) {
    throw AlgebraError(std::string("dual is not semisimple: ") + e.what());
  }
  DualData out;
  Mat TT = Eigen::kroneckerProduct(R.T, R.T).eval();
  out.Wd = WeakHopfAlgebra(R.alg, TT * deltad * R.Tinv, R.Tinv.transpose() * epsd, R.T * Sd * R.Tinv,
                           R.T * sc.star * R.Tinv.conjugate(), W.name.empty() ? "dual" : W.name + "*");
  out.pairing.P = R.Tinv.transpose();
  Eigen::BDCSVD<Mat> svd(out.pairing.P);
  out.pairing.max_singular = svd.singularValues()(0);
  out.pairing.min_singular = svd.singularValues()(D - 1);
  out.semisimplicity_margin = R.semisimplicity_margin;
  return out;
}

double PairingReport::worst() const { return std::max({product, coproduct, antipode, involution, unit, counit}); }

PairingReport check_pairing(const WeakHopfAlgebra& W, const WeakHopfAlgebra& Wd, const Mat& P) {
  const int D = W.dim();
  PairingReport r;
  std::vector<Vec> dprod(D * D);
  for (int k = 0; k < D; ++k)
    for (int l = 0; l < D; ++l) dprod[k * D + l] = Wd.B.mul(unit_vec(D, k), unit_vec(D, l));
  for (int b = 0; b < D; ++b) {
    Mat lhs = P * W.coproduct(W.B.basis(b)) * P.transpose();
    Vec Pb = P.col(b);
    for (int k = 0; k < D; ++k)
      for (int l = 0; l < D; ++l) r.product = std::max(r.product, std::abs(lhs(k, l) - dprod[k * D + l].dot(Pb.conjugate())));
  }
  for (int k = 0; k < D; ++k) {
    Mat X = P.transpose() * Wd.coproduct(Wd.B.basis(k)) * P;
    for (int b = 0; b < D; ++b)
      for (int c = 0; c < D; ++c) {
        cd rhs = (P.row(k) * W.B.mul(W.B.basis(b), W.B.basis(c)))(0);
        r.coproduct = std::max(r.coproduct, std::abs(X(b, c) - rhs));
      }
  }
  r.antipode = max_abs(Wd.S.transpose() * P - P * W.S);
  for (int k = 0; k < D; ++k)
    for (int b = 0; b < D; ++b) {
      cd lhs = (Wd.st(Wd.B.basis(k)).transpose() * P.col(b))(0);
      cd rhs = std::conj((P.row(k) * W.st(W.S.col(b)))(0));
      r.involution = std::max(r.involution, std::abs(lhs - rhs));
    }
  r.unit = max_abs(P.transpose() * Wd.unit() - W.eps);
  r.counit = max_abs(Wd.eps - P * W.unit());
  Eigen::BDCSVD<Mat> svd(P);
  r.condition = svd.singularValues()(D - 1) / svd.singularValues()(0);
  return r;
}

double isomorphism_residual(const WeakHopfAlgebra& W1, const WeakHopfAlgebra& W2, const Mat& T) {
  const int D = W1.dim();
  if (W2.dim() != D || T.rows() != D || T.cols() != D) return std::numeric_limits<double>::infinity();
  double r = 0;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      Vec ei = W1.B.basis(i), ej = W1.B.basis(j);
      r = std::max(r, max_abs(T * W1.B.mul(ei, ej) - W2.B.mul(T * ei, T * ej)));
    }
  Mat TT = Eigen::kroneckerProduct(T, T).eval();
  r = std::max(r, max_abs(TT * W1.delta - W2.delta * T));
  r = std::max(r, max_abs(T.transpose() * W2.eps - W1.eps));
  r = std::max(r, max_abs(T * W1.S - W2.S * T));
  r = std::max(r, max_abs(T * W1.star - W2.star * T.conjugate()));
  r = std::max(r, max_abs(T * W1.unit() - W2.unit()));
  return r;
}

BidualIsomorphism bidual_isomorphism(const WeakHopfAlgebra& W, double tol) {
  DualData d1 = dualize(W, tol);
  DualData d2 = dualize(d1.Wd, tol);
  BidualIsomorphism out;
  out.Wdd = d2.Wd;
  // <iota(b), phi> = <phi, b>
  out.iso = d2.pairing.P.transpose().partialPivLu().solve(d1.pairing.P);
  out.residual = isomorphism_residual(W, out.Wdd, out.iso);
  return out;
}

bool dual_is_connected(const WeakHopfAlgebra& W) { return is_connected(dualize(W).Wd); }

Mat ActionData::act(const Vec& b) const {
  Mat M = Mat::Zero(target.dim(), target.dim());
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (b(i) != cd(0)) M += b(i) * acts[i];
  return M;
}

double ActionReport::worst() const { return std::max({unital, associative, module_algebra, star, counital}); }

ActionReport check_action(const WeakHopfAlgebra& W, const ActionData& a) {
  const MultiMatrix& B = W.B;
  const MultiMatrix& T = a.target;
  const int D = W.dim(), n = T.dim();
  ActionReport r;
  r.unital = max_abs(a.act(W.unit()) - Mat::Identity(n, n));
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      int k = B.prod_index(i, j);
      Mat lhs = (k >= 0) ? a.acts[k] : Mat::Zero(n, n);
      r.associative = std::max(r.associative, max_abs(lhs - a.acts[i] * a.acts[j]));
    }
  for (int b = 0; b < D; ++b) {
    Mat M = W.coproduct(B.basis(b));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        int xy = T.prod_index(x, y);
        Vec lhs = (xy >= 0) ? Vec(a.acts[b].col(xy)) : Vec::Zero(n);
        Vec rhs = Vec::Zero(n);
        for (int i = 0; i < D; ++i)
          for (int j = 0; j < D; ++j)
            if (std::abs(M(i, j)) > 0) rhs += M(i, j) * T.mul(a.acts[i].col(x), a.acts[j].col(y));
        r.module_algebra = std::max(r.module_algebra, max_abs(lhs - rhs));
      }
    r.star = std::max(r.star, max_abs(a.target_star * a.acts[b].conjugate() -
                                      a.act(W.st(W.S * B.basis(b))) * a.target_star));
    r.counital = std::max(r.counital, max_abs(a.acts[b] * T.unit() - a.act(W.eps_t(B.basis(b))) * T.unit()));
  }
  return r;
}

DualActions dual_actions(const WeakHopfAlgebra& W, const DualData& d) {
  const int D = W.dim();
  const WeakHopfAlgebra& Wd = d.Wd;
  const Mat& P = d.pairing.P;
  DualActions out;
  out.left.target = Wd.B;
  out.left.target_star = Wd.star;
  out.left.acts.assign(D, Mat::Zero(D, D));
  out.right.assign(D, Mat::Zero(D, D));
  out.dual_on_B_left.assign(D, Mat::Zero(D, D));
  out.dual_on_B_right.assign(D, Mat::Zero(D, D));
  for (int a = 0; a < D; ++a)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        // Delta*(e^k)(i, j) pairs leg j with a for the left action, leg i for the right action
        for (int k = 0; k < D; ++k) {
          cd dl = Wd.delta(i * D + j, k);
          if (dl == cd(0)) continue;
          out.left.acts[a](i, k) += dl * P(j, a);
          out.right[a](j, k) += dl * P(i, a);
        }
      }
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int b = 0; b < D; ++b) {
          cd dl = W.delta(i * D + j, b);
          if (dl == cd(0)) continue;
          out.dual_on_B_left[k](i, b) += dl * P(k, j);
          out.dual_on_B_right[k](j, b) += dl * P(k, i);
        }
  return out;
}

Vec CrossedProduct::element(const Vec& x, const Vec& b) const {
  return T * (Qc.adjoint() * kron_vec(x, QI.adjoint() * b));
}

CrossedProduct crossed_product(const WeakHopfAlgebra& W, const ActionData& action, const Mat& QI, double tol) {
  const MultiMatrix& B = W.B;
  const MultiMatrix& A = action.target;
  const int D = W.dim(), dA = A.dim(), dI = static_cast<int>(QI.cols());
  const int N = dA * dI;
  CrossedProduct cp;
  cp.dA = dA;
  cp.dI = dI;
  cp.QI = QI;
  if (N == 0) throw AlgebraError("crossed product of zero-dimensional data");
  if (dist_to_span(QI, B.unit()) > 1e3 * tol) throw AlgebraError("coideal does not contain the unit");

  // Relations (S(z) |> x) (x) b - x (x) z b for z in B_t.
  Mat Bt = orth(W.eps_t_mat());
  std::vector<Vec> rel;
  for (int zi = 0; zi < Bt.cols(); ++zi) {
    Vec z = Bt.col(zi);
    Mat actSz = action.act(W.S * z);
    for (int x = 0; x < dA; ++x) {
      Vec ex = A.basis(x);
      Vec xz = actSz * ex;
      for (int b = 0; b < dI; ++b) {
        Vec zb = QI.adjoint() * B.mul(z, QI.col(b));
        rel.push_back(kron_vec(xz, unit_vec(dI, b)) - kron_vec(ex, zb));
      }
    }
  }
  Mat R = rel.empty() ? Mat(N, 0) : orth(hstack(rel, N));
  cp.Qc = R.cols() == 0 ? Mat(Mat::Identity(N, N)) : null_space(R.adjoint());
  const int nC = static_cast<int>(cp.Qc.cols());
  if (nC == 0) throw AlgebraError("degenerate crossed product quotient");

  // u[j][c] = coordinates of e_j q_c in I; w[b][i][c] = sum_j Delta(q_b)(i, j) u[j][c]
  std::vector<std::vector<Vec>> u(D, std::vector<Vec>(dI));
  for (int j = 0; j < D; ++j)
    for (int c = 0; c < dI; ++c) u[j][c] = QI.adjoint() * B.mul(B.basis(j), QI.col(c));
  std::vector<Mat> cop(dI);
  double coideal_leak = 0;
  for (int b = 0; b < dI; ++b) {
    cop[b] = W.coproduct(QI.col(b));
    for (int i = 0; i < D; ++i) {
      Vec row = cop[b].row(i).transpose();
      coideal_leak = std::max(coideal_leak, max_abs(row - QI * (QI.adjoint() * row)));
    }
  }
  if (coideal_leak > 1e3 * tol) throw AlgebraError("subalgebra is not a left coideal (leak " + fmt_double(coideal_leak) + ")");

  // act_col[i](:, y) = e_i |> e_y
  auto prod_elem = [&](int x, int b, int y, int c) {
    Vec out = Vec::Zero(N);
    for (int i = 0; i < D; ++i) {
      Vec wic = Vec::Zero(dI);
      bool any = false;
      for (int j = 0; j < D; ++j) {
        cd m = cop[b](i, j);
        if (std::abs(m) < 1e-15) continue;
        wic += m * u[j][c];
        any = true;
      }
      if (!any) continue;
      Vec act = action.acts[i].col(y);
      if (act.cwiseAbs().maxCoeff() < 1e-15) continue;
      Vec xa = A.mul(A.basis(x), act);
      out += kron_vec(xa, wic);
    }
    return out;
  };

  // Left multiplication by each basis tensor, reduced to the quotient. The relation space is
  // checked to be a two-sided ideal on seeded probe vectors.
  StructureConstants sc;
  sc.dim = nC;
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> gauss;
  const int nprobe = 3;
  Mat probes(N, nprobe);
  for (int c = 0; c < nprobe; ++c)
    for (int q = 0; q < N; ++q) probes(q, c) = cd(gauss(rng), gauss(rng));
  const int nR = static_cast<int>(R.cols());
  std::vector<Mat> left_probe(nprobe, Mat::Zero(N, nR));
  Mat Y(static_cast<Eigen::Index>(nC) * nC, N);
  for (int p = 0; p < N; ++p) {
    int x = p / dI, b = p % dI;
    Mat Pp(N, N);
    for (int q = 0; q < N; ++q) Pp.col(q) = prod_elem(x, b, q / dI, q % dI);
    Mat red = cp.Qc.adjoint() * Pp * cp.Qc;
    Y.col(p) = Eigen::Map<Vec>(red.data(), red.size());
    if (nR > 0) {
      cp.well_defined = std::max(cp.well_defined, max_abs(cp.Qc.adjoint() * (Pp * R)));
      for (int c = 0; c < nprobe; ++c) left_probe[c] += (Pp * probes.col(c)) * R.row(p);
    }
  }
  for (int c = 0; c < nprobe && nR > 0; ++c)
    cp.well_defined = std::max(cp.well_defined, max_abs(cp.Qc.adjoint() * left_probe[c]) / probes.col(c).norm());
  Mat Lall = Y * cp.Qc;
  sc.L.assign(nC, Mat(nC, nC));
  for (int i = 0; i < nC; ++i) sc.L[i] = Eigen::Map<const Mat>(Lall.col(i).data(), nC, nC);

  // [x (x) b]* = [(b_1^* |> x^*) (x) b_2^*]
  Mat Sp = Mat::Zero(N, N);
  std::vector<Mat> act_star(D);
  std::vector<Vec> jstar(D);
  for (int i = 0; i < D; ++i) {
    act_star[i] = action.act(W.st(B.basis(i)));
    jstar[i] = QI.adjoint() * W.st(B.basis(i));
  }
  for (int p = 0; p < N; ++p) {
    int x = p / dI, b = p % dI;
    Vec xs = action.target_star.col(x);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        cd m = cop[b](i, j);
        if (std::abs(m) < 1e-15) continue;
        Sp.col(p) += std::conj(m) * kron_vec(act_star[i] * xs, jstar[j]);
      }
  }
  sc.star = cp.Qc.adjoint() * Sp * cp.Qc.conjugate();
  sc.unit = cp.Qc.adjoint() * kron_vec(A.unit(), QI.adjoint() * B.unit());
  cp.star_closure = max_abs(sc.star * sc.star.conjugate() - Mat::Identity(nC, nC));

  StarRealization real = realize_star_algebra(sc, tol);
  cp.alg = real.alg;
  cp.T = real.T;
  cp.Tinv = real.Tinv;
  cp.homomorphism = real.homomorphism_residual;
  cp.embed_A = Mat(cp.alg.dim(), dA);
  for (int x = 0; x < dA; ++x) cp.embed_A.col(x) = cp.element(A.basis(x), B.unit());
  cp.embed_I = Mat(cp.alg.dim(), dI);
  for (int b = 0; b < dI; ++b) cp.embed_I.col(b) = cp.T * (cp.Qc.adjoint() * kron_vec(A.unit(), unit_vec(dI, b)));
  return cp;
}

CrossedProduct heisenberg_double(const WeakHopfAlgebra& W, const DualData& d, double tol) {
  DualActions da = dual_actions(W, d);
  return crossed_product(W, da.left, Mat::Identity(W.dim(), W.dim()), tol);
}

SubAlgebra fixed_points(const WeakHopfAlgebra& W, const ActionData& a, const Mat* span) {
  Mat gens = span ? *span : Mat(Mat::Identity(W.dim(), W.dim()));
  std::vector<Mat> rows;
  for (int b = 0; b < gens.cols(); ++b) rows.push_back(a.act(gens.col(b)) - a.act(W.eps_t(gens.col(b))));
  Mat N = null_space(vstack(rows, a.target.dim()));
  return make_subalgebra(a.target, N);
}

CrossedTrace crossed_trace(const WeakHopfAlgebra& W, const ActionData& action, const CrossedProduct& cp,
                           const std::vector<double>& target_weights) {
  const CanonicalData& C = canonical_elements(W);
  const MultiMatrix& A = action.target;
  const int N = cp.dA * cp.dI;
  Vec f(N);
  for (int x = 0; x < cp.dA; ++x)
    for (int b = 0; b < cp.dI; ++b)
      f(x * cp.dI + b) = A.trace(A.basis(x), target_weights) * W.B.trace(W.B.mul(C.H, cp.QI.col(b)), C.tau.weights);
  CrossedTrace out;
  // f must vanish on the relation space, the orthogonal complement of Qc
  Mat Rel = Mat::Identity(N, N) - cp.Qc * cp.Qc.adjoint();
  out.relation_residual = max_abs(Rel.transpose() * f);
  Vec fc = cp.Qc.transpose() * f;
  out.functional = cp.Tinv.transpose() * fc;
  const MultiMatrix& M = cp.alg;
  for (int a = 0; a < M.num_blocks(); ++a) out.weights.push_back(out.functional(M.index(a, 0, 0)).real());
  for (int i = 0; i < M.dim(); ++i)
    for (int j = 0; j < M.dim(); ++j) {
      int ij = M.prod_index(i, j), ji = M.prod_index(j, i);
      cd l = ij >= 0 ? out.functional(ij) : cd(0);
      cd r = ji >= 0 ? out.functional(ji) : cd(0);
      out.trace_residual = std::max(out.trace_residual, std::abs(l - r));
    }
  out.faithful = std::all_of(out.weights.begin(), out.weights.end(), [](double w) { return w > 1e-12; });
  return out;
}

}  // namespace qg
