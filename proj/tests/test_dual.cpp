#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qg/dual.hpp"

using namespace qg;

namespace {

std::vector<int> sorted_dims(const MultiMatrix& A) {
  std::vector<int> d = A.dims();
  std::sort(d.begin(), d.end());
  return d;
}

// Coordinates in B* of the functional dual to the arrow basis.
Mat dual_basis(const Mat& arrow, const Mat& P) { return (arrow.transpose() * P.transpose()).inverse(); }

}  // namespace

TEST_CASE("duals of small examples") {
  auto z2 = groupoid_algebra(cyclic_group(2));
  DualData d = dualize(z2.W);
  CHECK(sorted_dims(d.Wd.B) == std::vector<int>{1, 1});
  CHECK(verify_axioms(d.Wd).pass());
  CHECK(check_pairing(z2.W, d.Wd, d.pairing.P).worst() < 1e-12);

  DualData ds = dualize(groupoid_algebra(symmetric_group3()).W);
  CHECK(sorted_dims(ds.Wd.B) == std::vector<int>(6, 1));
  CHECK(verify_axioms(ds.Wd).pass());

  DualData dm = dualize(groupoid_algebra(pair_groupoid(2)).W);
  CHECK(sorted_dims(dm.Wd.B) == std::vector<int>(4, 1));
  CHECK(verify_axioms(dm.Wd).pass());
  CHECK(dm.pairing.min_singular > 1e-9 * dm.pairing.max_singular);
}

TEST_CASE("bidual is isomorphic to the original") {
  std::vector<WeakHopfAlgebra> all = {groupoid_algebra(cyclic_group(2)).W, groupoid_algebra(symmetric_group3()).W,
                                      groupoid_algebra(cyclic_group(4)).W, groupoid_algebra(pair_groupoid(2)).W,
                                      groupoid_algebra(pair_groupoid(3)).W, groupoid_function_algebra(symmetric_group3())};
  for (const auto& W : all) CHECK(bidual_isomorphism(W).residual < 1e-9);
}

TEST_CASE("dual action of C[G] on C(G) translates") {
  auto s3 = groupoid_algebra(symmetric_group3());
  DualData d = dualize(s3.W);
  DualActions da = dual_actions(s3.W, d);
  CHECK(check_action(s3.W, da.left).worst() < 1e-10);
  Mat delta_fn = dual_basis(s3.arrow, d.pairing.P);
  Groupoid G = symmetric_group3();
  for (int g = 0; g < 6; ++g)
    for (int h = 0; h < 6; ++h) {
      int hginv = G.table(h, G.inverse(g));
      CHECK(max_abs(da.left.act(s3.arrow.col(g)) * delta_fn.col(h) - delta_fn.col(hginv)) < 1e-10);
    }
  Vec phi = delta_fn.col(3);
  CHECK(max_abs(da.left.act(s3.W.unit()) * phi - phi) < 1e-12);
}

TEST_CASE("dual action on the pair groupoid is counital") {
  auto pg = groupoid_algebra(pair_groupoid(2));
  DualData d = dualize(pg.W);
  DualActions da = dual_actions(pg.W, d);
  ActionReport r = check_action(pg.W, da.left);
  CHECK(r.worst() < 1e-10);
  CHECK(r.counital < 1e-12);
}

TEST_CASE("Heisenberg doubles of cyclic groups are full matrix algebras") {
  for (int n : {2, 3, 4}) {
    auto W = groupoid_algebra(cyclic_group(n)).W;
    CrossedProduct h = heisenberg_double(W, dualize(W));
    CHECK(h.alg.dims() == std::vector<int>{n});
    CHECK(h.homomorphism < 1e-9);
  }
}

TEST_CASE("crossed product by the target subalgebra collapses") {
  auto pg = groupoid_algebra(pair_groupoid(2));
  DualData d = dualize(pg.W);
  DualActions da = dual_actions(pg.W, d);
  Mat Bt = orth(pg.W.eps_t_mat());
  CrossedProduct cp = crossed_product(pg.W, da.left, Bt);
  CHECK(sorted_dims(cp.alg) == sorted_dims(d.Wd.B));
  CHECK(cp.well_defined < 1e-10);
}

TEST_CASE("C(S3) crossed with C[A3] is the basic construction of the A3 fixed points") {
  auto s3 = groupoid_algebra(symmetric_group3());
  DualData d = dualize(s3.W);
  DualActions da = dual_actions(s3.W, d);
  std::vector<int> a3 = subgroup_generated(symmetric_group3(), {4});
  std::vector<Vec> gens;
  for (int g : a3) gens.push_back(s3.arrow.col(g));
  Mat QI = orth(hstack(gens, 6));
  CrossedProduct cp = crossed_product(s3.W, da.left, QI);
  CHECK(cp.alg.dim() == 18);
  SubAlgebra fix = fixed_points(s3.W, da.left, &QI);
  CHECK(fix.dim() == 2);
  // The inclusion C^2 -> C^6 is disconnected; its basic construction End_{C^2}(C^6) is
  // one full matrix block per fibre, and both fibres have three points.
  Realization rf = realize_subalgebra(d.Wd.B, fix.Q);
  BratteliDiagram bd = inclusion_data(d.Wd.B, fix.Q);
  std::vector<int> fibres;
  for (int r = 0; r < bd.matrix.rows(); ++r) fibres.push_back(bd.matrix.row(r).sum());
  std::sort(fibres.begin(), fibres.end());
  CHECK(rf.alg.dim() == 2);
  CHECK(fibres == sorted_dims(cp.alg));
}

TEST_CASE("fixed points") {
  auto s3 = groupoid_algebra(symmetric_group3());
  DualData d = dualize(s3.W);
  DualActions da = dual_actions(s3.W, d);
  CHECK(fixed_points(s3.W, da.left).dim() == 1);
  ActionData trivial = da.left;
  for (int b = 0; b < 6; ++b) trivial.acts[b] = s3.W.counit(s3.W.B.basis(b)) * Mat::Identity(6, 6);
  CHECK(fixed_points(s3.W, trivial).dim() == 6);
}

TEST_CASE("trace on the Heisenberg double of Z/2") {
  auto z2 = groupoid_algebra(cyclic_group(2));
  DualData d = dualize(z2.W);
  DualActions da = dual_actions(z2.W, d);
  CrossedProduct h = heisenberg_double(z2.W, d);
  CrossedTrace t = crossed_trace(z2.W, da.left, h, {0.5, 0.5});
  CHECK(t.trace_residual < 1e-12);
  CHECK(t.relation_residual < 1e-12);
  CHECK(t.faithful);
  CHECK(std::abs(t.functional.dot(h.alg.unit().conjugate()) - 1.0) < 1e-12);
  Mat delta_fn = dual_basis(z2.arrow, d.pairing.P);
  Vec x = h.element(delta_fn.col(0), z2.arrow.col(1));
  CHECK(std::abs((t.functional.transpose() * x)(0)) < 1e-12);
  // unique normalized trace on M2
  REQUIRE(t.weights.size() == 1);
  CHECK(t.weights[0] == doctest::Approx(0.5));
}

TEST_CASE("source copy commutes with the algebra copy in the Heisenberg double") {
  auto pg = groupoid_algebra(pair_groupoid(2));
  DualData d = dualize(pg.W);
  CrossedProduct h = heisenberg_double(pg.W, d);
  Mat Bs = orth(pg.W.eps_s_mat());
  Mat rel = commutant_span(h.alg, h.embed_A);
  for (int i = 0; i < Bs.cols(); ++i) CHECK(dist_to_span(rel, h.element(d.Wd.unit(), Bs.col(i))) < 1e-9);
}
