#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qg/coideal.hpp"

using namespace qg;

namespace {

struct S3Fixture {
  GroupoidAlgebraData data = groupoid_algebra(symmetric_group3());
  Groupoid G = symmetric_group3();
  const WeakHopfAlgebra& W() const { return data.W; }
  Vec g(int i) const { return data.arrow.col(i); }
  Mat subgroup(std::vector<int> gens) const {
    std::vector<Vec> v;
    for (int k : subgroup_generated(G, gens)) v.push_back(g(k));
    return orth(hstack(v, 6));
  }
};

// element indices in symmetric_group3(): 0 = e, 1 = (12), 2 = (13), 3 = (23), 4 = (123), 5 = (132)

bool is_positive(const MultiMatrix& B, const Vec& x, double tol = 1e-9) {
  for (int a = 0; a < B.num_blocks(); ++a) {
    Mat b = B.block(x, a);
    if (eigh(0.5 * (b + b.adjoint())).w.minCoeff() < -tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("coideal certification") {
  S3Fixture f;
  CoidealContext ctx(f.W());
  CoidealSubalgebra bt = check_coideal(ctx, ctx.Bt(), Side::Left);
  CHECK(bt.dim() == 1);
  CHECK(bt.residuals.worst() < 1e-12);
  CoidealSubalgebra a3 = check_coideal(ctx, f.subgroup({4}), Side::Left);
  CHECK(a3.dim() == 3);
  CHECK(a3.residuals.dual_action < 1e-12);
  CHECK(a3.connected);
  Mat bad = orth(hstack({f.W().unit(), f.g(1) + f.g(2)}, 6));
  CHECK_THROWS_AS(check_coideal(ctx, bad, Side::Left), AlgebraError);

  auto pg = groupoid_algebra(pair_groupoid(2)).W;
  CHECK(check_coideal(pg, orth(pg.eps_t_mat()), Side::Left).residuals.worst() < 1e-12);
}

TEST_CASE("generated coideals") {
  S3Fixture f;
  CHECK(generated_coideal(f.W(), {}, Side::Left).dim() == 1);
  CoidealSubalgebra c3 = generated_coideal(f.W(), {f.g(4)}, Side::Left);
  CHECK(same_subspace(c3.Q, f.subgroup({4})));
  // The Haar projection has every group element in its first coproduct leg, so it generates everything.
  Vec p = haar_projection(f.W()).p;
  CHECK(generated_coideal(f.W(), {p}, Side::Left).dim() == 6);
}

TEST_CASE("lattice operations") {
  S3Fixture f;
  const WeakHopfAlgebra& W = f.W();
  auto I12 = check_coideal(W, f.subgroup({1}), Side::Left);
  auto I13 = check_coideal(W, f.subgroup({2}), Side::Left);
  auto A3 = check_coideal(W, f.subgroup({4}), Side::Left);
  auto B = check_coideal(W, Mat::Identity(6, 6), Side::Left);
  auto Bt = generated_coideal(W, {}, Side::Left);
  CHECK(same_subspace(meet(W, I12, B).Q, I12.Q));
  CHECK(same_subspace(join(W, I12, Bt).Q, I12.Q));
  CHECK(join(W, I12, I13).dim() == 6);
  CHECK(same_subspace(meet(W, I12, A3).Q, Bt.Q));
  // absorption
  CHECK(same_subspace(join(W, I12, meet(W, I12, A3)).Q, I12.Q));
  CHECK(same_subspace(meet(W, A3, join(W, A3, I12)).Q, A3.Q));
}

TEST_CASE("tilde map") {
  S3Fixture f;
  const WeakHopfAlgebra& W = f.W();
  auto Bt = generated_coideal(W, {}, Side::Left);
  auto t = tilde_map(W, Bt);
  CHECK(t.side == Side::Right);
  CHECK(same_subspace(t.Q, orth(W.eps_s_mat())));
  auto A3 = check_coideal(W, f.subgroup({4}), Side::Left);
  CHECK(same_subspace(tilde_map(W, A3).Q, A3.Q));

  auto pg = groupoid_algebra(pair_groupoid(2)).W;
  auto pbt = check_coideal(pg, orth(pg.eps_t_mat()), Side::Left);
  CHECK(same_subspace(tilde_map(pg, pbt).Q, orth(pg.eps_s_mat())));
}

TEST_CASE("delta map on C[S3]") {
  S3Fixture f;
  CoidealContext ctx(f.W());
  auto Bt = generated_coideal(f.W(), {}, Side::Left);
  auto B = check_coideal(ctx, Mat::Identity(6, 6), Side::Left);
  DeltaResult d0 = delta_map(ctx, Bt);
  CHECK(d0.image.dim() == 6);
  DeltaResult d1 = delta_map(ctx, B);
  CHECK(d1.image.dim() == 1);
  CHECK(same_subspace(d1.image.Q, orth(ctx.dual().Wd.eps_t_mat())));
  DeltaResult da3 = delta_map(ctx, check_coideal(ctx, f.subgroup({4}), Side::Left));
  CHECK(da3.image.dim() == 2);
  CHECK(da3.round_trip < 1e-9);
  DeltaResult d12 = delta_map(ctx, check_coideal(ctx, f.subgroup({1}), Side::Left));
  CHECK(d12.image.dim() == 3);
}

TEST_CASE("canonical data of coideals") {
  S3Fixture f;
  const WeakHopfAlgebra& W = f.W();
  const CanonicalData& C = canonical_elements(W);
  auto Bt = generated_coideal(W, {}, Side::Left);
  CoidealCanonical cb = canonical_data(W, Bt);
  CHECK(max_abs(cb.x - C.H) < 1e-12);
  CHECK(max_abs(cb.e - W.unit()) < 1e-12);
  CHECK(cb.lambda == doctest::Approx(1.0));
  CHECK(max_abs(cb.p - W.unit()) < 1e-12);

  auto B = check_coideal(W, Mat::Identity(6, 6), Side::Left);
  CoidealCanonical cB = canonical_data(W, B);
  CHECK(max_abs(cB.e - haar_projection(W).p) < 1e-12);

  for (std::vector<int> gens : {std::vector<int>{4}, std::vector<int>{1}}) {
    std::vector<int> K = subgroup_generated(f.G, gens);
    auto I = check_coideal(W, f.subgroup(gens), Side::Left);
    CoidealCanonical c = canonical_data(W, I);
    Vec sum = Vec::Zero(6);
    for (int k : K) sum += f.g(k);
    CHECK(max_abs(c.x - sum) < 1e-10);
    CHECK(c.lambda == doctest::Approx(double(K.size())));
    CHECK(max_abs(c.p - sum / double(K.size())) < 1e-10);
    CHECK(max_abs(c.e - c.p) < 1e-10);
    CHECK(c.worst() < 1e-9);
  }
}

TEST_CASE("distinguished projections are antitone") {
  S3Fixture f;
  const WeakHopfAlgebra& W = f.W();
  auto Bt = generated_coideal(W, {}, Side::Left);
  auto A3 = check_coideal(W, f.subgroup({4}), Side::Left);
  auto B = check_coideal(W, Mat::Identity(6, 6), Side::Left);
  Vec e0 = canonical_data(W, Bt).e, e1 = canonical_data(W, A3).e, e2 = canonical_data(W, B).e;
  CHECK(is_positive(W.B, e0 - e1));
  CHECK(is_positive(W.B, e1 - e2));
}

TEST_CASE("conditional expectations onto coideals") {
  S3Fixture f;
  const WeakHopfAlgebra& W = f.W();
  auto B = check_coideal(W, Mat::Identity(6, 6), Side::Left);
  ExpectationReport eB = conditional_expectation_EI(W, B);
  CHECK(max_abs(eB.E - Mat::Identity(6, 6)) < 1e-10);
  auto Bt = generated_coideal(W, {}, Side::Left);
  ExpectationReport et = conditional_expectation_EI(W, Bt);
  for (int g = 0; g < 6; ++g) CHECK(max_abs(et.E * f.g(g) - (g == 0 ? W.unit() : Vec::Zero(6))) < 1e-10);
  auto A3 = check_coideal(W, f.subgroup({4}), Side::Left);
  ExpectationReport ea = conditional_expectation_EI(W, A3);
  CHECK(ea.worst() < 1e-9);
  for (int g : {1, 2, 3}) CHECK(max_abs(ea.E * f.g(g)) < 1e-10);
  for (int g : {0, 4, 5}) CHECK(max_abs(ea.E * f.g(g) - f.g(g)) < 1e-10);
}

TEST_CASE("coideal enumeration") {
  auto z4 = groupoid_algebra(cyclic_group(4)).W;
  CoidealContext c4(z4);
  auto l4 = enumerate_coideals(c4, EnumerationMode::Brute);
  CHECK(l4.size() == 3);

  S3Fixture f;
  CoidealContext ctx(f.W());
  auto l = enumerate_coideals(ctx, EnumerationMode::Brute);
  CHECK(l.size() == 6);
  CHECK(l.front().dim() == 1);
  CHECK(l.back().dim() == 6);
  CHECK(enumerate_coideals(ctx, EnumerationMode::UpToConjugacy).size() == 6);
  CHECK_THROWS_AS(enumerate_coideals(ctx, EnumerationMode::Brute, 4), AlgebraError);
}

TEST_CASE("Galois correspondence on C[S3]") {
  S3Fixture f;
  CoidealContext ctx(f.W());
  GaloisReport r = galois_verify(ctx);
  CHECK_MESSAGE(r.pass(), r.failure);
  CHECK(r.coideals.size() == 6);
  CHECK(r.injective);
  CHECK(r.order_preserving);
  CHECK(r.meets_joins);
  CHECK(r.delta_bijective);
  CHECK(r.delta_order_reversing);
  for (const auto& e : r.entries) {
    CHECK(e.dim_K == 6 * e.dim_I);
    CHECK(e.dim_delta * e.dim_I == 6);
    CHECK(e.generates);
  }
  CHECK(r.entries.front().dim_K == 6);
}
