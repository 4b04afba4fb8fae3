#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qg/tower.hpp"

using namespace qg;

namespace {

double dist(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

Tower c_in_c2(int levels) {
  MultiMatrix C2({1, 1});
  return jones_tower(C2, orth(C2.unit()), levels);
}

Tower diag_in_m2(int levels) {
  MultiMatrix M2({2});
  Mat D = Mat::Zero(4, 2);
  D(0, 0) = 1;
  D(3, 1) = 1;
  return jones_tower(M2, D, levels);
}

// Relations checked directly on the stored projections.
void check_jones_relations(const Tower& T) {
  const MultiMatrix& A = T.top();
  Mat adj = A.adjoint_star();
  int n = static_cast<int>(T.e.size());
  for (int i = 1; i <= n; ++i) {
    const Vec& ei = T.jones(i);
    CHECK(dist(A.mul(ei, ei), ei) < 1e-10);
    CHECK(dist(adj * ei.conjugate(), ei) < 1e-10);
    CHECK(std::abs(T.tau(ei) - T.lambda) < 1e-10);
    for (int j = 1; j <= n; ++j) {
      const Vec& ej = T.jones(j);
      if (std::abs(i - j) == 1) CHECK(dist(A.mul(A.mul(ei, ej), ei), T.lambda * ei) < 1e-10);
      if (std::abs(i - j) >= 2) CHECK(dist(A.mul(ei, ej), A.mul(ej, ei)) < 1e-10);
    }
  }
}

std::vector<int> block_dims(const MultiMatrix& A) { return A.dims(); }

}  // namespace

TEST_CASE("basic-construction towers") {
  SUBCASE("C in C^2") {
    Tower T = c_in_c2(4);
    CHECK(T.lambda == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(block_dims(T.algebras[2]) == std::vector<int>{2});
    CHECK(block_dims(T.algebras[3]) == std::vector<int>{2, 2});
    CHECK(block_dims(T.algebras[4]) == std::vector<int>{4});
    CHECK(T.residuals.worst() < 1e-10);
    check_jones_relations(T);
  }
  SUBCASE("diagonal C^2 in M_2") {
    Tower T = diag_in_m2(4);
    CHECK(T.index() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(block_dims(T.algebras[1]) == std::vector<int>{2});
    CHECK(block_dims(T.algebras[2]) == std::vector<int>{2, 2});
    check_jones_relations(T);
  }
  SUBCASE("disconnected inclusions are refused") {
    MultiMatrix C2({1, 1});
    CHECK_THROWS_AS(jones_tower(C2, Mat::Identity(2, 2), 3), AlgebraError);
  }
}

TEST_CASE("path-model towers") {
  Tower T = path_tower(path_graph(4), 5);
  CHECK(T.index() == doctest::Approx(4 * std::pow(std::cos(std::numbers::pi / 5), 2)).epsilon(1e-9));
  CHECK(T.algebras[5].dim() == 34);
  CHECK(T.residuals.worst() < 1e-10);
  check_jones_relations(T);

  // Generation by the Jones projections, checked against the flag on small towers.
  CHECK(T.jones_generated);
  CHECK(generated_span(T.top(), hstack(T.e, T.top().dim()), true).cols() == T.top().dim());
  Tower D = path_tower(dynkin_d(4), 4);
  CHECK_FALSE(D.jones_generated);
  CHECK(generated_span(D.top(), hstack(D.e, D.top().dim()), true).cols() < D.top().dim());
  CHECK(D.index() == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("multi-step Jones projections") {
  Tower T = path_tower(path_graph(4), 6);
  const MultiMatrix& A = T.top();
  MultiStepData m0 = multi_step_data(T, 0);
  CHECK(dist(m0.f1, T.jones(1)) < 1e-12);
  CHECK(dist(m0.f2, T.jones(2)) < 1e-12);

  MultiStepData m1 = multi_step_data(T, 1);
  double lam2 = T.lambda * T.lambda;
  CHECK(dist(A.mul(m1.f1, m1.f1), m1.f1) < 1e-10);
  CHECK(dist(A.mul(m1.f2, m1.f2), m1.f2) < 1e-10);
  CHECK(std::abs(T.tau(m1.f1) - lam2) < 1e-10);
  CHECK(std::abs(T.tau(m1.f2) - lam2) < 1e-10);
  CHECK(m1.f1_expectation < 1e-10);
  CHECK(m1.f2_expectation < 1e-10);
  CHECK_THROWS_AS(multi_step_data(T, 2), AlgebraError);
}

TEST_CASE("depth") {
  DepthReport a4 = depth_from_graph(path_graph(4));
  CHECK(std::vector<long long>(a4.commutant_dims.begin(), a4.commutant_dims.begin() + 4) ==
        std::vector<long long>{1, 2, 5, 13});
  CHECK(a4.depth == 3);
  DepthReport a3 = depth_from_graph(path_graph(3));
  CHECK(std::vector<long long>(a3.commutant_dims.begin(), a3.commutant_dims.begin() + 3) ==
        std::vector<long long>{1, 2, 4});
  CHECK(a3.depth == 2);
  DepthReport d4 = depth_from_graph(dynkin_d(4));
  CHECK(std::vector<long long>(d4.commutant_dims.begin(), d4.commutant_dims.begin() + 3) ==
        std::vector<long long>{1, 3, 9});
  CHECK(d4.depth == 2);

  for (const RootedGraph& g : {path_graph(3), path_graph(4), path_graph(5), path_graph(7), dynkin_d(4), dynkin_d(6)}) {
    int n = depth_from_graph(g).depth;
    for (int k = 0; k <= 3; ++k) CHECK(depth_from_graph(g, k).depth == reduced_depth_formula(n, k));
  }
  CHECK(reduced_depth_formula(3, 0) == 3);
  CHECK(reduced_depth_formula(3, 1) == 2);
  CHECK(reduced_depth_formula(7, 2) == 3);

  SUBCASE("tower route agrees with the graph route") {
    Tower P = path_tower(path_graph(4), 8);
    DepthReport t = depth_from_tower(P);
    CHECK(t.commutant_dims == std::vector<long long>{1, 2, 5, 13, 34, 89, 233, 610});
    CHECK(t.depth == 3);

    Tower C = c_in_c2(6);
    MultiMatrix C2({1, 1});
    DepthReport tc = depth_from_tower(C);
    DepthReport gc = depth_from_graph(inclusion_graph(inclusion_data(C2, orth(C2.unit()))));
    REQUIRE(tc.commutant_dims.size() >= 3);
    for (size_t j = 0; j < 3; ++j) CHECK(tc.commutant_dims[j] == gc.commutant_dims[j]);
    CHECK(tc.depth == gc.depth);
  }
}

TEST_CASE("quantum groupoid from the A4 tower with k = 1") {
  Tower T = path_tower(path_graph(4), 6);
  Extraction X = extract_wha(T, 1);
  const ExtractionReport& r = X.report;
  CHECK(X.B.dim() == 13);
  CHECK(X.A.dim() == 13);
  CHECK(block_dims(X.B.B) == std::vector<int>{2, 3});
  CHECK(X.axioms.pass());
  CHECK(X.biconnected);
  CHECK(X.dim_Bt == 2);
  CHECK(X.dim_Bs == 2);

  REQUIRE(X.principal_computed);
  CHECK(X.principal_norm_sq == doctest::Approx(4 * std::pow(std::cos(std::numbers::pi / 5), 2)).epsilon(1e-6));
  CHECK(X.principal.crossed_agrees);
  // B*_t subset B* has the index of N subset M_1.
  CHECK(X.norm_sq_counital == doctest::Approx(T.index() * T.index()).epsilon(1e-6));

  CHECK(r.pairing_min_singular > 1e-6);
  CHECK(r.counit_pairing < 1e-9);
  CHECK(r.j_involutive < 1e-9);
  CHECK(r.j_antimultiplicative < 1e-9);
  CHECK(r.dual_product < 1e-9);
  CHECK(r.dual_unit < 1e-9);
  CHECK(r.dual_involution < 1e-9);
  CHECK(r.dual_involution_plain > 1e-3);
  CHECK(r.twist_min_eigenvalue > 0);
  CHECK(r.twist_hermitian < 1e-9);
  CHECK(r.separability_target_source < 1e-9);
  CHECK(r.separability_jones < 1e-9);
  CHECK(r.target_gap < 1e-9);
  CHECK(r.source_gap < 1e-9);
  CHECK(r.center_before == r.center_after);
}

TEST_CASE("quantum groupoids from depth-two inclusions") {
  SUBCASE("A3 with k = 0 gives the group algebra of Z/2") {
    Extraction X = extract_wha(path_tower(path_graph(3), 3), 0);
    CHECK(X.B.dim() == 2);
    CHECK(block_dims(X.B.B) == std::vector<int>{1, 1});
    CHECK(X.axioms.pass());
    CHECK(X.dim_Bt == 1);
    REQUIRE(X.principal_computed);
    CHECK(X.principal_norm_sq == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("A3 with k = 1") {
    Extraction X = extract_wha(path_tower(path_graph(3), 6), 1);
    CHECK(X.B.dim() == 8);
    CHECK(X.axioms.pass());
    CHECK(X.principal_norm_sq == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("C in C^2") {
    Extraction X = extract_wha(c_in_c2(3), 0);
    CHECK(X.B.dim() == 4);
    CHECK(X.axioms.pass());
    CHECK_FALSE(X.biconnected);
    CHECK_FALSE(X.principal_computed);
    CHECK(X.norm_sq_target == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(X.report.j_antimultiplicative < 1e-9);
  }
  SUBCASE("diagonal C^2 in M_2") {
    Extraction X = extract_wha(diag_in_m2(3), 0);
    CHECK(X.B.dim() == 4);
    CHECK(block_dims(X.B.B) == std::vector<int>{2});
    CHECK(X.axioms.pass());
    CHECK_FALSE(X.biconnected);
    CHECK(X.norm_sq_target == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("depth three is refused") {
    CHECK_THROWS_AS(extract_wha(path_tower(path_graph(4), 3), 0), AlgebraError);
  }
  SUBCASE("too few levels") {
    CHECK_THROWS_AS(extract_wha(path_tower(path_graph(3), 5), 1), AlgebraError);
  }
}
