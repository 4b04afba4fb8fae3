#include <cmath>

#include "doctest.h"
#include "qg/mma.hpp"
#include <unsupported/Eigen/KroneckerProduct>

using namespace qg;

namespace {

Mat cols(const MultiMatrix& A, std::initializer_list<Vec> vs) { return orth(hstack(std::vector<Vec>(vs), A.dim())); }

Vec unit_elem(const MultiMatrix& A, int a, int r, int c) { return A.basis(A.index(a, r, c)); }

}  // namespace

TEST_CASE("construct_algebra shapes") {
  CHECK(construct_algebra({2}).dim() == 4);
  CHECK(construct_algebra({1, 1}).dim() == 2);
  CHECK(construct_algebra({1, 2}).dim() == 5);
  CHECK_THROWS_AS(construct_algebra({}), AlgebraError);
  MultiMatrix A({1, 2});
  Vec u = A.unit();
  CHECK(max_abs(A.mul(u, u) - u) < 1e-15);
  CHECK(A.trace(u, {1.0, 1.0}).real() == doctest::Approx(3.0));
}

TEST_CASE("adjoint is an involutive anti-homomorphism with C* norm") {
  MultiMatrix A({1, 2, 3});
  Vec x = Vec::Random(A.dim()), y = Vec::Random(A.dim());
  CHECK(max_abs(A.adj(A.adj(x)) - x) < 1e-15);
  CHECK(max_abs(A.adj(A.mul(x, y)) - A.mul(A.adj(y), A.adj(x))) < 1e-12);
  double nx = spectral_norm(A.full(x));
  CHECK(spectral_norm(A.full(A.mul(A.adj(x), x))) == doctest::Approx(nx * nx).epsilon(1e-10));
}

TEST_CASE("matrix units: diagonal and full M2") {
  MultiMatrix M2({2});
  auto diag = decompose_matrix_units(M2, cols(M2, {unit_elem(M2, 0, 0, 0), unit_elem(M2, 0, 1, 1)}));
  REQUIRE(diag.size() == 2);
  CHECK(diag[0].n == 1);
  CHECK(diag[1].n == 1);
  Mat full = Mat::Identity(4, 4);
  auto fams = decompose_matrix_units(M2, full);
  REQUIRE(fams.size() == 1);
  CHECK(fams[0].n == 2);
  CHECK(matrix_unit_residual(M2, fams, M2.unit()) < 1e-12);
  // Standard e_ij up to a phase on the off-diagonal units and a basis change.
  CHECK(max_abs(fams[0].sum_diag() - M2.unit()) < 1e-12);
}

TEST_CASE("matrix units of span{1, g} for Z/2 acting regularly") {
  // C[Z/2] in its regular representation: g = diag(1, -1) in C^2.
  MultiMatrix A({1, 1});
  Vec one = A.unit();
  Vec g = Vec::Zero(2);
  g << 1.0, -1.0;
  auto fams = decompose_matrix_units(A, cols(A, {one, g}));
  REQUIRE(fams.size() == 2);
  // Oracle: the eigenprojections (1 +- g) / 2.
  Vec p = (one + g) / 2.0, m = (one - g) / 2.0;
  bool ok = (max_abs(fams[0].at(0, 0) - p) < 1e-12 && max_abs(fams[1].at(0, 0) - m) < 1e-12) ||
            (max_abs(fams[0].at(0, 0) - m) < 1e-12 && max_abs(fams[1].at(0, 0) - p) < 1e-12);
  CHECK(ok);
}

TEST_CASE("matrix units of a twisted subalgebra with multiplicity") {
  // M2 (x) 1_2 inside M4, conjugated by a fixed unitary.
  MultiMatrix A({4});
  Mat U = Eigen::HouseholderQR<Mat>(Mat::Random(4, 4)).householderQ();
  std::vector<Vec> gens;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      Mat E = Mat::Zero(2, 2);
      E(r, c) = 1.0;
      Mat K = Eigen::kroneckerProduct(E, Mat::Identity(2, 2));
      gens.push_back(A.from_blocks({U * K * U.adjoint()}));
    }
  auto fams = decompose_matrix_units(A, orth(hstack(gens, A.dim())));
  REQUIRE(fams.size() == 1);
  CHECK(fams[0].n == 2);
  CHECK(matrix_unit_residual(A, fams, A.unit()) < 1e-10);
}

TEST_CASE("relative commutant examples") {
  MultiMatrix M2({2});
  Mat diag = cols(M2, {unit_elem(M2, 0, 0, 0), unit_elem(M2, 0, 1, 1)});
  SubAlgebra D{M2, diag, true};
  CHECK(subspace_gap(relative_commutant(D).Q, diag) < 1e-10);
  SubAlgebra F{M2, Mat::Identity(4, 4), true};
  Mat c = relative_commutant(F).Q;
  CHECK(c.cols() == 1);
  CHECK(dist_to_span(c, M2.unit()) < 1e-12);
  MultiMatrix B({1, 2});
  SubAlgebra scal{B, cols(B, {B.unit()}), true};
  CHECK(relative_commutant(scal).Q.cols() == 5);
}

TEST_CASE("relative commutant is antitone and S is contained in S''") {
  MultiMatrix A({2, 3});
  std::vector<std::vector<Vec>> families = {
      {A.central_projection(0)},
      {A.central_projection(0), unit_elem(A, 1, 0, 0), unit_elem(A, 1, 1, 1)},
      {A.central_projection(0), unit_elem(A, 1, 0, 0), unit_elem(A, 1, 1, 1), unit_elem(A, 1, 0, 1)},
  };
  std::vector<SubAlgebra> subs;
  for (auto& g : families) subs.push_back(generated_subalgebra(A, g));
  for (size_t i = 0; i + 1 < subs.size(); ++i) {
    REQUIRE(span_contains(subs[i + 1].Q, subs[i].Q));
    CHECK(span_contains(relative_commutant(subs[i]).Q, relative_commutant(subs[i + 1]).Q));
  }
  for (auto& s : subs) {
    CHECK(closure_residual(A, s.Q) < 1e-10);
    SubAlgebra c = relative_commutant(s);
    CHECK(closure_residual(A, c.Q) < 1e-10);
    CHECK(span_contains(relative_commutant(c).Q, s.Q));
  }
}

TEST_CASE("inclusion data examples") {
  MultiMatrix M2({2});
  auto d1 = inclusion_data(M2, cols(M2, {M2.unit()}));
  CHECK(d1.matrix.rows() == 1);
  CHECK(d1.matrix(0, 0) == 2);
  CHECK(d1.consistent());
  auto d2 = inclusion_data(M2, cols(M2, {unit_elem(M2, 0, 0, 0), unit_elem(M2, 0, 1, 1)}));
  CHECK(d2.matrix.rows() == 2);
  CHECK(d2.matrix(0, 0) == 1);
  CHECK(d2.matrix(1, 0) == 1);
  CHECK_THROWS(inclusion_data(M2, cols(M2, {unit_elem(M2, 0, 0, 0)})));
}

TEST_CASE("Markov trace examples") {
  MultiMatrix M2({2});
  auto mt = markov_trace(M2, cols(M2, {unit_elem(M2, 0, 0, 0), unit_elem(M2, 0, 1, 1)}), 2.0);
  CHECK(mt.index == doctest::Approx(2.0));
  CHECK(mt.weights[0] == doctest::Approx(1.0));
  // C subset C[Z/2] = C^2
  MultiMatrix C2({1, 1});
  auto mt2 = markov_trace(C2, cols(C2, {C2.unit()}), 1.0);
  CHECK(mt2.index == doctest::Approx(2.0));
  Vec g(2);
  g << 1.0, -1.0;
  CHECK(std::abs(C2.trace(g, mt2.weights)) < 1e-12);
  CHECK(C2.trace(C2.unit(), mt2.weights).real() == doctest::Approx(1.0));
  // Disconnected inclusion C^2 subset C^2.
  CHECK_THROWS_AS(markov_trace(C2, Mat::Identity(2, 2), 1.0), AlgebraError);
}

TEST_CASE("Markov index of the A4 bipartite inclusion") {
  BratteliDiagram d;
  d.matrix = IMat(2, 2);
  d.matrix << 1, 1, 1, 0;
  d.lower_dims = {1, 1};
  d.upper_dims = {2, 1};
  auto mt = markov_trace_from_diagram(d, 1.0);
  CHECK(mt.index == doctest::Approx(4 * std::pow(std::cos(M_PI / 5), 2)).epsilon(1e-12));
}

TEST_CASE("conditional expectations") {
  MultiMatrix M2({2});
  std::vector<double> w{0.5};
  Mat E = conditional_expectation(M2, w, cols(M2, {M2.unit()}));
  Vec x = Vec::Random(4);
  CHECK(max_abs(E * x - M2.trace(x, w) * M2.unit()) < 1e-12);
  Mat diag = cols(M2, {unit_elem(M2, 0, 0, 0), unit_elem(M2, 0, 1, 1)});
  Mat Ed = conditional_expectation(M2, w, diag);
  Vec y = Ed * x;
  CHECK(std::abs(y(1)) < 1e-12);
  CHECK(std::abs(y(2)) < 1e-12);
  CHECK(std::abs(y(0) - x(0)) < 1e-12);
  auto rep = check_conditional_expectation(M2, w, diag, Ed);
  CHECK(rep.worst() < 1e-10);
  CHECK_THROWS_AS(conditional_expectation(M2, {0.0}, diag), AlgebraError);
}

TEST_CASE("basic construction of C subset C^2 gives M2") {
  MultiMatrix C2({1, 1});
  Mat Q = cols(C2, {C2.unit()});
  auto mt = markov_trace(C2, Q, 1.0);
  auto bc = basic_construction(C2, Q, mt.weights);
  CHECK(bc.A2.dims() == std::vector<int>{2});
  CHECK(bc.jones_residual < 1e-10);
  CHECK(bc.markov_residual < 1e-10);
  CHECK(bc.lambda == doctest::Approx(0.5));
  // Bratteli reflection: (C subset C^2) has Lambda = [1 1]; A subset A2 is its transpose.
  CHECK(bc.upper.matrix == bc.lower.matrix.transpose());
}

TEST_CASE("basic construction of diag C^2 subset M2 reflects (1,1)") {
  MultiMatrix M2({2});
  Mat Q = cols(M2, {unit_elem(M2, 0, 0, 0), unit_elem(M2, 0, 1, 1)});
  auto mt = markov_trace(M2, Q, 1.0);
  auto bc = basic_construction(M2, Q, mt.weights);
  CHECK(bc.A2.dims() == std::vector<int>{2, 2});
  CHECK(bc.upper.matrix == bc.lower.matrix.transpose());
  CHECK(bc.jones_residual < 1e-10);
}

TEST_CASE("iterated basic construction satisfies the Jones relations") {
  MultiMatrix C2({1, 1});
  Mat Q0 = cols(C2, {C2.unit()});
  auto mt = markov_trace(C2, Q0, 1.0);
  auto b1 = basic_construction(C2, Q0, mt.weights);
  Mat Q1 = orth(b1.embed);
  auto b2 = basic_construction(b1.A2, Q1, b1.weights2);
  const MultiMatrix& A3 = b2.A2;
  Vec e1 = b2.embed * b1.e;
  Vec e2 = b2.e;
  double lam = b1.lambda;
  CHECK(b2.lambda == doctest::Approx(lam));
  CHECK(max_abs(A3.mul(A3.mul(e1, e2), e1) - lam * e1) < 1e-10);
  CHECK(max_abs(A3.mul(A3.mul(e2, e1), e2) - lam * e2) < 1e-10);
  CHECK(A3.trace(e2, b2.weights2).real() == doctest::Approx(lam));
  CHECK(b2.upper.matrix == b2.lower.matrix.transpose());
}

TEST_CASE("basic construction rejects a non-Markov trace") {
  MultiMatrix C3({1, 2});
  Mat Q = cols(C3, {C3.unit()});
  CHECK_THROWS_AS(basic_construction(C3, Q, {0.5, 0.25}), AlgebraError);
}

TEST_CASE("separability elements") {
  for (auto shape : {std::vector<int>{1, 1, 1}, std::vector<int>{2}, std::vector<int>{1, 2}}) {
    MultiMatrix D(shape);
    auto s = separability_element(D);
    CHECK(s.multiplication < 1e-12);
    CHECK(s.left_module < 1e-12);
    CHECK(s.right_module < 1e-12);
    CHECK(s.idempotent < 1e-12);
    CHECK(s.uniqueness_gap < 1e-10);
  }
  MultiMatrix C3({1, 1, 1});
  auto s = separability_element(C3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(s.P(i, i) - 1.0) < 1e-15);
  MultiMatrix M2({2});
  auto s2 = separability_element(M2);
  // P = 1/2 sum e_ij (x) e_ji, contracted by hand: m(P) = 1/2 (e11 + e11 + e22 + e22).
  CHECK(std::abs(s2.P(M2.index(0, 0, 1), M2.index(0, 1, 0)) - 0.5) < 1e-15);
  // The printed symmetric condition fails on a non-abelian D.
  CHECK(s2.literal_symmetric > 0.1);
}

TEST_CASE("index elements") {
  MultiMatrix M2({2});
  Mat diag = cols(M2, {unit_elem(M2, 0, 0, 0), unit_elem(M2, 0, 1, 1)});
  auto h = index_element(M2, {1.0}, diag);
  CHECK(max_abs(h.H - M2.unit()) < 1e-12);
  CHECK(h.defining_residual < 1e-12);
  // S = M2 with the normalized trace: tau(Hz) = Tr_reg(z) = 2 Tr(z) = 4 tau(z).
  auto h2 = index_element(M2, {0.5}, Mat::Identity(4, 4));
  CHECK(max_abs(h2.H - 4.0 * M2.unit()) < 1e-12);
  CHECK(h2.central_residual < 1e-12);
  CHECK(h2.min_eigenvalue > 0);
  // Scalars in C^2 with normalized trace: Tr_reg on C.1 is 1, so H = 1.
  MultiMatrix C2({1, 1});
  auto h3 = index_element(C2, {0.5, 0.5}, cols(C2, {C2.unit()}));
  CHECK(max_abs(h3.H - C2.unit()) < 1e-12);
}

TEST_CASE("abstract star algebra realization of C[Z/3]") {
  StructureConstants sc;
  sc.dim = 3;
  sc.L.assign(3, Mat::Zero(3, 3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sc.L[i]((i + j) % 3, j) = 1.0;
  sc.star = Mat::Zero(3, 3);
  for (int i = 0; i < 3; ++i) sc.star((3 - i) % 3, i) = 1.0;
  sc.unit = Vec::Zero(3);
  sc.unit(0) = 1.0;
  auto R = realize_star_algebra(sc);
  CHECK(R.alg.dims() == std::vector<int>{1, 1, 1});
  CHECK(R.homomorphism_residual < 1e-10);
}
