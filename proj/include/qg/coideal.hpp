#pragma once
// Coideal *-subalgebras of a quantum groupoid: certification, lattice operations,
// the tilde and delta maps, canonical data and Galois-correspondence checks.

#include <optional>
#include <string>
#include <vector>

#include "qg/dual.hpp"

namespace qg {

enum class Side { Left, Right };

struct CoidealResiduals {
  double unit = 0, closure = 0, star = 0, coaction = 0, dual_action = 0, counital = 0;
  int witness = -1;  // basis column of the worst coaction/closure failure
  double worst() const;
};

struct CoidealSubalgebra {
  Mat Q;  // orthonormal basis in B coordinates
  Side side = Side::Left;
  CoidealResiduals residuals;
  bool connected = false;
  int dim() const { return static_cast<int>(Q.cols()); }
};

// Shared data for coideal computations on one quantum groupoid: B*, the dual actions
// and (lazily) the Heisenberg double B* >< B.
class CoidealContext {
 public:
  explicit CoidealContext(WeakHopfAlgebra W, double tol = kDefaultTol);
  const WeakHopfAlgebra& W() const { return W_; }
  const DualData& dual() const { return dual_; }
  const DualActions& actions() const { return acts_; }
  const CrossedProduct& heisenberg() const;
  const Mat& Bt() const { return Bt_; }
  const Mat& Bs() const { return Bs_; }
  double tol() const { return tol_; }

 private:
  WeakHopfAlgebra W_;
  double tol_;
  DualData dual_;
  DualActions acts_;
  Mat Bt_, Bs_;
  mutable std::optional<CrossedProduct> heis_;
};

CoidealResiduals coideal_residuals(const WeakHopfAlgebra& W, const Mat& Q, Side side,
                                   const std::vector<Mat>* dual_action = nullptr);
// Throws AlgebraError naming the failed property and witness.
CoidealSubalgebra check_coideal(const CoidealContext& ctx, const Mat& span, Side side);
CoidealSubalgebra check_coideal(const WeakHopfAlgebra& W, const Mat& span, Side side, double tol = kDefaultTol);
bool coideal_connected(const WeakHopfAlgebra& W, const Mat& Q, Side side);

CoidealSubalgebra generated_coideal(const WeakHopfAlgebra& W, const std::vector<Vec>& gens, Side side,
                                    double tol = kDefaultTol);

CoidealSubalgebra meet(const WeakHopfAlgebra& W, const CoidealSubalgebra& a, const CoidealSubalgebra& b,
                       double tol = kDefaultTol);
CoidealSubalgebra join(const WeakHopfAlgebra& W, const CoidealSubalgebra& a, const CoidealSubalgebra& b,
                       double tol = kDefaultTol);

// G^{-1/2} S(I) G^{1/2}, certified as a coideal of the opposite side.
CoidealSubalgebra tilde_map(const WeakHopfAlgebra& W, const CoidealSubalgebra& I, double tol = kDefaultTol);

struct DeltaResult {
  CoidealSubalgebra image;  // left coideal of B*, basis in B* coordinates
  double round_trip = 0;    // gap between delta(I)' cap B and tilde(I)
};
DeltaResult delta_map(const CoidealContext& ctx, const CoidealSubalgebra& I);

struct CoidealCanonical {
  Vec x, e, p;
  double lambda = 0;
  double x_defining = 0;        // tau(x b) = eps(b) on I
  double lambda_scalar = 0;     // deviation of eps_s(H^{-1} x) from a scalar
  double projection = 0;        // p = p* = p^2
  double coproduct_formula = 0; // Delta(x) = sum tau(f_ss)^{-1} S(f_sr) G (x) f_rs
  double antipode_formula = 0;  // S(x) = x G^{-1}
  double haar_property = 0;     // b e = eps_t(b) e on I
  double support = 0;           // x e = e x = x
  double target_unit = 0;       // eps_t(H^{1/2} p H^{-1/2}) = 1
  double expectation_scalar = 0;  // E_{B_t}(p) = lambda^{-1} 1
  double zeta_idempotent = 0;   // zeta = lambda zeta * zeta under the pairing
  double worst() const;
};
CoidealCanonical canonical_data(const WeakHopfAlgebra& W, const CoidealSubalgebra& I, double tol = kDefaultTol);

struct ExpectationReport {
  Mat E;
  double range = 0, identity_on_I = 0, trace_preserving = 0, bimodular = 0, idempotent = 0;
  double gns_gap = 0;  // distance to the tau-orthogonal projection
  double worst() const;
};
ExpectationReport conditional_expectation_EI(const WeakHopfAlgebra& W, const CoidealSubalgebra& I,
                                             double tol = kDefaultTol);

enum class EnumerationMode { Brute, UpToConjugacy };
std::vector<CoidealSubalgebra> enumerate_coideals(const CoidealContext& ctx, EnumerationMode mode,
                                                  int max_dim = 16);

// Lattice order helpers on coideal lists.
bool contained(const Mat& Q1, const Mat& Q2, double tol = 1e-8);
bool same_subspace(const Mat& Q1, const Mat& Q2, double tol = 1e-8);

struct GaloisEntry {
  int dim_I = 0, dim_K = 0, dim_delta = 0;
  double center_check = 0;       // Z(K) cap I-copy = (Z(I) cap B_s)-copy
  double commutant_check = 0;    // (B*-copy)' cap I-copy = (I cap B_s)-copy
  int literal_center_dim = 0, expected_center_dim = 0;
  double basic_construction = 0; // p x p = E(x) p with E onto delta(I)
  double expectation_props = 0;
  bool generates = false;
};
struct GaloisReport {
  std::vector<CoidealSubalgebra> coideals;
  std::vector<GaloisEntry> entries;
  bool injective = false, order_preserving = false, meets_joins = false;
  bool delta_bijective = false, delta_order_reversing = false;
  double delta_round_trip = 0;
  std::string failure;  // empty when every check passed
  bool pass() const { return failure.empty(); }
};
GaloisReport galois_verify(const CoidealContext& ctx, double tol = kDefaultTol);

}  // namespace qg
