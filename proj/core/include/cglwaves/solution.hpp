#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "cglwaves/elliptic.hpp"
#include "cglwaves/jet.hpp"
#include "cglwaves/landen.hpp"
#include "cglwaves/laurent.hpp"
#include "cglwaves/model.hpp"

namespace cglwaves {

// Constrained slice carrying the elliptic solution:
// csi = ±√(48ex), g_r = 36ey, g_i = -3csi²/16, e_r = d_r = d_i = 0.
struct EllipticSliceParams {
  double ex = 1.0;
  double ey = 1.0;
  double e_i = 2.0;
  int csi_sign = 1;
  cplx j{0.0, 1.0};  // ±i
  double csi = 0.0;
  double g_r = 0.0;
  double g_i = 0.0;
  cplx N0;  // N0² = -324j / (e_i (3ex + 4j ey))

  CglParams params() const;
  // Same slice with csi and g_i recomputed at the current working precision.
  MpParams mp_params() const;
};

EllipticSliceParams make_slice(double ex, double ey, double e_i, int csi_sign = 1,
                               cplx j = cplx(0.0, 1.0));

enum class LatticeTag { Lower, Upper };

// (P(℘) + Q(℘)℘') / R(℘), coefficients in increasing powers of ℘.
struct WpRationalForm {
  std::vector<cplx> P, Q, R;
  LatticeTag lattice = LatticeTag::Lower;
  cplx xi0;
};

struct PoleAffix {
  cplx wp;
  cplx wp_prime;
  cplx xi;  // representative in the reduced cell
};

struct PoleAffixSet {
  std::array<PoleAffix, 4> M_poles;  // lower lattice, k = 1..4
  PoleAffix psi_real_pole;           // upper lattice
  std::array<PoleAffix, 2> psi_complex_poles;
  cplx r_aux;
};

struct ZetaSumTerm {
  cplx residue;
  cplx affix;
};

struct ZetaSumForm {
  cplx constant;
  std::vector<ZetaSumTerm> terms;
  LatticeTag lattice = LatticeTag::Upper;
};

struct HermiteFactor {
  cplx q;         // E(ξ, q, 0)
  cplx exponent;  // complex power
};

struct SigmaProductForm {
  cplx prefactor;
  cplx exponential_rate;
  std::vector<HermiteFactor> factors;
  LatticeTag lattice = LatticeTag::Upper;
};

// Everything derived once per slice: both lattices, affixes, and the
// integration constants of the ζ-sum and product forms.
class EllipticSolution {
 public:
  explicit EllipticSolution(const EllipticSliceParams& slice);

  const EllipticSliceParams& slice() const { return slice_; }
  const EllipticInvariants& lower() const { return pair_.lower; }
  const EllipticInvariants& upper() const { return pair_.upper; }
  const LandenPair& landen() const { return pair_; }
  const PoleAffixSet& affixes() const { return affixes_; }

  cplx zeta_sum_constant() const { return zeta_c_; }  // ±3^{1/4}/√(-e_i)
  cplx residue_at_psi_pole0() const { return r0_; }  // residue of M at ξ^ψ_{j,0}
  cplx K1() const { return k1_; }
  cplx H1() const { return h1_; }

 private:
  EllipticSliceParams slice_;
  LandenPair pair_;
  PoleAffixSet affixes_;
  cplx zeta_c_, r0_, k1_, h1_;
};

// ℘ and three derivatives as a Taylor jet at xi.
Jet<3> wp_jet(const EllipticInvariants& inv, cplx xi);

Jet<3> eval_M_wp(const EllipticSolution& sol, cplx xi);
Jet<3> eval_psi_wp(const EllipticSolution& sol, cplx xi);
Jet<3> eval_dlogA_wp(const EllipticSolution& sol, cplx xi);

// Jet of (M, ψ) for the model residuals.
StatePoint state_point(const EllipticSolution& sol, cplx xi);

// csi = 0 (ex = 0) forms of ψ: the rational one on (192ey², 0) and the
// square-root one √3/2·√℘(ξ; -768ey², 0). psi_csi0(ξ + s) = ±psi_csi0_sqrt(ξ).
Jet<3> eval_psi_csi0(double ey, cplx j, cplx xi);
cplx eval_psi_csi0_sqrt(double ey, cplx xi);
cplx psi_csi0_shift(double ey, cplx j);

WpRationalForm rational_form_M(const EllipticSliceParams& slice);
WpRationalForm rational_form_psi(const EllipticSliceParams& slice);
WpRationalForm rational_form_dlogA(const EllipticSliceParams& slice);
cplx evaluate(const WpRationalForm& form, const EllipticInvariants& inv, cplx xi);

PoleAffixSet pole_affixes(const EllipticSliceParams& slice, const EllipticInvariants& lower,
                          const EllipticInvariants& upper);

ZetaSumForm zeta_sum_M(const EllipticSolution& sol);
cplx evaluate(const ZetaSumForm& form, const EllipticInvariants& inv, cplx xi);
cplx eval_M_zeta_sum(const EllipticSolution& sol, cplx xi);

struct SimplePoleSums {
  cplx dlogA;
  cplx psi;
  cplx dlogM;  // M'/M
};
SimplePoleSums eval_simple_pole_sums(const EllipticSolution& sol, cplx xi);

// E(ξ, q, k) = σ(ξ+q) / (σ(ξ)σ(q)) · exp((k - ζ(q)) ξ)
cplx hermite_element(const EllipticInvariants& inv, cplx q, cplx k, cplx xi);

enum class ProductForm { Hermite, Sigma };
cplx eval_M_product(const EllipticSolution& sol, cplx xi, ProductForm form = ProductForm::Sigma);
SigmaProductForm product_form_M(const EllipticSolution& sol);

// Residual of ζ(x0)+ζ(x1)-ζ(xj)-ζ(x0+x1-xj) - csi/4 - j csi ey/(3ex) on the upper lattice.
cplx affix_zeta_relation(const EllipticSolution& sol);

// Branch-continuous amplitude. The j=+i factor A₊ carries the exponents
// (-1±i√3)/2 at ξ^ψ_{+i,0}, ξ^ψ_{+i,1}; the j=-i factor A₋ is evaluated at
// ξ+δ with δ = ξ^ψ_{-i,0} - ξ^ψ_{+i,0}. A₊A₋ = M is single-valued.
class AmplitudeTracker {
 public:
  // sol_plus must use j = +i; the partner with j = -i is built internally.
  explicit AmplitudeTracker(const EllipticSolution& sol_plus, cplx base);

  // Continues all logarithms along the straight segment to xi.
  void move_to(cplx xi);
  cplx position() const { return pos_; }

  cplx log_A_plus() const;   // without e^{-iωt + i c ξ/(2p)}
  cplx log_A_minus() const;  // conjugate partner
  cplx A_plus() const { return std::exp(log_A_plus()); }
  cplx product() const { return std::exp(log_A_plus() + log_A_minus()); }
  cplx K0() const { return k0_; }
  cplx c0() const { return c0_; }
  cplx delta() const { return delta_; }

  // 4th-order central difference of log A₊ at the current position.
  cplx dlog_A_plus(double h) const;

 private:
  struct Factor {
    cplx q;
    cplx exponent;
    cplx shift;
  };
  cplx factor_value(const Factor& f, cplx xi) const;
  double singular_distance(cplx xi) const;
  void step(cplx to);
  void fix_constants();

  EllipticSolution plus_;
  EllipticSolution minus_;
  cplx delta_;
  std::array<Factor, 4> factors_;
  std::array<cplx, 4> logs_{};
  cplx pos_;
  cplx k0_{1.0, 0.0};
  cplx c0_;
};

// (1/2πi)∮ f over the circle |ξ - center| = radius, n trapezoid nodes.
cplx contour_residue(const std::function<cplx(cplx)>& f, cplx center, double radius, int n = 128);

// Laurent coefficients a_lo..a_hi of f about center by the trapezoid rule.
std::vector<cplx> contour_laurent(const std::function<cplx(cplx)>& f, cplx center, double radius,
                                  int lo, int hi, int n = 256);

// Zeros and poles of f inside the parallelogram center ± w1 ± w3, by summing
// windings over a grid x grid partition.
struct WindingCount {
  int zeros = 0;
  int poles = 0;
};
WindingCount count_zeros_poles(const std::function<cplx(cplx)>& f, cplx center, cplx w1, cplx w3,
                               int grid = 12);

// Distance from xi to the nearest M pole or zero modulo the lower lattice.
double distance_to_singularities(const EllipticSolution& sol, cplx xi);

// Imaginary offset y maximizing the clearance of the segment [iy, length + iy].
double segment_offset(const EllipticSolution& sol, double length);

}  // namespace cglwaves
