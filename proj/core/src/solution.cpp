#include "cglwaves/solution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cglwaves/errors.hpp"

namespace cglwaves {
namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);
const cplx kI(0.0, 1.0);
constexpr double kPoleTol = 1e-12;

// ℘ and ℘' as jets at xi.
struct WpJets {
  Jet<3> p, dp;
};

WpJets wp_jets(const EllipticInvariants& inv, cplx xi) {
  WpValue w = eval_wp(inv, xi);
  cplx p3 = 12.0 * w.p * w.p_prime;
  cplx p4 = 12.0 * (w.p_prime * w.p_prime + w.p * w.p_second);
  WpJets out;
  out.p.c = {w.p, w.p_prime, w.p_second / 2.0, p3 / 6.0};
  out.dp.c = {w.p_prime, w.p_second, p3 / 2.0, p4 / 6.0};
  return out;
}

double cell_distance(const EllipticInvariants& inv, cplx a, cplx b) {
  return std::abs(reduce_to_cell(inv, a - b));
}

void require_off_pole(cplx den, double scale, const char* what) {
  if (std::abs(den) <= kPoleTol * std::max(1.0, scale)) {
    throw Error(ErrorCode::NearPole, what);
  }
}

cplx b_of(const EllipticSliceParams& s) { return 3.0 * s.ex + 4.0 * s.j * s.ey; }

using Poly = std::vector<cplx>;

Poly pmul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k) r[i + k] += a[i] * b[k];
  return r;
}
Poly padd(Poly a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size(), 0.0);
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}
Poly pscale(Poly a, cplx s) {
  for (auto& x : a) x *= s;
  return a;
}
cplx peval(const Poly& a, cplx x) {
  cplx r = 0.0;
  for (size_t i = a.size(); i-- > 0;) r = r * x + a[i];
  return r;
}

}  // namespace

CglParams EllipticSliceParams::params() const {
  CglParams p;
  p.e_i = e_i;
  p.g_r = g_r;
  p.g_i = g_i;
  p.csi = csi;
  return p;
}

MpParams EllipticSliceParams::mp_params() const {
  MpParams p;
  p.er = 0;
  p.dr = 0;
  p.di = 0;
  p.ei = e_i;
  p.csi = boost::multiprecision::sqrt(Real(48) * Real(ex));
  if (csi_sign < 0) p.csi = -p.csi;
  p.gr = Real(36) * Real(ey);
  p.gi = -3 * p.csi * p.csi / 16;
  return p;
}

EllipticSliceParams make_slice(double ex, double ey, double e_i, int csi_sign, cplx j) {
  if (!(ex > 0.0)) throw Error(ErrorCode::InvalidArgument, "slice requires ex > 0");
  if (e_i == 0.0) throw Error(ErrorCode::InvalidArgument, "slice requires e_i != 0");
  if (std::abs(j.real()) > 1e-15 || std::abs(std::abs(j.imag()) - 1.0) > 1e-15) {
    throw Error(ErrorCode::InvalidArgument, "j must be +i or -i");
  }
  EllipticSliceParams s;
  s.ex = ex;
  s.ey = ey;
  s.e_i = e_i;
  s.csi_sign = csi_sign < 0 ? -1 : 1;
  s.j = cplx(0.0, j.imag() > 0 ? 1.0 : -1.0);
  s.csi = s.csi_sign * std::sqrt(48.0 * ex);
  s.g_r = 36.0 * ey;
  s.g_i = -3.0 * s.csi * s.csi / 16.0;
  s.N0 = std::sqrt(-324.0 * s.j / (e_i * b_of(s)));
  return s;
}

Jet<3> wp_jet(const EllipticInvariants& inv, cplx xi) { return wp_jets(inv, xi).p; }

Jet<3> eval_M_wp(const EllipticSolution& sol, cplx xi) {
  const auto& s = sol.slice();
  const double ex = s.ex, ey = s.ey;
  const cplx j = s.j, b = b_of(s);
  WpJets w = wp_jets(sol.lower(), xi);
  const Jet<3>& P = w.p;
  Jet<3> num = 8.0 * s.N0 * b * (P - ex) *
               (3.0 * ex * P * P + 4.0 * (3.0 * ex * ex + 4.0 * ey * ey) * P +
                4.0 * ex * (3.0 * ex * ex + 5.0 * ey * ey));
  Jet<3> P2 = P * P + 4.0 * (ex + j * ey) * P + (4.0 * ex * ex - 4.0 * j * ex * ey + 12.0 * ey * ey);
  Jet<3> d0 = 24.0 * b * (P - ex) * (P * P - 2.0 * ex * P - (8.0 * ex * ex + 12.0 * ey * ey));
  Jet<3> d1 = 3.0 * s.csi * P2 * w.dp;
  Jet<3> den = d0 + d1;
  require_off_pole(den.c[0], std::abs(d0.c[0]) + std::abs(d1.c[0]), "M evaluated at a pole");
  return num / den;
}

Jet<3> eval_psi_wp(const EllipticSolution& sol, cplx xi) {
  const auto& s = sol.slice();
  const double ex = s.ex, ey = s.ey, csi = s.csi;
  const cplx j = s.j, b = b_of(s);
  WpJets w = wp_jets(sol.upper(), xi);
  const Jet<3>& P = w.p;
  Jet<3> P2 = -j * csi * b *
              ((3.0 * ex + 2.0 * j * ey) *
                   ((9.0 * ex - 4.0 * j * ey) * P * P + 2.0 * (-9.0 * ex - 44.0 * j * ey) * ex * P) -
               (945.0 * std::pow(ex, 4) + 1434.0 * j * std::pow(ex, 3) * ey +
                1192.0 * ey * ey * ex * ex + 1440.0 * j * std::pow(ey, 3) * ex +
                384.0 * std::pow(ey, 4)));
  Jet<3> Q2 = 9.0 * j * ex *
              (ex * (P * P + 22.0 * ex * P + 24.0 * j * ey * P) +
               (121.0 * std::pow(ex, 3) + 48.0 * ex * ey * ey + 192.0 * j * ex * ex * ey +
                128.0 * j * std::pow(ey, 3)));
  Jet<3> den = 12.0 * ex * (3.0 * ex * P + (15.0 * ex * ex + 16.0 * ey * ey)) *
               ((P + 2.0 * ex) * (P + 2.0 * ex) + 3.0 * b * b);
  Jet<3> top = P2 + Q2 * w.dp;
  require_off_pole(den.c[0], std::abs(top.c[0]), "ψ evaluated at a pole");
  return (-j * csi * (9.0 * ex - 4.0 * j * ey) / (24.0 * ex)) + top / den;
}

Jet<3> eval_dlogA_wp(const EllipticSolution& sol, cplx xi) {
  const auto& s = sol.slice();
  const double ex = s.ex, csi = s.csi;
  const cplx b = b_of(s);
  WpJets w = wp_jets(sol.upper(), xi);
  const Jet<3>& P = w.p;
  Jet<3> top = 6.0 * csi * b * b + (P + (2.0 * ex + 3.0 * b)) * w.dp;
  Jet<3> den = 2.0 * ((P + 2.0 * ex) * (P + 2.0 * ex) + 3.0 * b * b);
  require_off_pole(den.c[0], std::abs(top.c[0]), "dlogA evaluated at a pole");
  return cplx(csi / 2.0) - top / den;
}

StatePoint state_point(const EllipticSolution& sol, cplx xi) {
  Jet<3> M = eval_M_wp(sol, xi), psi = eval_psi_wp(sol, xi);
  return {M.derivative(0), M.derivative(1), M.derivative(2), M.derivative(3), psi.derivative(0),
          psi.derivative(1)};
}

namespace {

EllipticInvariants csi0_lattice(double ey) { return periods_from_invariants(192.0 * ey * ey, 0.0); }

}  // namespace

Jet<3> eval_psi_csi0(double ey, cplx j, cplx xi) {
  if (ey == 0.0) throw Error(ErrorCode::DegenerateLattice, "ey = 0 gives a degenerate lattice");
  EllipticInvariants inv = csi0_lattice(ey);
  cplx k = 4.0 * j * kSqrt3 * ey;
  cplx c = std::sqrt(6.0 * j * kSqrt3 * ey);
  Jet<3> P = wp_jet(inv, xi);
  Jet<3> den = P - k;
  require_off_pole(den.c[0], std::abs(P.c[0]), "ψ evaluated at a pole");
  return c * (1.0 + 2.0 * k * (Jet<3>(1.0) / den));
}

cplx eval_psi_csi0_sqrt(double ey, cplx xi) {
  if (ey == 0.0) throw Error(ErrorCode::DegenerateLattice, "ey = 0 gives a degenerate lattice");
  EllipticInvariants inv = periods_from_invariants(-768.0 * ey * ey, 0.0);
  return kSqrt3 / 2.0 * std::sqrt(eval_wp(inv, xi).p);
}

cplx psi_csi0_shift(double ey, cplx j) {
  EllipticInvariants inv = csi0_lattice(ey);
  cplx P = 4.0 * j * kSqrt3 * ey;
  cplx Pd = std::sqrt(4.0 * P * P * P - 192.0 * ey * ey * P);
  return invert_wp(inv, P, Pd);
}

WpRationalForm rational_form_M(const EllipticSliceParams& s) {
  const double ex = s.ex, ey = s.ey;
  const cplx j = s.j, b = b_of(s);
  Poly N = pscale(pmul({-ex, 1.0}, {4.0 * ex * (3.0 * ex * ex + 5.0 * ey * ey),
                                    4.0 * (3.0 * ex * ex + 4.0 * ey * ey), 3.0 * ex}),
                  8.0 * s.N0 * b);
  Poly D0 = pscale(pmul({-ex, 1.0}, {-(8.0 * ex * ex + 12.0 * ey * ey), -2.0 * ex, 1.0}), 24.0 * b);
  Poly D1 = pscale({4.0 * ex * ex - 4.0 * j * ex * ey + 12.0 * ey * ey, 4.0 * (ex + j * ey), 1.0},
                   3.0 * s.csi);
  double g2 = -24.0 * (ex * ex + 2.0 * ey * ey), g3 = 4.0 * (7.0 * ex * ex + 12.0 * ey * ey) * ex;
  Poly cubic{-g3, -g2, 0.0, 4.0};
  WpRationalForm f;
  f.P = pmul(N, D0);
  f.Q = pscale(pmul(N, D1), -1.0);
  f.R = padd(pmul(D0, D0), pscale(pmul(pmul(D1, D1), cubic), -1.0));
  f.lattice = LatticeTag::Lower;
  return f;
}

WpRationalForm rational_form_psi(const EllipticSliceParams& s) {
  const double ex = s.ex, ey = s.ey, csi = s.csi;
  const cplx j = s.j, b = b_of(s);
  cplx c1 = 3.0 * ex + 2.0 * j * ey;
  Poly P2 = pscale({-(945.0 * std::pow(ex, 4) + 1434.0 * j * std::pow(ex, 3) * ey +
                      1192.0 * ey * ey * ex * ex + 1440.0 * j * std::pow(ey, 3) * ex +
                      384.0 * std::pow(ey, 4)),
                    c1 * 2.0 * (-9.0 * ex - 44.0 * j * ey) * ex, c1 * (9.0 * ex - 4.0 * j * ey)},
                   -j * csi * b);
  Poly Q2 = pscale({121.0 * std::pow(ex, 3) + 48.0 * ex * ey * ey + 192.0 * j * ex * ex * ey +
                        128.0 * j * std::pow(ey, 3),
                    ex * (22.0 * ex + 24.0 * j * ey), ex},
                   9.0 * j * ex);
  Poly den = pscale(pmul({15.0 * ex * ex + 16.0 * ey * ey, 3.0 * ex},
                         {4.0 * ex * ex + 3.0 * b * b, 4.0 * ex, 1.0}),
                    12.0 * ex);
  cplx c0 = -j * csi * (9.0 * ex - 4.0 * j * ey) / (24.0 * ex);
  WpRationalForm f;
  f.P = padd(P2, pscale(den, c0));
  f.Q = Q2;
  f.R = den;
  f.lattice = LatticeTag::Upper;
  return f;
}

WpRationalForm rational_form_dlogA(const EllipticSliceParams& s) {
  const double ex = s.ex, csi = s.csi;
  const cplx b = b_of(s);
  Poly den{2.0 * (4.0 * ex * ex + 3.0 * b * b), 8.0 * ex, 2.0};
  WpRationalForm f;
  f.P = padd(pscale(den, csi / 2.0), {-6.0 * csi * b * b});
  f.Q = {-(2.0 * ex + 3.0 * b), -1.0};
  f.R = den;
  f.lattice = LatticeTag::Upper;
  return f;
}

cplx evaluate(const WpRationalForm& form, const EllipticInvariants& inv, cplx xi) {
  WpValue w = eval_wp(inv, xi - form.xi0);
  cplx top = peval(form.P, w.p) + peval(form.Q, w.p) * w.p_prime;
  cplx den = peval(form.R, w.p);
  require_off_pole(den, std::abs(top), "rational form evaluated at a pole");
  return top / den;
}

PoleAffixSet pole_affixes(const EllipticSliceParams& s, const EllipticInvariants& lower,
                          const EllipticInvariants& upper) {
  const double ex = s.ex, ey = s.ey, csi = s.csi;
  const cplx j = s.j, b = b_of(s);
  PoleAffixSet out;
  out.r_aux = std::sqrt(3.0 * j * kSqrt3 * b / ex);
  const cplx r = out.r_aux;
  for (int k = 1; k <= 4; ++k) {
    cplx jk = std::pow(j, k), j1k = std::pow(j, 1 - k), j2k = std::pow(j, 2 - k);
    double sg = (k % 2 == 0) ? 1.0 : -1.0;
    PoleAffix a;
    a.wp = (-3.0 + 3.0 * (jk + kSqrt3 * j1k) * r + sg * r * r) * ex / 6.0;
    a.wp_prime = (9.0 * jk + 3.0 * (-sg - j * kSqrt3) * r + j2k * r * r) * ex * csi * r / 36.0;
    a.xi = invert_wp(lower, a.wp, a.wp_prime);
    out.M_poles[static_cast<size_t>(k - 1)] = a;
  }
  PoleAffix pj;
  pj.wp = -5.0 * ex - 16.0 * ey * ey / (3.0 * ex);
  pj.wp_prime = -2.0 * j * csi * ey * (9.0 * ex * ex + 16.0 * ey * ey) / (9.0 * ex * ex);
  pj.xi = invert_wp(upper, pj.wp, pj.wp_prime);
  out.psi_real_pole = pj;
  for (int k = 0; k < 2; ++k) {
    double sg = k == 0 ? 1.0 : -1.0;
    PoleAffix a;
    a.wp = -2.0 * ex + sg * j * kSqrt3 * b;
    a.wp_prime = (3.0 - sg * j * kSqrt3) * csi * b / 2.0;
    a.xi = invert_wp(upper, a.wp, a.wp_prime);
    out.psi_complex_poles[static_cast<size_t>(k)] = a;
  }
  return out;
}

EllipticSolution::EllipticSolution(const EllipticSliceParams& slice) : slice_(slice) {
  const double ex = slice.ex, ey = slice.ey;
  cplx g2 = -24.0 * (ex * ex + 2.0 * ey * ey);
  cplx g3 = 4.0 * (7.0 * ex * ex + 12.0 * ey * ey) * ex;
  pair_ = landen_descend(periods_from_invariants(g2, g3), ex);
  affixes_ = pole_affixes(slice_, pair_.lower, pair_.upper);

  auto M = [this](cplx z) { return eval_M_wp(*this, z).value(); };
  auto pole_radius = [this](cplx at) {
    double d = std::abs(pair_.lower.omega1);
    for (const auto& p : affixes_.M_poles) {
      double e = cell_distance(pair_.lower, at, p.xi);
      if (e > 1e-9) d = std::min(d, e);
    }
    return 0.25 * d;
  };

  // ζ-sum constant: ±3^{1/4}/√(-e_i), sign from the residue at the first pole
  const cplx x1 = affixes_.M_poles[0].xi;
  cplx res1 = contour_residue(M, x1, pole_radius(x1));
  cplx base = std::pow(3.0, 0.25) / std::sqrt(cplx(-slice.e_i, 0.0));
  zeta_c_ = std::real(res1 / base) >= 0.0 ? base : -base;

  const auto& xj = affixes_.psi_real_pole.xi;
  const auto& x0 = affixes_.psi_complex_poles[0].xi;
  const auto& xk1 = affixes_.psi_complex_poles[1].xi;
  r0_ = contour_residue(M, x0, pole_radius(x0));

  const auto& up = pair_.upper;
  cplx b = b_of(slice_);
  cplx s0 = eval_sigma(up, x0);
  cplx lead = std::exp(b * slice_.csi * x0 / (12.0 * ex)) * hermite_element(up, -xj, 0.0, x0) /
              hermite_element(up, -xk1, 0.0, x0) *
              (-s0 * s0 * std::exp(-eval_zeta(up, x0) * x0));
  k1_ = r0_ / lead;
  h1_ = eval_zeta(up, x0 + xk1 - xj);
}

ZetaSumForm zeta_sum_M(const EllipticSolution& sol) {
  ZetaSumForm f;
  f.lattice = LatticeTag::Lower;
  cplx w = 1.0;
  for (const auto& p : sol.affixes().M_poles) {
    f.terms.push_back({sol.zeta_sum_constant() * w, p.xi});
    f.constant += sol.zeta_sum_constant() * w * eval_zeta(sol.lower(), p.xi);
    w *= sol.slice().j;
  }
  return f;
}

cplx evaluate(const ZetaSumForm& form, const EllipticInvariants& inv, cplx xi) {
  cplx s = form.constant;
  for (const auto& t : form.terms) {
    if (std::abs(reduce_to_cell(inv, xi - t.affix)) < 1e-8 * std::abs(inv.omega1)) {
      throw Error(ErrorCode::NearPole, "ζ-sum evaluated at a pole");
    }
    s += t.residue * eval_zeta(inv, xi - t.affix);
  }
  return s;
}

cplx eval_M_zeta_sum(const EllipticSolution& sol, cplx xi) {
  return evaluate(zeta_sum_M(sol), sol.lower(), xi);
}

SimplePoleSums eval_simple_pole_sums(const EllipticSolution& sol, cplx xi) {
  const auto& s = sol.slice();
  const auto& up = sol.upper();
  const auto& A = sol.affixes();
  const cplx xj = A.psi_real_pole.xi, x0 = A.psi_complex_poles[0].xi,
             x1 = A.psi_complex_poles[1].xi;
  auto Z = [&](cplx z) {
    if (std::abs(reduce_to_cell(up, z)) < 1e-8 * std::abs(up.omega1)) {
      throw Error(ErrorCode::NearPole, "simple-pole sum evaluated at a pole");
    }
    return eval_zeta(up, z);
  };
  const cplx a = (-1.0 + s.j * kSqrt3) / 2.0, b = (-1.0 - s.j * kSqrt3) / 2.0;
  SimplePoleSums out;
  cplx z = Z(xi), z0 = Z(xi - x0) + eval_zeta(up, x0), z1 = Z(xi - x1) + eval_zeta(up, x1);
  out.dlogA = s.csi / 2.0 + z + a * z0 + b * z1;
  if (s.csi == 0.0) throw Error(ErrorCode::CsiZeroRestriction, "ψ and M'/M sums need csi != 0");
  cplx zj = Z(xi - xj) + eval_zeta(up, xj);
  out.psi = -s.j * (9.0 * s.ex - 4.0 * s.j * s.ey) * s.csi / (24.0 * s.ex) +
            (s.j / 2.0) * (zj - z) + (kSqrt3 / 2.0) * (z0 - z1);
  out.dlogM = b_of(s) * s.csi / (12.0 * s.ex) + zj + z - (z0 + z1);
  return out;
}

cplx hermite_element(const EllipticInvariants& inv, cplx q, cplx k, cplx xi) {
  if (std::abs(reduce_to_cell(inv, q)) < 1e-8 * std::abs(inv.omega1)) {
    throw Error(ErrorCode::NearLatticePoint, "Hermite element needs q off the lattice");
  }
  return eval_sigma(inv, xi + q) / (eval_sigma(inv, xi) * eval_sigma(inv, q)) *
         std::exp((k - eval_zeta(inv, q)) * xi);
}

cplx eval_M_product(const EllipticSolution& sol, cplx xi, ProductForm form) {
  const auto& s = sol.slice();
  const auto& up = sol.upper();
  const auto& A = sol.affixes();
  const cplx xj = A.psi_real_pole.xi, x0 = A.psi_complex_poles[0].xi,
             x1 = A.psi_complex_poles[1].xi;
  for (cplx p : {x0, x1}) {
    if (std::abs(reduce_to_cell(up, xi - p)) < 1e-8 * std::abs(up.omega1)) {
      throw Error(ErrorCode::NearPole, "product evaluated at a pole");
    }
  }
  if (form == ProductForm::Hermite) {
    if (s.csi == 0.0) throw Error(ErrorCode::CsiZeroRestriction, "Hermite form needs csi != 0");
    if (std::abs(reduce_to_cell(up, xi)) < 1e-8 * std::abs(up.omega1)) return 0.0;
    return sol.K1() * std::exp(b_of(s) * s.csi * xi / (12.0 * s.ex)) *
           hermite_element(up, -xj, 0.0, xi) /
           (hermite_element(up, -x0, 0.0, xi) * hermite_element(up, -x1, 0.0, xi));
  }
  return -sol.K1() * std::exp(-sol.H1() * xi) * eval_sigma(up, xi - xj) * eval_sigma(up, xi) /
         (eval_sigma(up, xi - x0) * eval_sigma(up, xi - x1)) * eval_sigma(up, x0) *
         eval_sigma(up, x1) / eval_sigma(up, xj);
}

SigmaProductForm product_form_M(const EllipticSolution& sol) {
  const auto& s = sol.slice();
  const auto& A = sol.affixes();
  SigmaProductForm f;
  f.prefactor = sol.K1();
  f.exponential_rate = b_of(s) * s.csi / (12.0 * s.ex);
  f.factors = {{-A.psi_real_pole.xi, 1.0},
               {-A.psi_complex_poles[0].xi, -1.0},
               {-A.psi_complex_poles[1].xi, -1.0}};
  return f;
}

cplx affix_zeta_relation(const EllipticSolution& sol) {
  const auto& s = sol.slice();
  const auto& up = sol.upper();
  const auto& A = sol.affixes();
  const cplx xj = A.psi_real_pole.xi, x0 = A.psi_complex_poles[0].xi,
             x1 = A.psi_complex_poles[1].xi;
  return eval_zeta(up, x0) + eval_zeta(up, x1) - eval_zeta(up, xj) - eval_zeta(up, x0 + x1 - xj) -
         s.csi / 4.0 - s.j * s.csi * s.ey / (3.0 * s.ex);
}

namespace {

EllipticSliceParams conjugate_branch(const EllipticSliceParams& s) {
  if (s.j.imag() <= 0.0) throw Error(ErrorCode::InvalidArgument, "amplitude needs the j=+i slice");
  return make_slice(s.ex, s.ey, s.e_i, s.csi_sign, -s.j);
}

}  // namespace

AmplitudeTracker::AmplitudeTracker(const EllipticSolution& sol_plus, cplx base)
    : plus_(sol_plus), minus_(conjugate_branch(sol_plus.slice())) {
  const cplx a(-0.5, kSqrt3 / 2.0), b(-0.5, -kSqrt3 / 2.0);
  const auto& P = plus_.affixes();
  const auto& N = minus_.affixes();
  delta_ = N.psi_complex_poles[0].xi - P.psi_complex_poles[0].xi;
  factors_ = {Factor{-P.psi_complex_poles[0].xi, a, 0.0},
              Factor{-P.psi_complex_poles[1].xi, b, 0.0},
              Factor{-N.psi_complex_poles[0].xi, std::conj(a), delta_},
              Factor{-N.psi_complex_poles[1].xi, std::conj(b), delta_}};
  pos_ = base;
  if (singular_distance(base) < 1e-9) throw Error(ErrorCode::BranchCut, "base point is singular");
  for (size_t i = 0; i < factors_.size(); ++i) logs_[i] = std::log(factor_value(factors_[i], base));
  fix_constants();
}

cplx AmplitudeTracker::factor_value(const Factor& f, cplx xi) const {
  return hermite_element(plus_.upper(), f.q, 0.0, xi + f.shift);
}

double AmplitudeTracker::singular_distance(cplx xi) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& f : factors_) {
    d = std::min(d, std::abs(reduce_to_cell(plus_.upper(), xi + f.shift)));
    d = std::min(d, std::abs(reduce_to_cell(plus_.upper(), xi + f.shift + f.q)));
  }
  return d;
}

void AmplitudeTracker::step(cplx to) {
  std::array<cplx, 4> prev;
  for (size_t i = 0; i < factors_.size(); ++i) prev[i] = factor_value(factors_[i], pos_);
  while (pos_ != to) {
    double d = singular_distance(pos_);
    if (d < 1e-9) throw Error(ErrorCode::BranchCut, "path passes through a branch point");
    cplx diff = to - pos_;
    double len = std::abs(diff);
    double h = std::min(len, 0.2 * d);
    cplx next = h >= len ? to : pos_ + diff * (h / len);
    for (size_t i = 0; i < factors_.size(); ++i) {
      cplx v = factor_value(factors_[i], next);
      logs_[i] += std::log(v / prev[i]);
      prev[i] = v;
    }
    pos_ = next;
  }
}

void AmplitudeTracker::move_to(cplx xi) { step(xi); }

cplx AmplitudeTracker::log_A_plus() const {
  return std::log(k0_) + plus_.slice().csi * pos_ / 2.0 + factors_[0].exponent * logs_[0] +
         factors_[1].exponent * logs_[1];
}

cplx AmplitudeTracker::log_A_minus() const {
  return std::log(k0_) + plus_.slice().csi * (pos_ + delta_) / 2.0 + factors_[2].exponent * logs_[2] +
         factors_[3].exponent * logs_[3];
}

cplx AmplitudeTracker::dlog_A_plus(double h) const {
  cplx out = plus_.slice().csi / 2.0;
  for (size_t i = 0; i < 2; ++i) {
    cplx v0 = factor_value(factors_[i], pos_);
    auto L = [&](double m) { return std::log(factor_value(factors_[i], pos_ + m * h) / v0); };
    out += factors_[i].exponent * (-L(2.0) + 8.0 * L(1.0) - 8.0 * L(-1.0) + L(-2.0)) / (12.0 * h);
  }
  return out;
}

void AmplitudeTracker::fix_constants() {
  // residue of the unnormalized product at ξ^ψ_{+i,0}; the product is single-valued
  const cplx x0 = plus_.affixes().psi_complex_poles[0].xi;
  double rad = std::abs(plus_.upper().omega1);
  for (const auto& f : factors_) {
    for (cplx s : {-f.shift, -f.shift - f.q}) {
      double e = std::abs(reduce_to_cell(plus_.upper(), x0 - s));
      if (e > 1e-9) rad = std::min(rad, e);
    }
  }
  rad *= 0.25;
  AmplitudeTracker walker = *this;
  walker.k0_ = 1.0;
  walker.move_to(x0 + rad);
  const int n = 256;
  cplx sum = 0.0;
  for (int k = 0; k < n; ++k) {
    cplx e = std::polar(1.0, 2.0 * kPi * k / n);
    walker.move_to(x0 + rad * e);
    sum += walker.product() * rad * e;
  }
  c0_ = sum / double(n);
  k0_ = std::sqrt(plus_.residue_at_psi_pole0() / c0_);
}

cplx contour_residue(const std::function<cplx(cplx)>& f, cplx center, double radius, int n) {
  cplx s = 0.0;
  for (int k = 0; k < n; ++k) {
    cplx e = std::polar(1.0, 2.0 * kPi * k / n);
    s += f(center + radius * e) * radius * e;
  }
  return s / double(n);
}

std::vector<cplx> contour_laurent(const std::function<cplx(cplx)>& f, cplx center, double radius,
                                  int lo, int hi, int n) {
  std::vector<cplx> vals(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) vals[static_cast<size_t>(k)] = f(center + std::polar(radius, 2.0 * kPi * k / n));
  std::vector<cplx> out;
  for (int m = lo; m <= hi; ++m) {
    cplx s = 0.0;
    for (int k = 0; k < n; ++k) s += vals[static_cast<size_t>(k)] * std::polar(std::pow(radius, -m), -2.0 * kPi * k * m / n);
    out.push_back(s / double(n));
  }
  return out;
}

namespace {

// Change of arg f along the segment a -> b, bisecting until increments are small.
double arg_change(const std::function<cplx(cplx)>& f, cplx a, cplx fa, cplx b, cplx fb, int depth) {
  double d = std::arg(fb / fa);
  if (std::abs(d) < 0.4 || depth > 40) return d;
  cplx m = 0.5 * (a + b);
  cplx fm = f(m);
  return arg_change(f, a, fa, m, fm, depth + 1) + arg_change(f, m, fm, b, fb, depth + 1);
}

}  // namespace

WindingCount count_zeros_poles(const std::function<cplx(cplx)>& f, cplx center, cplx w1, cplx w3,
                               int grid) {
  WindingCount wc;
  cplx corner = center - w1 - w3;
  cplx d1 = 2.0 * w1 / double(grid), d3 = 2.0 * w3 / double(grid);
  // cache the grid-node values
  std::vector<cplx> node(static_cast<size_t>((grid + 1) * (grid + 1)));
  auto at = [&](int i, int k) -> cplx& { return node[static_cast<size_t>(i * (grid + 1) + k)]; };
  for (int i = 0; i <= grid; ++i)
    for (int k = 0; k <= grid; ++k) at(i, k) = f(corner + double(i) * d1 + double(k) * d3);
  for (int i = 0; i < grid; ++i) {
    for (int k = 0; k < grid; ++k) {
      cplx z[4] = {corner + double(i) * d1 + double(k) * d3, corner + double(i + 1) * d1 + double(k) * d3,
                   corner + double(i + 1) * d1 + double(k + 1) * d3,
                   corner + double(i) * d1 + double(k + 1) * d3};
      cplx v[4] = {at(i, k), at(i + 1, k), at(i + 1, k + 1), at(i, k + 1)};
      double total = 0.0;
      for (int e = 0; e < 4; ++e) total += arg_change(f, z[e], v[e], z[(e + 1) % 4], v[(e + 1) % 4], 0);
      int n = static_cast<int>(std::lround(total / (2.0 * kPi)));
      if (n > 0) wc.zeros += n;
      if (n < 0) wc.poles -= n;
    }
  }
  return wc;
}

double distance_to_singularities(const EllipticSolution& sol, cplx xi) {
  double d = std::abs(reduce_to_cell(sol.lower(), xi));
  for (const auto& p : sol.affixes().M_poles) d = std::min(d, cell_distance(sol.lower(), xi, p.xi));
  const auto& A = sol.affixes();
  for (cplx p : {cplx(0.0), A.psi_real_pole.xi, A.psi_complex_poles[0].xi, A.psi_complex_poles[1].xi}) {
    d = std::min(d, cell_distance(sol.upper(), xi, p));
  }
  return d;
}

double segment_offset(const EllipticSolution& sol, double length) {
  const auto& up = sol.upper();
  double H = std::abs(up.omega1) + std::abs(up.omega3);
  double best = -1.0, yb = 0.0;
  for (int k = 0; k < 101; ++k) {
    double y = -H + 2.0 * H * k / 100.0;
    double m = 1e300;
    for (int t = 0; t <= 100; ++t) m = std::min(m, distance_to_singularities(sol, cplx(length * t / 100.0, y)));
    if (m > best) {
      best = m;
      yb = y;
    }
  }
  return yb;
}

}  // namespace cglwaves
