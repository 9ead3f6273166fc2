#include "cglwaves/laurent.hpp"

#include <algorithm>
#include <cmath>

#include "cglwaves/errors.hpp"

namespace cglwaves {

Cplx LaurentSeries::at(int e) const {
  if (e >= order()) throw Error(ErrorCode::InsufficientTerms, "coefficient beyond truncation");
  if (e < val) return Cplx();
  return c[static_cast<size_t>(e - val)];
}

LaurentSeries LaurentSeries::truncated(int new_order) const {
  LaurentSeries r{val, c};
  int n = std::max(0, std::min(new_order, order()) - val);
  r.c.resize(static_cast<size_t>(n));
  return r;
}

namespace {

LaurentSeries combine(const LaurentSeries& a, const LaurentSeries& b, bool subtract) {
  LaurentSeries r;
  r.val = std::min(a.val, b.val);
  int ord = std::min(a.order(), b.order());
  r.c.assign(static_cast<size_t>(std::max(0, ord - r.val)), Cplx());
  for (int e = r.val; e < ord; ++e) {
    Cplx v;
    if (e >= a.val) v += a.c[static_cast<size_t>(e - a.val)];
    if (e >= b.val) {
      if (subtract)
        v -= b.c[static_cast<size_t>(e - b.val)];
      else
        v += b.c[static_cast<size_t>(e - b.val)];
    }
    r.c[static_cast<size_t>(e - r.val)] = std::move(v);
  }
  return r;
}

}  // namespace

LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
  return combine(a, b, false);
}

LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) {
  return combine(a, b, true);
}

LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
  LaurentSeries r;
  r.val = a.val + b.val;
  int ord = std::min(a.val + b.order(), b.val + a.order());
  int n = std::max(0, ord - r.val);
  r.c.assign(static_cast<size_t>(n), Cplx());
  int na = static_cast<int>(a.c.size()), nb = static_cast<int>(b.c.size());
  for (int k = 0; k < n; ++k) {
    Cplx s;
    for (int i = std::max(0, k - nb + 1); i <= std::min(k, na - 1); ++i) {
      s += a.c[static_cast<size_t>(i)] * b.c[static_cast<size_t>(k - i)];
    }
    r.c[static_cast<size_t>(k)] = std::move(s);
  }
  return r;
}

LaurentSeries operator*(const Cplx& s, const LaurentSeries& a) {
  LaurentSeries r = a;
  for (auto& x : r.c) x *= s;
  return r;
}

LaurentSeries derivative(const LaurentSeries& a) {
  LaurentSeries r;
  r.val = a.val - 1;
  r.c.resize(a.c.size());
  for (size_t k = 0; k < a.c.size(); ++k) r.c[k] = a.c[k] * Real(a.val + static_cast<int>(k));
  return r;
}

LaurentSeries reciprocal(const LaurentSeries& a) {
  if (a.c.empty() || (a.c[0].re == 0 && a.c[0].im == 0)) {
    throw Error(ErrorCode::InvalidArgument, "reciprocal of a series with zero leading term");
  }
  LaurentSeries r;
  r.val = -a.val;
  size_t n = a.c.size();
  r.c.resize(n);
  Cplx inv = Cplx(1) / a.c[0];
  r.c[0] = inv;
  for (size_t k = 1; k < n; ++k) {
    Cplx s;
    for (size_t i = 1; i <= k; ++i) s += a.c[i] * r.c[k - i];
    r.c[k] = -(s * inv);
  }
  return r;
}

MpParams::MpParams(const CglParams& p)
    : er(p.e_r), ei(p.e_i), dr(p.d_r), di(p.d_i), gr(p.g_r), gi(p.g_i), csi(p.csi) {}

CglParams MpParams::to_double() const {
  CglParams p;
  p.e_r = static_cast<double>(er);
  p.e_i = static_cast<double>(ei);
  p.d_r = static_cast<double>(dr);
  p.d_i = static_cast<double>(di);
  p.g_r = static_cast<double>(gr);
  p.g_i = static_cast<double>(gi);
  p.csi = static_cast<double>(csi);
  return p;
}

LaurentSeries constant_series(const Cplx& value, int order) {
  LaurentSeries r;
  r.val = 0;
  r.c.assign(static_cast<size_t>(std::max(0, order)), Cplx());
  if (order > 0) r.c[0] = value;
  return r;
}

namespace {

struct PolyForms {
  LaurentSeries p1, p2;
};

LaurentSeries absval(LaurentSeries s) {
  for (auto& x : s.c) x = Cplx(abs(x));
  return s;
}

// With majorant set, every coefficient is replaced by its modulus after each
// operation, giving a bound on the size of the terms that cancel.
std::vector<LaurentSeries> p1_terms(const MpParams& P, const LaurentSeries& M,
                                    const LaurentSeries& psi, bool majorant = false) {
  auto D = [&](const LaurentSeries& x) { return majorant ? absval(derivative(x)) : derivative(x); };
  auto k = [&](const Real& x) { return Cplx(majorant ? Real(abs(x)) : x); };
  LaurentSeries M1 = D(M), M2 = D(M1);
  LaurentSeries W = M * psi, MM = M * M;
  std::vector<LaurentSeries> t;
  t.push_back(k(2) * (M * M2));
  t.push_back(k(-1) * (M1 * M1));
  t.push_back(k(-2 * P.csi) * (M * M1));
  t.push_back(k(-4) * (W * W));
  if (P.er != 0) t.push_back(k(4 * P.er) * (MM * MM));
  if (P.dr != 0) t.push_back(k(4 * P.dr) * (MM * M));
  if (P.gi != 0) t.push_back(k(4 * P.gi) * MM);
  return t;
}

std::vector<LaurentSeries> p2_terms(const MpParams& P, const LaurentSeries& M,
                                    const LaurentSeries& psi, bool majorant = false) {
  auto D = [&](const LaurentSeries& x) { return majorant ? absval(derivative(x)) : derivative(x); };
  auto k = [&](const Real& x) { return Cplx(majorant ? Real(abs(x)) : x); };
  LaurentSeries W = M * psi, MM = M * M;
  std::vector<LaurentSeries> t;
  t.push_back(D(W));
  t.push_back(k(-P.csi) * W);
  if (P.ei != 0) t.push_back(k(P.ei) * (MM * M));
  if (P.di != 0) t.push_back(k(P.di) * MM);
  if (P.gr != 0) t.push_back(k(-P.gr) * M);
  return t;
}

LaurentSeries sum(const std::vector<LaurentSeries>& t) {
  LaurentSeries s = t.front();
  for (size_t i = 1; i < t.size(); ++i) s = s + t[i];
  return s;
}

PolyForms poly_forms(const MpParams& P, const LaurentSeries& M, const LaurentSeries& psi) {
  return {sum(p1_terms(P, M, psi)), sum(p2_terms(P, M, psi))};
}

struct Affine2 {
  Cplx r0[2];
  Cplx cM[2];
  Cplx cPsi[2];
};

// Coefficient k of both polynomial forms as an affine function of the
// unknowns (M_k, ψ_k), found from three evaluations.
Affine2 order_system(const MpParams& P, std::vector<Cplx> Mc, std::vector<Cplx> pc, int vM,
                     int k) {
  auto eval = [&](const Cplx& x, const Cplx& y, Cplx out[2]) {
    Mc[static_cast<size_t>(k)] = x;
    pc[static_cast<size_t>(k)] = y;
    LaurentSeries M{vM, std::vector<Cplx>(Mc.begin(), Mc.begin() + k + 1)};
    LaurentSeries psi{-1, std::vector<Cplx>(pc.begin(), pc.begin() + k + 1)};
    PolyForms f = poly_forms(P, M, psi);
    out[0] = f.p1.at(2 * vM - 2 + k);
    out[1] = f.p2.at(vM - 2 + k);
  };
  Affine2 a;
  Cplx e1[2], e2[2];
  eval(Cplx(), Cplx(), a.r0);
  eval(Cplx(1), Cplx(), e1);
  eval(Cplx(), Cplx(1), e2);
  for (int i = 0; i < 2; ++i) {
    a.cM[i] = e1[i] - a.r0[i];
    a.cPsi[i] = e2[i] - a.r0[i];
  }
  return a;
}

Real tolerance(unsigned digits) {
  return boost::multiprecision::pow(Real(10), -static_cast<int>(digits) / 2);
}

void run_recursion(const MpParams& P, std::vector<Cplx>& Mc, std::vector<Cplx>& pc, int vM,
                   int k_start, int n_terms, unsigned digits) {
  for (int k = k_start; k < n_terms; ++k) {
    Affine2 a = order_system(P, Mc, pc, vM, k);
    Cplx det = a.cM[0] * a.cPsi[1] - a.cM[1] * a.cPsi[0];
    Real scale = abs(a.cM[0] * a.cPsi[1]) + abs(a.cM[1] * a.cPsi[0]);
    if (abs(det) <= tolerance(digits) * scale) {
      throw Error(ErrorCode::ResonantIndex,
                  "singular recursion at order " + std::to_string(k) + " (integer Fuchs index)");
    }
    // Cramer's rule for cM x + cPsi y = -r0
    Cplx x = (-(a.r0[0]) * a.cPsi[1] + a.r0[1] * a.cPsi[0]) / det;
    Cplx y = (-(a.r0[1]) * a.cM[0] + a.r0[0] * a.cM[1]) / det;
    Mc[static_cast<size_t>(k)] = x;
    pc[static_cast<size_t>(k)] = y;
  }
}

}  // namespace

std::vector<LeadingBehavior> leading_orders(const CglParams& params, Equation eq) {
  validate(params, eq);
  std::vector<LeadingBehavior> out;
  for (int branch = 0; branch < 2; ++branch) {
    double s = branch == 0 ? 1.0 : -1.0;
    double alpha, power;
    if (eq == Equation::CGL5) {
      double er = params.e_r, ei = params.e_i;
      double disc = std::sqrt(64.0 * er * er + 48.0 * ei * ei);
      alpha = (8.0 * er + s * disc) / (8.0 * ei);
      power = 2.0 * alpha / params.e_i;
    } else {
      double dr = params.d_r, di = params.d_i;
      double disc = std::sqrt(9.0 * dr * dr + 8.0 * di * di);
      alpha = (3.0 * dr + s * disc) / (2.0 * di);
      power = 3.0 * alpha / params.d_i;
    }
    if (alpha == 0.0) throw Error(ErrorCode::DegenerateLeading, "α = 0");
    std::vector<cplx> idx{-1.0, 0.0};
    double base = eq == Equation::CGL5 ? 5.0 : 7.0;
    double k = eq == Equation::CGL5 ? 32.0 : 24.0;
    cplx root = std::sqrt(cplx(1.0 - k * alpha * alpha, 0.0));
    idx.push_back((base + root) / 2.0);
    idx.push_back((base - root) / 2.0);
    int nsigns = eq == Equation::CGL5 ? 2 : 1;
    for (int sg = 0; sg < nsigns; ++sg) {
      LeadingBehavior lb;
      lb.equation = eq;
      lb.alpha_branch = branch;
      lb.sign = sg == 0 ? 1 : -1;
      lb.alpha = alpha;
      lb.A0_power = power;
      if (eq == Equation::CGL5) {
        lb.m0 = double(lb.sign) * std::sqrt(cplx(power, 0.0));
        lb.leading_exponent = -1;
      } else {
        lb.m0 = power;
        lb.leading_exponent = -2;
      }
      lb.fuchs_indices = idx;
      out.push_back(lb);
    }
  }
  return out;
}

LaurentFamily expand_pole_family(const CglParams& params, const LeadingBehavior& lead,
                                 int n_terms, unsigned digits) {
  PrecisionGuard guard(digits);
  return expand_pole_family(MpParams(params), lead, n_terms, digits);
}

LaurentFamily expand_pole_family(const MpParams& params, const LeadingBehavior& lead,
                                 int n_terms, unsigned digits) {
  validate(params.to_double(), lead.equation);
  if (n_terms < 2) throw Error(ErrorCode::InsufficientTerms, "need at least 2 terms");
  PrecisionGuard guard(digits);
  const MpParams& P = params;
  // leading constants recomputed at working precision
  Real alpha;
  Cplx m0;
  Real s = lead.alpha_branch == 0 ? Real(1) : Real(-1);
  if (lead.equation == Equation::CGL5) {
    Real disc = boost::multiprecision::sqrt(64 * P.er * P.er + 48 * P.ei * P.ei);
    alpha = (8 * P.er + s * disc) / (8 * P.ei);
    m0 = sqrt(Cplx(Real(2 * alpha / P.ei)));
    if (lead.sign < 0) m0 = -m0;
  } else {
    Real disc = boost::multiprecision::sqrt(9 * P.dr * P.dr + 8 * P.di * P.di);
    alpha = (3 * P.dr + s * disc) / (2 * P.di);
    m0 = Cplx(Real(3 * alpha / P.di));
  }
  int vM = lead.leading_exponent;
  std::vector<Cplx> Mc(static_cast<size_t>(n_terms)), pc(static_cast<size_t>(n_terms));
  Mc[0] = m0;
  pc[0] = Cplx(alpha);
  run_recursion(P, Mc, pc, vM, 1, n_terms, digits);
  LaurentFamily fam;
  fam.kind = FamilyKind::PoleOfM;
  fam.equation = lead.equation;
  fam.lead = lead;
  fam.M = {vM, Mc};
  fam.psi = {-1, pc};
  fam.order = n_terms;
  fam.digits = digits;
  return fam;
}

LaurentFamily expand_zero_family(const CglParams& params, cplx j, const Cplx& arb0,
                                 const Cplx& arb1, int n_terms, unsigned digits, Equation eq) {
  PrecisionGuard guard(digits);
  return expand_zero_family(MpParams(params), j, arb0, arb1, n_terms, digits, eq);
}

LaurentFamily expand_zero_family(const MpParams& P, cplx j, const Cplx& arb0, const Cplx& arb1,
                                 int n_terms, unsigned digits, Equation eq) {
  const CglParams params = P.to_double();
  validate(params, eq);
  if (std::abs(std::abs(j) - 1.0) > 1e-15 || std::abs(j.real()) > 1e-15) {
    throw Error(ErrorCode::InvalidArgument, "j must be ±i");
  }
  if (n_terms < 2) throw Error(ErrorCode::InsufficientTerms, "need at least 2 terms");
  PrecisionGuard guard(digits);
  if (arb0.re == 0 && arb0.im == 0) {
    throw Error(ErrorCode::InvalidFreeConstant, "arb0 must be nonzero");
  }
  if (params.csi == 0.0 && !(arb1.re == 0 && arb1.im == 0)) {
    throw Error(ErrorCode::InvalidFreeConstant, "arb1 must vanish when csi = 0");
  }
  Cplx jj(Real(0), Real(j.imag() > 0 ? 1 : -1));
  const int vM = 1;
  std::vector<Cplx> Mc(static_cast<size_t>(n_terms)), pc(static_cast<size_t>(n_terms));
  Mc[0] = Cplx(arb0.re, arb0.im);
  pc[0] = jj * Cplx(Real(1) / 2);
  // order 1 is resonant: M_1 is free, ψ_1 follows from the compatible line
  Mc[1] = -(Cplx(arb0.re, arb0.im) * Cplx(arb1.re, arb1.im));
  {
    Affine2 a = order_system(P, Mc, pc, vM, 1);
    Cplx r[2] = {a.r0[0] + a.cM[0] * Mc[1], a.r0[1] + a.cM[1] * Mc[1]};
    int use = abs(a.cPsi[0]) >= abs(a.cPsi[1]) ? 0 : 1;
    int other = 1 - use;
    pc[1] = -(r[use] / a.cPsi[use]);
    Cplx rest = r[other] + a.cPsi[other] * pc[1];
    Real scale = abs(r[other]) + abs(a.cPsi[other] * pc[1]) + Real(1);
    if (abs(rest) > tolerance(digits) * scale) {
      throw Error(ErrorCode::InvalidFreeConstant, "incompatible resonance at order 1");
    }
  }
  run_recursion(P, Mc, pc, vM, 2, n_terms, digits);
  LaurentFamily fam;
  fam.kind = FamilyKind::ZeroOfM;
  fam.equation = eq;
  fam.j = cplx(0.0, j.imag() > 0 ? 1.0 : -1.0);
  fam.arb0 = arb0;
  fam.arb1 = arb1;
  fam.M = {vM, Mc};
  fam.psi = {-1, pc};
  fam.order = n_terms;
  fam.digits = digits;
  return fam;
}

double series_substitute_residual(const CglParams& params, const LaurentFamily& fam) {
  PrecisionGuard guard(fam.digits ? fam.digits : kDefaultDigits);
  return series_substitute_residual(MpParams(params), fam);
}

double series_substitute_residual(const MpParams& P, const LaurentFamily& fam) {
  PrecisionGuard guard(fam.digits ? fam.digits : kDefaultDigits);
  PolyForms f = poly_forms(P, fam.M, fam.psi);
  LaurentSeries aM = absval(fam.M), apsi = absval(fam.psi);
  LaurentSeries s1 = sum(p1_terms(P, aM, apsi, true)), s2 = sum(p2_terms(P, aM, apsi, true));
  Real worst = 0;
  auto scan = [&](const LaurentSeries& v, const LaurentSeries& scale) {
    for (int e = v.val; e < v.order(); ++e) {
      Real s = e >= scale.val && e < scale.order() ? scale.at(e).re : Real(0);
      worst = boost::multiprecision::max(worst, Real(abs(v.at(e)) / boost::multiprecision::max(s, Real(1e-300))));
    }
  };
  scan(f.p1, s1);
  scan(f.p2, s2);
  return static_cast<double>(worst);
}

std::string to_string(const Real& x) {
  return x.str(static_cast<std::streamsize>(Real::default_precision()), std::ios_base::scientific);
}

}  // namespace cglwaves
