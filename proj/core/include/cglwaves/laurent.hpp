#pragma once

#include <complex>
#include <vector>

#include "cglwaves/model.hpp"
#include "cglwaves/mp.hpp"

namespace cglwaves {

// Truncated Laurent series Σ_{k} c[k] χ^{val+k} + O(χ^{val+c.size()}).
struct LaurentSeries {
  int val = 0;
  std::vector<Cplx> c;

  int order() const { return val + static_cast<int>(c.size()); }
  // Coefficient of χ^e; zero below val. Throws if e >= order().
  Cplx at(int e) const;
  LaurentSeries truncated(int new_order) const;
};

LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries operator*(const Cplx& s, const LaurentSeries& a);
LaurentSeries derivative(const LaurentSeries& a);
LaurentSeries reciprocal(const LaurentSeries& a);
LaurentSeries constant_series(const Cplx& value, int order);

// Reduced parameters at working precision. Use this form when the parameters
// satisfy exact algebraic constraints that a double cannot represent.
struct MpParams {
  Real er, ei, dr, di, gr, gi, csi;

  MpParams() = default;
  explicit MpParams(const CglParams& p);
  CglParams to_double() const;
};

struct LeadingBehavior {
  Equation equation = Equation::CGL5;
  int alpha_branch = 0;  // which root of the α-quadratic
  int sign = 1;          // sign of m0 (CGL5); always +1 for CGL3
  double alpha = 0.0;
  double A0_power = 0.0;  // A0^2 (CGL3) or A0^4 (CGL5)
  cplx m0;
  int leading_exponent = -1;
  std::vector<cplx> fuchs_indices;
};

// Both α roots and, for CGL5, both signs of m0: 2 (CGL3) or 4 (CGL5) entries.
std::vector<LeadingBehavior> leading_orders(const CglParams& params, Equation eq);

enum class FamilyKind { PoleOfM, ZeroOfM };

struct LaurentFamily {
  FamilyKind kind = FamilyKind::PoleOfM;
  Equation equation = Equation::CGL5;
  LeadingBehavior lead;  // pole families
  cplx j;                // zero families: residue of ψ is j/2
  Cplx arb0, arb1;       // zero families
  LaurentSeries M;
  LaurentSeries psi;
  int order = 0;  // number of computed terms
  unsigned digits = 0;
};

constexpr int kDefaultTerms = 32;
constexpr unsigned kDefaultDigits = 60;

LaurentFamily expand_pole_family(const CglParams& params, const LeadingBehavior& lead,
                                 int n_terms = kDefaultTerms, unsigned digits = kDefaultDigits);

LaurentFamily expand_pole_family(const MpParams& params, const LeadingBehavior& lead,
                                 int n_terms = kDefaultTerms, unsigned digits = kDefaultDigits);

LaurentFamily expand_zero_family(const CglParams& params, cplx j, const Cplx& arb0,
                                 const Cplx& arb1, int n_terms = kDefaultTerms,
                                 unsigned digits = kDefaultDigits, Equation eq = Equation::CGL5);

LaurentFamily expand_zero_family(const MpParams& params, cplx j, const Cplx& arb0,
                                 const Cplx& arb1, int n_terms = kDefaultTerms,
                                 unsigned digits = kDefaultDigits, Equation eq = Equation::CGL5);

// Largest coefficient of the two polynomial forms of the real system,
//   2MM'' - M'^2 - 2csi MM' - 4(Mψ)^2 + 4e_r M^4 + 4d_r M^3 + 4g_i M^2
//   (Mψ)' - csi Mψ + e_i M^3 + d_i M^2 - g_r M
// over all exponents determined by the truncated series, each divided by the
// sum of the moduli of the terms contributing to it.
double series_substitute_residual(const CglParams& params, const LaurentFamily& fam);
double series_substitute_residual(const MpParams& params, const LaurentFamily& fam);

}  // namespace cglwaves
