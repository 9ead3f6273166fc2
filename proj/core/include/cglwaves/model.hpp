#pragma once

#include <complex>
#include <optional>

namespace cglwaves {

using cplx = std::complex<double>;

enum class Equation { CGL3, CGL5 };

// Coefficients of i A_t + p A_xx + q|A|^2 A + r|A|^4 A - i γ A = 0 and the
// traveling-wave data (speed c, frequency ω).
struct PhysicalParams {
  cplx p{1.0, 0.0};
  cplx q{0.0, 0.0};
  cplx r{0.0, 0.0};
  double gamma = 0.0;
  double c = 0.0;
  double omega = 0.0;
};

// Reduced real parameters of the (M, ψ) system.
struct CglParams {
  double e_r = 0.0, e_i = 0.0;
  double d_r = 0.0, d_i = 0.0;
  double g_r = 0.0, g_i = 0.0;
  double csi = 0.0;
  double s_r = 0.0, s_i = 0.0;
  std::optional<PhysicalParams> physical;
};

// Jet of (M, ψ) at one point: M with three derivatives, ψ with one.
// Complex so that closed forms can be probed off the real axis.
struct StatePoint {
  cplx M, M1, M2, M3;
  cplx psi, psi1;
};

CglParams reduce_params(const PhysicalParams& phys);

void validate(const CglParams& params, Equation eq);

struct Residual {
  cplx value;
  double scale;  // max(1, largest constituent term)
  double scaled() const { return std::abs(value) / scale; }
};

struct SystemResidual {
  Residual r1;
  Residual r2;
};

// The two lines of the real system:
//   M''/(2M) - M'^2/(4M^2) - csi M'/(2M) - ψ^2 + e_r M^2 + d_r M + g_i
//   ψ' + ψ M'/M - csi ψ + e_i M^2 + d_i M - g_r
SystemResidual residual_system(const CglParams& params, const StatePoint& jet);

// G = M M''/2 - M'^2/4 - csi M M'/2 + e_r M^4 + d_r M^3 + g_i M^2 and G'.
cplx g_function(const CglParams& params, const StatePoint& jet);
cplx g_derivative(const CglParams& params, const StatePoint& jet);

// (G' - 2 csi G)^2 - 4 G M^2 (e_i M^2 + d_i M - g_r)^2
Residual residual_order3(const CglParams& params, const StatePoint& jet);

// ψ recovered from the M-jet: (2 csi G - G') / (2 M^2 (e_i M^2 + d_i M - g_r)).
cplx psi_from_m(const CglParams& params, const StatePoint& jet);

// M'/(2M) + j ψ with j = ±i.
cplx dlog_amplitude(const StatePoint& jet, cplx j = cplx(0.0, 1.0));

}  // namespace cglwaves
