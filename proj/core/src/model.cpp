#include "cglwaves/model.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "cglwaves/errors.hpp"

namespace cglwaves {
namespace {

constexpr double kModulusTol = 1e-300;

double max_mag(std::initializer_list<cplx> terms) {
  double m = 1.0;
  for (const auto& t : terms) m = std::max(m, std::abs(t));
  return m;
}

void require_modulus(const StatePoint& jet) {
  if (std::abs(jet.M) < kModulusTol) throw Error(ErrorCode::ZeroModulus, "M vanishes");
}

}  // namespace

CglParams reduce_params(const PhysicalParams& phys) {
  if (std::abs(phys.p) == 0.0) throw Error(ErrorCode::ZeroDispersion, "p = 0");
  CglParams out;
  cplx ip = 1.0 / phys.p;
  cplx e = phys.r * ip, d = phys.q * ip;
  out.e_r = e.real();
  out.e_i = e.imag();
  out.d_r = d.real();
  out.d_i = d.imag();
  out.s_r = ip.real();
  out.s_i = -ip.imag();
  cplx g = cplx(phys.gamma, phys.omega) * ip +
           (phys.c * phys.c * out.s_r / 4.0) * cplx(2.0 * out.s_i, out.s_r);
  out.g_r = g.real();
  out.g_i = g.imag();
  out.csi = phys.c * out.s_i;
  out.physical = phys;
  return out;
}

void validate(const CglParams& params, Equation eq) {
  if (eq == Equation::CGL5 && params.e_i == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "CGL5 requires e_i != 0");
  }
  if (eq == Equation::CGL3) {
    if (params.d_i == 0.0) throw Error(ErrorCode::InvalidArgument, "CGL3 requires d_i != 0");
    if (params.e_r != 0.0 || params.e_i != 0.0) {
      throw Error(ErrorCode::InvalidArgument, "CGL3 requires e_r = e_i = 0");
    }
  }
}

SystemResidual residual_system(const CglParams& P, const StatePoint& j) {
  require_modulus(j);
  const cplx M = j.M, M1 = j.M1, M2 = j.M2;
  cplx t1 = M2 / (2.0 * M), t2 = -M1 * M1 / (4.0 * M * M), t3 = -P.csi * M1 / (2.0 * M);
  cplx t4 = -j.psi * j.psi, t5 = P.e_r * M * M, t6 = P.d_r * M;
  SystemResidual r;
  r.r1.value = t1 + t2 + t3 + t4 + t5 + t6 + P.g_i;
  r.r1.scale = max_mag({t1, t2, t3, t4, t5, t6, cplx(P.g_i)});
  cplx u1 = j.psi1, u2 = j.psi * M1 / M, u3 = -P.csi * j.psi, u4 = P.e_i * M * M, u5 = P.d_i * M;
  r.r2.value = u1 + u2 + u3 + u4 + u5 - P.g_r;
  r.r2.scale = max_mag({u1, u2, u3, u4, u5, cplx(P.g_r)});
  return r;
}

cplx g_function(const CglParams& P, const StatePoint& j) {
  const cplx M = j.M, M1 = j.M1, M2 = j.M2;
  return 0.5 * M * M2 - 0.25 * M1 * M1 - 0.5 * P.csi * M * M1 + P.e_r * M * M * M * M +
         P.d_r * M * M * M + P.g_i * M * M;
}

cplx g_derivative(const CglParams& P, const StatePoint& j) {
  const cplx M = j.M, M1 = j.M1, M2 = j.M2, M3 = j.M3;
  return 0.5 * M * M3 - 0.5 * P.csi * (M1 * M1 + M * M2) + 4.0 * P.e_r * M * M * M * M1 +
         3.0 * P.d_r * M * M * M1 + 2.0 * P.g_i * M * M1;
}

Residual residual_order3(const CglParams& P, const StatePoint& j) {
  require_modulus(j);
  cplx G = g_function(P, j), Gp = g_derivative(P, j);
  cplx Q = P.e_i * j.M * j.M + P.d_i * j.M - P.g_r;
  cplx a = Gp - 2.0 * P.csi * G;
  cplx b = 4.0 * G * j.M * j.M * Q * Q;
  return {a * a - b, max_mag({a * a, b})};
}

cplx psi_from_m(const CglParams& P, const StatePoint& j) {
  require_modulus(j);
  cplx G = g_function(P, j), Gp = g_derivative(P, j);
  cplx Q = P.e_i * j.M * j.M + P.d_i * j.M - P.g_r;
  return (2.0 * P.csi * G - Gp) / (2.0 * j.M * j.M * Q);
}

cplx dlog_amplitude(const StatePoint& jet, cplx j) {
  require_modulus(jet);
  return jet.M1 / (2.0 * jet.M) + j * jet.psi;
}

}  // namespace cglwaves
