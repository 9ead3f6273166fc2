#pragma once

// Closed forms transcribed by hand for the tests, kept apart from the library
// so that a slip in one is not silently shared by the other.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>

#include "cglwaves/model.hpp"

namespace ref {

using cplx = std::complex<double>;
using cglwaves::CglParams;

struct Scaled {
  cplx value;
  double scale;
  double rel() const { return std::abs(value) / scale; }
};

inline Scaled sum(std::initializer_list<cplx> terms) {
  cplx s = 0.0;
  double m = 1.0;
  for (cplx t : terms) {
    s += t;
    m = std::max(m, std::abs(t));
  }
  return {s, m};
}

// ---- the reduced real system ----

inline Scaled system_first(const CglParams& p, cplx M, cplx M1, cplx M2, cplx psi) {
  return sum({M2 / (2.0 * M), -M1 * M1 / (4.0 * M * M), -p.csi * M1 / (2.0 * M), -psi * psi,
              p.e_r * M * M, p.d_r * M, cplx(p.g_i)});
}

inline Scaled system_second(const CglParams& p, cplx M, cplx M1, cplx psi, cplx psi1) {
  return sum({psi1, psi * M1 / M, -p.csi * psi, p.e_i * M * M, p.d_i * M, cplx(-p.g_r)});
}

inline cplx G(const CglParams& p, cplx M, cplx M1, cplx M2) {
  return 0.5 * M * M2 - 0.25 * M1 * M1 - 0.5 * p.csi * M * M1 + p.e_r * std::pow(M, 4) +
         p.d_r * M * M * M + p.g_i * M * M;
}

inline cplx G_prime(const CglParams& p, cplx M, cplx M1, cplx M2, cplx M3) {
  return 0.5 * M * M3 - 0.5 * p.csi * (M1 * M1 + M * M2) + 4.0 * p.e_r * M * M * M * M1 +
         3.0 * p.d_r * M * M * M1 + 2.0 * p.g_i * M * M1;
}

inline Scaled order3(const CglParams& p, cplx M, cplx M1, cplx M2, cplx M3) {
  cplx g = G(p, M, M1, M2), gp = G_prime(p, M, M1, M2, M3);
  cplx h = p.e_i * M * M + p.d_i * M - p.g_r;
  cplx a = (gp - 2.0 * p.csi * g) * (gp - 2.0 * p.csi * g), b = -4.0 * g * M * M * h * h;
  return sum({a, b});
}

// ψ² = G/M² and ψ = (2 csi G - G')/(2M²(e_i M² + d_i M - g_r))
inline Scaled psi_squared(const CglParams& p, cplx M, cplx M1, cplx M2, cplx psi) {
  return sum({psi * psi, -G(p, M, M1, M2) / (M * M)});
}

inline Scaled psi_from_m(const CglParams& p, cplx M, cplx M1, cplx M2, cplx M3, cplx psi) {
  cplx g = G(p, M, M1, M2), gp = G_prime(p, M, M1, M2, M3);
  return sum({psi, -(2.0 * p.csi * g - gp) / (2.0 * M * M * (p.e_i * M * M + p.d_i * M - p.g_r))});
}

// ---- subequations on the slice ----

// First order, fourth degree subequation for M, with the corrected last term.
inline Scaled F4(cplx M, cplx M1, double ex, double ey, double ei, double csi) {
  cplx M2 = M * M;
  return sum({std::pow(M1, 4), -2.0 * csi * M * M1 * M1 * M1,
              72.0 / ei * ex * M1 * M1 * (ei * M2 - 12.0 * ey),
              cplx(16.0 * 6561.0 * std::pow(ex, 4) / (ei * ei)),
              648.0 * ex * ex / (ei * ei) * (288.0 * ey * ey + 24.0 * ei * ey * M2 - ei * ei * M2 * M2),
              -1.0 / (3.0 * ei) * M2 * std::pow(ei * M2 - 48.0 * ey, 3)});
}

// Subequation for ψ with the four corrected coefficients.
inline Scaled Fpsi(cplx p, cplx d, double ex, double ey, double csi) {
  auto P = [&](int n) { return std::pow(p, n); };
  cplx quad = -csi * (27.0 * ex * ex - 324.0 * ey * ey) + 1440.0 * ex * ey * p + 27.0 * csi * ex * P(2) +
              16.0 * ey * P(3) + csi * P(4) / 3.0;
  cplx rest = -csi * P(8) / 3.0 - 32.0 * ey * P(7) / 3.0 - 26.0 * csi * ex * P(6) -
              1632.0 * ex * ey * P(5) - csi * (477.0 * ex * ex + 552.0 * ey * ey) * P(4) -
              288.0 * ey * (165.0 * ex * ex + 4.0 * ey * ey) * P(3) +
              csi * ex * (2106.0 * ex * ex - 31320.0 * ey * ey) * P(2) +
              128.0 * 729.0 * (ex * ex - 4.0 * ey * ey) * ex * ey * p +
              243.0 * csi * (-9.0 * std::pow(ex, 4) + 56.0 * ex * ex * ey * ey - 144.0 * std::pow(ey, 4));
  return sum({csi * std::pow(d, 4), -4.0 * csi * d * d * d * (csi * p + 24.0 * ey), 8.0 * d * d * quad,
              16.0 * rest});
}

// Complex subequation for the logarithmic derivative of the amplitude.
inline Scaled FdlogA(cplx D, cplx D1, double ey, double csi, cplx j) {
  cplx a = 2.0 * D1 + csi * D + 24.0 * j * ey;
  cplx b = D1 - csi * D - 24.0 * j * ey;
  cplx c = 16.0 * (4.0 * D * D * D - 3.0 * csi * D * D) - 9.0 * (csi * csi + 64.0 * j * ey) * (4.0 * D + csi);
  return sum({a * b * b, std::pow(2.0, -11) * c * c});
}

// ---- leading behaviour near the poles ----

// Roots of 4e_i α² - 8e_r α - 3e_i = 0 (CGL5) and d_i α² - 3d_r α - 2d_i = 0 (CGL3).
inline std::array<double, 2> alpha_cgl5(double er, double ei) {
  double s = std::sqrt(64.0 * er * er + 48.0 * ei * ei);
  return {(8.0 * er + s) / (8.0 * ei), (8.0 * er - s) / (8.0 * ei)};
}
inline std::array<double, 2> alpha_cgl3(double dr, double di) {
  double s = std::sqrt(9.0 * dr * dr + 8.0 * di * di);
  return {(3.0 * dr + s) / (2.0 * di), (3.0 * dr - s) / (2.0 * di)};
}

inline std::array<cplx, 2> fuchs_cgl5(double alpha) {
  cplx s = std::sqrt(cplx(1.0 - 32.0 * alpha * alpha));
  return {(5.0 + s) / 2.0, (5.0 - s) / 2.0};
}
inline std::array<cplx, 2> fuchs_cgl3(double alpha) {
  cplx s = std::sqrt(cplx(1.0 - 24.0 * alpha * alpha));
  return {(7.0 + s) / 2.0, (7.0 - s) / 2.0};
}

// First two coefficients of M and ψ at a pole of M.
struct PoleHead {
  cplx M0, M1, psi0, psi1;
};

inline PoleHead head_cgl5(const CglParams& p, cplx m0) {
  cplx den = 4.0 * (1.0 + p.e_i * p.e_i * std::pow(m0, 4));
  PoleHead h;
  h.M0 = m0;
  h.M1 = m0 * (p.csi / 4.0 + (2.0 * p.d_r * m0 - 2.0 * p.e_i * p.d_i * m0 * m0 * m0) / den);
  h.psi0 = p.e_i * m0 * m0 / 2.0;
  h.psi1 = p.e_i * m0 * m0 * p.csi / 8.0 +
           m0 * (4.0 * p.d_i + 5.0 * p.e_i * p.d_r * m0 * m0 - p.e_i * p.e_i * p.d_i * std::pow(m0, 4)) / den;
  return h;
}

inline PoleHead head_cgl3(const CglParams& p, cplx m0) {
  return {m0, m0 * p.csi / 3.0, p.d_i * m0 / 3.0, p.d_i * m0 / 3.0 * p.csi / 6.0};
}

// Zero of M: a0·χ/M = 1 + a1 χ + z2 χ² + ..., ψ = (j/2)χ^{-1}(1 + q1 χ + q2 χ² + q3 χ³ + ...).
// z2 carries the csi²/3 term and q3 the factor -j that the recursion requires.
struct ZeroHead {
  cplx z1, z2, q1, q2, q3;
};

inline ZeroHead head_zero(const CglParams& p, cplx j, double a0, double a1) {
  const double c = p.csi, gr = p.g_r, gi = p.g_i;
  ZeroHead h;
  h.z1 = a1;
  h.z2 = a1 * a1 + c * a1 + c * c / 3.0 - j * gr / 3.0 + 2.0 * gi / 3.0;
  h.q1 = c + a1;
  h.q2 = a1 * a1 + 2.0 * c * a1 + 2.0 * gi / 3.0 - 4.0 * j * gr / 3.0 + 5.0 * c * c / 6.0;
  cplx brace = (gr + j * gi) * c + 3.0 * j * c * c * c / 4.0 - (3.0 * p.d_i - j * p.d_r) * a0 / 4.0 +
               (11.0 * j * c * c + 4.0 * gr + 4.0 * j * gi) * a1 / 4.0 + 3.0 * j * c * a1 * a1 +
               j * a1 * a1 * a1;
  h.q3 = -j * brace;
  return h;
}

// ---- Landen pair ----

inline std::array<cplx, 2> landen_polynomials(cplx g2, cplx g3, cplx G2, cplx G3) {
  return {-32.0 * g2 * g3 + 22.0 * g3 * G2 + 11.0 * g2 * G3 - G2 * G3,
          196.0 * g2 * g2 * g2 + 49.0 * g2 * g2 * G2 - 7260.0 * g3 * g3 + 660.0 * g3 * G3 - 15.0 * G3 * G3};
}

// Sum of the moduli of the terms of each relation above.
inline std::array<double, 2> landen_polynomial_scales(cplx g2, cplx g3, cplx G2, cplx G3) {
  double a = std::abs(g2), b = std::abs(g3), A = std::abs(G2), B = std::abs(G3);
  return {32.0 * a * b + 22.0 * b * A + 11.0 * a * B + A * B,
          196.0 * a * a * a + 49.0 * a * a * A + 7260.0 * b * b + 660.0 * b * B + 15.0 * B * B};
}

// Determinant of the linearization at a pole, as a function of the exponent r of the
// perturbation (M, ψ) -> (M + u χ^{r+vM}, ψ + v χ^{r-1}); vanishes at the Fuchs indices.
inline Scaled indicial_cgl5(const CglParams& p, cplx m, cplx psi0, cplx r) {
  cplx a = m * (4.0 + 2.0 * (r - 1.0) * (r - 2.0) + 2.0 * (r - 1.0) - 8.0 * psi0 * psi0 +
                16.0 * p.e_r * m * m);
  cplx b = -8.0 * m * m * psi0;
  cplx c = (r - 2.0) * psi0 + 3.0 * p.e_i * m * m;
  cplx d = (r - 2.0) * m;
  return sum({a * d, -b * c});
}

inline Scaled indicial_cgl3(const CglParams& p, cplx m, cplx psi0, cplx r) {
  cplx a = m * (12.0 + 2.0 * (r - 2.0) * (r - 3.0) + 4.0 * (r - 2.0) - 8.0 * psi0 * psi0) +
           12.0 * p.d_r * m * m;
  cplx b = -8.0 * m * m * psi0;
  cplx c = (r - 3.0) * psi0 + 2.0 * p.d_i * m;
  cplx d = (r - 3.0) * m;
  return sum({a * d, -b * c});
}

}  // namespace ref
