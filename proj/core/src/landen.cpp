#include "cglwaves/landen.hpp"

#include <algorithm>
#include <cmath>

#include "cglwaves/errors.hpp"

namespace cglwaves {

LandenPair landen_descend(const EllipticInvariants& lower, cplx e1) {
  double scale = 1.0 + std::abs(lower.g2) * std::abs(e1) + std::abs(lower.g3) +
                 4.0 * std::pow(std::abs(e1), 3);
  cplx f = 4.0 * e1 * e1 * e1 - lower.g2 * e1 - lower.g3;
  if (std::abs(f) > 1e-8 * scale) {
    throw Error(ErrorCode::NotARoot, "e1 is not a root of 4t^3 - g2 t - g3");
  }
  const cplx half[3] = {lower.omega1, lower.omega1 + lower.omega3, lower.omega3};
  const cplx other[3] = {lower.omega3, lower.omega3, lower.omega1};
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(lower.roots[k] - e1) < std::abs(lower.roots[best] - e1)) best = k;
  }
  LandenPair pair;
  pair.lower = lower;
  pair.e1 = e1;
  pair.omega = half[best];
  pair.upper = lattice_from_half_periods(half[best] / 2.0, other[best]);
  return pair;
}

std::array<cplx, 2> landen_polynomials(cplx g2, cplx g3, cplx G2, cplx G3) {
  return {-32.0 * g2 * g3 + 22.0 * g3 * G2 + 11.0 * g2 * G3 - G2 * G3,
          196.0 * g2 * g2 * g2 + 49.0 * g2 * g2 * G2 - 7260.0 * g3 * g3 + 660.0 * g3 * G3 -
              15.0 * G3 * G3};
}

std::array<double, 4> landen_relations(const LandenPair& pair) {
  const auto& lo = pair.lower;
  const auto& up = pair.upper;
  cplx e1 = pair.e1;
  // remaining lower roots
  std::array<cplx, 3> r = lo.roots;
  std::sort(r.begin(), r.end(),
            [&](cplx a, cplx b) { return std::abs(a - e1) < std::abs(b - e1); });
  cplx e2 = r[1], e3 = r[2];

  cplx other = (std::abs(pair.omega - lo.omega3) < 1e-12 * std::abs(lo.omega3)) ? lo.omega1
                                                                               : lo.omega3;
  cplx E1 = eval_wp(up, other).p;
  cplx E2 = eval_wp(up, pair.omega / 2.0).p;
  cplx E3 = eval_wp(up, pair.omega / 2.0 + other).p;

  std::array<double, 4> out{};
  out[0] = std::abs(E1 + 2.0 * e1) / std::max(1.0, std::abs(e1));
  cplx lhs = (E2 - E3) * (E2 - E3), rhs = 36.0 * e1 * e1 - 4.0 * (e2 - e3) * (e2 - e3);
  out[1] = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});

  cplx g2 = lo.g2, g3 = lo.g3, G2 = up.g2, G3 = up.g3;
  auto p = landen_polynomials(g2, g3, G2, G3);
  double s0 = 32.0 * std::abs(g2 * g3) + 22.0 * std::abs(g3 * G2) + 11.0 * std::abs(g2 * G3) +
              std::abs(G2 * G3);
  double s1 = 196.0 * std::pow(std::abs(g2), 3) + 49.0 * std::norm(g2) * std::abs(G2) +
              7260.0 * std::norm(g3) + 660.0 * std::abs(g3 * G3) + 15.0 * std::norm(G3);
  out[2] = std::abs(p[0]) / std::max(1.0, s0);
  out[3] = std::abs(p[1]) / std::max(1.0, s1);
  return out;
}

double landen_wp_identity(const LandenPair& pair, cplx x) {
  cplx up = eval_wp(pair.upper, x).p;
  cplx lo = eval_wp(pair.lower, x).p;
  cplx e1 = pair.e1;
  cplx rhs = lo - (pair.lower.g2 - 12.0 * e1 * e1) / (4.0 * (lo - e1));
  return std::abs(up - rhs) / std::max(1.0, std::abs(up));
}

double landen_wp_sum_identity(const LandenPair& pair, cplx x) {
  cplx up = eval_wp(pair.upper, x).p;
  cplx rhs = eval_wp(pair.lower, x).p + eval_wp(pair.lower, x - pair.omega).p - pair.e1;
  return std::abs(up - rhs) / std::max(1.0, std::abs(up));
}

LandenResiduals landen_zeta_sigma_identity(const LandenPair& pair, cplx x) {
  const auto& lo = pair.lower;
  cplx w = pair.omega, e1 = pair.e1;
  cplx zw = eval_zeta(lo, w);
  cplx zu = eval_zeta(pair.upper, x);
  cplx zr = eval_zeta(lo, x) + eval_zeta(lo, x - w) + e1 * x + zw;
  cplx su = eval_sigma(pair.upper, x);
  cplx sr = std::exp(e1 * x * x / 2.0 - zw * x) * eval_sigma(lo, x) * eval_sigma(lo, x + w) /
            eval_sigma(lo, w);
  return {std::abs(zu - zr) / std::max(1.0, std::abs(zu)),
          std::abs(su - sr) / std::max(1e-300, std::abs(su))};
}

}  // namespace cglwaves
