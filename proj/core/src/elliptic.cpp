#include "cglwaves/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "cglwaves/errors.hpp"

namespace cglwaves {
namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

struct Theta1 {
  cplx t0, t1, t2, t3;  // θ1 and its first three v-derivatives
};

// θ1(v) = 2 Σ (-1)^n q^{(n+1/2)^2} sin((2n+1)v), q = exp(iπτ)
Theta1 theta1(cplx tau, cplx v) {
  Theta1 r{};
  for (int n = 0; n < 80; ++n) {
    double a = 2.0 * n + 1.0;
    double h = n + 0.5;
    cplx qn = std::exp(kI * kPi * tau * (h * h));
    if (n & 1) qn = -qn;
    cplx s = std::sin(a * v), c = std::cos(a * v);
    cplx d0 = qn * s, d1 = qn * a * c, d2 = -qn * a * a * s, d3 = -qn * a * a * a * c;
    r.t0 += d0;
    r.t1 += d1;
    r.t2 += d2;
    r.t3 += d3;
    double mag = std::abs(qn) * std::exp(a * std::abs(v.imag())) * a * a * a;
    if (n > 2 && mag < 1e-18 * (std::abs(r.t0) + std::abs(r.t1) + 1e-300)) break;
  }
  r.t0 *= 2.0;
  r.t1 *= 2.0;
  r.t2 *= 2.0;
  r.t3 *= 2.0;
  return r;
}

struct ThetaConstants {
  cplx th2, th4, th1p, th1ppp;
};

ThetaConstants theta_constants(cplx tau) {
  ThetaConstants c{};
  cplx th4 = 1.0;
  for (int n = 0; n < 60; ++n) {
    double h = n + 0.5;
    cplx qh = std::exp(kI * kPi * tau * (h * h));
    double a = 2.0 * n + 1.0;
    double sg = (n & 1) ? -1.0 : 1.0;
    c.th2 += 2.0 * qh;
    c.th1p += 2.0 * sg * a * qh;
    c.th1ppp -= 2.0 * sg * a * a * a * qh;
    if (n > 0) {
      cplx qn = std::exp(kI * kPi * tau * double(n * n));
      th4 += 2.0 * sg * qn;
    }
    if (n > 2 && std::abs(qh) * a * a * a < 1e-19) break;
  }
  c.th4 = th4;
  return c;
}

std::array<cplx, 3> cubic_roots(cplx g2, cplx g3) {
  // 4t^3 - g2 t - g3 = 0  ->  t^3 + p t + r = 0
  cplx p = -g2 / 4.0, r = -g3 / 4.0;
  cplx disc = std::sqrt(r * r / 4.0 + p * p * p / 27.0);
  cplx u3a = -r / 2.0 + disc, u3b = -r / 2.0 - disc;
  cplx u3 = std::abs(u3a) >= std::abs(u3b) ? u3a : u3b;
  std::array<cplx, 3> t{};
  if (std::abs(u3) == 0.0) {
    t = {0.0, 0.0, 0.0};
  } else {
    cplx u = std::pow(u3, 1.0 / 3.0);
    cplx w = std::exp(kI * (2.0 * kPi / 3.0));
    for (int k = 0; k < 3; ++k) {
      cplx uk = u * std::pow(w, k);
      t[k] = uk - p / (3.0 * uk);
    }
  }
  for (auto& x : t) {
    for (int it = 0; it < 4; ++it) {
      cplx f = 4.0 * x * x * x - g2 * x - g3;
      cplx d = 12.0 * x * x - g2;
      if (std::abs(d) == 0.0) break;
      x -= f / d;
    }
  }
  return t;
}

cplx agm(cplx a, cplx b) {
  for (int it = 0; it < 100; ++it) {
    cplx a1 = 0.5 * (a + b);
    cplx g = std::sqrt(a * b);
    if (std::abs(a1 - g) > std::abs(a1 + g)) g = -g;
    a = a1;
    b = g;
    if (std::abs(a - b) <= 1e-16 * std::abs(a)) break;
  }
  return a;
}

cplx optimal_sign(cplx a, cplx b) { return std::abs(a - b) > std::abs(a + b) ? -b : b; }

}  // namespace

EllipticInvariants lattice_from_half_periods(cplx w1, cplx w3) {
  if (std::abs((w3 / w1).imag()) < 1e-14) {
    throw Error(ErrorCode::DegenerateLattice, "half-periods are collinear");
  }
  if ((w3 / w1).imag() < 0) w3 = -w3;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(w3) < std::abs(w1)) {
      cplx t = w1;
      w1 = w3;
      w3 = -t;
    }
    double n = std::round((w3 / w1).real());
    w3 -= n * w1;
    if (std::abs(w3) >= std::abs(w1) * (1.0 - 1e-14)) break;
  }
  EllipticInvariants inv{};
  inv.omega1 = w1;
  inv.omega3 = w3;
  inv.tau = w3 / w1;
  inv.q = std::exp(kI * kPi * inv.tau);
  ThetaConstants tc = theta_constants(inv.tau);
  cplx f = kPi * kPi / (12.0 * w1 * w1);
  cplx t2 = std::pow(tc.th2, 4), t4 = std::pow(tc.th4, 4);
  inv.roots = {f * (t2 + 2.0 * t4), f * (t2 - t4), -f * (2.0 * t2 + t4)};
  const auto& e = inv.roots;
  inv.g2 = 2.0 * (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
  inv.g3 = 4.0 * e[0] * e[1] * e[2];
  inv.discriminant = inv.g2 * inv.g2 * inv.g2 - 27.0 * inv.g3 * inv.g3;
  inv.theta1_prime0 = tc.th1p;
  inv.eta1 = -kPi * kPi * tc.th1ppp / (12.0 * w1 * tc.th1p);
  inv.eta3 = (inv.eta1 * w3 - kI * kPi / 2.0) / w1;
  return inv;
}

EllipticInvariants periods_from_invariants(cplx g2, cplx g3) {
  cplx delta = g2 * g2 * g2 - 27.0 * g3 * g3;
  double scale = std::max({1.0, std::pow(std::abs(g2), 3), std::pow(std::abs(g3), 2)});
  if (std::abs(delta) < 1e-12 * scale) {
    throw Error(ErrorCode::DegenerateLattice, "discriminant vanishes");
  }
  auto r = cubic_roots(g2, g3);
  std::array<int, 3> perm{0, 1, 2};
  double gscale = std::abs(g2) + std::abs(g3);
  do {
    cplx e1 = r[perm[0]], e2 = r[perm[1]], e3 = r[perm[2]];
    cplx a = std::sqrt(e1 - e3);
    cplx b = optimal_sign(a, std::sqrt(e1 - e2));
    cplx c = optimal_sign(a, std::sqrt(e2 - e3));
    cplx w1 = kPi / (2.0 * agm(a, b));
    cplx w3 = kI * kPi / (2.0 * agm(a, c));
    if (!std::isfinite(std::abs(w1)) || !std::isfinite(std::abs(w3))) continue;
    if (std::abs((w3 / w1).imag()) < 1e-12) continue;
    EllipticInvariants inv = lattice_from_half_periods(w1, w3);
    double err = std::abs(inv.g2 - g2) + std::abs(inv.g3 - g3);
    if (err <= 1e-9 * gscale) {
      inv.g2 = g2;
      inv.g3 = g3;
      inv.discriminant = delta;
      for (auto& x : inv.roots) {
        cplx f = 4.0 * x * x * x - g2 * x - g3;
        cplx d = 12.0 * x * x - g2;
        if (std::abs(d) > 0) x -= f / d;
      }
      return inv;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  throw Error(ErrorCode::Unresolvable, "no period pair reproduces the invariants");
}

cplx reduce_to_cell(const EllipticInvariants& inv, cplx z, long* m, long* n) {
  cplx a = 2.0 * inv.omega1, b = 2.0 * inv.omega3;
  double det = a.real() * b.imag() - a.imag() * b.real();
  double s = (z.real() * b.imag() - z.imag() * b.real()) / det;
  double t = (a.real() * z.imag() - a.imag() * z.real()) / det;
  long mm = std::lround(s), nn = std::lround(t);
  if (m) *m = mm;
  if (n) *n = nn;
  return z - double(mm) * a - double(nn) * b;
}

WpValue eval_wp(const EllipticInvariants& inv, cplx z) {
  cplx zr = reduce_to_cell(inv, z);
  if (std::abs(zr) < 1e-8 * std::abs(inv.omega1)) {
    throw Error(ErrorCode::NearLatticePoint, "℘ evaluated at a lattice point");
  }
  cplx k = kPi / (2.0 * inv.omega1);
  Theta1 t = theta1(inv.tau, k * zr);
  WpValue w{};
  w.p = -inv.eta1 / inv.omega1 - k * k * (t.t2 * t.t0 - t.t1 * t.t1) / (t.t0 * t.t0);
  w.p_prime = -k * k * k *
              (t.t3 * t.t0 * t.t0 - 3.0 * t.t2 * t.t1 * t.t0 + 2.0 * t.t1 * t.t1 * t.t1) /
              (t.t0 * t.t0 * t.t0);
  w.p_second = 6.0 * w.p * w.p - inv.g2 / 2.0;
  return w;
}

cplx eval_zeta(const EllipticInvariants& inv, cplx z) {
  long m = 0, n = 0;
  cplx zr = reduce_to_cell(inv, z, &m, &n);
  if (std::abs(zr) < 1e-8 * std::abs(inv.omega1)) {
    throw Error(ErrorCode::NearLatticePoint, "ζ evaluated at a lattice point");
  }
  cplx k = kPi / (2.0 * inv.omega1);
  Theta1 t = theta1(inv.tau, k * zr);
  return inv.eta1 * zr / inv.omega1 + k * t.t1 / t.t0 + 2.0 * double(m) * inv.eta1 +
         2.0 * double(n) * inv.eta3;
}

cplx eval_sigma(const EllipticInvariants& inv, cplx z) {
  long m = 0, n = 0;
  cplx zr = reduce_to_cell(inv, z, &m, &n);
  cplx k = kPi / (2.0 * inv.omega1);
  Theta1 t = theta1(inv.tau, k * zr);
  cplx s = (2.0 * inv.omega1 / kPi) * std::exp(inv.eta1 * zr * zr / (2.0 * inv.omega1)) * t.t0 /
           inv.theta1_prime0;
  if (m == 0 && n == 0) return s;
  double dm = double(m), dn = double(n);
  cplx eta_w = 2.0 * dm * inv.eta1 + 2.0 * dn * inv.eta3;
  cplx half_w = dm * inv.omega1 + dn * inv.omega3;
  double sign = ((m + n + m * n) % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp(eta_w * (zr + half_w)) * s;
}

double check_addition(const EllipticInvariants& inv, cplx x1, cplx x2) {
  WpValue a = eval_wp(inv, x1), b = eval_wp(inv, x2);
  if (std::abs(a.p - b.p) < 1e-10 * (1.0 + std::abs(a.p))) {
    throw Error(ErrorCode::DegenerateArguments, "℘(x1) = ℘(x2)");
  }
  WpValue s = eval_wp(inv, x1 + x2);
  cplx ratio = (a.p_prime - b.p_prime) / (a.p - b.p);
  return std::abs(s.p + a.p + b.p - 0.25 * ratio * ratio);
}

cplx invert_wp(const EllipticInvariants& inv, cplx p, cplx p_prime) {
  constexpr int kGrid = 64;
  struct Seed {
    double err;
    cplx z;
  };
  std::vector<Seed> seeds;
  seeds.reserve(kGrid * kGrid);
  for (int a = 0; a < kGrid; ++a) {
    for (int b = 0; b < kGrid; ++b) {
      double s = (a + 0.5) / kGrid - 0.5, t = (b + 0.5) / kGrid - 0.5;
      cplx z = 2.0 * s * inv.omega1 + 2.0 * t * inv.omega3;
      WpValue w = eval_wp(inv, z);
      seeds.push_back({std::abs(w.p - p), z});
    }
  }
  std::partial_sort(seeds.begin(), seeds.begin() + 8, seeds.end(),
                    [](const Seed& x, const Seed& y) { return x.err < y.err; });
  double pscale = 1.0 + std::abs(p);
  double dscale = 1.0 + std::abs(p_prime) + std::pow(pscale, 1.5);
  for (int s = 0; s < 8; ++s) {
    cplx z = seeds[s].z;
    try {
      for (int it = 0; it < 100; ++it) {
        WpValue w = eval_wp(inv, z);
        if (std::abs(w.p_prime) == 0.0) break;
        cplx dz = (w.p - p) / w.p_prime;
        z -= dz;
        if (std::abs(dz) < 1e-15 * std::abs(inv.omega1)) break;
      }
      WpValue w = eval_wp(inv, z);
      if (std::abs(w.p_prime + p_prime) < std::abs(w.p_prime - p_prime)) {
        z = -z;
        w.p_prime = -w.p_prime;
      }
      if (std::abs(w.p - p) <= 1e-9 * pscale && std::abs(w.p_prime - p_prime) <= 1e-6 * dscale) {
        return reduce_to_cell(inv, z);
      }
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::InversionFailure, "no point with the requested (℘, ℘') pair");
}

cplx real_period(const EllipticInvariants& inv) {
  cplx best = 0.0;
  for (int m = -4; m <= 4; ++m) {
    for (int n = -4; n <= 4; ++n) {
      if (m == 0 && n == 0) continue;
      cplx w = 2.0 * double(m) * inv.omega1 + 2.0 * double(n) * inv.omega3;
      if (w.real() <= 0 || std::abs(w.imag()) > 1e-10 * std::abs(w)) continue;
      if (best == 0.0 || w.real() < best.real()) best = cplx(w.real(), 0.0);
    }
  }
  return best;
}

}  // namespace cglwaves
