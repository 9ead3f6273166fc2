#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cglwaves/elliptic.hpp"
#include "cglwaves/errors.hpp"
#include "doctest.h"
#include "lattice_sums.hpp"

using namespace cglwaves;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Case {
  cplx g2, g3;
};

// Positive, negative discriminant and a complex lattice.
const std::vector<Case> kLattices{{-72.0, 76.0}, {4.0, 0.0}, {1.0, 2.0}, {{1.0, 2.0}, {-0.5, 1.0}}};

std::vector<cplx> cell_points(const EllipticInvariants& inv, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<cplx> out;
  while (static_cast<int>(out.size()) < n) {
    cplx z = U(rng) * inv.omega1 + U(rng) * inv.omega3;
    if (std::abs(z) > 0.05 * std::abs(inv.omega1)) out.push_back(z);
  }
  return out;
}

}  // namespace

TEST_CASE("periods reproduce the invariants and orientation") {
  for (const Case& c : kLattices) {
    EllipticInvariants inv = periods_from_invariants(c.g2, c.g3);
    CHECK((inv.omega3 / inv.omega1).imag() > 0.0);
    CHECK(std::abs(inv.q) <= std::exp(-std::numbers::pi * std::sqrt(3.0) / 2.0) + 1e-12);
    CHECK(rel(inv.g2, c.g2) < 1e-12);
    CHECK(rel(inv.g3, c.g3) < 1e-12);
    oracle::Invariants e = oracle::eisenstein_invariants(inv.omega1, inv.omega3);
    CHECK(rel(e.g2, c.g2) < 1e-9);
    CHECK(rel(e.g3, c.g3) < 1e-9);
    CHECK(std::abs(inv.roots[0] + inv.roots[1] + inv.roots[2]) < 1e-12 * (1.0 + std::abs(inv.roots[0])));
    CHECK(rel(eval_wp(inv, inv.omega1).p, inv.roots[0]) < 1e-10);
    CHECK(rel(eval_wp(inv, inv.omega3).p, inv.roots[2]) < 1e-10);
    CHECK(rel(eval_wp(inv, inv.omega1 + inv.omega3).p, inv.roots[1]) < 1e-10);
  }
}

TEST_CASE("roots of known cubics") {
  EllipticInvariants a = periods_from_invariants(-72.0, 76.0);
  double best = 1e300;
  for (cplx e : a.roots) best = std::min(best, std::abs(e - 1.0));
  CHECK(best < 1e-12);
  EllipticInvariants b = periods_from_invariants(4.0, 0.0);
  for (double want : {-1.0, 0.0, 1.0}) {
    double d = 1e300;
    for (cplx e : b.roots) d = std::min(d, std::abs(e - want));
    CHECK(d < 1e-12);
  }
}

TEST_CASE("periods against the period integral") {
  // The real half-period of 4t³+72t-76 (single real root t = 1) is ∫_1^∞ dt/√(4t³+72t-76);
  // t = 1 + s² removes the endpoint singularity.
  EllipticInvariants inv = periods_from_invariants(-72.0, 76.0);
  auto f = [](double s) {
    double t = 1.0 + s * s;
    return 2.0 * s / std::sqrt(4.0 * t * t * t + 72.0 * t - 76.0);
  };
  // Two-point Gauss-Legendre on [0, S]; beyond S the integrand is s^-2 - 1.5 s^-4 + ...
  const double S = 200.0;
  const int n = 4000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double a = S * i / n, b = S * (i + 1) / n, m = 0.5 * (a + b), h = 0.5 * (b - a);
    const double x = h / std::sqrt(3.0);
    sum += h * (f(m - x) + f(m + x));
  }
  sum += 1.0 / S - 0.5 / (S * S * S);
  cplx L = real_period(inv);
  CHECK(std::abs(L.real() / 2.0 - sum) < 1e-8);
}

TEST_CASE("differential equation, parity and small-z expansions") {
  for (const Case& c : kLattices) {
    EllipticInvariants inv = periods_from_invariants(c.g2, c.g3);
    for (cplx z : cell_points(inv, 60, 1)) {
      WpValue w = eval_wp(inv, z), m = eval_wp(inv, -z);
      double scale = 1.0 + std::pow(std::abs(w.p), 3);
      CHECK(std::abs(w.p_prime * w.p_prime - (4.0 * w.p * w.p * w.p - inv.g2 * w.p - inv.g3)) < 1e-10 * scale);
      CHECK(rel(w.p_second, 6.0 * w.p * w.p - inv.g2 / 2.0) < 1e-10 * (1.0 + std::norm(w.p)));
      CHECK(rel(m.p, w.p) < 1e-13);
      CHECK(rel(m.p_prime, -w.p_prime) < 1e-13);
      CHECK(rel(eval_zeta(inv, -z), -eval_zeta(inv, z)) < 1e-13);
      CHECK(rel(eval_sigma(inv, -z), -eval_sigma(inv, z)) < 1e-13);
    }
    cplx z = 1e-2 * inv.omega1 * cplx(0.6, 0.8);
    cplx wp = 1.0 / (z * z) + inv.g2 / 20.0 * z * z + inv.g3 / 28.0 * std::pow(z, 4);
    CHECK(std::abs(eval_wp(inv, z).p - wp) < 1e-9 * std::abs(wp));
    cplx ze = 1.0 / z - inv.g2 / 60.0 * std::pow(z, 3);
    CHECK(std::abs(eval_zeta(inv, z) - ze) < 1e-9 * std::abs(ze));
    CHECK(std::abs(eval_sigma(inv, z) / z - 1.0) < 1e-6);
  }
}

TEST_CASE("periodicity, quasi-periodicity and the Legendre relation") {
  for (const Case& c : kLattices) {
    EllipticInvariants inv = periods_from_invariants(c.g2, c.g3);
    CHECK(std::abs(inv.eta1 * inv.omega3 - inv.eta3 * inv.omega1 - cplx(0.0, std::numbers::pi / 2.0)) < 1e-12);
    for (cplx z : cell_points(inv, 20, 2)) {
      CHECK(rel(eval_wp(inv, z + 2.0 * inv.omega1).p, eval_wp(inv, z).p) < 1e-10);
      CHECK(rel(eval_wp(inv, z + 2.0 * inv.omega3).p, eval_wp(inv, z).p) < 1e-10);
      CHECK(rel(eval_zeta(inv, z + 2.0 * inv.omega1), eval_zeta(inv, z) + 2.0 * inv.eta1) < 1e-10);
      CHECK(rel(eval_zeta(inv, z + 2.0 * inv.omega3), eval_zeta(inv, z) + 2.0 * inv.eta3) < 1e-10);
      cplx s = eval_sigma(inv, z);
      CHECK(rel(eval_sigma(inv, z + 2.0 * inv.omega1), -std::exp(2.0 * inv.eta1 * (z + inv.omega1)) * s) <
            1e-9 * std::max(1.0, std::abs(std::exp(2.0 * inv.eta1 * (z + inv.omega1)) * s)));
    }
  }
}

TEST_CASE("zeta and sigma are consistent with wp") {
  EllipticInvariants inv = periods_from_invariants(-72.0, 76.0);
  const double h = 1e-4;
  for (cplx z : cell_points(inv, 20, 3)) {
    cplx dz = (eval_zeta(inv, z + h) - eval_zeta(inv, z - h)) / (2.0 * h);
    CHECK(rel(-dz, eval_wp(inv, z).p) < 1e-6);
    cplx ds = (std::log(eval_sigma(inv, z + h)) - std::log(eval_sigma(inv, z - h))) / (2.0 * h);
    CHECK(rel(ds, eval_zeta(inv, z)) < 1e-6);
  }
  // ζ(u+v) + ζ(u-v) - 2ζ(u) = ℘'(u)/(℘(u) - ℘(v))
  auto pts = cell_points(inv, 20, 4);
  for (size_t i = 0; i + 1 < pts.size(); i += 2) {
    cplx u = pts[i], v = 0.5 * pts[i + 1];
    WpValue wu = eval_wp(inv, u);
    cplx lhs = eval_zeta(inv, u + v) + eval_zeta(inv, u - v) - 2.0 * eval_zeta(inv, u);
    CHECK(rel(lhs, wu.p_prime / (wu.p - eval_wp(inv, v).p)) < 1e-9);
  }
}

TEST_CASE("addition theorem") {
  EllipticInvariants inv = periods_from_invariants(-72.0, 76.0);
  auto pts = cell_points(inv, 40, 5);
  for (size_t i = 0; i + 1 < pts.size(); i += 2) CHECK(check_addition(inv, pts[i], pts[i + 1]) < 1e-9);
  CHECK_THROWS_AS(check_addition(inv, pts[0], -pts[0]), Error);
}

TEST_CASE("inversion round trip") {
  for (const Case& c : kLattices) {
    EllipticInvariants inv = periods_from_invariants(c.g2, c.g3);
    for (cplx z : cell_points(inv, 20, 6)) {
      WpValue w = eval_wp(inv, z);
      cplx back = invert_wp(inv, w.p, w.p_prime);
      CHECK(std::abs(reduce_to_cell(inv, back - z)) < 1e-8 * std::abs(inv.omega1));
    }
  }
}

TEST_CASE("homogeneity") {
  const cplx lam(0.7, 0.4);
  EllipticInvariants a = periods_from_invariants(-72.0, 76.0);
  EllipticInvariants b = periods_from_invariants(-72.0 * std::pow(lam, -4), 76.0 * std::pow(lam, -6));
  for (cplx z : cell_points(a, 20, 7)) {
    CHECK(rel(eval_wp(b, lam * z).p, eval_wp(a, z).p / (lam * lam)) < 1e-10);
    CHECK(rel(eval_zeta(b, lam * z), eval_zeta(a, z) / lam) < 1e-10);
    CHECK(rel(eval_sigma(b, lam * z), lam * eval_sigma(a, z)) < 1e-10);
  }
}

TEST_CASE("lattice from half-periods and reduction") {
  EllipticInvariants a = periods_from_invariants({1.0, 2.0}, {-0.5, 1.0});
  EllipticInvariants b = lattice_from_half_periods(a.omega1 + a.omega3, -a.omega1);
  CHECK(rel(b.g2, a.g2) < 1e-12);
  CHECK(rel(b.g3, a.g3) < 1e-12);
  long m = 0, n = 0;
  cplx z = cplx(0.1, 0.05) + 6.0 * a.omega1 - 4.0 * a.omega3;
  cplx r = reduce_to_cell(a, z, &m, &n);
  CHECK(std::abs(r - cplx(0.1, 0.05)) < 1e-12);
  CHECK(m == 3);
  CHECK(n == -2);
}

TEST_CASE("agreement with direct lattice sums") {
  for (const Case& c : kLattices) {
    EllipticInvariants inv = periods_from_invariants(c.g2, c.g3);
    for (cplx z : cell_points(inv, 8, 8)) {
      oracle::LatticeSums o = oracle::lattice_sums(inv.omega1, inv.omega3, z, 8);
      CHECK(rel(eval_wp(inv, z).p, o.wp) < 1e-8);
      CHECK(rel(eval_zeta(inv, z), o.zeta) < 1e-8);
      CHECK(rel(eval_sigma(inv, z), o.sigma) < 1e-8);
    }
  }
}

TEST_CASE("error paths") {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Unresolvable;
  };
  CHECK(code([] { periods_from_invariants(0.0, 0.0); }) == ErrorCode::DegenerateLattice);
  CHECK(code([] { periods_from_invariants(3.0, 1.0); }) == ErrorCode::DegenerateLattice);
  EllipticInvariants inv = periods_from_invariants(-72.0, 76.0);
  CHECK(code([&] { eval_wp(inv, 2.0 * inv.omega1 + 1e-12); }) == ErrorCode::NearLatticePoint);
  CHECK(code([&] { eval_zeta(inv, 0.0); }) == ErrorCode::NearLatticePoint);
  CHECK(std::abs(eval_sigma(inv, 0.0)) == 0.0);
}
