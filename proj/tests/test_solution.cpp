#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "cglwaves/errors.hpp"
#include "cglwaves/laurent.hpp"
#include "cglwaves/solution.hpp"
#include "cglwaves/verify.hpp"
#include "doctest.h"
#include "reference_forms.hpp"

using namespace cglwaves;

namespace {

const double kSqrt3 = std::sqrt(3.0);

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Unresolvable;
}

double lattice_distance(const EllipticInvariants& inv, cplx a, cplx b) {
  return std::abs(reduce_to_cell(inv, a - b));
}

struct SliceCase {
  double ex, ey, ei;
  int sign;
  cplx j;
};

const std::vector<SliceCase> kSlices{{1.0, 1.0, 2.0, 1, {0.0, 1.0}},
                                     {1.0, 1.0, 2.0, 1, {0.0, -1.0}},
                                     {0.7, -0.4, -1.3, 1, {0.0, 1.0}},
                                     {2.0, 0.5, 1.5, -1, {0.0, 1.0}}};

}  // namespace

TEST_CASE("slice parameters") {
  EllipticSliceParams s = make_slice(1.0, 1.0, 2.0);
  CHECK(std::abs(s.csi - std::sqrt(48.0)) < 1e-14);
  CHECK(s.g_r == 36.0);
  CHECK(std::abs(s.g_i + 9.0) < 1e-13);
  CHECK(rel(s.N0 * s.N0, -324.0 * s.j / (s.e_i * (3.0 * s.ex + 4.0 * s.j * s.ey))) < 1e-14);
  CglParams p = s.params();
  CHECK(p.e_r == 0.0);
  CHECK(p.d_r == 0.0);
  CHECK(p.d_i == 0.0);
  CHECK(p.e_i == 2.0);
  EllipticSliceParams m = make_slice(1.0, 1.0, 2.0, -1);
  CHECK(m.csi < 0.0);
  CHECK(code_of([] { make_slice(0.0, 1.0, 2.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_slice(1.0, 1.0, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_slice(1.0, 1.0, 2.0, 1, cplx(1.0, 0.0)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("lattices of the slice") {
  EllipticSolution sol(make_slice(1.0, 1.0, 2.0));
  CHECK(rel(sol.lower().g2, -72.0) < 1e-14);
  CHECK(rel(sol.lower().g3, 76.0) < 1e-14);
  CHECK(rel(sol.upper().g2, 348.0) < 1e-12);
  CHECK(rel(sol.upper().g3, 664.0) < 1e-12);
}

TEST_CASE("pole affixes") {
  for (const SliceCase& c : kSlices) {
    EllipticSliceParams s = make_slice(c.ex, c.ey, c.ei, c.sign, c.j);
    EllipticSolution sol(s);
    const PoleAffixSet& a = sol.affixes();
    const cplx j = s.j, b = 3.0 * s.ex + 4.0 * j * s.ey;
    CHECK(rel(s.ex * a.r_aux * a.r_aux, 3.0 * j * kSqrt3 * b) < 1e-13);
    for (int k = 0; k < 2; ++k) {
      const PoleAffix& p = a.psi_complex_poles[static_cast<size_t>(k)];
      double sg = k == 0 ? 1.0 : -1.0;
      CHECK(rel(eval_wp(sol.upper(), p.xi).p, -2.0 * s.ex + sg * j * kSqrt3 * b) < 1e-10);
    }
    // ξ0 + ξ1 - ξj is a half-period of the upper lattice with ℘ = -2ex.
    cplx h = a.psi_complex_poles[0].xi + a.psi_complex_poles[1].xi - a.psi_real_pole.xi;
    WpValue w = eval_wp(sol.upper(), h);
    CHECK(rel(w.p, -2.0 * s.ex) < 1e-9);
    CHECK(std::abs(w.p_prime) < 1e-7 * std::max(1.0, std::pow(std::abs(w.p), 1.5)));
    CHECK(std::abs(affix_zeta_relation(sol)) < 1e-9);
    for (const PoleAffix& p : a.M_poles) {
      WpValue v = eval_wp(sol.lower(), p.xi);
      CHECK(rel(v.p, p.wp) < 1e-9);
      CHECK(rel(v.p_prime, p.wp_prime) < 1e-9);
    }
  }
}

TEST_CASE("residues of M") {
  for (const SliceCase& c : kSlices) {
    EllipticSolution sol(make_slice(c.ex, c.ey, c.ei, c.sign, c.j));
    const auto& poles = sol.affixes().M_poles;
    auto M = [&](cplx z) { return eval_M_wp(sol, z).value(); };
    double sep = 1e300;
    for (size_t a = 0; a < 4; ++a)
      for (size_t b = a + 1; b < 4; ++b) sep = std::min(sep, lattice_distance(sol.lower(), poles[a].xi, poles[b].xi));
    cplx total = 0.0;
    for (size_t k = 0; k < 4; ++k) {
      cplx r = contour_residue(M, poles[k].xi, 0.25 * sep);
      total += r;
      // Residues are the ζ-sum constant times powers of j.
      CHECK(rel(r, sol.zeta_sum_constant() * std::pow(sol.slice().j, static_cast<int>(k))) < 1e-9);
    }
    CHECK(std::abs(total) < 1e-9);
    cplx r0 = sol.residue_at_psi_pole0();
    CHECK(rel(std::pow(r0, 4), 3.0 / (c.ei * c.ei)) < 1e-9);
    CHECK(rel(std::pow(sol.zeta_sum_constant(), 4), 3.0 / (c.ei * c.ei)) < 1e-12);
  }
}

TEST_CASE("local expansion of M matches the pole families") {
  EllipticSliceParams s = make_slice(1.0, 1.0, 2.0);
  EllipticSolution sol(s);
  PrecisionGuard g(40);
  MpParams mp = s.mp_params();
  std::vector<LaurentFamily> fams;
  for (const LeadingBehavior& lb : leading_orders(s.params(), Equation::CGL5))
    fams.push_back(expand_pole_family(mp, lb, 10, 40));
  const auto& poles = sol.affixes().M_poles;
  double sep = 1e300;
  for (size_t a = 0; a < 4; ++a)
    for (size_t b = a + 1; b < 4; ++b) sep = std::min(sep, lattice_distance(sol.lower(), poles[a].xi, poles[b].xi));
  auto M = [&](cplx z) { return eval_M_wp(sol, z).value(); };
  for (const PoleAffix& p : poles) {
    std::vector<cplx> c = contour_laurent(M, p.xi, 0.3 * sep, -1, 5, 256);
    const LaurentFamily* best = nullptr;
    for (const LaurentFamily& f : fams)
      if (!best || std::abs(f.M.c[0].to_std() - c[0]) < std::abs(best->M.c[0].to_std() - c[0])) best = &f;
    REQUIRE(best != nullptr);
    for (size_t k = 0; k < c.size(); ++k) CHECK(rel(c[k], best->M.c[k].to_std()) < 1e-7);
  }
}

TEST_CASE("expansion of psi at the origin of its rational form") {
  for (const SliceCase& c : kSlices) {
    EllipticSliceParams s = make_slice(c.ex, c.ey, c.ei, c.sign, c.j);
    EllipticSolution sol(s);
    const PoleAffixSet& a = sol.affixes();
    cplx x0 = rational_form_psi(s).xi0;
    double d = std::abs(sol.upper().omega1);
    for (cplx p : {a.psi_real_pole.xi, a.psi_complex_poles[0].xi, a.psi_complex_poles[1].xi})
      d = std::min(d, lattice_distance(sol.upper(), x0, p));
    auto psi = [&](cplx z) { return eval_psi_wp(sol, z).value(); };
    std::vector<cplx> l = contour_laurent(psi, x0, 0.3 * d, -1, 0, 256);
    CHECK(rel(l[0], -s.j / 2.0) < 1e-9);
    CHECK(rel(l[1], -s.j * s.csi * (9.0 * s.ex - 4.0 * s.j * s.ey) / (24.0 * s.ex)) < 1e-8);
  }
}

TEST_CASE("equivalent representations") {
  for (const SliceCase& c : kSlices) {
    EllipticSliceParams s = make_slice(c.ex, c.ey, c.ei, c.sign, c.j);
    EllipticSolution sol(s);
    WpRationalForm fm = rational_form_M(s), fp = rational_form_psi(s), fd = rational_form_dlogA(s);
    const EllipticInvariants& inv_m = fm.lattice == LatticeTag::Lower ? sol.lower() : sol.upper();
    const EllipticInvariants& inv_p = fp.lattice == LatticeTag::Lower ? sol.lower() : sol.upper();
    const EllipticInvariants& inv_d = fd.lattice == LatticeTag::Lower ? sol.lower() : sol.upper();
    ZetaSumForm zs = zeta_sum_M(sol);
    CHECK(zs.terms.size() == 4);
    for (cplx xi : sample_cell(sol, 40, 9).points) {
      Jet<3> M = eval_M_wp(sol, xi), P = eval_psi_wp(sol, xi), D = eval_dlogA_wp(sol, xi);
      CHECK(rel(evaluate(fm, inv_m, xi), M.value()) < 1e-10);
      CHECK(rel(evaluate(fp, inv_p, xi), P.value()) < 1e-10);
      CHECK(rel(evaluate(fd, inv_d, xi), D.value()) < 1e-10);
      CHECK(rel(evaluate(zs, zs.lattice == LatticeTag::Lower ? sol.lower() : sol.upper(), xi), M.value()) < 1e-9);
      CHECK(rel(eval_M_zeta_sum(sol, xi), M.value()) < 1e-9);
      CHECK(rel(eval_M_product(sol, xi, ProductForm::Sigma), M.value()) < 1e-9);
      CHECK(rel(eval_M_product(sol, xi, ProductForm::Hermite), M.value()) < 1e-9);
      SimplePoleSums sums = eval_simple_pole_sums(sol, xi);
      CHECK(rel(sums.dlogA, D.value()) < 1e-9);
      CHECK(rel(sums.psi, P.value()) < 1e-9);
      CHECK(rel(sums.dlogM, M.derivative(1) / M.value()) < 1e-9);
      CHECK(rel(D.value(), M.derivative(1) / (2.0 * M.value()) + s.j * P.value()) < 1e-9);
      StatePoint sp = state_point(sol, xi);
      CHECK(sp.M == M.value());
      CHECK(sp.M3 == M.derivative(3));
      CHECK(sp.psi1 == P.derivative(1));
    }
  }
}

TEST_CASE("Hermite element") {
  EllipticInvariants inv = periods_from_invariants(348.0, 664.0);
  const cplx q = 0.3 * inv.omega1 + 0.2 * inv.omega3, k(0.4, -0.1);
  auto E = [&](cplx z) { return hermite_element(inv, q, k, z); };
  CHECK(rel(contour_residue(E, 0.0, 0.1 * std::abs(inv.omega1)), 1.0) < 1e-12);
  const double h = 1e-5;
  for (cplx z : {cplx(0.31, 0.12), cplx(-0.2, 0.27)}) {
    cplx d = (std::log(E(z + h)) - std::log(E(z - h))) / (2.0 * h);
    cplx want = eval_zeta(inv, z + q) - eval_zeta(inv, z) + k - eval_zeta(inv, q);
    CHECK(rel(d, want) < 1e-7);
    cplx pure = eval_sigma(inv, z + q) / (eval_sigma(inv, z) * eval_sigma(inv, q));
    CHECK(rel(hermite_element(inv, q, eval_zeta(inv, q), z), pure) < 1e-12);
  }
  CHECK(code_of([&] { hermite_element(inv, 2.0 * inv.omega1, k, 0.3); }) == ErrorCode::NearLatticePoint);
}

TEST_CASE("amplitude tracker") {
  EllipticSliceParams s = make_slice(1.0, 1.0, 2.0);
  EllipticSolution sol(s);
  const PoleAffix& p0 = sol.affixes().psi_complex_poles[0];
  // Near ξ^ψ_{+i,0}: A₊ ~ A₀ χ^{(-1+i√3)/2}.
  const cplx e((-1.0) / 2.0, kSqrt3 / 2.0);
  AmplitudeTracker tr(sol, p0.xi + 0.05);
  std::vector<cplx> a0;
  for (double r : {0.02, 0.01, 0.005}) {
    tr.move_to(p0.xi + r);
    a0.push_back(std::exp(tr.log_A_plus() - e * std::log(cplx(r))));
  }
  CHECK(std::abs(a0[2] - a0[1]) < 0.6 * std::abs(a0[1] - a0[0]));
  CHECK(std::abs(a0[2] - a0[1]) < 0.05 * std::abs(a0[2]));

  double L = real_period(sol.lower()).real(), y = segment_offset(sol, L);
  AmplitudeTracker seg(sol, cplx(0.0, y));
  for (int t = 0; t <= 50; ++t) {
    cplx xi(L * t / 50, y);
    seg.move_to(xi);
    CHECK(rel(seg.product(), eval_M_wp(sol, xi).value()) < 1e-8);
  }
  CHECK(code_of([&] { AmplitudeTracker bad(sol, p0.xi); }) == ErrorCode::BranchCut);
  EllipticSolution minus(make_slice(1.0, 1.0, 2.0, 1, cplx(0.0, -1.0)));
  CHECK(code_of([&] { AmplitudeTracker bad(minus, 0.1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("csi = 0 forms of psi") {
  for (double ey : {1.0, -0.5, 2.0}) {
    for (cplx j : {cplx(0.0, 1.0), cplx(0.0, -1.0)}) {
      cplx sh = psi_csi0_shift(ey, j);
      for (cplx z : {cplx(0.11, 0.05), cplx(-0.07, 0.13), cplx(0.2, -0.04)}) {
        cplx a = eval_psi_csi0(ey, j, z + sh).value(), b = eval_psi_csi0_sqrt(ey, z);
        CHECK(std::min(rel(a, b), rel(a, -b)) < 1e-9);
        Jet<3> p = eval_psi_csi0(ey, j, z);
        ref::Scaled r = ref::Fpsi(p.value(), p.derivative(1), 0.0, ey, 0.0);
        cplx v = p.value(), d = p.derivative(1);
        CHECK(ref::sum({d * d, -4.0 * std::pow(v, 4) / 3.0, cplx(-144.0 * ey * ey)}).rel() < 1e-9);
        CHECK(r.rel() < 1e-12);  // the ψ subequation vanishes identically at csi = 0
      }
    }
  }
}

TEST_CASE("singular evaluations") {
  EllipticSolution sol(make_slice(1.0, 1.0, 2.0));
  cplx x = sol.affixes().M_poles[0].xi;
  CHECK(code_of([&] { eval_M_zeta_sum(sol, x); }) == ErrorCode::NearPole);
  CHECK(code_of([&] { eval_M_product(sol, x); }) == ErrorCode::NearPole);
  CHECK(code_of([&] { eval_simple_pole_sums(sol, x); }) == ErrorCode::NearPole);
  CHECK(distance_to_singularities(sol, x) < 1e-10);
  CHECK(distance_to_singularities(sol, x + 0.01) > 0.009);
}

TEST_CASE("winding count of M") {
  EllipticSolution sol(make_slice(1.0, 1.0, 2.0));
  const EllipticInvariants& lo = sol.lower();
  cplx c = 0.123 * lo.omega1 + 0.071 * lo.omega3;
  WindingCount w = count_zeros_poles([&](cplx z) { return eval_M_wp(sol, z).value(); }, c, lo.omega1, lo.omega3);
  CHECK(w.poles == 4);
  CHECK(w.zeros == 4);
}
