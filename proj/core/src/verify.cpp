#include "cglwaves/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/random/sobol.hpp>
#include <nlohmann/json.hpp>

#include "cglwaves/errors.hpp"
#include "cglwaves/landen.hpp"
#include "cglwaves/laurent.hpp"
#include "cglwaves/subequation.hpp"

namespace cglwaves {

void VerificationReport::add(CheckRecord r) {
  overall = overall && r.pass;
  records.push_back(std::move(r));
}

void VerificationReport::merge(const VerificationReport& other) {
  for (const auto& r : other.records) add(r);
}

std::string VerificationReport::to_json(bool with_timing) const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["overall"] = overall;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json e;
    e["name"] = r.name;
    e["description"] = r.description;
    e["max_residual"] = r.max_residual;
    e["tolerance"] = r.tolerance;
    e["pass"] = r.pass;
    e["samples"] = r.samples;
    e["skipped"] = r.skipped;
    if (with_timing) e["runtime_ms"] = r.runtime_ms;
    if (!r.note.empty()) e["note"] = r.note;
    j["records"].push_back(e);
  }
  return j.dump(2);
}

std::string VerificationReport::to_table(bool with_timing) const {
  std::ostringstream os;
  os << std::left << std::setw(34) << "check" << std::setw(13) << "max_resid" << std::setw(10)
     << "tol" << std::setw(9) << "samples" << std::setw(6) << "pass";
  if (with_timing) os << "ms";
  os << "\n";
  for (const auto& r : records) {
    os << std::left << std::setw(34) << r.name << std::setw(13) << std::setprecision(3)
       << std::scientific << r.max_residual << std::setw(10) << std::setprecision(0) << r.tolerance
       << std::setw(9) << r.samples << std::setw(6) << (r.pass ? "yes" : "NO");
    if (with_timing) os << std::fixed << std::setprecision(1) << r.runtime_ms;
    if (!r.note.empty()) os << "  (" << r.note << ")";
    os << "\n";
  }
  os << "overall: " << (overall ? "PASS" : "FAIL") << "\n";
  return os.str();
}

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

using Clock = std::chrono::steady_clock;

// Running maximum of one check.
class Tally {
 public:
  Tally(std::string name, std::string description, double tol)
      : start_(Clock::now()) {
    rec_.name = std::move(name);
    rec_.description = std::move(description);
    rec_.tolerance = tol;
  }
  void update(double r) {
    if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
    rec_.max_residual = std::max(rec_.max_residual, r);
    ++rec_.samples;
  }
  void skip() { ++rec_.skipped; }
  void note(std::string n) { rec_.note = std::move(n); }
  CheckRecord finish() {
    rec_.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    rec_.pass = rec_.samples > 0 && rec_.max_residual <= rec_.tolerance;
    if (rec_.samples == 0 && rec_.note.empty()) rec_.note = "Unresolvable: no samples placed";
    return rec_;
  }

 private:
  CheckRecord rec_;
  Clock::time_point start_;
};

double rel(cplx a, cplx b) {
  double s = std::abs(b);
  return s == 0.0 ? std::abs(a) : std::abs(a - b) / s;
}

double scaled(cplx a, cplx b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

template <class F>
void guarded(Tally& t, F&& f) {
  try {
    t.update(f());
  } catch (const Error&) {
    t.skip();
  }
}

}  // namespace

CellSamples sample_cell(const EllipticSolution& sol, int n, std::uint64_t seed) {
  boost::random::sobol qrng(2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double shift[2] = {U(rng), U(rng)};
  const double span = double(qrng.max() - qrng.min()) + 1.0;
  auto next = [&](int d) {
    double u = double(qrng() - qrng.min()) / span + shift[d];
    return u - std::floor(u);
  };
  const auto& L = sol.lower();
  const double min_d = kPoleExclusion * std::abs(L.omega1);
  CellSamples out;
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (int tries = 0; tries < kSampleRetries && !placed; ++tries) {
      double u = next(0), v = next(1);
      cplx xi = (2.0 * u - 1.0) * L.omega1 + (2.0 * v - 1.0) * L.omega3;
      if (distance_to_singularities(sol, xi) >= min_d) {
        out.points.push_back(xi);
        placed = true;
      }
    }
    if (!placed) ++out.skipped;
  }
  return out;
}

namespace {

void ode_checks(const EllipticSolution& sol, const std::vector<cplx>& pts, VerificationReport& rep) {
  const auto& s = sol.slice();
  const CglParams P = s.params();
  auto F4 = m_subequation(s.ex, s.ey, s.e_i, s.csi);
  auto Fpsi = psi_subequation(s.ex, s.ey, s.csi);
  auto Fd = dlog_amplitude_subequation(s.ey, s.csi, s.j);

  Tally r1("ode.system.first", "first line of the (M, psi) system", 1e-8);
  Tally r2("ode.system.second", "second line of the (M, psi) system", 1e-8);
  Tally r3("ode.order3", "third-order equation for M", 1e-8);
  Tally rg("ode.psi_squared", "psi^2 M^2 = G", 1e-8);
  Tally sm("subeq.M", "fourth-degree first-order subequation of M", 1e-9);
  Tally sp("subeq.psi", "first-order subequation of psi", 1e-9);
  Tally sd("subeq.dlogA", "complex subequation of dlogA", 1e-9);
  Tally dj("equiv.dlogA_jet", "dlogA = M'/(2M) + j psi", 1e-9);
  for (cplx xi : pts) {
    StatePoint jet;
    Jet<3> d;
    try {
      jet = state_point(sol, xi);
      d = eval_dlogA_wp(sol, xi);
    } catch (const Error&) {
      for (Tally* t : {&r1, &r2, &r3, &rg, &sm, &sp, &sd, &dj}) t->skip();
      continue;
    }
    guarded(r1, [&] { return residual_system(P, jet).r1.scaled(); });
    guarded(r2, [&] { return residual_system(P, jet).r2.scaled(); });
    guarded(r3, [&] { return residual_order3(P, jet).scaled(); });
    guarded(rg, [&] { return scaled(jet.psi * jet.psi * jet.M * jet.M, g_function(P, jet)); });
    sm.update(subequation_residual(F4, jet.M, jet.M1).scaled());
    sp.update(subequation_residual(Fpsi, jet.psi, jet.psi1).scaled());
    sd.update(subequation_residual(Fd, d.value(), d.derivative(1)).scaled());
    guarded(dj, [&] { return scaled(d.value(), dlog_amplitude(jet, s.j)); });
  }
  for (Tally* t : {&r1, &r2, &r3, &rg, &sm, &sp, &sd, &dj}) rep.add(t->finish());

  // j = -i branch: the conjugate relation dlogA = M'/(2M) - i psi
  Tally cj("equiv.dlogA_conjugate", "j=-i branch gives M'/(2M) - i psi", 1e-9);
  EllipticSolution conj(make_slice(s.ex, s.ey, s.e_i, s.csi_sign, -s.j));
  for (cplx xi : pts) {
    guarded(cj, [&] {
      StatePoint jet = state_point(conj, xi);
      return scaled(eval_dlogA_wp(conj, xi).value(), dlog_amplitude(jet, conj.slice().j));
    });
  }
  rep.add(cj.finish());
}

void equivalence_checks(const EllipticSolution& sol, const std::vector<cplx>& pts,
                        VerificationReport& rep) {
  const auto& s = sol.slice();
  Tally zs("equiv.M_zeta_sum", "M: rational form = zeta sum", 1e-9);
  Tally sg("equiv.M_sigma_product", "M: rational form = sigma product", 1e-9);
  Tally he("equiv.M_hermite_product", "M: rational form = Hermite product", 1e-9);
  Tally sd("equiv.dlogA_zeta_sum", "dlogA: rational form = zeta sum", 1e-9);
  Tally sp("equiv.psi_zeta_sum", "psi: rational form = zeta sum", 1e-9);
  Tally sm("equiv.dlogM_zeta_sum", "M'/M: derivative = zeta sum", 1e-9);
  Tally cf("equiv.canonical_forms", "(P + Q wp')/R forms = direct evaluation", 1e-9);
  auto fM = rational_form_M(s), fpsi = rational_form_psi(s), fd = rational_form_dlogA(s);
  for (cplx xi : pts) {
    Jet<3> M, psi, d;
    try {
      M = eval_M_wp(sol, xi);
      psi = eval_psi_wp(sol, xi);
      d = eval_dlogA_wp(sol, xi);
    } catch (const Error&) {
      for (Tally* t : {&zs, &sg, &he, &sd, &sp, &sm, &cf}) t->skip();
      continue;
    }
    guarded(zs, [&] { return rel(eval_M_zeta_sum(sol, xi), M.value()); });
    guarded(sg, [&] { return rel(eval_M_product(sol, xi, ProductForm::Sigma), M.value()); });
    guarded(he, [&] { return rel(eval_M_product(sol, xi, ProductForm::Hermite), M.value()); });
    try {
      SimplePoleSums sums = eval_simple_pole_sums(sol, xi);
      sd.update(rel(sums.dlogA, d.value()));
      sp.update(rel(sums.psi, psi.value()));
      sm.update(rel(sums.dlogM, M.derivative(1) / M.value()));
    } catch (const Error&) {
      sd.skip();
      sp.skip();
      sm.skip();
    }
    guarded(cf, [&] {
      return std::max({rel(evaluate(fM, sol.lower(), xi), M.value()),
                       rel(evaluate(fpsi, sol.upper(), xi), psi.value()),
                       rel(evaluate(fd, sol.upper(), xi), d.value())});
    });
  }
  for (Tally* t : {&zs, &sg, &he, &sd, &sp, &sm, &cf}) rep.add(t->finish());
}

double wp_scale(cplx a) { return std::max(1.0, std::abs(a)); }

void affix_checks(const EllipticSolution& sol, VerificationReport& rep) {
  const auto& s = sol.slice();
  const auto& up = sol.upper();
  const auto& A = sol.affixes();
  const cplx j = s.j, xj = A.psi_real_pole.xi, x0 = A.psi_complex_poles[0].xi,
             x1 = A.psi_complex_poles[1].xi;
  const double ex = s.ex, ey = s.ey, csi = s.csi;

  Tally loc("affix.values", "affixes reproduce the prescribed (wp, wp') pairs", 1e-9);
  for (const auto& p : A.M_poles) {
    WpValue w = eval_wp(sol.lower(), p.xi);
    loc.update(std::max(std::abs(w.p - p.wp) / wp_scale(p.wp), std::abs(w.p_prime - p.wp_prime) / wp_scale(p.wp_prime)));
  }
  for (const PoleAffix* p : {&A.psi_real_pole, &A.psi_complex_poles[0], &A.psi_complex_poles[1]}) {
    WpValue w = eval_wp(up, p->xi);
    loc.update(std::max(std::abs(w.p - p->wp) / wp_scale(p->wp), std::abs(w.p_prime - p->wp_prime) / wp_scale(p->wp_prime)));
  }
  rep.add(loc.finish());

  Tally sums("affix.sum_relations", "wp and wp' at sums and differences of affixes", 1e-9);
  auto pair_check = [&](cplx at, cplx p, cplx dp) {
    WpValue w = eval_wp(up, at);
    double sc = std::max({1.0, std::abs(p), ex});
    sums.update(std::max(std::abs(w.p - p) / sc, std::abs(w.p_prime - dp) / std::pow(sc, 1.5)));
  };
  pair_check(x0 + x1 - xj, -2.0 * ex, 0.0);
  pair_check(x0 + x1, 7.0 * ex, -6.0 * j * csi * ey);
  pair_check(x0 - x1, -5.0 * ex, -2.0 * kSqrt3 * csi * ey);
  rep.add(sums.finish());

  Tally zr("affix.zeta_relation", "zeta relation among the psi affixes", 1e-9);
  zr.update(std::abs(affix_zeta_relation(sol)) /
            std::max({1.0, std::abs(eval_zeta(up, x0)), std::abs(eval_zeta(up, x1)), csi}));
  rep.add(zr.finish());

  Tally per("affix.conjugate_shift", "x_{j,k} - x_{-j,k} - x_j is a period", 1e-9);
  EllipticSolution conj(make_slice(ex, ey, s.e_i, s.csi_sign, -j));
  const auto& C = conj.affixes();
  for (size_t k = 0; k < 2; ++k) {
    cplx z = A.psi_complex_poles[k].xi - C.psi_complex_poles[k].xi - xj;
    per.update(std::abs(reduce_to_cell(up, z)) / std::abs(up.omega1));
  }
  rep.add(per.finish());

  Tally lm("affix.landen_map", "upper-lattice wp maps M affixes onto psi affixes", 1e-9);
  const int target[4] = {1, 0, 1, 0};  // k = 1..4 -> psi pole index
  for (int k = 0; k < 4; ++k) {
    cplx w = eval_wp(up, A.M_poles[static_cast<size_t>(k)].xi).p;
    cplx t = A.psi_complex_poles[static_cast<size_t>(target[k])].wp;
    lm.update(std::abs(w - t) / wp_scale(t));
  }
  rep.add(lm.finish());

  Tally rs("affix.residues", "residues of M, dlogA, and the Hermite element", 1e-9);
  auto Mf = [&](cplx z) { return eval_M_wp(sol, z).value(); };
  auto Df = [&](cplx z) { return eval_dlogA_wp(sol, z).value(); };
  double rad_lo = 0.2 * std::abs(sol.lower().omega1);
  for (const auto& p : A.M_poles) {
    for (const auto& q : A.M_poles) {
      double d = std::abs(reduce_to_cell(sol.lower(), p.xi - q.xi));
      if (d > 1e-9) rad_lo = std::min(rad_lo, 0.25 * d);
    }
  }
  cplx w = 1.0;
  for (const auto& p : A.M_poles) {
    cplx expect = sol.zeta_sum_constant() * w;
    rs.update(std::abs(contour_residue(Mf, p.xi, rad_lo) - expect) / std::abs(expect));
    w *= j;
  }
  cplx r0 = sol.residue_at_psi_pole0();
  rs.update(std::abs(std::pow(r0, 4) * s.e_i * s.e_i - 3.0) / 3.0);
  double rad_up = 0.25 * std::min({std::abs(reduce_to_cell(up, x0)), std::abs(reduce_to_cell(up, x1)),
                                   std::abs(reduce_to_cell(up, x0 - x1)), std::abs(reduce_to_cell(up, xj)),
                                   std::abs(reduce_to_cell(up, x0 - xj)), std::abs(reduce_to_cell(up, x1 - xj))});
  const cplx a = (-1.0 + j * kSqrt3) / 2.0, b = (-1.0 - j * kSqrt3) / 2.0;
  cplx rd0 = contour_residue(Df, x0, rad_up), rd1 = contour_residue(Df, x1, rad_up),
       rdz = contour_residue(Df, 0.0, rad_up);
  rs.update(std::abs(rd0 - a));
  rs.update(std::abs(rd1 - b));
  rs.update(std::abs(rdz - 1.0));
  rs.update(std::abs(rd0 + rd1 + rdz));
  cplx q = 0.37 * up.omega1 + 0.21 * up.omega3;
  auto E = [&](cplx z) { return hermite_element(up, q, cplx(0.3, -0.1), z); };
  rs.update(std::abs(contour_residue(E, 0.0, 0.2 * std::abs(q)) - 1.0));
  rep.add(rs.finish());

  Tally he("hermite.log_derivative", "E'/E = zeta(xi+q) - zeta(xi) + k - zeta(q)", 1e-8);
  for (double t : {0.13, 0.41, 0.77}) {
    cplx xi = t * up.omega1 + 0.3 * up.omega3;
    cplx k(0.3, -0.1);
    double h = 1e-3 * std::abs(up.omega1);
    auto L = [&](double m) { return std::log(hermite_element(up, q, k, xi + m * h) / hermite_element(up, q, k, xi)); };
    cplx fd = (-L(2.0) + 8.0 * L(1.0) - 8.0 * L(-1.0) + L(-2.0)) / (12.0 * h);
    cplx ex_ = eval_zeta(up, xi + q) - eval_zeta(up, xi) + k - eval_zeta(up, q);
    he.update(scaled(fd, ex_));
  }
  rep.add(he.finish());
}

void landen_checks(const EllipticSolution& sol, std::uint64_t seed, VerificationReport& rep) {
  const auto& pair = sol.landen();
  Tally rel4("landen.relations", "root and invariant relations between the two lattices", 1e-12);
  for (double r : landen_relations(pair)) rel4.update(r);
  rep.add(rel4.finish());

  Tally fn("landen.functions", "wp, zeta and sigma transformation identities", 1e-8);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto& lo = pair.lower;
  for (int i = 0; i < 50; ++i) {
    cplx x = U(rng) * lo.omega1 + U(rng) * lo.omega3;
    try {
      double r = std::max(landen_wp_identity(pair, x), landen_wp_sum_identity(pair, x));
      LandenResiduals zs = landen_zeta_sigma_identity(pair, x);
      fn.update(std::max({r, zs.zeta, zs.sigma}));
    } catch (const Error&) {
      fn.skip();
    }
  }
  rep.add(fn.finish());
}

// Max over n of |a_n - b_n| ρ^n relative to the largest |b_n| ρ^n.
double series_distance(const std::vector<cplx>& closed, const LaurentSeries& s, int lo, double rho) {
  double top = 0.0, err = 0.0;
  for (size_t i = 0; i < closed.size(); ++i) {
    int e = lo + static_cast<int>(i);
    cplx b = s.at(e).to_std();
    double w = std::pow(rho, e);
    top = std::max(top, std::abs(b) * w);
    err = std::max(err, std::abs(closed[i] - b) * w);
  }
  return err / top;
}

void laurent_checks(const EllipticSolution& sol, VerificationReport& rep) {
  const auto& s = sol.slice();
  const CglParams P = s.params();
  constexpr int kOrder = 6;
  Tally pole("laurent.pole_families", "closed form about each M pole = Laurent family", 1e-8);
  Tally zero("laurent.zero_family", "closed form about an M zero = zero family", 1e-8);
  auto Mf = [&](cplx z) { return eval_M_wp(sol, z).value(); };
  auto Pf = [&](cplx z) { return eval_psi_wp(sol, z).value(); };
  auto leads = leading_orders(P, Equation::CGL5);
  const auto& A = sol.affixes();
  std::vector<cplx> sing{0.0, A.psi_real_pole.xi, A.psi_complex_poles[0].xi, A.psi_complex_poles[1].xi};
  auto radius_at = [&](cplx c) {
    double d = std::abs(sol.upper().omega1);
    for (cplx q : sing) {
      double e = std::abs(reduce_to_cell(sol.upper(), c - q));
      if (e > 1e-9) d = std::min(d, e);
    }
    for (const auto& p : A.M_poles) {
      double e = std::abs(reduce_to_cell(sol.lower(), c - p.xi));
      if (e > 1e-9) d = std::min(d, e);
    }
    return 0.3 * d;
  };
  PrecisionGuard guard(50);
  MpParams mp = s.mp_params();
  for (const auto& p : A.M_poles) {
    try {
      double rho = radius_at(p.xi);
      auto cm = contour_laurent(Mf, p.xi, rho, -1, kOrder);
      auto cp = contour_laurent(Pf, p.xi, rho, -1, kOrder);
      const LeadingBehavior* best = nullptr;
      double bd = 1e300;
      for (const auto& l : leads) {
        double d = std::abs(l.m0 - cm[0]) + std::abs(l.alpha - cp[0]);
        if (d < bd) {
          bd = d;
          best = &l;
        }
      }
      LaurentFamily fam = expand_pole_family(mp, *best, kOrder + 2, 50);
      pole.update(std::max(series_distance(cm, fam.M, -1, rho), series_distance(cp, fam.psi, -1, rho)));
    } catch (const Error&) {
      pole.skip();
    }
  }
  try {
    double rho = radius_at(0.0);
    auto cm = contour_laurent(Mf, 0.0, rho, 1, kOrder);
    auto cp = contour_laurent(Pf, 0.0, rho, -1, kOrder);
    cplx jz = 2.0 * cp[0];
    jz = cplx(0.0, jz.imag() > 0 ? 1.0 : -1.0);
    Cplx arb0(cm[0]), arb1(-cm[1] / cm[0]);
    LaurentFamily fam = expand_zero_family(P, jz, arb0, arb1, kOrder + 2, 50);
    zero.update(std::max(series_distance(cm, fam.M, 1, rho), series_distance(cp, fam.psi, -1, rho)));
  } catch (const Error&) {
    zero.skip();
  }
  rep.add(pole.finish());
  rep.add(zero.finish());
}

void structure_checks(const EllipticSolution& sol, VerificationReport& rep) {
  Tally cnt("count.poles_per_cell", "argument principle: 4 poles and 4 zeros of M per cell", 0.0);
  auto Mf = [&](cplx z) { return eval_M_wp(sol, z).value(); };
  const auto& L = sol.lower();
  try {
    cplx center = 0.0123 * L.omega1 + 0.0371 * L.omega3;
    WindingCount wc = count_zeros_poles(Mf, center, L.omega1, L.omega3);
    cnt.update(std::abs(wc.poles - 4) + std::abs(wc.zeros - 4));
    if (wc.poles != 4 || wc.zeros != 4) {
      cnt.note("poles=" + std::to_string(wc.poles) + " zeros=" + std::to_string(wc.zeros));
    }
  } catch (const Error& e) {
    cnt.note(e.what());
  }
  rep.add(cnt.finish());

  Tally ode("elliptic.wp_ode", "wp'^2 = 4wp^3 - g2 wp - g3 on both lattices", 1e-10);
  for (const EllipticInvariants* inv : {&sol.lower(), &sol.upper()}) {
    for (int i = 1; i < 10; ++i) {
      for (int k = 1; k < 10; ++k) {
        cplx z = (i / 5.0 - 1.0) * inv->omega1 + (k / 5.0 - 1.0) * inv->omega3 + 0.01 * inv->omega1;
        WpValue w = eval_wp(*inv, z);
        cplx lhs = w.p_prime * w.p_prime, rhs = 4.0 * w.p * w.p * w.p - inv->g2 * w.p - inv->g3;
        ode.update(std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(4.0 * w.p * w.p * w.p)}));
      }
    }
  }
  rep.add(ode.finish());
}

void amplitude_checks(const EllipticSolution& sol, int n, VerificationReport& rep) {
  Tally mod("amplitude.modulus", "A times its conjugate partner = M along a real segment", 1e-8);
  Tally dl("amplitude.dlog", "d/dxi log A = dlogA along the segment", 1e-8);
  const EllipticSolution* plus = &sol;
  std::optional<EllipticSolution> flipped;
  if (sol.slice().j.imag() < 0) {
    const auto& s = sol.slice();
    flipped.emplace(make_slice(s.ex, s.ey, s.e_i, s.csi_sign, -s.j));
    plus = &*flipped;
  }
  cplx L = real_period(plus->upper());
  if (L == 0.0) {
    mod.note("no real period");
    dl.note("no real period");
  } else {
    try {
      double y = segment_offset(*plus, L.real());
      AmplitudeTracker tr(*plus, cplx(0.0, y));
      double h = 2e-4 * std::abs(L);
      for (int t = 0; t <= n; ++t) {
        cplx xi(L.real() * t / n, y);
        tr.move_to(xi);
        cplx M = eval_M_wp(*plus, xi).value();
        mod.update(rel(tr.product(), M));
        dl.update(scaled(tr.dlog_A_plus(h), eval_dlogA_wp(*plus, xi).value()));
      }
    } catch (const Error& e) {
      mod.note(e.what());
      dl.note(e.what());
    }
  }
  rep.add(mod.finish());
  rep.add(dl.finish());
}

void csi0_checks(const EllipticSliceParams& s, const std::vector<cplx>& pts, VerificationReport& rep) {
  Tally t("csi0.forms", "csi=0: rational and square-root forms of psi agree after the shift", 1e-9);
  Tally o("csi0.subequation", "csi=0: psi'^2 = 4psi^4/3 + 144ey^2", 1e-9);
  const double ey = s.ey == 0.0 ? 1.0 : s.ey;
  for (cplx j : {cplx(0.0, 1.0), cplx(0.0, -1.0)}) {
    cplx sh = psi_csi0_shift(ey, j);
    for (size_t i = 0; i < std::min<size_t>(pts.size(), 20); ++i) {
      cplx z = 0.3 * pts[i];
      guarded(t, [&] {
        cplx a = eval_psi_csi0(ey, j, z + sh).value(), b = eval_psi_csi0_sqrt(ey, z);
        return std::min(rel(a, b), rel(a, -b));
      });
      guarded(o, [&] {
        Jet<3> p = eval_psi_csi0(ey, j, z);
        cplx v = p.value(), d = p.derivative(1);
        return scaled(d * d, 4.0 * v * v * v * v / 3.0 + 144.0 * ey * ey);
      });
    }
  }
  rep.add(t.finish());
  rep.add(o.finish());
}

}  // namespace

VerificationReport verify_slice(const EllipticSliceParams& slice, int n_samples, std::uint64_t seed) {
  VerificationReport rep;
  EllipticSolution sol(slice);
  CellSamples cs = sample_cell(sol, n_samples, seed);
  ode_checks(sol, cs.points, rep);
  equivalence_checks(sol, cs.points, rep);
  affix_checks(sol, rep);
  landen_checks(sol, seed, rep);
  laurent_checks(sol, rep);
  structure_checks(sol, rep);
  amplitude_checks(sol, std::max(n_samples, 20), rep);
  csi0_checks(slice, cs.points, rep);
  CheckRecord sampling;
  sampling.name = "sampling.cell";
  sampling.description = "cell samples placed away from poles";
  sampling.samples = static_cast<int>(cs.points.size());
  sampling.skipped = cs.skipped;
  sampling.max_residual = n_samples > 0 ? double(cs.skipped) / n_samples : 0.0;
  sampling.tolerance = 0.5;
  sampling.pass = !cs.points.empty() && sampling.max_residual <= sampling.tolerance;
  rep.add(sampling);
  return rep;
}

VerificationReport verify_subequation_pipeline(const std::vector<PipelinePoint>& grid, unsigned digits) {
  VerificationReport rep;
  int idx = 0;
  for (const auto& pt : grid) {
    ++idx;
    Clock::time_point t0 = Clock::now();
    CheckRecord r;
    r.samples = 1;
    r.tolerance = 1e-8;
    PrecisionGuard guard(digits);
    try {
      if (pt.slice) {
        const auto& s = *pt.slice;
        r.name = "pipeline.on_slice." + std::to_string(idx);
        r.description = "nullity 1 and the M-subequation coefficients";
        FitReport fit = fit_subequation(s.mp_params(), Equation::CGL5, pt.m, digits);
        if (fit.nullity != 1 || !fit.solution) {
          r.max_residual = std::numeric_limits<double>::infinity();
          r.note = "nullity " + std::to_string(fit.nullity);
        } else {
          auto ref = m_subequation(s.ex, s.ey, s.e_i, s.csi);
          double top = 0.0;
          for (cplx c : ref.coefficients) top = std::max(top, std::abs(c));
          for (size_t i = 0; i < ref.index.size(); ++i) {
            cplx a = fit.solution->coefficients[i], b = ref.coefficients[i];
            double d = std::abs(b) > 1e-12 * top ? std::abs(a - b) / std::abs(b) : std::abs(a) / top;
            r.max_residual = std::max(r.max_residual, d);
          }
        }
        r.pass = r.max_residual <= r.tolerance;
      } else if (pt.equation == Equation::CGL5) {
        r.name = "pipeline.off_slice." + std::to_string(idx);
        r.description = "generic parameters admit no subequation in the class";
        r.tolerance = 0.0;
        FitReport fit = fit_subequation(pt.params, Equation::CGL5, pt.m, digits);
        r.max_residual = fit.nullity;
        r.pass = fit.nullity == 0;
      } else {
        r.name = "pipeline.cgl3." + std::to_string(idx);
        r.description = "CGL3 run with two families";
        r.tolerance = 0.0;
        FitReport fit = fit_subequation(pt.params, Equation::CGL3, pt.m, digits);
        r.note = "nullity " + std::to_string(fit.nullity);
        r.pass = true;
      }
    } catch (const Error& e) {
      r.note = e.what();
      r.pass = false;
      r.max_residual = std::numeric_limits<double>::infinity();
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    rep.add(r);
  }
  return rep;
}

std::vector<PipelinePoint> random_off_slice_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  std::vector<PipelinePoint> out;
  for (int i = 0; i < n; ++i) {
    PipelinePoint p;
    p.equation = Equation::CGL5;
    p.params.e_r = U(rng);
    do p.params.e_i = U(rng);
    while (std::abs(p.params.e_i) < 0.2);
    p.params.d_r = U(rng);
    p.params.d_i = U(rng);
    p.params.g_r = U(rng);
    p.params.g_i = U(rng);
    p.params.csi = U(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace cglwaves
