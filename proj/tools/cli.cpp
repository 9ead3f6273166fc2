#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cglwaves/elliptic.hpp"
#include "cglwaves/errors.hpp"
#include "cglwaves/landen.hpp"
#include "cglwaves/laurent.hpp"
#include "cglwaves/model.hpp"
#include "cglwaves/solution.hpp"
#include "cglwaves/subequation.hpp"
#include "cglwaves/verify.hpp"

namespace cglwaves::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

constexpr const char* kEvalColumns[] = {
    "xi_re",   "xi_im",    "M_re",        "M_im",        "psi_re",     "psi_im",
    "dlogA_re", "dlogA_im", "res_system1", "res_system2", "res_order3", "res_subeq"};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

json cj(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }
json mj(const Cplx& z) { return json{{"re", to_string(z.re)}, {"im", to_string(z.im)}}; }

cplx parse_branch(const std::string& s) { return s == "-i" ? cplx(0.0, -1.0) : cplx(0.0, 1.0); }

Equation parse_equation(const std::string& s) { return s == "cgl3" ? Equation::CGL3 : Equation::CGL5; }

json params_json(const CglParams& p) {
  return json{{"e_r", p.e_r}, {"e_i", p.e_i}, {"d_r", p.d_r}, {"d_i", p.d_i},
              {"g_r", p.g_r}, {"g_i", p.g_i}, {"csi", p.csi}, {"s_r", p.s_r}, {"s_i", p.s_i}};
}

json lattice_json(const EllipticInvariants& inv) {
  json roots = json::array();
  for (cplx r : inv.roots) roots.push_back(cj(r));
  return json{{"g2", cj(inv.g2)},         {"g3", cj(inv.g3)},     {"roots", roots},
              {"omega1", cj(inv.omega1)}, {"omega3", cj(inv.omega3)}, {"eta1", cj(inv.eta1)},
              {"eta3", cj(inv.eta3)}};
}

json series_json(const LaurentSeries& s) {
  json a = json::array();
  for (size_t k = 0; k < s.c.size(); ++k) {
    a.push_back(json{{"power", s.val + static_cast<int>(k)},
                     {"re", to_string(s.c[k].re)},
                     {"im", to_string(s.c[k].im)}});
  }
  return a;
}

// Options shared by every command.
struct Common {
  unsigned digits = kDefaultDigits;
  std::string config;
  std::string output;
  std::string format;  // empty: first format of the command
};

struct SliceOpts {
  double ex = 1.0, ey = 1.0, ei = 2.0;
  int csi_sign = 1;
  std::string branch = "+i";
  CLI::Option* ex_opt = nullptr;
  CLI::Option* ey_opt = nullptr;
  CLI::Option* ei_opt = nullptr;

  EllipticSliceParams slice() const { return make_slice(ex, ey, ei, csi_sign, parse_branch(branch)); }
};

struct GenericOpts {
  double er = 0.0, dr = 0.0, di = 0.0, gr = 0.0, gi = 0.0, csi = 0.0;
  std::vector<CLI::Option*> opts;

  bool given() const {
    for (auto* o : opts)
      if (o->count() > 0) return true;
    return false;
  }
};

void add_common(CLI::App* sub, Common& c, bool with_format, std::vector<std::string> formats = {"json"}) {
  sub->add_option("--config", c.config, "flat key=value file using the flag names; flags override it");
  sub->add_option("--digits", c.digits, "working precision in decimal digits (default: CGLWAVES_PRECISION, else 60)")
      ->check(CLI::Range(15u, 100000u))
      ->capture_default_str();
  sub->add_option("--output,-o", c.output, "output file (default: standard output)");
  if (with_format) {
    sub->add_option("--format", c.format, "output format (default " + formats.front() + ")")
        ->check(CLI::IsMember(formats));
  }
}

void add_slice(CLI::App* sub, SliceOpts& s, bool with_branch) {
  s.ex_opt = sub->add_option("--ex", s.ex, "slice parameter ex (csi^2 = 48 ex)")->capture_default_str();
  s.ey_opt = sub->add_option("--ey", s.ey, "slice parameter ey (g_r = 36 ey)")->capture_default_str();
  s.ei_opt = sub->add_option("--ei", s.ei, "quintic coefficient e_i")->capture_default_str();
  sub->add_option("--csi-sign", s.csi_sign, "sign of csi")
      ->check(CLI::IsMember({-1, 1}))
      ->capture_default_str();
  if (with_branch) {
    sub->add_option("--branch", s.branch, "j = +i or -i")
        ->check(CLI::IsMember({"+i", "-i"}))
        ->capture_default_str();
  }
}

void add_generic(CLI::App* sub, GenericOpts& g) {
  g.opts.push_back(sub->add_option("--er", g.er, "e_r (selects generic parameters)"));
  g.opts.push_back(sub->add_option("--dr", g.dr, "d_r (selects generic parameters)"));
  g.opts.push_back(sub->add_option("--di", g.di, "d_i (selects generic parameters)"));
  g.opts.push_back(sub->add_option("--gr", g.gr, "g_r (selects generic parameters)"));
  g.opts.push_back(sub->add_option("--gi", g.gi, "g_i (selects generic parameters)"));
  g.opts.push_back(sub->add_option("--csi", g.csi, "csi (selects generic parameters)"));
}

// Parameters of laurent and subeq-fit: the slice unless a generic flag is given.
struct ParamChoice {
  MpParams mp;
  CglParams params;
  std::optional<EllipticSliceParams> slice;
};

ParamChoice choose_params(const SliceOpts& s, const GenericOpts& g, Equation eq) {
  ParamChoice out;
  if (g.given() || eq == Equation::CGL3) {
    if (s.ex_opt->count() > 0 || s.ey_opt->count() > 0) {
      throw UsageError("--ex/--ey cannot be combined with generic parameters");
    }
    CglParams p;
    p.e_r = g.er;
    p.e_i = s.ei_opt->count() > 0 ? s.ei : (eq == Equation::CGL3 ? 0.0 : s.ei);
    p.d_r = g.dr;
    p.d_i = g.di;
    p.g_r = g.gr;
    p.g_i = g.gi;
    p.csi = g.csi;
    validate(p, eq);
    out.params = p;
    out.mp = MpParams(p);
  } else {
    out.slice = s.slice();
    out.mp = out.slice->mp_params();
    out.params = out.slice->params();
  }
  return out;
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot open output file " + path);
      os_ = &file_;
    }
  }
  std::ostream& get() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

void write_json(const json& j, const Common& c, std::ostream& out) {
  Sink s(c.output, out);
  s.get() << j.dump(2) << "\n";
}

// ---- commands ----

struct ReduceOpts {
  double p_re = 1.0, p_im = 0.0, q_re = 0.0, q_im = 0.0, r_re = 0.0, r_im = 0.0;
  double gamma = 0.0, c = 0.0, omega = 0.0;
};

int cmd_reduce(const ReduceOpts& o, const Common& c, std::ostream& out) {
  PhysicalParams ph;
  ph.p = {o.p_re, o.p_im};
  ph.q = {o.q_re, o.q_im};
  ph.r = {o.r_re, o.r_im};
  ph.gamma = o.gamma;
  ph.c = o.c;
  ph.omega = o.omega;
  CglParams p = reduce_params(ph);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "reduce";
  j["physical"] = json{{"p", cj(ph.p)}, {"q", cj(ph.q)},         {"r", cj(ph.r)},
                       {"gamma", ph.gamma}, {"c", ph.c}, {"omega", ph.omega}};
  j["reduced"] = params_json(p);
  write_json(j, c, out);
  return kOk;
}

struct LaurentOpts {
  std::string equation = "cgl5";
  std::string family = "pole";
  int terms = kDefaultTerms;
  std::optional<int> leading;
  std::string branch = "+i";
  std::string arb0 = "1";
  std::string arb1 = "0";
};

json family_json(const LaurentFamily& f, const MpParams& p, int index) {
  json e;
  if (index >= 0) e["index"] = index;
  e["kind"] = f.kind == FamilyKind::PoleOfM ? "pole" : "zero";
  if (f.kind == FamilyKind::PoleOfM) {
    e["alpha"] = f.lead.alpha;
    e["sign"] = f.lead.sign;
    e["A0_power"] = f.lead.A0_power;
    e["m0"] = cj(f.lead.m0);
    e["leading_exponent"] = f.lead.leading_exponent;
    json fu = json::array();
    for (cplx z : f.lead.fuchs_indices) fu.push_back(cj(z));
    e["fuchs_indices"] = fu;
  } else {
    e["j"] = cj(f.j);
    e["arb0"] = mj(f.arb0);
    e["arb1"] = mj(f.arb1);
  }
  e["series_residual"] = series_substitute_residual(p, f);
  e["M"] = series_json(f.M);
  e["psi"] = series_json(f.psi);
  return e;
}

int cmd_laurent(const LaurentOpts& o, const SliceOpts& s, const GenericOpts& g, const Common& c,
                std::ostream& out) {
  Equation eq = parse_equation(o.equation);
  PrecisionGuard guard(c.digits);
  ParamChoice pc = choose_params(s, g, eq);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "laurent";
  j["equation"] = o.equation;
  j["family"] = o.family;
  j["digits"] = c.digits;
  j["terms"] = o.terms;
  j["parameters"] = params_json(pc.params);
  j["families"] = json::array();
  if (o.family == "pole") {
    auto leads = leading_orders(pc.params, eq);
    for (size_t i = 0; i < leads.size(); ++i) {
      if (o.leading && *o.leading != static_cast<int>(i)) continue;
      LaurentFamily f = expand_pole_family(pc.mp, leads[i], o.terms, c.digits);
      j["families"].push_back(family_json(f, pc.mp, static_cast<int>(i)));
    }
    if (o.leading && (*o.leading < 0 || *o.leading >= static_cast<int>(leads.size()))) {
      throw UsageError("--leading out of range (" + std::to_string(leads.size()) + " families)");
    }
  } else {
    Cplx a0(Real(o.arb0), Real(0)), a1(Real(o.arb1), Real(0));
    LaurentFamily f = expand_zero_family(pc.mp, parse_branch(o.branch), a0, a1, o.terms, c.digits, eq);
    j["families"].push_back(family_json(f, pc.mp, -1));
  }
  write_json(j, c, out);
  return kOk;
}

struct FitOpts {
  std::string equation = "cgl5";
  int m = 4;
  std::optional<int> j_max;
  std::vector<int> subset;
};

int cmd_subeq_fit(const FitOpts& o, const SliceOpts& s, const GenericOpts& g, const Common& c,
                  std::ostream& out) {
  Equation eq = parse_equation(o.equation);
  PrecisionGuard guard(c.digits);
  ParamChoice pc = choose_params(s, g, eq);
  FitReport fit = fit_subequation(pc.mp, eq, o.m, c.digits, o.j_max, o.subset);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "subeq-fit";
  j["equation"] = o.equation;
  j["m"] = o.m;
  j["digits"] = c.digits;
  j["j_max"] = o.j_max.value_or(default_j_max(o.m));
  j["parameters"] = params_json(pc.params);
  j["rows"] = fit.rows;
  j["cols"] = fit.cols;
  j["rank"] = fit.rank;
  j["nullity"] = fit.nullity;
  j["rank_threshold"] = fit.rank_threshold;
  j["residual_of_fit"] = fit.residual_of_fit;
  j["singular_values"] = fit.singular_values;
  if (fit.solution) {
    // Clearing by 3 e_i^2 removes the denominators of the slice subequation.
    double clear = pc.slice ? 3.0 * pc.slice->e_i * pc.slice->e_i : 1.0;
    json coef = json::array(), cleared = json::array();
    for (size_t i = 0; i < fit.solution->index.size(); ++i) {
      const Monomial& mo = fit.solution->index[i];
      cplx a = fit.solution->coefficients[i];
      coef.push_back(json{{"j", mo.j}, {"k", mo.k}, {"re", a.real()}, {"im", a.imag()}});
      cleared.push_back(json{{"j", mo.j}, {"k", mo.k}, {"re", clear * a.real()}, {"im", clear * a.imag()}});
    }
    j["subequation"] = json{{"normalization", "coefficient of u'^m equals 1"},
                            {"coefficients", coef},
                            {"clearing_factor", clear},
                            {"cleared", cleared}};
    if (pc.slice && eq == Equation::CGL5 && o.m == 4) {
      auto ref = m_subequation(pc.slice->ex, pc.slice->ey, pc.slice->e_i, pc.slice->csi);
      double top = 0.0, d = 0.0;
      for (cplx z : ref.coefficients) top = std::max(top, std::abs(z));
      for (size_t i = 0; i < ref.index.size(); ++i) {
        cplx a = fit.solution->coefficients[i], b = ref.coefficients[i];
        d = std::max(d, std::abs(b) > 1e-12 * top ? std::abs(a - b) / std::abs(b) : std::abs(a) / top);
      }
      j["reference_max_relative_difference"] = d;
    }
  } else {
    j["subequation"] = nullptr;
  }
  write_json(j, c, out);
  return kOk;
}

struct EvalOpts {
  int points = 201;
  double start = 0.0;
  std::optional<double> length;
  std::optional<double> xi_im;
};

int cmd_eval(const EvalOpts& o, const SliceOpts& s, const Common& c, std::ostream& out) {
  if (o.points < 2) throw UsageError("--points must be at least 2");
  EllipticSolution sol(s.slice());
  CglParams P = sol.slice().params();
  auto Fm = m_subequation(s.ex, s.ey, s.ei, sol.slice().csi);
  double L = o.length.value_or(0.0);
  if (!o.length) {
    cplx rp = real_period(sol.lower());
    L = rp != 0.0 ? rp.real() : 2.0 * std::abs(sol.lower().omega1);
  }
  double y = o.xi_im ? *o.xi_im : segment_offset(sol, L);

  std::vector<std::array<double, 12>> rows;
  for (int t = 0; t < o.points; ++t) {
    cplx xi(o.start + L * t / (o.points - 1), y);
    std::array<double, 12> r;
    r.fill(std::nan(""));
    r[0] = xi.real();
    r[1] = xi.imag();
    try {
      StatePoint sp = state_point(sol, xi);
      cplx d = eval_dlogA_wp(sol, xi).value();
      SystemResidual sr = residual_system(P, sp);
      r[2] = sp.M.real();
      r[3] = sp.M.imag();
      r[4] = sp.psi.real();
      r[5] = sp.psi.imag();
      r[6] = d.real();
      r[7] = d.imag();
      r[8] = sr.r1.scaled();
      r[9] = sr.r2.scaled();
      r[10] = residual_order3(P, sp).scaled();
      r[11] = subequation_residual(Fm, sp.M, sp.M1).scaled();
    } catch (const Error&) {
      // too close to a pole: the row stays NaN
    }
    rows.push_back(r);
  }

  Sink sink(c.output, out);
  std::ostream& os = sink.get();
  if (c.format != "json") {
    for (size_t k = 0; k < 12; ++k) os << (k ? "," : "") << kEvalColumns[k];
    os << "\n";
    for (const auto& r : rows) {
      for (size_t k = 0; k < 12; ++k) os << (k ? "," : "") << fmt(r[k]);
      os << "\n";
    }
  } else {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "eval";
    j["slice"] = json{{"ex", s.ex}, {"ey", s.ey}, {"e_i", s.ei}, {"csi_sign", s.csi_sign}, {"branch", s.branch}};
    j["columns"] = kEvalColumns;
    json data = json::array();
    for (const auto& r : rows) data.push_back(r);
    j["rows"] = data;
    os << j.dump(2) << "\n";
  }
  return kOk;
}

json affix_json(const PoleAffix& a) {
  return json{{"wp", cj(a.wp)}, {"wp_prime", cj(a.wp_prime)}, {"xi", cj(a.xi)}};
}

int cmd_affixes(const SliceOpts& s, const Common& c, std::ostream& out) {
  EllipticSolution sol(s.slice());
  const PoleAffixSet& a = sol.affixes();
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "affixes";
  j["slice"] = json{{"ex", s.ex}, {"ey", s.ey}, {"e_i", s.ei}, {"csi_sign", s.csi_sign}, {"branch", s.branch}};
  j["lower_lattice"] = lattice_json(sol.lower());
  j["upper_lattice"] = lattice_json(sol.upper());
  json mp = json::array();
  for (const auto& p : a.M_poles) mp.push_back(affix_json(p));
  j["M_poles"] = mp;
  j["psi_real_pole"] = affix_json(a.psi_real_pole);
  json cp = json::array();
  for (const auto& p : a.psi_complex_poles) cp.push_back(affix_json(p));
  j["psi_complex_poles"] = cp;
  j["r_aux"] = cj(a.r_aux);
  j["zeta_sum_constant"] = cj(sol.zeta_sum_constant());
  write_json(j, c, out);
  return kOk;
}

struct LandenOpts {
  double g2 = -72.0, g3 = 76.0, e1 = 1.0;
  int points = 50;
  int random = 0;
  std::uint64_t seed = 7;
};

constexpr double kLandenRelationTol = 1e-12;
constexpr double kLandenFunctionTol = 1e-8;

// Worst function-level Landen residual over n random points of the lower cell.
double landen_function_residual(const LandenPair& pr, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto& lo = pr.lower;
  double clear = 0.05 * std::min(std::abs(lo.omega1), std::abs(lo.omega3));
  double worst = 0.0;
  int placed = 0;
  for (int tries = 0; placed < n && tries < 50 * n; ++tries) {
    cplx x = U(rng) * lo.omega1 + U(rng) * lo.omega3;
    if (std::abs(reduce_to_cell(lo, x)) < clear || std::abs(reduce_to_cell(lo, x - pr.omega)) < clear ||
        std::abs(reduce_to_cell(lo, x + pr.omega)) < clear) {
      continue;
    }
    LandenResiduals zs = landen_zeta_sigma_identity(pr, x);
    worst = std::max({worst, landen_wp_identity(pr, x), landen_wp_sum_identity(pr, x), zs.zeta, zs.sigma});
    ++placed;
  }
  if (placed < n) throw Error(ErrorCode::Unresolvable, "could not place Landen sample points");
  return worst;
}

bool near_integer(cplx z) {
  return std::abs(z.imag()) < 1e-9 && std::abs(z.real() - std::round(z.real())) < 1e-9 &&
         std::abs(z.real()) < 1e12;
}

int cmd_landen(const LandenOpts& o, const Common& c, std::ostream& out) {
  EllipticInvariants lower = periods_from_invariants(o.g2, o.g3);
  LandenPair pr = landen_descend(lower, o.e1);
  std::mt19937_64 rng(o.seed);
  auto rel = landen_relations(pr);
  double worst_rel = *std::max_element(rel.begin(), rel.end());
  double worst_fn = landen_function_residual(pr, o.points, rng);
  bool pass = worst_rel <= kLandenRelationTol && worst_fn <= kLandenFunctionTol;

  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "landen-check";
  j["g2"] = o.g2;
  j["g3"] = o.g3;
  j["e1"] = o.e1;
  j["G2"] = cj(pr.upper.g2);
  j["G3"] = cj(pr.upper.g3);
  j["relations"] = json{{"E1_plus_2e1", rel[0]}, {"root_difference", rel[1]},
                        {"polynomial_1", rel[2]}, {"polynomial_2", rel[3]}};
  if (near_integer(o.g2) && near_integer(o.g3) && near_integer(pr.upper.g2) && near_integer(pr.upper.g3)) {
    using I = long long;
    I g2 = std::llround(o.g2), g3 = std::llround(o.g3);
    I G2 = std::llround(pr.upper.g2.real()), G3 = std::llround(pr.upper.g3.real());
    I p1 = -32 * g2 * g3 + 22 * g3 * G2 + 11 * g2 * G3 - G2 * G3;
    I p2 = 196 * g2 * g2 * g2 + 49 * g2 * g2 * G2 - 7260 * g3 * g3 + 660 * g3 * G3 - 15 * G3 * G3;
    j["integer_identity"] = json{{"G2", G2}, {"G3", G3}, {"polynomial_1", p1}, {"polynomial_2", p2}};
    pass = pass && p1 == 0 && p2 == 0;
  }
  j["function_identities_max"] = worst_fn;
  j["points"] = o.points;

  if (o.random > 0) {
    std::uniform_real_distribution<double> Ux(0.1, 3.0), Uy(-3.0, 3.0);
    double r_rel = 0.0, r_fn = 0.0;
    for (int i = 0; i < o.random; ++i) {
      double ex = Ux(rng), ey = Uy(rng);
      EllipticSolution sol(make_slice(ex, ey, 1.0));
      auto rr = landen_relations(sol.landen());
      r_rel = std::max(r_rel, *std::max_element(rr.begin(), rr.end()));
      r_fn = std::max(r_fn, landen_function_residual(sol.landen(), o.points, rng));
    }
    j["random"] = json{{"count", o.random}, {"relations_max", r_rel}, {"function_identities_max", r_fn}};
    pass = pass && r_rel <= kLandenRelationTol && r_fn <= kLandenFunctionTol;
  }
  j["tolerances"] = json{{"relations", kLandenRelationTol}, {"functions", kLandenFunctionTol}};
  j["pass"] = pass;
  write_json(j, c, out);
  return pass ? kOk : kVerificationFailed;
}

struct VerifyOpts {
  int samples = 100;
  std::uint64_t seed = 7;
  bool pipeline = false;
  int off_slice = 10;
  bool timing = false;
  bool table = false;
};

std::string report_csv(const VerificationReport& rep, bool timing) {
  std::ostringstream os;
  os << "name,max_residual,tolerance,pass,samples,skipped" << (timing ? ",runtime_ms" : "") << "\n";
  for (const auto& r : rep.records) {
    os << r.name << "," << fmt(r.max_residual) << "," << fmt(r.tolerance) << "," << (r.pass ? 1 : 0) << ","
       << r.samples << "," << r.skipped;
    if (timing) os << "," << fmt(r.runtime_ms);
    os << "\n";
  }
  return os.str();
}

int cmd_verify(const VerifyOpts& o, const SliceOpts& s, const Common& c, std::ostream& out,
               std::ostream& err) {
  if (o.samples < 1) throw UsageError("--samples must be positive");
  EllipticSliceParams slice = s.slice();
  VerificationReport rep = verify_slice(slice, o.samples, o.seed);
  if (o.pipeline) {
    PipelinePoint on;
    on.slice = slice;
    on.params = slice.params();
    std::vector<PipelinePoint> grid{on};
    auto off = random_off_slice_points(o.off_slice, o.seed);
    grid.insert(grid.end(), off.begin(), off.end());
    rep.merge(verify_subequation_pipeline(grid, c.digits));
  }
  Sink sink(c.output, out);
  if (c.format == "csv") {
    sink.get() << report_csv(rep, o.timing);
  } else {
    sink.get() << rep.to_json(o.timing) << "\n";
  }
  if (o.table) err << rep.to_table(o.timing);
  return rep.overall ? kOk : kVerificationFailed;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

// Lines "key = value"; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (key.empty() || key == "config") throw UsageError(path + ":" + std::to_string(no) + ": bad key");
    kv.emplace_back(key, value);
  }
  return kv;
}

// Inserts config entries not given on the command line right after the command name.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  auto given = [&](const std::string& key) {
    for (const auto& a : args)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> extra;
  for (const auto& [k, v] : read_config(path))
    if (!given(k)) extra.push_back("--" + k + "=" + v);
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

int exit_for(const Error& e) {
  return e.code() == ErrorCode::InvalidArgument ? kUsage : kNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Meromorphic traveling waves of the complex Ginzburg-Landau equation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand help for every command");

  Common common;
  if (const char* env = std::getenv("CGLWAVES_PRECISION")) {
    char* end = nullptr;
    long d = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || d < 15 || d > 100000) {
      err << "error: CGLWAVES_PRECISION must be an integer of at least 15\n";
      return kUsage;
    }
    common.digits = static_cast<unsigned>(d);
  }
  SliceOpts slice;
  GenericOpts generic;

  auto* reduce = app.add_subcommand("reduce", "physical coefficients to reduced parameters");
  ReduceOpts ro;
  add_common(reduce, common, false);
  reduce->add_option("--p-re", ro.p_re)->capture_default_str();
  reduce->add_option("--p-im", ro.p_im)->capture_default_str();
  reduce->add_option("--q-re", ro.q_re)->capture_default_str();
  reduce->add_option("--q-im", ro.q_im)->capture_default_str();
  reduce->add_option("--r-re", ro.r_re)->capture_default_str();
  reduce->add_option("--r-im", ro.r_im)->capture_default_str();
  reduce->add_option("--gamma", ro.gamma)->capture_default_str();
  reduce->add_option("--c", ro.c, "wave speed")->capture_default_str();
  reduce->add_option("--omega", ro.omega, "frequency")->capture_default_str();

  auto* laurent = app.add_subcommand("laurent", "Laurent series of the pole or zero families");
  LaurentOpts lo;
  add_common(laurent, common, false);
  add_slice(laurent, slice, false);
  add_generic(laurent, generic);
  laurent->add_option("--equation", lo.equation)->check(CLI::IsMember({"cgl3", "cgl5"}))->capture_default_str();
  laurent->add_option("--family", lo.family)->check(CLI::IsMember({"pole", "zero"}))->capture_default_str();
  laurent->add_option("--terms", lo.terms, "number of series terms")->check(CLI::Range(2, 100000))->capture_default_str();
  laurent->add_option("--leading", lo.leading, "expand only this leading-order index");
  laurent->add_option("--branch", lo.branch, "zero family: residue of psi is j/2 with j = +i or -i")
      ->check(CLI::IsMember({"+i", "-i"}))
      ->capture_default_str();
  laurent->add_option("--arb0", lo.arb0, "zero family: first free constant (decimal)")->capture_default_str();
  laurent->add_option("--arb1", lo.arb1, "zero family: second free constant (decimal)")->capture_default_str();

  auto* fit = app.add_subcommand("subeq-fit", "fit a first-order polynomial subequation to the Laurent data");
  FitOpts fo;
  add_common(fit, common, false);
  add_slice(fit, slice, false);
  add_generic(fit, generic);
  fit->add_option("--equation", fo.equation)->check(CLI::IsMember({"cgl3", "cgl5"}))->capture_default_str();
  fit->add_option("--m", fo.m, "degree in u'")->check(CLI::Range(1, 12))->capture_default_str();
  fit->add_option("--jmax", fo.j_max, "rows per series (default (m+1)^2 + 4)");
  fit->add_option("--subset", fo.subset, "family indices to impose (default all)");

  auto* eval = app.add_subcommand(
      "eval",
      "evaluate the elliptic solution along a segment\n"
      "columns: xi_re, xi_im, M_re, M_im, psi_re, psi_im, dlogA_re, dlogA_im,\n"
      "res_system1, res_system2, res_order3, res_subeq (scaled residuals; NaN near poles)");
  EvalOpts eo;
  add_common(eval, common, true, {"csv", "json"});
  add_slice(eval, slice, true);
  eval->add_option("--points", eo.points)->capture_default_str();
  eval->add_option("--start", eo.start, "real part of the first point")->capture_default_str();
  eval->add_option("--length", eo.length, "segment length (default one real period)");
  eval->add_option("--xi-im", eo.xi_im, "imaginary offset (default: clearest line)");

  auto* affixes = app.add_subcommand("affixes", "lattices and pole affixes of the slice solution");
  add_common(affixes, common, false);
  add_slice(affixes, slice, true);

  auto* landen = app.add_subcommand("landen-check", "Landen relations between the two lattices");
  LandenOpts lno;
  add_common(landen, common, false);
  landen->add_option("--g2", lno.g2)->capture_default_str();
  landen->add_option("--g3", lno.g3)->capture_default_str();
  landen->add_option("--e1", lno.e1, "root of 4t^3 - g2 t - g3 fixing the half-period")->capture_default_str();
  landen->add_option("--points", lno.points)->check(CLI::Range(1, 1000000))->capture_default_str();
  landen->add_option("--random", lno.random, "also check this many random slices")->capture_default_str();
  landen->add_option("--seed", lno.seed)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run every cross-check on a slice");
  VerifyOpts vo;
  add_common(verify, common, true, {"json", "csv"});
  add_slice(verify, slice, true);
  verify->add_option("--samples", vo.samples)->capture_default_str();
  verify->add_option("--seed", vo.seed)->capture_default_str();
  verify->add_flag("--pipeline", vo.pipeline, "also run the subequation fit on and off the slice");
  verify->add_option("--off-slice", vo.off_slice, "off-slice points for --pipeline")->capture_default_str();
  verify->add_flag("--timing", vo.timing, "include runtimes (output no longer reproducible)");
  verify->add_flag("--table", vo.table, "print a table to standard error");

  try {
    std::vector<std::string> args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
      out << sub->help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (reduce->parsed()) return cmd_reduce(ro, common, out);
    if (laurent->parsed()) return cmd_laurent(lo, slice, generic, common, out);
    if (fit->parsed()) return cmd_subeq_fit(fo, slice, generic, common, out);
    if (eval->parsed()) return cmd_eval(eo, slice, common, out);
    if (affixes->parsed()) return cmd_affixes(slice, common, out);
    if (landen->parsed()) return cmd_landen(lno, common, out);
    if (verify->parsed()) return cmd_verify(vo, slice, common, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace cglwaves::cli
