#include "cglwaves/subequation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "cglwaves/errors.hpp"

namespace cglwaves {

std::vector<Monomial> ansatz_indices(int m) {
  std::vector<Monomial> out;
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j <= 2 * m - 2 * k; ++j) out.push_back({j, k});
  return out;
}

cplx SubequationAnsatz::coefficient(int j, int k) const {
  for (size_t i = 0; i < index.size(); ++i)
    if (index[i].j == j && index[i].k == k) return coefficients[i];
  return 0.0;
}

LinearSystem build_linear_system(const std::vector<LaurentSeries>& u, int m, int j_max) {
  if (u.empty()) throw Error(ErrorCode::InvalidArgument, "no series supplied");
  LinearSystem sys;
  sys.index = ansatz_indices(m);
  sys.cols = static_cast<int>(sys.index.size());
  sys.rows = static_cast<int>(u.size()) * (j_max + 1);
  sys.a.assign(static_cast<size_t>(sys.rows * sys.cols), Cplx());
  sys.digits = static_cast<unsigned>(Real::default_precision());
  int r0 = 0;
  for (const auto& s : u) {
    if (static_cast<int>(s.c.size()) < j_max + 1) {
      throw Error(ErrorCode::InsufficientTerms,
                  "series has " + std::to_string(s.c.size()) + " terms, need " +
                      std::to_string(j_max + 1));
    }
    const int p = s.val;
    int vmin = 0;
    for (const auto& mono : sys.index) vmin = std::min(vmin, mono.j * p + mono.k * (p - 1));
    LaurentSeries up = derivative(s);
    int big = j_max + 1 + std::abs(vmin) + 2;
    std::vector<LaurentSeries> upow{constant_series(Cplx(1), big)};
    std::vector<LaurentSeries> dpow{constant_series(Cplx(1), big)};
    for (int j = 1; j <= 2 * m; ++j) upow.push_back(upow.back() * s);
    for (int k = 1; k <= m; ++k) dpow.push_back(dpow.back() * up);
    for (int c = 0; c < sys.cols; ++c) {
      const auto& mono = sys.index[static_cast<size_t>(c)];
      LaurentSeries term = upow[static_cast<size_t>(mono.j)] * dpow[static_cast<size_t>(mono.k)];
      for (int J = 0; J <= j_max; ++J) sys(r0 + J, c) = term.at(vmin + J);
    }
    r0 += j_max + 1;
  }
  return sys;
}

LinearSystem build_linear_system(const std::vector<LaurentFamily>& families, int m, int j_max) {
  std::vector<LaurentSeries> u;
  for (const auto& f : families) u.push_back(f.M);
  unsigned digits = families.empty() ? kDefaultDigits : families.front().digits;
  PrecisionGuard guard(digits);
  LinearSystem sys = build_linear_system(u, m, j_max);
  sys.digits = digits;
  return sys;
}

namespace {

using Matrix = std::vector<std::vector<Cplx>>;  // column-major: M[col][row]

Real column_norm2(const std::vector<Cplx>& v) {
  Real s = 0;
  for (const auto& x : v) s += norm(x);
  return s;
}

// Householder QR; returns the n x n triangular factor as columns.
Matrix qr_r_factor(Matrix A, int rows, int cols) {
  for (int c = 0; c < std::min(rows, cols); ++c) {
    auto& x = A[static_cast<size_t>(c)];
    Real nx = 0;
    for (int r = c; r < rows; ++r) nx += norm(x[static_cast<size_t>(r)]);
    nx = boost::multiprecision::sqrt(nx);
    if (nx == 0) continue;
    Cplx x0 = x[static_cast<size_t>(c)];
    Real ax0 = abs(x0);
    Cplx phase = ax0 == 0 ? Cplx(1) : x0 / Cplx(ax0);
    Cplx alpha = -(phase * Cplx(nx));
    std::vector<Cplx> v(static_cast<size_t>(rows - c));
    for (int r = c; r < rows; ++r) v[static_cast<size_t>(r - c)] = x[static_cast<size_t>(r)];
    v[0] -= alpha;
    Real vn = column_norm2(v);
    if (vn == 0) continue;
    for (int k = c; k < cols; ++k) {
      auto& col = A[static_cast<size_t>(k)];
      Cplx dot;
      for (int r = c; r < rows; ++r) dot += conj(v[static_cast<size_t>(r - c)]) * col[static_cast<size_t>(r)];
      Cplx f = dot * Cplx(Real(2 / vn));
      for (int r = c; r < rows; ++r) col[static_cast<size_t>(r)] -= f * v[static_cast<size_t>(r - c)];
    }
  }
  Matrix R(static_cast<size_t>(cols), std::vector<Cplx>(static_cast<size_t>(cols)));
  for (int k = 0; k < cols; ++k)
    for (int r = 0; r <= std::min(k, rows - 1); ++r)
      R[static_cast<size_t>(k)][static_cast<size_t>(r)] = A[static_cast<size_t>(k)][static_cast<size_t>(r)];
  return R;
}

// One-sided Jacobi: orthogonalizes the columns of W, accumulating V.
void jacobi_svd(Matrix& W, Matrix& V, unsigned digits) {
  const size_t n = W.size();
  V.assign(n, std::vector<Cplx>(n));
  for (size_t i = 0; i < n; ++i) V[i][i] = Cplx(1);
  Real eps = boost::multiprecision::pow(Real(10), -static_cast<int>(digits) + 3);
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (size_t p = 0; p + 1 < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        Real alpha = column_norm2(W[p]), beta = column_norm2(W[q]);
        Cplx gamma;
        for (size_t r = 0; r < W[p].size(); ++r) gamma += conj(W[p][r]) * W[q][r];
        Real ag = abs(gamma);
        if (ag == 0 || ag <= eps * boost::multiprecision::sqrt(alpha * beta)) continue;
        rotated = true;
        Cplx ph = conj(gamma / Cplx(ag));  // multiplies column q
        Real zeta = (beta - alpha) / (2 * ag);
        Real t = (zeta >= 0 ? Real(1) : Real(-1)) /
                 (boost::multiprecision::abs(zeta) + boost::multiprecision::sqrt(1 + zeta * zeta));
        Real c = 1 / boost::multiprecision::sqrt(1 + t * t);
        Real s = c * t;
        auto rotate = [&](std::vector<Cplx>& a, std::vector<Cplx>& b) {
          for (size_t r = 0; r < a.size(); ++r) {
            Cplx bq = b[r] * ph;
            Cplx ap = a[r];
            a[r] = ap * c - bq * s;
            b[r] = ap * s + bq * c;
          }
        };
        rotate(W[p], W[q]);
        rotate(V[p], V[q]);
      }
    }
    if (!rotated) break;
  }
}

}  // namespace

FitReport solve_nullspace(const LinearSystem& system) {
  if (system.rows == 0 || system.cols == 0) {
    throw Error(ErrorCode::InvalidArgument, "empty linear system");
  }
  unsigned digits = system.digits ? system.digits : kDefaultDigits;
  PrecisionGuard guard(digits);
  const int rows = std::max(system.rows, system.cols), cols = system.cols;
  Matrix A(static_cast<size_t>(cols), std::vector<Cplx>(static_cast<size_t>(rows)));
  for (int r = 0; r < system.rows; ++r) {
    Real rmax = 0;
    for (int c = 0; c < cols; ++c) {
      Real v = abs(system(r, c));
      if (v > rmax) rmax = v;
    }
    if (rmax == 0) continue;
    Cplx inv(Real(1 / rmax));
    for (int c = 0; c < cols; ++c) A[static_cast<size_t>(c)][static_cast<size_t>(r)] = system(r, c) * inv;
  }
  Matrix R = qr_r_factor(A, rows, cols);
  Matrix V;
  jacobi_svd(R, V, digits);

  std::vector<std::pair<Real, size_t>> sv;
  for (size_t i = 0; i < R.size(); ++i) sv.emplace_back(boost::multiprecision::sqrt(column_norm2(R[i])), i);
  std::sort(sv.begin(), sv.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  FitReport rep;
  rep.rows = system.rows;
  rep.cols = cols;
  rep.digits = digits;
  rep.rank_threshold = std::max(kRankThreshold, std::pow(10.0, -static_cast<double>(digits) + 20.0));
  Real smax = sv.front().first;
  Real thr = smax * Real(rep.rank_threshold);
  for (const auto& s : sv) {
    rep.singular_values.push_back(static_cast<double>(s.first));
    if (s.first > thr) ++rep.rank;
  }
  rep.nullity = cols - rep.rank;
  if (rep.nullity >= 1) {
    const auto& v = V[sv.back().second];
    int m = 0;
    for (const auto& mono : system.index) m = std::max(m, mono.k);
    size_t lead = 0;
    for (size_t i = 0; i < system.index.size(); ++i)
      if (system.index[i].j == 0 && system.index[i].k == m) lead = i;
    Real vmax = 0;
    for (const auto& x : v) vmax = std::max(vmax, Real(abs(x)));
    if (abs(v[lead]) > vmax * Real(1e-20)) {
      SubequationAnsatz ans;
      ans.m = m;
      ans.index = system.index;
      Cplx norm_c = v[lead];
      for (const auto& x : v) ans.coefficients.push_back((x / norm_c).to_std());
      rep.solution = ans;
    }
    // residual of the unscaled system
    Real num = 0, den = 0, vn = column_norm2(v);
    for (int r = 0; r < system.rows; ++r) {
      Cplx s;
      for (int c = 0; c < cols; ++c) {
        s += system(r, c) * v[static_cast<size_t>(c)];
        den += norm(system(r, c));
      }
      num += norm(s);
    }
    rep.residual_of_fit =
        den == 0 ? 0.0 : static_cast<double>(boost::multiprecision::sqrt(num / (den * vn)));
  }
  return rep;
}

FitReport fit_subequation(const CglParams& params, Equation eq, int m, unsigned digits,
                          std::optional<int> j_max, const std::vector<int>& subset) {
  PrecisionGuard guard(digits);
  return fit_subequation(MpParams(params), eq, m, digits, j_max, subset);
}

FitReport fit_subequation(const MpParams& params, Equation eq, int m, unsigned digits,
                          std::optional<int> j_max, const std::vector<int>& subset) {
  int jm = j_max.value_or(default_j_max(m));
  auto leads = leading_orders(params.to_double(), eq);
  std::vector<LaurentFamily> fams;
  std::vector<int> pick = subset;
  if (pick.empty())
    for (int i = 0; i < static_cast<int>(leads.size()); ++i) pick.push_back(i);
  for (int i : pick) {
    if (i < 0 || i >= static_cast<int>(leads.size())) {
      throw Error(ErrorCode::InvalidArgument, "family index out of range");
    }
    fams.push_back(expand_pole_family(params, leads[static_cast<size_t>(i)], jm + 1, digits));
  }
  return solve_nullspace(build_linear_system(fams, m, jm));
}

SubequationValue subequation_residual(const SubequationAnsatz& ansatz, cplx u, cplx u_prime) {
  SubequationValue out{0.0, 1.0};
  for (size_t i = 0; i < ansatz.index.size(); ++i) {
    const auto& mono = ansatz.index[i];
    cplx t = ansatz.coefficients[i] * std::pow(u, mono.j) * std::pow(u_prime, mono.k);
    out.value += t;
    out.scale = std::max(out.scale, std::abs(t));
  }
  return out;
}

namespace {

// Bivariate polynomial in (u, u') used to expand the built-in subequations.
struct Poly2 {
  std::map<std::pair<int, int>, cplx> t;

  static Poly2 constant(cplx c) {
    Poly2 p;
    p.t[{0, 0}] = c;
    return p;
  }
  static Poly2 u() {
    Poly2 p;
    p.t[{1, 0}] = 1.0;
    return p;
  }
  static Poly2 du() {
    Poly2 p;
    p.t[{0, 1}] = 1.0;
    return p;
  }
};

Poly2 operator+(Poly2 a, const Poly2& b) {
  for (const auto& [key, v] : b.t) a.t[key] += v;
  return a;
}
Poly2 operator*(const Poly2& a, const Poly2& b) {
  Poly2 r;
  for (const auto& [ka, va] : a.t)
    for (const auto& [kb, vb] : b.t) r.t[{ka.first + kb.first, ka.second + kb.second}] += va * vb;
  return r;
}
Poly2 operator*(cplx s, Poly2 a) {
  for (auto& [key, v] : a.t) v *= s;
  return a;
}
Poly2 operator+(Poly2 a, cplx s) { return a + Poly2::constant(s); }
Poly2 pw(const Poly2& a, int n) {
  Poly2 r = Poly2::constant(1.0);
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

SubequationAnsatz to_ansatz(const Poly2& p) {
  int m = 0;
  for (const auto& [key, v] : p.t) m = std::max(m, key.second);
  SubequationAnsatz a;
  a.m = m;
  a.index = ansatz_indices(m);
  a.coefficients.assign(a.index.size(), 0.0);
  for (const auto& [key, v] : p.t) {
    bool placed = false;
    for (size_t i = 0; i < a.index.size(); ++i) {
      if (a.index[i].j == key.first && a.index[i].k == key.second) {
        a.coefficients[i] = v;
        placed = true;
      }
    }
    if (!placed && std::abs(v) != 0.0) {
      throw Error(ErrorCode::InvalidArgument, "monomial outside the ansatz index set");
    }
  }
  return a;
}

}  // namespace

SubequationAnsatz m_subequation(double ex, double ey, double e_i, double csi) {
  Poly2 M = Poly2::u(), D = Poly2::du();
  Poly2 M2 = M * M;
  Poly2 f = pw(D, 4) + cplx(-2.0 * csi) * (M * pw(D, 3)) +
            cplx(72.0 * ex / e_i) * (D * D * (cplx(e_i) * M2 + cplx(-12.0 * ey))) +
            Poly2::constant(16.0 * 6561.0 * std::pow(ex, 4) / (e_i * e_i)) +
            cplx(648.0 * ex * ex / (e_i * e_i)) *
                (Poly2::constant(288.0 * ey * ey) + cplx(24.0 * e_i * ey) * M2 +
                 cplx(-e_i * e_i) * (M2 * M2)) +
            cplx(-1.0 / (3.0 * e_i)) * (M2 * pw(cplx(e_i) * M2 + cplx(-48.0 * ey), 3));
  return to_ansatz(f);
}

SubequationAnsatz psi_subequation(double ex, double ey, double csi) {
  Poly2 p = Poly2::u(), d = Poly2::du();
  auto P = [&](int n) { return pw(p, n); };
  auto c = [](double x) { return cplx(x); };
  Poly2 quad = c(-csi * (27.0 * ex * ex - 324.0 * ey * ey)) * Poly2::constant(1.0) +
               c(1440.0 * ex * ey) * p + c(27.0 * csi * ex) * P(2) + c(16.0 * ey) * P(3) +
               c(csi / 3.0) * P(4);
  Poly2 rest = c(-csi / 3.0) * P(8) + c(-32.0 * ey / 3.0) * P(7) + c(-26.0 * csi * ex) * P(6) +
               c(-1632.0 * ex * ey) * P(5) +
               c(-csi * (477.0 * ex * ex + 552.0 * ey * ey)) * P(4) +
               c(-288.0 * ey * (165.0 * ex * ex + 4.0 * ey * ey)) * P(3) +
               c(csi * ex * (2106.0 * ex * ex - 31320.0 * ey * ey)) * P(2) +
               c(128.0 * 729.0 * (ex * ex - 4.0 * ey * ey) * ex * ey) * p +
               Poly2::constant(243.0 * csi *
                               (-9.0 * std::pow(ex, 4) + 56.0 * ex * ex * ey * ey -
                                144.0 * std::pow(ey, 4)));
  Poly2 f = c(csi) * pw(d, 4) + c(-4.0 * csi) * (pw(d, 3) * (c(csi) * p + c(24.0 * ey))) +
            c(8.0) * (d * d * quad) + c(16.0) * rest;
  return to_ansatz(f);
}

SubequationAnsatz dlog_amplitude_subequation(double ey, double csi, cplx j) {
  Poly2 d = Poly2::u(), dd = Poly2::du();
  cplx k = 24.0 * j * ey;
  Poly2 a = cplx(2.0) * dd + cplx(csi) * d + k;
  Poly2 b = dd + cplx(-csi) * d + (-k);
  Poly2 inner = cplx(16.0) * (cplx(4.0) * pw(d, 3) + cplx(-3.0 * csi) * (d * d)) +
                cplx(-9.0) * (cplx(csi * csi) * Poly2::constant(1.0) + 64.0 * j * ey) *
                    (cplx(4.0) * d + csi);
  Poly2 f = a * b * b + cplx(std::pow(2.0, -11)) * (inner * inner);
  return to_ansatz(f);
}

}  // namespace cglwaves
