#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "cglwaves/laurent.hpp"
#include "cglwaves/model.hpp"
#include "cglwaves/mp.hpp"

namespace cglwaves {

struct Monomial {
  int j;  // power of u
  int k;  // power of u'
};

// {(j,k): 0 <= k <= m, 0 <= j <= 2m - 2k}, ordered by k then j.
std::vector<Monomial> ansatz_indices(int m);

// F(u,u') = Σ a_{j,k} u^j u'^k.
struct SubequationAnsatz {
  int m = 0;
  std::vector<Monomial> index;
  std::vector<cplx> coefficients;

  cplx coefficient(int j, int k) const;
};

struct FitReport {
  int rank = 0;
  int nullity = 0;
  int rows = 0;
  int cols = 0;
  std::optional<SubequationAnsatz> solution;  // normalized a_{0,m} = 1
  std::vector<double> singular_values;        // descending
  double residual_of_fit = 0.0;               // |A v| / (|A| |v|)
  double rank_threshold = 0.0;                // relative to σ_max
  unsigned digits = 0;
};

struct LinearSystem {
  int rows = 0;
  int cols = 0;
  std::vector<Monomial> index;
  std::vector<Cplx> a;  // row-major
  unsigned digits = 0;

  const Cplx& operator()(int r, int c) const { return a[static_cast<size_t>(r * cols + c)]; }
  Cplx& operator()(int r, int c) { return a[static_cast<size_t>(r * cols + c)]; }
};

constexpr double kRankThreshold = 1e-30;

// Rows: for each series u and J = 0..j_max, the coefficient of χ^{v+J} of
// F(u,u'), v being the lowest valuation among the ansatz monomials.
LinearSystem build_linear_system(const std::vector<LaurentSeries>& u, int m, int j_max);
LinearSystem build_linear_system(const std::vector<LaurentFamily>& families, int m, int j_max);

FitReport solve_nullspace(const LinearSystem& system);

inline int default_j_max(int m) { return (m + 1) * (m + 1) + 4; }

// Leading orders -> pole families -> linear system -> null space.
// `subset` selects families by position in leading_orders(); empty = all.
FitReport fit_subequation(const CglParams& params, Equation eq, int m,
                          unsigned digits = kDefaultDigits, std::optional<int> j_max = {},
                          const std::vector<int>& subset = {});

FitReport fit_subequation(const MpParams& params, Equation eq, int m,
                          unsigned digits = kDefaultDigits, std::optional<int> j_max = {},
                          const std::vector<int>& subset = {});

struct SubequationValue {
  cplx value;
  double scale;  // largest monomial magnitude, at least 1
  double scaled() const { return std::abs(value) / scale; }
};

SubequationValue subequation_residual(const SubequationAnsatz& ansatz, cplx u, cplx u_prime);

// Built-in subequations of the elliptic family. ex, ey, e_i, csi as in the
// constrained slice; j = ±i selects the branch of the complex one.
SubequationAnsatz m_subequation(double ex, double ey, double e_i, double csi);
SubequationAnsatz psi_subequation(double ex, double ey, double csi);
SubequationAnsatz dlog_amplitude_subequation(double ey, double csi, cplx j);

}  // namespace cglwaves
