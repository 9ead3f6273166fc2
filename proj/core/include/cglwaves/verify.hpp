#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cglwaves/model.hpp"
#include "cglwaves/solution.hpp"

namespace cglwaves {

struct CheckRecord {
  std::string name;
  std::string description;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int samples = 0;
  int skipped = 0;
  double runtime_ms = 0.0;
  std::string note;  // set when a check could not run
};

struct VerificationReport {
  std::vector<CheckRecord> records;
  bool overall = true;

  void add(CheckRecord r);
  void merge(const VerificationReport& other);
  // Timings are left out unless asked for, so that equal inputs give equal output.
  std::string to_json(bool with_timing = false) const;
  std::string to_table(bool with_timing = false) const;
};

constexpr int kSampleRetries = 5;
constexpr double kPoleExclusion = 1e-2;  // fraction of |ω1|

// Scrambled Sobol points mapped to the lower-lattice cell, rejecting points
// closer than kPoleExclusion·|ω1| to any pole or zero.
struct CellSamples {
  std::vector<cplx> points;
  int skipped = 0;
};
CellSamples sample_cell(const EllipticSolution& sol, int n, std::uint64_t seed);

VerificationReport verify_slice(const EllipticSliceParams& slice, int n_samples,
                                std::uint64_t seed);

struct PipelinePoint {
  Equation equation = Equation::CGL5;
  CglParams params;
  std::optional<EllipticSliceParams> slice;  // on-slice points carry the slice
  int m = 4;
};

// On-slice: nullity 1 and the coefficients of the M-subequation.
// Off-slice CGL5: nullity 0. CGL3: run only.
VerificationReport verify_subequation_pipeline(const std::vector<PipelinePoint>& grid,
                                               unsigned digits = kDefaultDigits);

// Generic CGL5 parameters away from the slice.
std::vector<PipelinePoint> random_off_slice_points(int n, std::uint64_t seed);

}  // namespace cglwaves
