#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "icbf/barriers.hpp"

namespace icbf {

// |b| at or below this is treated as b = 0.
inline constexpr double kEpsB = 1e-9;
// Relative band for declaring two normals anti-parallel:
// |b_e||b_u| + b_e^T b_u <= kAntiParallelEps * |b_e||b_u|.
inline constexpr double kAntiParallelEps = 1e-8;
// A candidate is feasible when every slack b^T v - (a + r) is at least
// -kSlackTol * max(1, |b||v|, |a + r|).
inline constexpr double kSlackTol = 1e-9;

inline double slack_tolerance(double bv_scale, double rhs) {
  return kSlackTol * std::max({1.0, bv_scale, std::abs(rhs)});
}

enum class ActiveSet { none, first, second, both };

struct FilterResult {
  InputVec v;
  ActiveSet active_set = ActiveSet::none;
  bool feasible = true;
  std::vector<double> slack;  // b_i^T v - (a_i + r_i), one per constraint
};

enum class FailedCondition { none, cond1, cond2, cond3 };

struct CompatibilityWitness {
  InputVec b_e;
  InputVec b_u;
  double a_e = 0.0;
  double a_u = 0.0;
  double r_e = 0.0;
  double r_u = 0.0;
  double antiparallel_gap = 0.0;  // |b_e||b_u| + b_e^T b_u
  bool cond3_applicable = false;
  // cond3 was applied although the gap is not exactly zero.
  bool within_tolerance_band = false;
  double cond3_value = 0.0;  // (a_e + r_e)|b_u| + (a_u + r_u)|b_e|
};

struct CompatibilityVerdict {
  bool ok = true;
  FailedCondition failed_condition = FailedCondition::none;
  CompatibilityWitness witness;
};

// Closed-form minimizer of |v|^2 subject to b^T v >= a + r.
FilterResult solve_single(const ConstraintRow& row, double eps_b = kEpsB);

// Exact minimizer of |v|^2 subject to both rows, by enumerating the KKT
// candidates {0, projection on either row, both rows active}. Reports
// feasible = false (with v = 0) when no candidate satisfies both rows.
FilterResult solve_two(const ConstraintRow& row_e, const ConstraintRow& row_u,
                       double eps_b = kEpsB, double eps_parallel = kAntiParallelEps);

// b = 0  =>  a <= tol_a. The margin r plays no role since r = 0 when b = 0.
bool check_icbf_condition(const ConstraintRow& row, double eps_b = kEpsB, double tol_a = 0.0);

// Closed-form feasibility test for the two-row filter:
//   (1) b_e = 0 => a_e + r_e <= 0
//   (2) b_u = 0 => a_u + r_u <= 0
//   (3) b_e, b_u anti-parallel => (a_e + r_e)|b_u| + (a_u + r_u)|b_e| <= 0
CompatibilityVerdict check_compatibility(const ConstraintRow& row_e, const ConstraintRow& row_u,
                                         double eps = kAntiParallelEps, double eps_b = kEpsB);

const char* to_string(ActiveSet s);
const char* to_string(FailedCondition c);

}  // namespace icbf
