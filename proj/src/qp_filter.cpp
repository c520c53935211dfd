#include "icbf/qp_filter.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "icbf/errors.hpp"

namespace icbf {
namespace {

struct Candidate {
  InputVec v;
  ActiveSet active;
};

std::vector<double> slacks(const InputVec& v, const ConstraintRow& e, const ConstraintRow& u) {
  return {e.b.dot(v) - e.rhs(), u.b.dot(v) - u.rhs()};
}

}  // namespace

FilterResult solve_single(const ConstraintRow& row, double eps_b) {
  FilterResult out;
  const double rhs = row.rhs();
  const double nb2 = row.b.squaredNorm();
  out.v = InputVec::Zero(row.b.size());
  if (rhs <= 0.0) {
    out.active_set = ActiveSet::none;
  } else if (std::sqrt(nb2) > eps_b) {
    out.v = (rhs / nb2) * row.b;
    out.active_set = ActiveSet::first;
  } else {
    out.feasible = false;
  }
  out.slack = {row.b.dot(out.v) - rhs};
  return out;
}

FilterResult solve_two(const ConstraintRow& row_e, const ConstraintRow& row_u, double eps_b,
                       double eps_parallel) {
  if (row_e.b.size() != row_u.b.size()) {
    throw MisuseError("solve_two: constraint rows have different input dimensions");
  }
  const auto m = row_e.b.size();
  const double ae = row_e.rhs();
  const double au = row_u.rhs();
  const double ne = row_e.b.norm();
  const double nu = row_u.b.norm();
  const bool e_zero = ne <= eps_b;
  const bool u_zero = nu <= eps_b;

  std::array<Candidate, 4> cands;
  int count = 0;
  cands[count++] = {InputVec::Zero(m), ActiveSet::none};
  if (!e_zero && ae > 0.0) cands[count++] = {(ae / (ne * ne)) * row_e.b, ActiveSet::first};
  if (!u_zero && au > 0.0) cands[count++] = {(au / (nu * nu)) * row_u.b, ActiveSet::second};
  if (!e_zero && !u_zero) {
    const double g11 = ne * ne;
    const double g22 = nu * nu;
    const double g12 = row_e.b.dot(row_u.b);
    const double scale = ne * nu;
    const bool antiparallel = scale + g12 <= eps_parallel * scale;
    const double det = g11 * g22 - g12 * g12;
    if (!antiparallel && det > 1e-14 * g11 * g22) {
      const double le = (g22 * ae - g12 * au) / det;
      const double lu = (g11 * au - g12 * ae) / det;
      if (le >= 0.0 && lu >= 0.0) cands[count++] = {le * row_e.b + lu * row_u.b, ActiveSet::both};
    }
  }

  FilterResult best;
  best.feasible = false;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    const auto s = slacks(cands[i].v, row_e, row_u);
    // A zero row imposes 0 >= a + r; with a + r <= 0 it is vacuous.
    const double vn = cands[i].v.norm();
    const bool ok_e = e_zero ? ae <= 0.0 : s[0] >= -slack_tolerance(ne * vn, ae);
    const bool ok_u = u_zero ? au <= 0.0 : s[1] >= -slack_tolerance(nu * vn, au);
    if (!ok_e || !ok_u) continue;
    const double nv = cands[i].v.squaredNorm();
    if (nv < best_norm) {
      best_norm = nv;
      best.v = cands[i].v;
      best.active_set = cands[i].active;
      best.feasible = true;
      best.slack = s;
    }
  }
  if (!best.feasible) {
    best.v = InputVec::Zero(m);
    best.active_set = ActiveSet::none;
    best.slack = slacks(best.v, row_e, row_u);
  }
  return best;
}

bool check_icbf_condition(const ConstraintRow& row, double eps_b, double tol_a) {
  return row.b.norm() > eps_b || row.a <= tol_a;
}

CompatibilityVerdict check_compatibility(const ConstraintRow& row_e, const ConstraintRow& row_u,
                                         double eps, double eps_b) {
  CompatibilityVerdict out;
  auto& w = out.witness;
  w.b_e = row_e.b;
  w.b_u = row_u.b;
  w.a_e = row_e.a;
  w.a_u = row_u.a;
  w.r_e = row_e.r;
  w.r_u = row_u.r;

  const double ne = row_e.b.norm();
  const double nu = row_u.b.norm();
  w.antiparallel_gap = ne * nu + row_e.b.dot(row_u.b);
  w.cond3_value = row_e.rhs() * nu + row_u.rhs() * ne;

  if (ne <= eps_b && row_e.rhs() > 0.0) {
    out.ok = false;
    out.failed_condition = FailedCondition::cond1;
    return out;
  }
  if (nu <= eps_b && row_u.rhs() > 0.0) {
    out.ok = false;
    out.failed_condition = FailedCondition::cond2;
    return out;
  }
  if (ne > eps_b && nu > eps_b && w.antiparallel_gap <= eps * ne * nu) {
    w.cond3_applicable = true;
    w.within_tolerance_band = w.antiparallel_gap != 0.0;
    if (w.cond3_value > 0.0) {
      out.ok = false;
      out.failed_condition = FailedCondition::cond3;
    }
  }
  return out;
}

const char* to_string(ActiveSet s) {
  switch (s) {
    case ActiveSet::none: return "none";
    case ActiveSet::first: return "first";
    case ActiveSet::second: return "second";
    case ActiveSet::both: return "both";
  }
  return "?";
}

const char* to_string(FailedCondition c) {
  switch (c) {
    case FailedCondition::none: return "none";
    case FailedCondition::cond1: return "cond1";
    case FailedCondition::cond2: return "cond2";
    case FailedCondition::cond3: return "cond3";
  }
  return "?";
}

}  // namespace icbf
