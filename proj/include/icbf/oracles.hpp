#pragma once

#include <functional>
#include <vector>

// Reference computations for the test suites. Nothing here calls into the
// filter, predictor or barrier code; each routine reaches its answer by a
// different route (dual line searches, interval reasoning, fine-step
// integration, five-point differences).
namespace icbf::oracle {

using Dense = std::vector<double>;

struct QpAnswer {
  bool feasible = true;
  double value = 0.0;  // optimal |v|^2
  Dense v;
};

// min |v|^2  s.t.  b^T v >= c, by golden-section search on the concave dual
// g(l) = l c - l^2 |b|^2 / 4 over l >= 0.
QpAnswer min_norm_one(const Dense& b, double c);

// min |v|^2  s.t.  b1^T v >= c1, b2^T v >= c2. The dual is maximised over
// l2 in closed form for fixed l1 and over l1 by golden-section search with
// bracket doubling. A bracket that keeps growing past 1e15 means the dual
// is unbounded, i.e. the primal is infeasible.
QpAnswer min_norm_two(const Dense& b1, double c1, const Dense& b2, double c2);

// Exact answer when b2 = -k b1 with k > 0: along the b1 direction the
// constraints form the interval [c1 / |b1|, -c2 / |b2|].
QpAnswer min_norm_antiparallel(const Dense& b1, double c1, const Dense& b2, double c2);

// Exact answer for scalar v: intersection of half-lines.
QpAnswer min_norm_scalar(const std::vector<double>& b, const std::vector<double>& c);

using Field = std::function<Dense(const Dense& x, double u)>;
using Signal = std::function<double(double s)>;

// Integrates x' = f(x, u(s)) for s in [0, horizon] with classic RK4 at step
// h (the last step is shortened to land on the horizon).
Dense integrate(const Field& f, Dense x, const Signal& u, double horizon, double h);

// Five-point central difference of a scalar function along coordinate i.
double partial(const std::function<double(const Dense&)>& g, Dense x, std::size_t i);

// |a - b| <= rel * max(1, |b|)
bool close_rel(double a, double b, double rel);

}  // namespace icbf::oracle
