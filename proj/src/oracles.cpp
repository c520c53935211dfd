#include "icbf/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace icbf::oracle {
namespace {

constexpr double kDualCap = 1e15;
constexpr double kGolden = 0.6180339887498949;

double dot(const Dense& a, const Dense& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Maximises a concave g on [0, inf). Returns the maximiser, or +inf when g is
// still increasing at kDualCap.
template <class G>
double maximize_concave(const G& g) {
  double hi = 1.0;
  while (g(2.0 * hi) > g(hi)) {
    hi *= 2.0;
    if (hi > kDualCap) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  hi *= 2.0;
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 400 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + kGolden * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - kGolden * (hi - lo);
      g1 = g(x1);
    }
  }
  const double mid = 0.5 * (lo + hi);
  // The endpoint 0 is the answer whenever the search collapsed onto it.
  return g(0.0) >= g(mid) ? 0.0 : mid;
}

QpAnswer infeasible(std::size_t m) {
  QpAnswer a;
  a.feasible = false;
  a.value = std::numeric_limits<double>::infinity();
  a.v.assign(m, 0.0);
  return a;
}

}  // namespace

QpAnswer min_norm_one(const Dense& b, double c) {
  const double bb = dot(b, b);
  if (bb == 0.0) {
    if (c > 0.0) return infeasible(b.size());
    return {true, 0.0, Dense(b.size(), 0.0)};
  }
  auto g = [&](double l) { return l * c - 0.25 * l * l * bb; };
  const double l = maximize_concave(g);
  QpAnswer a;
  a.value = g(l);
  a.v.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a.v[i] = 0.5 * l * b[i];
  return a;
}

QpAnswer min_norm_two(const Dense& b1, double c1, const Dense& b2, double c2) {
  const double g11 = dot(b1, b1), g12 = dot(b1, b2), g22 = dot(b2, b2);
  if (g22 == 0.0 && c2 > 0.0) return infeasible(b1.size());
  if (g11 == 0.0 && c1 > 0.0) return infeasible(b1.size());

  auto best_l2 = [&](double l1) {
    if (g22 == 0.0) return 0.0;
    return std::max(0.0, (2.0 * c2 - g12 * l1) / g22);
  };
  auto dual = [&](double l1, double l2) {
    return l1 * c1 + l2 * c2 - 0.25 * (g11 * l1 * l1 + 2.0 * g12 * l1 * l2 + g22 * l2 * l2);
  };
  auto outer = [&](double l1) { return dual(l1, best_l2(l1)); };

  const double l1 = g11 == 0.0 ? 0.0 : maximize_concave(outer);
  if (!std::isfinite(l1)) return infeasible(b1.size());
  const double l2 = best_l2(l1);
  QpAnswer a;
  a.value = dual(l1, l2);
  a.v.resize(b1.size());
  for (std::size_t i = 0; i < b1.size(); ++i) a.v[i] = 0.5 * (l1 * b1[i] + l2 * b2[i]);
  return a;
}

QpAnswer min_norm_antiparallel(const Dense& b1, double c1, const Dense& b2, double c2) {
  const double n1 = std::sqrt(dot(b1, b1));
  const double n2 = std::sqrt(dot(b2, b2));
  const double lo = c1 / n1;
  const double hi = -c2 / n2;
  if (lo > hi) return infeasible(b1.size());
  const double s = std::clamp(0.0, lo, hi);
  QpAnswer a;
  a.value = s * s;
  a.v.resize(b1.size());
  for (std::size_t i = 0; i < b1.size(); ++i) a.v[i] = s * b1[i] / n1;
  return a;
}

QpAnswer min_norm_scalar(const std::vector<double>& b, const std::vector<double>& c) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] > 0.0) {
      lo = std::max(lo, c[i] / b[i]);
    } else if (b[i] < 0.0) {
      hi = std::min(hi, c[i] / b[i]);
    } else if (c[i] > 0.0) {
      return infeasible(1);
    }
  }
  if (lo > hi) return infeasible(1);
  const double s = std::clamp(0.0, lo, hi);
  return {true, s * s, Dense{s}};
}

Dense integrate(const Field& f, Dense x, const Signal& u, double horizon, double h) {
  const std::size_t n = x.size();
  auto axpy = [n](const Dense& x0, double a, const Dense& k) {
    Dense out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x0[i] + a * k[i];
    return out;
  };
  double s = 0.0;
  while (s < horizon) {
    const double step = std::min(h, horizon - s);
    if (step <= 1e-15 * std::max(1.0, horizon)) break;
    const Dense k1 = f(x, u(s));
    const Dense k2 = f(axpy(x, 0.5 * step, k1), u(s + 0.5 * step));
    const Dense k3 = f(axpy(x, 0.5 * step, k2), u(s + 0.5 * step));
    const Dense k4 = f(axpy(x, step, k3), u(s + step));
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    s += step;
  }
  return x;
}

double partial(const std::function<double(const Dense&)>& g, Dense x, std::size_t i) {
  const double x0 = x[i];
  const double h = 1e-3 * (1.0 + std::abs(x0));
  auto at = [&](double off) {
    x[i] = x0 + off;
    return g(x);
  };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

}  // namespace icbf::oracle
