#include "icbf/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "icbf/acc_model.hpp"
#include "icbf/history.hpp"
#include "icbf/oracles.hpp"
#include "icbf/predictor.hpp"
#include "icbf/qp_filter.hpp"

namespace icbf::selftest {
namespace {

using oracle::Dense;

constexpr double kValueTol = 1e-6;
constexpr double kGradTol = 1e-5;

struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  Dense vec(int m) {
    Dense v(m);
    for (auto& x : v) x = uniform(-5.0, 5.0);
    return v;
  }
  std::mt19937_64 gen;
};

InputVec to_vec(const Dense& d) {
  InputVec v(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) v[static_cast<Eigen::Index>(i)] = d[i];
  return v;
}

ConstraintRow row(const Dense& b, double a, double r = 0.0) {
  ConstraintRow out;
  out.b = to_vec(b);
  out.a = a;
  out.r = r;
  return out;
}

void fail(SuiteResult& s, const std::string& what) {
  if (s.failures++ == 0) s.first_failure = what;
}

double value_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Compares a filter result with an oracle answer on the rows it was built from.
void compare(SuiteResult& s, const FilterResult& got, const oracle::QpAnswer& want,
             const std::vector<ConstraintRow>& rows, long index) {
  ++s.cases;
  std::ostringstream where;
  where << "case " << index;
  if (got.feasible != want.feasible) {
    fail(s, where.str() + ": feasibility verdict differs from oracle");
    return;
  }
  if (!want.feasible) return;
  const double err = value_error(got.v.squaredNorm(), want.value);
  s.worst = std::max(s.worst, err);
  if (err > kValueTol) {
    fail(s, where.str() + ": |v|^2 = " + std::to_string(got.v.squaredNorm()) + ", oracle " +
                std::to_string(want.value));
    return;
  }
  for (const auto& r : rows) {
    const double slack = r.b.dot(got.v) - r.rhs();
    if (slack < -slack_tolerance(r.b.norm() * got.v.norm(), r.rhs())) {
      fail(s, where.str() + ": constraint violated by " + std::to_string(-slack));
      return;
    }
  }
}

}  // namespace

SuiteResult qp_single(const Options& opt) {
  SuiteResult s;
  s.name = "qp-single";
  Rng rng(opt.seed);
  for (long i = 0; i < opt.single; ++i) {
    const int m = rng.pick(1, 3);
    const Dense b = rng.vec(m);
    const double a = rng.uniform(-5.0, 5.0);
    const ConstraintRow r = row(b, a);
    const FilterResult got = solve_single(r);
    compare(s, got, oracle::min_norm_one(b, a), {r}, i);
    if (m == 1) {
      --s.cases;
      compare(s, got, oracle::min_norm_scalar(b, {a}), {r}, i);
    }
  }
  return s;
}

SuiteResult qp_pairs(const Options& opt) {
  SuiteResult s;
  s.name = "qp-pairs";
  Rng rng(opt.seed + 1);
  for (long i = 0; i < opt.pairs; ++i) {
    const int m = rng.pick(1, 3);
    const Dense b1 = rng.vec(m), b2 = rng.vec(m);
    const double a1 = rng.uniform(-5.0, 5.0), a2 = rng.uniform(-5.0, 5.0);
    const ConstraintRow r1 = row(b1, a1), r2 = row(b2, a2);
    const FilterResult got = solve_two(r1, r2);
    const auto want = m == 1 ? oracle::min_norm_scalar({b1[0], b2[0]}, {a1, a2})
                             : oracle::min_norm_two(b1, a1, b2, a2);
    compare(s, got, want, {r1, r2}, i);
  }
  return s;
}

SuiteResult qp_antiparallel(const Options& opt) {
  SuiteResult s;
  s.name = "qp-antiparallel";
  Rng rng(opt.seed + 2);
  for (long i = 0; i < opt.antiparallel; ++i) {
    const int m = rng.pick(1, 3);
    const Dense b1 = rng.vec(m);
    const double k = rng.uniform(0.1, 5.0);
    Dense b2(m);
    for (int j = 0; j < m; ++j) b2[j] = -k * b1[j];
    const double a1 = rng.uniform(-5.0, 5.0), a2 = rng.uniform(-5.0, 5.0);
    const ConstraintRow r1 = row(b1, a1), r2 = row(b2, a2);
    compare(s, solve_two(r1, r2), oracle::min_norm_antiparallel(b1, a1, b2, a2), {r1, r2}, i);
  }
  return s;
}

SuiteResult compatibility(const Options& opt) {
  SuiteResult s;
  s.name = "compatibility";
  Rng rng(opt.seed + 3);
  const long generic = std::max(0L, opt.compat - opt.antiparallel);
  for (long i = 0; i < opt.compat; ++i) {
    const int m = rng.pick(1, 3);
    Dense b1 = rng.vec(m), b2 = rng.vec(m);
    if (i >= generic) {
      const double k = rng.uniform(0.1, 5.0);
      for (int j = 0; j < m; ++j) b2[j] = -k * b1[j];
    } else {
      const int zero = rng.pick(0, 19);
      if (zero == 0) b1.assign(m, 0.0);
      if (zero == 1) b2.assign(m, 0.0);
    }
    const double a1 = rng.uniform(-5.0, 5.0), m1 = rng.uniform(0.0, 2.0);
    const double a2 = rng.uniform(-5.0, 5.0), m2 = rng.uniform(0.0, 2.0);
    const ConstraintRow r1 = row(b1, a1, m1), r2 = row(b2, a2, m2);
    // Zero rows carry no margin.
    ConstraintRow e = r1, u = r2;
    if (e.b.norm() == 0.0) e.r = 0.0;
    if (u.b.norm() == 0.0) u.r = 0.0;
    ++s.cases;
    const bool verdict = check_compatibility(e, u).ok;
    const bool feasible = solve_two(e, u).feasible;
    if (verdict != feasible) {
      fail(s, "case " + std::to_string(i) + ": compatibility " + (verdict ? "ok" : "fails") +
                  " but solve_two is " + (feasible ? "feasible" : "infeasible"));
    }
  }
  return s;
}

SuiteResult predictor_accuracy(const Options& opt) {
  (void)opt;
  SuiteResult s;
  s.name = "predictor";
  constexpr double kFine = 1e-5;

  // Scalar plant x' = -x + u with a smooth committed input on a 1 ms grid.
  SystemModel scalar;
  scalar.n = 1;
  scalar.m = 1;
  scalar.f = [](const StateVec& x, const InputVec& u) {
    StateVec d(1);
    d[0] = -x[0] + u[0];
    return d;
  };
  // The committed input is linear in time, so its piecewise-linear
  // interpolation is exact and any remaining error belongs to the integrator.
  const double tau = 1.2, hist_dt = 1e-3;
  const auto input = [](double t) { return 0.5 + 0.8 * t; };
  const long n = std::lround(tau / hist_dt);
  InputHistory filled(hist_dt, tau, -tau, InputVec::Constant(1, input(-tau)));
  for (long k = 1; k <= n; ++k) filled.push(InputVec::Constant(1, input(-tau + k * hist_dt)));
  const oracle::Signal interp = [&](double sv) { return input(-tau + sv); };
  const oracle::Field scalar_field = [](const Dense& x, double u) { return Dense{-x[0] + u}; };
  const double x0 = 0.7;
  const double ref = oracle::integrate(scalar_field, {x0}, interp, tau, kFine)[0];
  StateVec x(1);
  x[0] = x0;
  const double e1 = std::abs(predict(scalar, x, filled, tau, IntegratorConfig(0.1))[0] - ref);
  const double e2 = std::abs(predict(scalar, x, filled, tau, IntegratorConfig(0.05))[0] - ref);
  ++s.cases;
  const double ratio = e1 / std::max(e2, 1e-300);
  s.worst = e2;
  if (!(ratio >= 4.0)) {
    fail(s, "halving dt improved the scalar prediction by only " + std::to_string(ratio) + "x");
  }
  ++s.cases;
  const double e_grid = std::abs(predict(scalar, x, filled, tau, IntegratorConfig(hist_dt))[0] - ref);
  s.worst = std::max(s.worst, e_grid);
  if (e_grid > 1e-6) fail(s, "scalar prediction error " + std::to_string(e_grid));

  // ACC plant from (105, 20) with zero committed input.
  const acc::AccParams p;
  InputHistory zero(1e-3, tau, 0.0, InputVec::Zero(1));
  const StateVec xp = predict(acc::make_model(p), acc::AccState{105.0, 20.0}.vec(), zero, tau,
                              IntegratorConfig(1e-3));
  const oracle::Field acc_field = [&](const Dense& xs, double u) {
    return Dense{p.v_L - xs[1], u - (p.c0 + p.c1 * xs[1] + p.c2 * xs[1] * xs[1])};
  };
  const Dense acc_ref =
      oracle::integrate(acc_field, {105.0, 20.0}, [](double) { return 0.0; }, tau, kFine);
  ++s.cases;
  const double e_acc = std::max(std::abs(xp[0] - acc_ref[0]), std::abs(xp[1] - acc_ref[1]));
  s.worst = std::max(s.worst, e_acc);
  if (e_acc > 1e-6) fail(s, "ACC prediction error " + std::to_string(e_acc));
  return s;
}

SuiteResult gradients(const Options& opt) {
  SuiteResult s;
  s.name = "gradients";
  Rng rng(opt.seed + 5);
  const acc::AccParams p;
  const Barrier hx = acc::make_hx(p), he = acc::make_he(p), hu = acc::make_hu(p);

  auto check = [&](double analytic, double fd, const std::string& what, long i) {
    ++s.cases;
    const double err = std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
    s.worst = std::max(s.worst, err);
    if (err > kGradTol) {
      fail(s, "point " + std::to_string(i) + ": " + what + " analytic " +
                  std::to_string(analytic) + " vs " + std::to_string(fd));
    }
  };
  auto split = [](const Dense& w) {
    StateVec x(2);
    x << w[0], w[1];
    InputVec u(1);
    u << w[2];
    return std::pair{x, u};
  };

  for (long i = 0; i < opt.gradient_points; ++i) {
    const Dense w{rng.uniform(0.0, 150.0), rng.uniform(0.0, 35.0), rng.uniform(-p.u_max, p.u_max)};
    const auto [x, u] = split(w);
    const acc::AccState st{w[0], w[1]};

    for (const Barrier* h : {&hx, &he, &hu}) {
      const auto g = [&](const Dense& q) {
        const auto [xq, uq] = split(q);
        return h->eval(xq, uq);
      };
      const Vec gx = h->dx(x, u);
      const Vec gu = h->du(x, u);
      check(gx[0], oracle::partial(g, w, 0), h->name + " d/dD", i);
      check(gx[1], oracle::partial(g, w, 1), h->name + " d/dv", i);
      check(gu[0], oracle::partial(g, w, 2), h->name + " d/du", i);
    }

    const auto phi = [&](const Dense& q) {
      return acc::integral_phi(p, acc::AccState{q[0], q[1]}, q[2]);
    };
    const Eigen::RowVector2d px = acc::phi_grad_x(p, st, w[2]);
    check(px[0], oracle::partial(phi, w, 0), "phi d/dD", i);
    check(px[1], oracle::partial(phi, w, 1), "phi d/dv", i);
    check(acc::phi_grad_u(p), oracle::partial(phi, w, 2), "phi d/du", i);

    const auto kd = [&](const Dense& q) { return acc::nominal_kd(p, acc::AccState{q[0], q[1]}); };
    const Eigen::RowVector2d kg = acc::kd_gradient(p);
    check(kg[0], oracle::partial(kd, w, 0), "k_d d/dD", i);
    check(kg[1], oracle::partial(kd, w, 1), "k_d d/dv", i);

    const auto res = [&](const Dense& q) { return acc::resistance(p, q[1]); };
    check(acc::resistance_slope(p, w[1]), oracle::partial(res, w, 1), "p'(v)", i);

    const Eigen::Matrix2d jx = acc::acc_jac_x(p, st);
    const Eigen::Vector2d ju = acc::acc_jac_u(p);
    for (int r = 0; r < 2; ++r) {
      const auto fr = [&](const Dense& q) {
        return acc::acc_dynamics(p, acc::AccState{q[0], q[1]}, q[2])[r];
      };
      check(jx(r, 0), oracle::partial(fr, w, 0), "f_" + std::to_string(r) + " d/dD", i);
      check(jx(r, 1), oracle::partial(fr, w, 1), "f_" + std::to_string(r) + " d/dv", i);
      check(ju[r], oracle::partial(fr, w, 2), "f_" + std::to_string(r) + " d/du", i);
    }
  }
  return s;
}

std::vector<SuiteResult> run_all(const Options& opt) {
  return {qp_single(opt),     qp_pairs(opt),           qp_antiparallel(opt),
          compatibility(opt), predictor_accuracy(opt), gradients(opt)};
}

bool report(std::ostream& out, const std::vector<SuiteResult>& results) {
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed();
    out << (r.passed() ? "ok   " : "FAIL ") << r.name << ": " << r.cases << " cases, "
        << r.failures << " failures, worst " << r.worst;
    if (!r.first_failure.empty()) out << " (" << r.first_failure << ")";
    out << '\n';
  }
  return all;
}

}  // namespace icbf::selftest
