#include "icbf/barriers.hpp"

#include <cmath>

#include "icbf/errors.hpp"

namespace icbf {
namespace {

double fd_step(double coord) { return 1e-6 * (1.0 + std::abs(coord)); }

}  // namespace

Vec central_diff_x(const Barrier::Eval& h, const StateVec& x, const InputVec& u) {
  Vec g(x.size());
  StateVec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = fd_step(x[i]);
    xp[i] = x[i] + step;
    const double hi = h(xp, u);
    xp[i] = x[i] - step;
    const double lo = h(xp, u);
    xp[i] = x[i];
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

Vec central_diff_u(const Barrier::Eval& h, const StateVec& x, const InputVec& u) {
  Vec g(u.size());
  InputVec up = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double step = fd_step(u[i]);
    up[i] = u[i] + step;
    const double hi = h(x, up);
    up[i] = u[i] - step;
    const double lo = h(x, up);
    up[i] = u[i];
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

Vec Barrier::dx(const StateVec& x, const InputVec& u) const {
  return grad_x ? grad_x(x, u) : central_diff_x(eval, x, u);
}

Vec Barrier::du(const StateVec& x, const InputVec& u) const {
  return grad_u ? grad_u(x, u) : central_diff_u(eval, x, u);
}

Barrier extend_state_barrier(const Barrier& h_x, const SystemModel& model,
                             const ClassKFn& alpha_x) {
  if (h_x.label != Barrier::Label::state) {
    throw MisuseError("extend_state_barrier expects a state-only barrier, got '" + h_x.name +
                      "'");
  }
  Barrier h_e;
  h_e.name = h_x.name.empty() ? "h_e" : h_x.name + "_extended";
  h_e.label = Barrier::Label::state_extended;
  h_e.eval = [h_x, model, alpha_x](const StateVec& x, const InputVec& u) {
    return h_x.dx(x, u).dot(model.f(x, u)) + alpha_x(h_x(x, u));
  };
  return h_e;
}

ConstraintRow constraint_row(const Barrier& h, const SystemModel& model,
                             const ControllerField& phi, const ClassKFn& alpha,
                             const StateVec& x, const InputVec& u) {
  ConstraintRow row;
  row.barrier_value = h(x, u);
  const Vec hx = h.dx(x, u);
  const Vec hu = h.du(x, u);
  row.b = hu;
  row.a = -hx.dot(model.f(x, u)) - hu.dot(phi(x, u)) - alpha(row.barrier_value);
  row.r = 0.0;
  return row;
}

ConstraintRow robust_margin(ConstraintRow row, const RobustMarginSpec& spec) {
  const double nb = row.b.norm();
  row.r = nb == 0.0 ? 0.0
                    : spec.mu(row.barrier_value) * nb + spec.sigma(row.barrier_value) * nb * nb;
  return row;
}

double inflated_value(double h_value, const ClassKFn& alpha, const RobustMarginSpec& spec,
                      double delta) {
  const double gap = spec.mu(0.0) - delta;
  return h_value - alpha.inverse(-(gap * gap) / (4.0 * spec.sigma(h_value)));
}

double inflated_value(const Barrier& h, const ClassKFn& alpha, const RobustMarginSpec& spec,
                      double delta, const StateVec& x, const InputVec& u) {
  return inflated_value(h(x, u), alpha, spec, delta);
}

}  // namespace icbf
