#pragma once

#include <functional>
#include <string>

#include "icbf/numerics.hpp"
#include "icbf/predictor.hpp"

namespace icbf {

using ControllerField = std::function<InputVec(const StateVec&, const InputVec&)>;

// Differentiable safety function h(x, u). The safe set is {h >= 0}.
//
// Gradients are analytic when `grad_x` / `grad_u` are set; otherwise they
// fall back to central differences with step 1e-6 * (1 + |coordinate|).
struct Barrier {
  enum class Label {
    state,           // depends on x only; cannot be used in the filter directly
    state_extended,  // derivative lift of a state barrier
    input,
    plain,
  };
  using Eval = std::function<double(const StateVec&, const InputVec&)>;
  using Grad = std::function<Vec(const StateVec&, const InputVec&)>;

  std::string name;
  Label label = Label::plain;
  Eval eval;
  Grad grad_x;
  Grad grad_u;

  double operator()(const StateVec& x, const InputVec& u) const { return eval(x, u); }
  Vec dx(const StateVec& x, const InputVec& u) const;
  Vec du(const StateVec& x, const InputVec& u) const;
};

Vec central_diff_x(const Barrier::Eval& h, const StateVec& x, const InputVec& u);
Vec central_diff_u(const Barrier::Eval& h, const StateVec& x, const InputVec& u);

// Robust tightening r = mu(h) * |b| + sigma(h) * |b|^2.
struct RobustMarginSpec {
  DecayFn mu;
  DecayFn sigma;
};

// One affine constraint b^T v >= a + r on the filter correction v.
struct ConstraintRow {
  double a = 0.0;
  InputVec b;
  double r = 0.0;
  double barrier_value = 0.0;

  double rhs() const { return a + r; }
};

// h_e(x, u) = dh_x/dx(x) f(x, u) + alpha_x(h_x(x)). Gradients of the result
// are finite differences; models with closed forms should build their own
// Barrier instead. Throws MisuseError unless `h_x` is labelled `state`.
Barrier extend_state_barrier(const Barrier& h_x, const SystemModel& model,
                             const ClassKFn& alpha_x);

// b = (dh/du)^T,  a = -dh/dx f(x,u) - dh/du phi(x,u) - alpha(h(x,u)),  r = 0.
ConstraintRow constraint_row(const Barrier& h, const SystemModel& model,
                             const ControllerField& phi, const ClassKFn& alpha,
                             const StateVec& x, const InputVec& u);

ConstraintRow robust_margin(ConstraintRow row, const RobustMarginSpec& spec);

// h - alpha^{-1}( -(mu(0) - delta)^2 / (4 sigma(h)) ) at (x, u).
double inflated_value(const Barrier& h, const ClassKFn& alpha, const RobustMarginSpec& spec,
                      double delta, const StateVec& x, const InputVec& u);
double inflated_value(double h_value, const ClassKFn& alpha, const RobustMarginSpec& spec,
                      double delta);

}  // namespace icbf
