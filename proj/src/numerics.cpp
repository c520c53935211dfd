#include "icbf/numerics.hpp"

#include <cmath>
#include <string>

#include "icbf/errors.hpp"

namespace icbf {

ClassKFn ClassKFn::linear(double gamma) {
  if (!(gamma > 0.0)) {
    throw MisuseError("linear class-K gain must be positive, got " + std::to_string(gamma));
  }
  ClassKFn fn;
  fn.kind_ = Kind::linear;
  fn.gamma_ = gamma;
  return fn;
}

ClassKFn ClassKFn::custom(Rule eval, std::optional<Rule> inverse) {
  if (!eval) throw MisuseError("custom class-K function needs an evaluation rule");
  ClassKFn fn;
  fn.kind_ = Kind::custom;
  fn.eval_ = std::move(eval);
  fn.inverse_ = std::move(inverse);
  return fn;
}

bool ClassKFn::has_inverse() const {
  return kind_ == Kind::linear || (inverse_.has_value() && *inverse_);
}

double ClassKFn::eval(double h) const {
  return kind_ == Kind::linear ? gamma_ * h : eval_(h);
}

double ClassKFn::inverse(double y) const {
  if (kind_ == Kind::linear) return y / gamma_;
  if (!has_inverse()) throw UnsupportedInverse("class-K function has no inverse rule");
  return (*inverse_)(y);
}

double classk_eval(const ClassKFn& fn, double h) { return fn.eval(h); }

double classk_inverse(const ClassKFn& fn, double y) { return fn.inverse(y); }

DecayFn::DecayFn(double scale_, double lambda_) : scale(scale_), lambda(lambda_) {
  if (!(scale > 0.0) || !(lambda > 0.0)) {
    throw MisuseError("decay function needs positive scale and rate");
  }
}

double DecayFn::operator()(double h) const { return scale * std::exp(-lambda * h); }

IntegratorConfig::IntegratorConfig(double step) : dt(step) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw MisuseError("integrator step must be positive and finite");
  }
}

bool all_finite(const Vec& v) { return v.allFinite(); }

StateVec rk4_step(const VectorField& f, const StateVec& state, double t, double dt) {
  StateVec next = rk4_step_inline(f, state, t, dt);
  if (!all_finite(next)) {
    throw NumericFailure("rk4 step at t=" + std::to_string(t) + " produced a non-finite state");
  }
  return next;
}

}  // namespace icbf
