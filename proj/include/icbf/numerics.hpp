#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>

namespace icbf {

// Plant states and inputs are small; a fixed upper bound keeps them on the
// stack so the predictor's inner loop never touches the heap.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using StateVec = Vec;
using InputVec = Vec;

// Extended class-K function. The linear kind is alpha(h) = gamma * h; the
// custom kind carries its own evaluation rule and, optionally, an inverse.
class ClassKFn {
 public:
  enum class Kind { linear, custom };
  using Rule = std::function<double(double)>;

  static ClassKFn linear(double gamma);
  static ClassKFn custom(Rule eval, std::optional<Rule> inverse = std::nullopt);

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  bool has_inverse() const;

  double operator()(double h) const { return eval(h); }
  double eval(double h) const;
  // Throws UnsupportedInverse for a custom function without an inverse rule.
  double inverse(double y) const;

 private:
  ClassKFn() = default;

  Kind kind_ = Kind::linear;
  double gamma_ = 1.0;
  Rule eval_;
  std::optional<Rule> inverse_;
};

double classk_eval(const ClassKFn& fn, double h);
double classk_inverse(const ClassKFn& fn, double y);

// scale * exp(-lambda * h): positive and strictly decreasing in h.
struct DecayFn {
  double scale = 1.0;
  double lambda = 0.0;

  DecayFn() = default;
  DecayFn(double scale_, double lambda_);

  double operator()(double h) const;
};

struct IntegratorConfig {
  enum class Method { rk4 };

  double dt = 1e-3;
  Method method = Method::rk4;

  explicit IntegratorConfig(double step = 1e-3);
};

using VectorField = std::function<StateVec(const StateVec&, double)>;

// Classic fourth-order Runge-Kutta step. Throws NumericFailure if the result
// is not finite.
StateVec rk4_step(const VectorField& f, const StateVec& state, double t, double dt);

// Same update, but templated on the field so hot loops can inline it.
template <typename Field>
StateVec rk4_step_inline(const Field& f, const StateVec& x, double t, double dt) {
  const double half = 0.5 * dt;
  const StateVec k1 = f(x, t);
  const StateVec k2 = f(StateVec(x + half * k1), t + half);
  const StateVec k3 = f(StateVec(x + half * k2), t + half);
  const StateVec k4 = f(StateVec(x + dt * k3), t + dt);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool all_finite(const Vec& v);

}  // namespace icbf
