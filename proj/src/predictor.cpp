#include "icbf/predictor.hpp"

#include <cmath>
#include <sstream>

#include "icbf/errors.hpp"

namespace icbf {

StateVec predict(const SystemModel& model, const StateVec& x, const InputHistory& hist,
                 double tau, const IntegratorConfig& integ) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw MisuseError("prediction horizon must be >= 0");
  if (tau == 0.0) return x;

  const double t = hist.t_now();
  const double start = t - tau;
  if (start < hist.t_oldest() - 1e-7 * hist.dt()) {
    std::ostringstream msg;
    msg << "history covers [" << hist.t_oldest() << ", " << t << "], prediction over " << tau
        << " s needs data from " << start;
    throw OutOfRangeError(msg.str());
  }

  const double ratio = tau / integ.dt;
  const double rounded = std::round(ratio);
  long steps;
  double h;
  if (std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, rounded)) {
    steps = static_cast<long>(rounded);
    h = integ.dt;
  } else {
    steps = static_cast<long>(std::ceil(ratio));
    h = tau / static_cast<double>(steps);
  }

  const auto field = [&](const StateVec& xs, double s) {
    return model.f(xs, hist.query(start + s));
  };
  StateVec xp = x;
  for (long j = 0; j < steps; ++j) {
    xp = rk4_step_inline(field, xp, static_cast<double>(j) * h, h);
  }
  if (!all_finite(xp)) throw NumericFailure("prediction produced a non-finite state");
  return xp;
}

Prediction predict_pair(const SystemModel& model, const StateVec& x, const InputHistory& hist,
                        double tau, double tau_hat, const IntegratorConfig& integ) {
  Prediction out;
  out.tau = tau;
  out.tau_hat = tau_hat;
  out.x_p = predict(model, x, hist, tau, integ);
  out.x_p_hat = tau_hat == tau ? out.x_p : predict(model, x, hist, tau_hat, integ);
  return out;
}

}  // namespace icbf
