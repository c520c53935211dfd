#pragma once

#include <functional>

#include "icbf/history.hpp"
#include "icbf/numerics.hpp"

namespace icbf {

using Dynamics = std::function<StateVec(const StateVec&, const InputVec&)>;
using Jacobian = std::function<Eigen::MatrixXd(const StateVec&, const InputVec&)>;

// Plant x' = f(x, u) with optional analytic Jacobians.
struct SystemModel {
  int n = 0;
  int m = 0;
  Dynamics f;
  Jacobian jac_x;  // n x n, may be empty
  Jacobian jac_u;  // n x m, may be empty

  StateVec operator()(const StateVec& x, const InputVec& u) const { return f(x, u); }
};

struct Prediction {
  StateVec x_p;      // prediction over the true delay
  StateVec x_p_hat;  // prediction over the estimated delay
  double tau = 0.0;
  double tau_hat = 0.0;
};

// Psi(tau, x, u_h): the state reached after integrating the plant for `tau`
// seconds from `x` under the committed inputs. The inner integrand at inner
// time s reads hist(t + s - tau), with t = hist.t_now().
//
// When tau is a multiple of integ.dt the inner step is exactly integ.dt, so
// the prediction reproduces the plant's own step sequence. Otherwise the
// interval is split into ceil(tau / dt) equal steps.
StateVec predict(const SystemModel& model, const StateVec& x, const InputHistory& hist,
                 double tau, const IntegratorConfig& integ);

Prediction predict_pair(const SystemModel& model, const StateVec& x, const InputHistory& hist,
                        double tau, double tau_hat, const IntegratorConfig& integ);

}  // namespace icbf
