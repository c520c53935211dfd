#pragma once

#include "icbf/barriers.hpp"
#include "icbf/numerics.hpp"
#include "icbf/predictor.hpp"

namespace icbf::acc {

// Adaptive cruise control: x = [D, v], u = commanded acceleration.
//   D' = v_L - v
//   v' = u(t - tau) - p(v),   p(v) = c0 + c1 v + c2 v^2
struct AccParams {
  // resistance
  double c0 = 6.06e-5;  // m/s^2
  double c1 = 3.03e-3;  // 1/s
  double c2 = 1.52e-4;  // 1/m
  double K_v = 1.0;        // 1/s, velocity tracking gain
  double alpha_phi = 3.0;  // 1/s, integral control gain
  double u_max = 1.96;     // m/s^2
  double T_h = 1.8;        // s
  double D_sf = 3.0;       // m
  double v_L = 14.0;       // m/s
  double v_d = 24.0;       // m/s
  double gamma_x = 1.0;
  double gamma_e = 1.0;
  double gamma_u = 1.0;
  // robust margins mu_i(h) = mu0_i exp(-lambda h), sigma_i(h) = sigma0_i exp(-lambda h)
  double mu0_e = 1.0;
  double mu0_u = 0.2;
  double sigma0_e = 0.1;
  double sigma0_u = 0.05;
  double lambda = 0.05;  // s/m

  // Throws MisuseError when a gain that must be positive is not.
  void validate() const;

  RobustMarginSpec robust_e() const;
  RobustMarginSpec robust_u() const;
};

struct AccState {
  double D = 0.0;
  double v = 0.0;

  StateVec vec() const;
  static AccState from(const StateVec& x);
};

double resistance(const AccParams& p, double v);
double resistance_slope(const AccParams& p, double v);

StateVec acc_dynamics(const AccParams& p, const AccState& x, double u_applied);
double acc_hx(const AccParams& p, const AccState& x);
double acc_hu(const AccParams& p, double u);
double nominal_kd(const AccParams& p, const AccState& x);
double integral_phi(const AccParams& p, const AccState& x_p, double u);

// Partial derivatives used by the analytic barrier gradients.
Eigen::Matrix2d acc_jac_x(const AccParams& p, const AccState& x);
Eigen::Vector2d acc_jac_u(const AccParams& p);
Eigen::RowVector2d kd_gradient(const AccParams& p);
Eigen::RowVector2d phi_grad_x(const AccParams& p, const AccState& x_p, double u);
double phi_grad_u(const AccParams& p);

SystemModel make_model(const AccParams& p);
ControllerField make_phi(const AccParams& p);

// h_x(x) labelled `state`, with analytic gradient.
Barrier make_hx(const AccParams& p);
// h_e = dh_x/dx f + gamma_x h_x in closed form, with analytic gradients.
Barrier make_he(const AccParams& p);
// h_u = u_max^2 - u^2.
Barrier make_hu(const AccParams& p);

}  // namespace icbf::acc
