#include "icbf/acc_model.hpp"

#include "icbf/errors.hpp"

namespace icbf::acc {
namespace {

// dh_x/dv = -T_h + (v_L - v) / u_max
double hx_slope(const AccParams& p, double v) { return -p.T_h + (p.v_L - v) / p.u_max; }

}  // namespace

void AccParams::validate() const {
  if (!(u_max > 0.0)) throw MisuseError("u_max must be positive");
  if (!(T_h > 0.0)) throw MisuseError("T_h must be positive");
  if (!(K_v > 0.0)) throw MisuseError("K_v must be positive");
  if (!(alpha_phi > 0.0)) throw MisuseError("alpha_phi must be positive");
  if (!(gamma_x > 0.0) || !(gamma_e > 0.0) || !(gamma_u > 0.0)) {
    throw MisuseError("class-K gains must be positive");
  }
  if (!(mu0_e > 0.0) || !(mu0_u > 0.0) || !(sigma0_e > 0.0) || !(sigma0_u > 0.0) ||
      !(lambda > 0.0)) {
    throw MisuseError("robust margin parameters must be positive");
  }
}

RobustMarginSpec AccParams::robust_e() const {
  return {DecayFn(mu0_e, lambda), DecayFn(sigma0_e, lambda)};
}

RobustMarginSpec AccParams::robust_u() const {
  return {DecayFn(mu0_u, lambda), DecayFn(sigma0_u, lambda)};
}

StateVec AccState::vec() const {
  StateVec x(2);
  x << D, v;
  return x;
}

AccState AccState::from(const StateVec& x) { return {x[0], x[1]}; }

double resistance(const AccParams& p, double v) { return p.c0 + p.c1 * v + p.c2 * v * v; }

double resistance_slope(const AccParams& p, double v) { return p.c1 + 2.0 * p.c2 * v; }

StateVec acc_dynamics(const AccParams& p, const AccState& x, double u_applied) {
  StateVec dx(2);
  dx << p.v_L - x.v, u_applied - resistance(p, x.v);
  return dx;
}

double acc_hx(const AccParams& p, const AccState& x) {
  const double dv = p.v_L - x.v;
  return x.D - p.T_h * x.v - dv * dv / (2.0 * p.u_max) - p.D_sf;
}

double acc_hu(const AccParams& p, double u) { return p.u_max * p.u_max - u * u; }

double nominal_kd(const AccParams& p, const AccState& x) { return p.K_v * (p.v_d - x.v); }

double integral_phi(const AccParams& p, const AccState& x_p, double u) {
  // dk_d/dx f(x_p, u) + (alpha_phi / 2)(k_d(x_p) - u), with dk_d/dx = [0, -K_v]
  return -p.K_v * (u - resistance(p, x_p.v)) + 0.5 * p.alpha_phi * (nominal_kd(p, x_p) - u);
}

Eigen::Matrix2d acc_jac_x(const AccParams& p, const AccState& x) {
  Eigen::Matrix2d j;
  j << 0.0, -1.0, 0.0, -resistance_slope(p, x.v);
  return j;
}

Eigen::Vector2d acc_jac_u(const AccParams&) { return {0.0, 1.0}; }

Eigen::RowVector2d kd_gradient(const AccParams& p) { return {0.0, -p.K_v}; }

Eigen::RowVector2d phi_grad_x(const AccParams& p, const AccState& x_p, double) {
  return {0.0, p.K_v * resistance_slope(p, x_p.v) - 0.5 * p.alpha_phi * p.K_v};
}

double phi_grad_u(const AccParams& p) { return -p.K_v - 0.5 * p.alpha_phi; }

SystemModel make_model(const AccParams& p) {
  SystemModel model;
  model.n = 2;
  model.m = 1;
  model.f = [p](const StateVec& x, const InputVec& u) {
    return acc_dynamics(p, AccState::from(x), u[0]);
  };
  model.jac_x = [p](const StateVec& x, const InputVec&) {
    return Eigen::MatrixXd(acc_jac_x(p, AccState::from(x)));
  };
  model.jac_u = [p](const StateVec&, const InputVec&) {
    return Eigen::MatrixXd(acc_jac_u(p));
  };
  return model;
}

ControllerField make_phi(const AccParams& p) {
  return [p](const StateVec& x, const InputVec& u) {
    InputVec out(1);
    out[0] = integral_phi(p, AccState::from(x), u[0]);
    return out;
  };
}

Barrier make_hx(const AccParams& p) {
  Barrier h;
  h.name = "h_x";
  h.label = Barrier::Label::state;
  h.eval = [p](const StateVec& x, const InputVec&) { return acc_hx(p, AccState::from(x)); };
  h.grad_x = [p](const StateVec& x, const InputVec&) {
    Vec g(2);
    g << 1.0, hx_slope(p, x[1]);
    return g;
  };
  h.grad_u = [](const StateVec&, const InputVec& u) { return Vec(Vec::Zero(u.size())); };
  return h;
}

Barrier make_he(const AccParams& p) {
  Barrier h;
  h.name = "h_e";
  h.label = Barrier::Label::state_extended;
  h.eval = [p](const StateVec& x, const InputVec& u) {
    const AccState s = AccState::from(x);
    return (p.v_L - s.v) + hx_slope(p, s.v) * (u[0] - resistance(p, s.v)) +
           p.gamma_x * acc_hx(p, s);
  };
  h.grad_x = [p](const StateVec& x, const InputVec& u) {
    const double v = x[1];
    const double slope = hx_slope(p, v);
    Vec g(2);
    g << p.gamma_x,
        -1.0 - (u[0] - resistance(p, v)) / p.u_max - slope * resistance_slope(p, v) +
            p.gamma_x * slope;
    return g;
  };
  h.grad_u = [p](const StateVec& x, const InputVec&) {
    Vec g(1);
    g << hx_slope(p, x[1]);
    return g;
  };
  return h;
}

Barrier make_hu(const AccParams& p) {
  Barrier h;
  h.name = "h_u";
  h.label = Barrier::Label::input;
  h.eval = [p](const StateVec&, const InputVec& u) { return acc_hu(p, u[0]); };
  h.grad_x = [](const StateVec& x, const InputVec&) { return Vec(Vec::Zero(x.size())); };
  h.grad_u = [](const StateVec&, const InputVec& u) {
    Vec g(1);
    g << -2.0 * u[0];
    return g;
  };
  return h;
}

}  // namespace icbf::acc
