#include "icbf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "icbf/errors.hpp"
#include "icbf/history.hpp"
#include "icbf/predictor.hpp"

namespace icbf::sim {
namespace {

InputVec scalar(double u) {
  InputVec out(1);
  out[0] = u;
  return out;
}

long step_count(double horizon, double dt) { return std::lround(horizon / dt); }

}  // namespace

double ScenarioConfig::plant_delay() const {
  return scenario == ScenarioKind::delay_free ? 0.0 : tau;
}

double ScenarioConfig::controller_delay() const {
  switch (scenario) {
    case ScenarioKind::delay_free:
    case ScenarioKind::naive: return 0.0;
    case ScenarioKind::predictor: return tau;
    case ScenarioKind::predictor_mismatch:
    case ScenarioKind::predictor_mismatch_robust: return tau_hat;
  }
  return 0.0;
}

void ScenarioConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw MisuseError("dt must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw MisuseError("horizon must be positive");
  if (!(tau >= 0.0) || !(tau_hat >= 0.0)) throw MisuseError("delays must be non-negative");
  if (scenario == ScenarioKind::predictor_mismatch_robust && !robust_enabled) {
    throw MisuseError("scenario predictor-mismatch-robust requires robust_enabled");
  }
  if (delta && !(*delta >= 0.0)) throw MisuseError("delta must be non-negative");
  params.validate();
}

SafetyFilter::SafetyFilter(const acc::AccParams& params, bool robust)
    : params_(params),
      robust_(robust),
      model_(acc::make_model(params)),
      phi_(acc::make_phi(params)),
      h_e_(acc::make_he(params)),
      h_u_(acc::make_hu(params)),
      alpha_e_(ClassKFn::linear(params.gamma_e)),
      alpha_u_(ClassKFn::linear(params.gamma_u)) {}

SafetyFilter::Evaluation SafetyFilter::evaluate(const StateVec& z, const InputVec& u) const {
  Evaluation ev;
  ev.row_e = constraint_row(h_e_, model_, phi_, alpha_e_, z, u);
  ev.row_u = constraint_row(h_u_, model_, phi_, alpha_u_, z, u);
  if (robust_) {
    ev.row_e = robust_margin(ev.row_e, params_.robust_e());
    ev.row_u = robust_margin(ev.row_u, params_.robust_u());
  }
  ev.result = solve_two(ev.row_e, ev.row_u);
  ev.verdict = check_compatibility(ev.row_e, ev.row_u);
  return ev;
}

InputVec SafetyFilter::correction(const StateVec& z, const InputVec& u) const {
  const Evaluation ev = evaluate(z, u);
  if (ev.result.feasible) return ev.result.v;
  return solve_single(ev.row_e).v;
}

bool check_initial_history(const ScenarioConfig& cfg) {
  const double tau = cfg.plant_delay();
  if (tau == 0.0) return true;
  const auto& p = cfg.params;
  const SystemModel model = acc::make_model(p);
  const Barrier he = acc::make_he(p);

  InputHistory hist(cfg.dt, tau, -cfg.dt, scalar(cfg.u_hist));
  hist.push(scalar(cfg.u0));

  const auto field = [&](const StateVec& x, double t) { return model.f(x, hist.query(t - tau)); };
  StateVec x = acc::AccState{cfg.D0, cfg.v0}.vec();
  const long n = std::lround(std::ceil(tau / cfg.dt - 1e-9));
  for (long j = 0; j <= n; ++j) {
    const double t = std::min(static_cast<double>(j) * cfg.dt, tau);
    const InputVec ud = hist.query(t - tau);
    if (acc::acc_hx(p, acc::AccState::from(x)) < 0.0) return false;
    if (he(x, ud) < 0.0) return false;
    if (acc::acc_hu(p, ud[0]) < 0.0) return false;
    if (j == n) break;
    const double h = std::min(cfg.dt, tau - t);
    x = rk4_step_inline(field, x, t, h);
    if (!all_finite(x)) return false;
  }
  return true;
}

double disturbance_at(const SafetyFilter& filter, const StateVec& x_p, const StateVec& x_p_hat,
                      double u) {
  if (x_p == x_p_hat) return 0.0;
  const auto& p = filter.params();
  const InputVec uv = scalar(u);
  const double hat = acc::integral_phi(p, acc::AccState::from(x_p_hat), u) +
                     filter.correction(x_p_hat, uv)[0];
  const double exact =
      acc::integral_phi(p, acc::AccState::from(x_p), u) + filter.correction(x_p, uv)[0];
  return hat - exact;
}

TrajectoryLog run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  if (!check_initial_history(cfg)) {
    throw Error("scenario '" + cfg.name +
                "': committed input history leaves the safe set on [0, tau]");
  }

  const auto& p = cfg.params;
  const SystemModel model = acc::make_model(p);
  const SafetyFilter filter(p, cfg.robust_enabled);
  const Barrier hx = acc::make_hx(p);
  const Barrier he = acc::make_he(p);
  const Barrier hu = acc::make_hu(p);
  const IntegratorConfig integ(cfg.dt);

  const double tau = cfg.plant_delay();
  const double tau_ctrl = cfg.controller_delay();
  const bool predicts = tau_ctrl > 0.0;
  const double dt = cfg.dt;

  InputHistory hist(dt, std::max(tau, tau_ctrl), -dt, scalar(cfg.u_hist));
  hist.push(scalar(cfg.u0));

  TrajectoryLog log;
  log.cfg = cfg;
  const long n_steps = step_count(cfg.horizon, dt);
  log.steps.reserve(static_cast<std::size_t>(n_steps + 1));

  StateVec x = acc::AccState{cfg.D0, cfg.v0}.vec();
  StateVec z_prev = x;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    const InputVec u = hist.latest();
    const InputVec u_delayed = tau > 0.0 ? hist.query(t - tau) : u;

    const StateVec x_p = predict(model, x, hist, tau, integ);
    StateVec z = x;
    if (predicts) z = tau_ctrl == tau ? x_p : predict(model, x, hist, tau_ctrl, integ);

    const auto ev = filter.evaluate(z, u);
    InputVec v_corr = ev.result.v;
    QpStatus status = ev.result.active_set == ActiveSet::none ? QpStatus::inactive
                                                               : QpStatus::active;
    if (!ev.result.feasible) {
      if (cfg.fallback == FallbackPolicy::error) {
        std::ostringstream msg;
        msg << "scenario '" << cfg.name << "': safety filter infeasible at step " << k
            << " (t=" << t << "), failed " << to_string(ev.verdict.failed_condition)
            << ", a_e+r_e=" << ev.row_e.rhs() << ", a_u+r_u=" << ev.row_u.rhs()
            << ", b_e=" << ev.row_e.b[0] << ", b_u=" << ev.row_u.b[0];
        throw InfeasibleError(msg.str(), k);
      }
      v_corr = solve_single(ev.row_e).v;
      status = QpStatus::infeasible_fallback;
    }

    StepRecord rec;
    rec.t = t;
    rec.D = x[0];
    rec.v = x[1];
    rec.u = u[0];
    rec.u_delayed = u_delayed[0];
    rec.xp_D = x_p[0];
    rec.xp_v = x_p[1];
    rec.xphat_D = z[0];
    rec.xphat_v = z[1];
    rec.v_corr = v_corr[0];
    rec.h_x = hx(x, u_delayed);
    rec.h_e = he(x, u_delayed);
    rec.h_u = hu(x, u_delayed);
    rec.hp_x = hx(x_p, u);
    rec.hp_e = he(x_p, u);
    rec.hp_u = hu(x_p, u);
    rec.r_e = ev.row_e.r;
    rec.r_u = ev.row_u.r;
    rec.qp_status = status;
    rec.compat_ok = ev.verdict.ok;
    rec.compat_failed = ev.verdict.failed_condition;
    rec.d = disturbance_at(filter, x_p, z, u[0]);
    rec.d_norm = std::abs(rec.d);
    log.steps.push_back(rec);

    if (k == n_steps) break;

    // Controller: u' = phi(z, u) + q(z, u). Inside the step z is extended
    // linearly with the rate of the previous step and the filter is solved
    // again at every RK4 stage.
    const StateVec z_rate = k == 0 ? StateVec(StateVec::Zero(z.size())) : StateVec((z - z_prev) / dt);
    const auto ctrl = [&](const InputVec& us, double ts) {
      const double s = ts - t;
      const StateVec zs = s == 0.0 ? z : StateVec(z + s * z_rate);
      InputVec du(1);
      if (s == 0.0 && us == u) {
        du[0] = acc::integral_phi(p, acc::AccState::from(z), u[0]) + v_corr[0];
        return du;
      }
      du[0] = acc::integral_phi(p, acc::AccState::from(zs), us[0]) + filter.correction(zs, us)[0];
      return du;
    };
    const InputVec u_next = rk4_step(ctrl, u, t, dt);
    z_prev = z;
    hist.push(u_next);

    // Plant: x' = f(x, u(t - tau)) read from the committed history.
    const auto plant = [&](const StateVec& xs, double ts) {
      return model.f(xs, hist.query(ts - tau));
    };
    x = rk4_step_inline(plant, x, t, dt);
    if (!all_finite(x)) {
      throw NumericFailure("scenario '" + cfg.name + "': non-finite state at step " +
                           std::to_string(k + 1));
    }
  }

  double delta = 0.0;
  for (const auto& r : log.steps) delta = std::max(delta, r.d_norm);
  apply_inflation(log, cfg.delta.value_or(delta));
  return log;
}

void apply_inflation(TrajectoryLog& log, double delta) {
  const auto& p = log.cfg.params;
  const ClassKFn alpha_e = ClassKFn::linear(p.gamma_e);
  const ClassKFn alpha_u = ClassKFn::linear(p.gamma_u);
  const auto spec_e = p.robust_e();
  const auto spec_u = p.robust_u();
  log.delta_used = delta;
  for (auto& r : log.steps) {
    r.h_e_delta = inflated_value(r.h_e, alpha_e, spec_e, delta);
    r.h_u_delta = inflated_value(r.h_u, alpha_u, spec_u, delta);
  }
}

DisturbanceSummary disturbance_trace(const TrajectoryLog& log) {
  const SafetyFilter filter(log.cfg.params, log.cfg.robust_enabled);
  DisturbanceSummary out;
  out.delta_bound = log.cfg.delta;
  out.d_norm.reserve(log.steps.size());
  for (const auto& r : log.steps) {
    const double d = disturbance_at(filter, acc::AccState{r.xp_D, r.xp_v}.vec(),
                                    acc::AccState{r.xphat_D, r.xphat_v}.vec(), r.u);
    out.d_norm.push_back(std::abs(d));
    out.delta_empirical = std::max(out.delta_empirical, std::abs(d));
  }
  return out;
}

double disturbance_bound(double L_phi, double L_q, double delta_x) {
  if (!(L_phi >= 0.0) || !(L_q >= 0.0) || !(delta_x >= 0.0)) {
    throw MisuseError("disturbance_bound arguments must be non-negative");
  }
  return (L_phi + L_q) * delta_x;
}

const BarrierCheck& InvarianceReport::get(const std::string& name) const {
  for (const auto& b : barriers) {
    if (b.name == name) return b;
  }
  throw MisuseError("no barrier named '" + name + "' in report");
}

InvarianceReport verify_invariance(const TrajectoryLog& log, const InvarianceOptions& opt) {
  const auto& p = log.cfg.params;
  const double dt = log.cfg.dt;
  const ClassKFn alpha_e = ClassKFn::linear(p.gamma_e);
  const ClassKFn alpha_u = ClassKFn::linear(p.gamma_u);
  const auto spec_e = p.robust_e();
  const auto spec_u = p.robust_u();
  const Barrier hx = acc::make_hx(p);
  const Barrier he = acc::make_he(p);
  const Barrier hu = acc::make_hu(p);
  const bool physical = opt.pair == PairKind::physical;
  const bool inflated = opt.which == SetKind::S_delta;

  struct Series {
    std::string name;
    double gamma;
    const Barrier* barrier;
  };
  std::vector<Series> series;
  if (opt.include_h_x && !inflated) series.push_back({"h_x", p.gamma_x, &hx});
  series.push_back({inflated ? "h_e_delta" : "h_e", p.gamma_e, &he});
  series.push_back({inflated ? "h_u_delta" : "h_u", p.gamma_u, &hu});

  const auto value = [&](const StepRecord& r, std::size_t which) {
    const std::string& name = series[which].name;
    const bool is_x = name == "h_x";
    const bool is_e = name.rfind("h_e", 0) == 0;
    double h;
    if (is_x) {
      h = physical ? r.h_x : r.hp_x;
    } else if (is_e) {
      h = physical ? r.h_e : r.hp_e;
    } else {
      h = physical ? r.h_u : r.hp_u;
    }
    if (!inflated || is_x) return h;
    return is_e ? inflated_value(h, alpha_e, spec_e, opt.delta)
                : inflated_value(h, alpha_u, spec_u, opt.delta);
  };
  const auto point = [&](const StepRecord& r) {
    return physical ? std::pair{acc::AccState{r.D, r.v}.vec(), scalar(r.u_delayed)}
                    : std::pair{acc::AccState{r.xp_D, r.xp_v}.vec(), scalar(r.u)};
  };

  InvarianceReport report;
  const auto& steps = log.steps;
  for (std::size_t s = 0; s < series.size(); ++s) {
    BarrierCheck chk;
    chk.name = series[s].name;
    chk.min_value = std::numeric_limits<double>::infinity();
    chk.worst_boundary_rate = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const double h = value(steps[k], s);
      if (h < chk.min_value) {
        chk.min_value = h;
        chk.min_index = static_cast<long>(k);
      }
      if (h < -opt.tol && chk.first_violation < 0) chk.first_violation = static_cast<long>(k);
      if (h <= opt.band) {
        const auto [xs, us] = point(steps[k]);
        const Vec gx = series[s].barrier->dx(xs, us);
        const Vec gu = series[s].barrier->du(xs, us);
        if (gx.norm() + gu.norm() <= kEpsB) ++chk.regularity_violations;
      }
      if (std::abs(h) <= opt.band && k + 1 < steps.size()) {
        const double rate =
            (value(steps[k + 1], s) - h) / dt + series[s].gamma * std::max(h, 0.0);
        chk.worst_boundary_rate = std::min(chk.worst_boundary_rate, rate);
        if (rate < -opt.tol_deriv && chk.first_boundary_violation < 0) {
          chk.first_boundary_violation = static_cast<long>(k);
        }
      }
    }
    chk.ok = chk.first_violation < 0 && chk.first_boundary_violation < 0;
    report.ok = report.ok && chk.ok;
    report.barriers.push_back(chk);
  }
  return report;
}

RobustDecreaseReport verify_robust_decrease(const TrajectoryLog& log, double delta, double tol) {
  const auto& p = log.cfg.params;
  const double dt = log.cfg.dt;
  const Barrier he = acc::make_he(p);
  const auto spec_e = p.robust_e();
  const auto spec_u = p.robust_u();

  const auto rhs = [&](double h, double nb, double gamma, const RobustMarginSpec& spec) {
    return -gamma * h + (spec.mu(h) - delta) * nb + spec.sigma(h) * nb * nb;
  };
  const auto rhs_e = [&](const StepRecord& r) {
    const double nb = std::abs(he.du(acc::AccState{r.xp_D, r.xp_v}.vec(), scalar(r.u))[0]);
    return rhs(r.hp_e, nb, p.gamma_e, spec_e);
  };
  const auto rhs_u = [&](const StepRecord& r) {
    return rhs(r.hp_u, std::abs(2.0 * r.u), p.gamma_u, spec_u);
  };

  RobustDecreaseReport report;
  report.tol = tol;
  report.delta = delta;
  DecreaseCheck ce{"h_e", std::numeric_limits<double>::infinity(), -1};
  DecreaseCheck cu{"h_u", std::numeric_limits<double>::infinity(), -1};
  const auto& steps = log.steps;
  for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
    const auto& a = steps[k];
    const auto& b = steps[k + 1];
    if (a.qp_status == QpStatus::infeasible_fallback) {
      ++report.skipped_fallback_steps;
      continue;
    }
    const double res_e = (b.hp_e - a.hp_e) / dt - 0.5 * (rhs_e(a) + rhs_e(b));
    const double res_u = (b.hp_u - a.hp_u) / dt - 0.5 * (rhs_u(a) + rhs_u(b));
    if (res_e < ce.worst_residual) {
      ce.worst_residual = res_e;
      ce.worst_index = static_cast<long>(k);
    }
    if (res_u < cu.worst_residual) {
      cu.worst_residual = res_u;
      cu.worst_index = static_cast<long>(k);
    }
  }
  report.barriers = {ce, cu};
  report.ok = ce.worst_residual >= -tol && cu.worst_residual >= -tol;
  return report;
}

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::delay_free: return "delay-free";
    case ScenarioKind::naive: return "naive";
    case ScenarioKind::predictor: return "predictor";
    case ScenarioKind::predictor_mismatch: return "predictor-mismatch";
    case ScenarioKind::predictor_mismatch_robust: return "predictor-mismatch-robust";
  }
  return "?";
}

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::inactive: return "inactive";
    case QpStatus::active: return "active";
    case QpStatus::infeasible_fallback: return "infeasible-fallback";
  }
  return "?";
}

std::optional<ScenarioKind> scenario_from_string(const std::string& s) {
  for (auto k : {ScenarioKind::delay_free, ScenarioKind::naive, ScenarioKind::predictor,
                 ScenarioKind::predictor_mismatch, ScenarioKind::predictor_mismatch_robust}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

}  // namespace icbf::sim
