#pragma once

#include <optional>
#include <string>
#include <vector>

#include "icbf/acc_model.hpp"
#include "icbf/qp_filter.hpp"

namespace icbf::sim {

enum class ScenarioKind {
  delay_free,                // tau = 0, controller sees x
  naive,                     // plant delayed, controller sees the current x
  predictor,                 // controller sees Psi(tau, x, u_h)
  predictor_mismatch,        // controller sees Psi(tau_hat, x, u_h), no margins
  predictor_mismatch_robust  // as above, with robust margins
};

enum class FallbackPolicy { error, prioritize_state };

enum class QpStatus { inactive, active, infeasible_fallback };

struct ScenarioConfig {
  std::string name = "scenario";
  ScenarioKind scenario = ScenarioKind::predictor;
  double tau = 1.2;
  double tau_hat = 1.2;
  double horizon = 60.0;
  double dt = 1e-3;
  acc::AccParams params;
  double D0 = 105.0;
  double v0 = 20.0;
  double u0 = 0.0;
  double u_hist = 0.0;  // constant committed input on [-tau, 0)
  bool robust_enabled = false;
  FallbackPolicy fallback = FallbackPolicy::prioritize_state;
  // A-priori disturbance bound for the inflated-set diagnostics. When unset
  // the empirical sup |d(t)| of the run is used.
  std::optional<double> delta;

  // Delay the plant actually has.
  double plant_delay() const;
  // Delay the controller's predictor uses (0 = no prediction).
  double controller_delay() const;
  // Throws MisuseError for non-positive dt/horizon, negative delays, or
  // contradictory fields.
  void validate() const;
};

// Two-row robust ICBF filter for the ACC pair (h_e, h_u).
class SafetyFilter {
 public:
  SafetyFilter(const acc::AccParams& params, bool robust);

  struct Evaluation {
    ConstraintRow row_e;
    ConstraintRow row_u;
    FilterResult result;  // as returned by solve_two
    CompatibilityVerdict verdict;
  };

  Evaluation evaluate(const StateVec& z, const InputVec& u) const;
  // Correction q(z, u): the two-row solution, or the state row alone when
  // the pair is infeasible.
  InputVec correction(const StateVec& z, const InputVec& u) const;

  const acc::AccParams& params() const { return params_; }
  bool robust() const { return robust_; }

 private:
  acc::AccParams params_;
  bool robust_;
  SystemModel model_;
  ControllerField phi_;
  Barrier h_e_;
  Barrier h_u_;
  ClassKFn alpha_e_;
  ClassKFn alpha_u_;
};

struct StepRecord {
  double t = 0.0;
  double D = 0.0;
  double v = 0.0;
  double u = 0.0;
  double u_delayed = 0.0;
  double xp_D = 0.0;
  double xp_v = 0.0;
  double xphat_D = 0.0;
  double xphat_v = 0.0;
  double v_corr = 0.0;
  // physical pair (x(t), u(t - tau))
  double h_x = 0.0;
  double h_e = 0.0;
  double h_u = 0.0;
  // predicted pair (x_p(t), u(t))
  double hp_x = 0.0;
  double hp_e = 0.0;
  double hp_u = 0.0;
  double r_e = 0.0;
  double r_u = 0.0;
  // inflated values at the physical pair, filled once delta is known
  double h_e_delta = 0.0;
  double h_u_delta = 0.0;
  QpStatus qp_status = QpStatus::inactive;
  bool compat_ok = true;
  FailedCondition compat_failed = FailedCondition::none;
  double d = 0.0;
  double d_norm = 0.0;
};

struct TrajectoryLog {
  ScenarioConfig cfg;
  std::vector<StepRecord> steps;
  double delta_used = 0.0;  // delta behind h_e_delta / h_u_delta
};

struct DisturbanceSummary {
  double delta_empirical = 0.0;
  std::optional<double> delta_bound;
  std::vector<double> d_norm;
};

// Open-loop check that the committed history keeps (x(s), u(s - tau)) in
// S_x, S_e and S_u for every grid point s in [0, tau].
bool check_initial_history(const ScenarioConfig& cfg);

// Integrates the delayed plant and the integral controller together.
// Per step: the controller input z (x, or a prediction) is computed at t_k
// and extended linearly inside the step with the rate of the previous step;
// the controller state u is advanced by RK4 with the filter solved at every
// stage, pushed into the history, and the plant is then advanced by RK4
// reading u(t - tau) from the history.
TrajectoryLog run_scenario(const ScenarioConfig& cfg);

// d = phi(x_p_hat, u) + q(x_p_hat, u) - phi(x_p, u) - q(x_p, u)
double disturbance_at(const SafetyFilter& filter, const StateVec& x_p, const StateVec& x_p_hat,
                      double u);

DisturbanceSummary disturbance_trace(const TrajectoryLog& log);

// delta = (L_phi + L_q) * delta_x
double disturbance_bound(double L_phi, double L_q, double delta_x);

// Recomputes h_e_delta / h_u_delta for a given delta.
void apply_inflation(TrajectoryLog& log, double delta);

enum class SetKind { S, S_delta };
enum class PairKind { physical, predicted };

struct BarrierCheck {
  std::string name;
  double min_value = 0.0;
  long min_index = -1;
  long first_violation = -1;  // first step with value < -tol
  // Smallest (h[k+1] - h[k]) / dt + gamma * max(h[k], 0) over steps with
  // |h[k]| <= band, and the first step where it drops below -tol_deriv.
  double worst_boundary_rate = 0.0;
  long first_boundary_violation = -1;
  // Steps with h <= band where the gradient of h vanishes.
  long regularity_violations = 0;
  bool ok = true;
};

struct InvarianceOptions {
  SetKind which = SetKind::S;
  PairKind pair = PairKind::physical;
  double delta = 0.0;
  double tol = 1e-6;
  double band = 0.1;
  double tol_deriv = 1e-3;
  bool include_h_x = true;
};

struct InvarianceReport {
  bool ok = true;
  std::vector<BarrierCheck> barriers;  // h_x (S only), h_e, h_u

  const BarrierCheck& get(const std::string& name) const;
};

InvarianceReport verify_invariance(const TrajectoryLog& log, const InvarianceOptions& opt);

struct DecreaseCheck {
  std::string name;
  double worst_residual = 0.0;
  long worst_index = -1;
};

struct RobustDecreaseReport {
  bool ok = true;
  double tol = 1e-3;
  double delta = 0.0;
  long skipped_fallback_steps = 0;
  std::vector<DecreaseCheck> barriers;  // h_e, h_u
};

// Checks  dh/dt >= -alpha(h) + (mu(h) - delta)|b| + sigma(h)|b|^2  for h_e and
// h_u along the predicted pair (x_p, u). The derivative is the forward
// difference over each step and the right-hand side the trapezoidal mean of
// its values at both ends. Steps resolved by the infeasibility fallback are
// excluded and counted.
RobustDecreaseReport verify_robust_decrease(const TrajectoryLog& log, double delta,
                                            double tol = 1e-3);

const char* to_string(ScenarioKind k);
const char* to_string(QpStatus s);
std::optional<ScenarioKind> scenario_from_string(const std::string& s);

}  // namespace icbf::sim
