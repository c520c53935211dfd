#include <doctest.h>

#include <cmath>
#include <sstream>

#include "icbf/csv_log.hpp"
#include "icbf/errors.hpp"
#include "icbf/sim.hpp"

using namespace icbf;
using namespace icbf::sim;

namespace {

ScenarioConfig make(ScenarioKind kind, double horizon, double tau_hat = 1.2) {
  ScenarioConfig c;
  c.name = to_string(kind);
  c.scenario = kind;
  c.horizon = horizon;
  c.tau = kind == ScenarioKind::delay_free ? 0.0 : 1.2;
  c.tau_hat = kind == ScenarioKind::delay_free ? 0.0 : tau_hat;
  c.robust_enabled = kind == ScenarioKind::predictor_mismatch_robust;
  return c;
}

std::string csv_of(const TrajectoryLog& log) {
  std::ostringstream out;
  write_csv(out, log);
  return out.str();
}

InputVec scalar(double u) {
  InputVec v(1);
  v[0] = u;
  return v;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("delay-free reference stays safe") {
    const auto log = run_scenario(make(ScenarioKind::delay_free, 60.0));
    REQUIRE(log.steps.size() == 60001);
    double max_u = 0.0;
    for (const auto& r : log.steps) {
      max_u = std::max(max_u, std::abs(r.u));
      CHECK(r.compat_ok);
      CHECK(r.qp_status != QpStatus::infeasible_fallback);
    }
    CHECK(max_u <= 1.96 + 1e-6);
    InvarianceOptions opt;
    const auto rep = verify_invariance(log, opt);
    for (const auto& b : rep.barriers) {
      INFO(b.name << " min " << b.min_value);
      CHECK(b.min_value >= -1e-6);
      CHECK(b.regularity_violations == 0);
    }
    CHECK(rep.ok);
  }

  TEST_CASE("extended barrier matches the derivative of h_x along the trajectory") {
    const auto log = run_scenario(make(ScenarioKind::delay_free, 20.0));
    const auto& p = log.cfg.params;
    const double g = p.gamma_x;
    const double eps = 1e-4;
    double worst = 0.0;
    for (const auto& r : log.steps) {
      const StateVec x = acc::AccState{r.D, r.v}.vec();
      const StateVec f = acc::acc_dynamics(p, acc::AccState{r.D, r.v}, r.u_delayed);
      const double ahead = acc::acc_hx(p, acc::AccState::from(StateVec(x + eps * f)));
      const double behind = acc::acc_hx(p, acc::AccState::from(StateVec(x - eps * f)));
      const double rate = (ahead - behind) / (2.0 * eps);
      worst = std::max(worst, std::abs(rate + g * r.h_x - r.h_e));
    }
    CHECK(worst <= 1e-6);

    // The logged samples agree too, up to the resolution of a 1 ms grid
    // around filter switching instants.
    const double dt = log.cfg.dt;
    const auto& s = log.steps;
    double worst_log = 0.0;
    for (std::size_t k = 2; k + 2 < s.size(); ++k) {
      const double d = (-s[k + 2].h_x + 8.0 * s[k + 1].h_x - 8.0 * s[k - 1].h_x + s[k - 2].h_x) /
                       (12.0 * dt);
      worst_log = std::max(worst_log, std::abs(d + g * s[k].h_x - s[k].h_e));
    }
    CHECK(worst_log <= 1e-4);
  }

  TEST_CASE("naive delay handling violates the distance constraint") {
    const auto log = run_scenario(make(ScenarioKind::naive, 10.0));
    const auto rep = verify_invariance(log, {});
    const auto& hx = rep.get("h_x");
    REQUIRE(hx.first_violation >= 0);
    CHECK(log.steps[hx.first_violation].h_x < -1e-6);
    CHECK(log.steps[hx.first_violation - 1].h_x >= -1e-6);
    CHECK(hx.min_value < 0.0);
    CHECK_FALSE(rep.ok);
  }

  TEST_CASE("infeasibility aborts under the error policy") {
    auto cfg = make(ScenarioKind::naive, 10.0);
    cfg.fallback = FallbackPolicy::error;
    try {
      run_scenario(cfg);
      FAIL("expected an infeasible step");
    } catch (const InfeasibleError& e) {
      CHECK(e.step() > 0);
      CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
  }

  TEST_CASE("exact predictor: prediction equals the future state") {
    const auto log = run_scenario(make(ScenarioKind::predictor, 15.0));
    const long shift = std::lround(1.2 / log.cfg.dt);
    double worst = 0.0;
    for (std::size_t k = 0; k + shift < log.steps.size(); ++k) {
      const auto& now = log.steps[k];
      const auto& later = log.steps[k + shift];
      worst = std::max({worst, std::abs(now.xp_D - later.D), std::abs(now.xp_v - later.v)});
      CHECK(now.d == 0.0);
    }
    CHECK(worst <= 1e-6);
    for (const auto& r : log.steps) CHECK(r.compat_ok);
  }

  TEST_CASE("exact predictor is a shifted copy of the delay-free loop") {
    const auto pred = run_scenario(make(ScenarioKind::predictor, 15.0));
    auto ref_cfg = make(ScenarioKind::delay_free, 15.0 - 1.2);
    ref_cfg.D0 = pred.steps[0].xp_D;
    ref_cfg.v0 = pred.steps[0].xp_v;
    ref_cfg.u0 = pred.steps[0].u;
    const auto ref = run_scenario(ref_cfg);
    double worst = 0.0;
    const std::size_t n = std::min(pred.steps.size(), ref.steps.size());
    for (std::size_t k = 0; k < n; ++k) {
      worst = std::max(worst, std::abs(pred.steps[k].u - ref.steps[k].u));
    }
    CHECK(worst <= 1e-5);
  }

  TEST_CASE("identical configs give identical logs") {
    const auto cfg = make(ScenarioKind::predictor_mismatch_robust, 4.0, 0.6);
    CHECK(csv_of(run_scenario(cfg)) == csv_of(run_scenario(cfg)));
  }

  TEST_CASE("mismatch produces a disturbance") {
    const auto log = run_scenario(make(ScenarioKind::predictor_mismatch, 8.0, 0.6));
    const auto dist = disturbance_trace(log);
    CHECK(dist.delta_empirical > 0.0);
    CHECK(log.delta_used == doctest::Approx(dist.delta_empirical));
    REQUIRE(dist.d_norm.size() == log.steps.size());
    for (std::size_t k = 0; k < log.steps.size(); ++k) {
      CHECK(dist.d_norm[k] == doctest::Approx(log.steps[k].d_norm));
    }
  }

  TEST_CASE("disturbance vanishes for identical predictions") {
    const SafetyFilter filter(acc::AccParams{}, true);
    const StateVec x = acc::AccState{70.0, 18.0}.vec();
    for (double u : {-1.9, 0.0, 1.3}) CHECK(disturbance_at(filter, x, x, u) == 0.0);
  }

  TEST_CASE("disturbance bound") {
    CHECK(disturbance_bound(0.0, 0.0, 5.0) == 0.0);
    CHECK(disturbance_bound(2.0, 3.0, 0.5) == 2.5);
    CHECK(disturbance_bound(4.0, 0.0, 1.0) == 4.0);
    CHECK_THROWS_AS(disturbance_bound(-1.0, 0.0, 1.0), MisuseError);
  }

  TEST_CASE("initial history check") {
    CHECK(check_initial_history(make(ScenarioKind::predictor, 1.0)));
    CHECK(check_initial_history(make(ScenarioKind::delay_free, 1.0)));
    auto bad = make(ScenarioKind::predictor, 1.0);
    bad.u_hist = -1.5 * bad.params.u_max;
    bad.u0 = bad.u_hist;
    CHECK_FALSE(check_initial_history(bad));
    CHECK_THROWS_AS(run_scenario(bad), Error);
  }

  TEST_CASE("robust mismatch run") {
    const auto log = run_scenario(make(ScenarioKind::predictor_mismatch_robust, 15.0, 0.6));
    const auto& p = log.cfg.params;
    const double mu_min = std::min(p.mu0_e, p.mu0_u);

    SUBCASE("safe set or its inflation is invariant") {
      InvarianceOptions opt;
      opt.pair = PairKind::predicted;
      if (log.delta_used <= mu_min) {
        CHECK(verify_invariance(log, opt).ok);
      } else {
        opt.which = SetKind::S_delta;
        opt.delta = log.delta_used;
        const auto rep = verify_invariance(log, opt);
        for (const auto& b : rep.barriers) {
          INFO(b.name << " min " << b.min_value);
          CHECK(b.min_value >= -1e-6);
        }
      }
    }

    SUBCASE("decrease inequality holds") {
      const auto rep = verify_robust_decrease(log, log.delta_used);
      for (const auto& b : rep.barriers) {
        INFO(b.name << " worst " << b.worst_residual << " at " << b.worst_index);
        CHECK(b.worst_residual >= -1e-3);
      }
    }

    SUBCASE("applied correction satisfies both tightened rows") {
      const SafetyFilter filter(p, true);
      for (const auto& r : log.steps) {
        if (r.qp_status == QpStatus::infeasible_fallback) continue;
        const auto ev = filter.evaluate(acc::AccState{r.xphat_D, r.xphat_v}.vec(), scalar(r.u));
        for (const auto* row : {&ev.row_e, &ev.row_u}) {
          const double slack = row->b[0] * r.v_corr - row->rhs();
          CHECK(slack >= -slack_tolerance(std::abs(row->b[0] * r.v_corr), row->rhs()));
        }
      }
    }

    SUBCASE("fallback steps are exactly the incompatible ones") {
      for (const auto& r : log.steps) {
        CHECK((r.qp_status == QpStatus::infeasible_fallback) == !r.compat_ok);
      }
    }
  }

  TEST_CASE("decrease monitor without mismatch") {
    auto cfg = make(ScenarioKind::predictor, 10.0);
    cfg.robust_enabled = true;
    const auto log = run_scenario(cfg);
    const auto rep = verify_robust_decrease(log, 0.0);
    CHECK(rep.ok);
    CHECK(rep.skipped_fallback_steps == 0);
  }

  TEST_CASE("decrease monitor far from the boundary") {
    auto cfg = make(ScenarioKind::predictor, 2.0);
    cfg.robust_enabled = true;
    cfg.D0 = 400.0;
    cfg.v0 = cfg.params.v_d;
    cfg.u0 = cfg.u_hist = acc::resistance(cfg.params, cfg.v0);
    const auto log = run_scenario(cfg);
    for (const auto& r : log.steps) CHECK(r.v_corr == 0.0);
    const auto rep = verify_robust_decrease(log, 0.0);
    for (const auto& b : rep.barriers) CHECK(b.worst_residual > 0.0);
  }

  TEST_CASE("config validation") {
    auto cfg = make(ScenarioKind::predictor, 1.0);
    cfg.dt = 0.0;
    CHECK_THROWS_AS(run_scenario(cfg), MisuseError);
    cfg = make(ScenarioKind::predictor_mismatch_robust, 1.0, 0.6);
    cfg.robust_enabled = false;
    CHECK_THROWS_AS(cfg.validate(), MisuseError);
  }
}
