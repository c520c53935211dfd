#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "icbf/config.hpp"
#include "icbf/csv_log.hpp"
#include "icbf/errors.hpp"
#include "icbf/runner.hpp"

using namespace icbf;
namespace fs = std::filesystem;

namespace {

std::string parse_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.key();
  }
  return "<no error>";
}

struct TempDir {
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("icbf_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kShortConfig = R"(
horizon = 6
tau = 1.2

[delay_free]
scenario = delay-free

[naive]
scenario = naive

[predictor]
scenario = predictor

[mismatch]
scenario = predictor-mismatch
tau_hat = 0.6

[mismatch_robust]
scenario = predictor
tau_hat = 0.6
robust_enabled = true
)";

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal predictor config takes the reference values") {
    const auto cs = parse_config("scenario = predictor\n");
    REQUIRE(cs.size() == 1);
    const auto& c = cs[0];
    CHECK(c.scenario == sim::ScenarioKind::predictor);
    CHECK(c.tau == 1.2);
    CHECK(c.tau_hat == 1.2);
    CHECK(c.dt == 1e-3);
    CHECK(c.horizon == 60.0);
    CHECK(c.fallback == sim::FallbackPolicy::prioritize_state);
    CHECK(c.params.u_max == 1.96);
    CHECK(c.params.T_h == 1.8);
  }

  TEST_CASE("robust mismatch setup") {
    const auto cs = parse_config("[r]\nscenario = predictor\ntau_hat = 0.6\nrobust_enabled = true\n");
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].scenario == sim::ScenarioKind::predictor_mismatch_robust);
    CHECK(cs[0].tau_hat == 0.6);
    CHECK(cs[0].robust_enabled);
  }

  TEST_CASE("sections inherit top-level defaults") {
    const auto cs = parse_config("tau = 0.8\nT_h = 2.0\n[a]\nscenario = naive\n[b]\nscenario = predictor\ntau = 1.0\n");
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].name == "a");
    CHECK(cs[0].tau == 0.8);
    CHECK(cs[0].params.T_h == 2.0);
    CHECK(cs[1].tau == 1.0);
    CHECK(cs[1].tau_hat == 1.0);
  }

  TEST_CASE("delay-free ignores delays") {
    const auto cs = parse_config("[d]\nscenario = delay-free\ntau = 1.2\n");
    CHECK(cs[0].tau == 0.0);
    CHECK(cs[0].plant_delay() == 0.0);
  }

  TEST_CASE("rejected documents name the key") {
    CHECK(parse_error_key("[a]\nscenario = predictor\ndt = -1\n") == "dt");
    CHECK(parse_error_key("[a]\nscenario = predictor\nhorizon = 0\n") == "horizon");
    CHECK(parse_error_key("[a]\nscenario = predictor\nspeed = 3\n") == "speed");
    CHECK(parse_error_key("bogus = 1\n[a]\nscenario = naive\n") == "bogus");
    CHECK(parse_error_key("[a]\ntau = 1\n") == "scenario");
    CHECK(parse_error_key("[a]\nscenario = teleport\n") == "scenario");
    CHECK(parse_error_key("[a]\nscenario = predictor\ntau = fast\n") == "tau");
    CHECK(parse_error_key("[a]\nscenario = predictor-mismatch-robust\nrobust_enabled = no\n") ==
          "robust_enabled");
    CHECK(parse_error_key("[a]\nscenario = naive\nfallback = maybe\n") == "fallback");
    CHECK(parse_error_key("[a]\nscenario = naive\nu_max = -2\n") == "a");
  }

  TEST_CASE("comments and an empty document") {
    CHECK(parse_config("; nothing here\n# at all\n").empty());
    CHECK(parse_config("; comment\n[a]\n# another\nscenario = naive\n").size() == 1);
  }

  TEST_CASE("every accepted key round-trips") {
    for (const auto& key : config_keys()) {
      if (key == "scenario" || key == "fallback" || key == "robust_enabled") continue;
      std::string text = "[a]\nscenario = predictor\n" + key + " = 0.5\n";
      CHECK_NOTHROW(parse_config(text));
    }
  }
}

TEST_SUITE("cli") {
  TEST_CASE("CSV round trip and summary recomputation") {
    sim::ScenarioConfig cfg;
    cfg.scenario = sim::ScenarioKind::predictor_mismatch;
    cfg.tau_hat = 0.6;
    cfg.horizon = 6.0;
    const auto log = sim::run_scenario(cfg);
    std::stringstream buf;
    write_csv(buf, log);
    const auto rows = read_csv(buf);
    REQUIRE(rows.size() == log.steps.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = log.steps[k];
      CHECK(rows[k].get("t") == r.t);
      CHECK(rows[k].get("D") == r.D);
      CHECK(rows[k].get("v") == r.v);
      CHECK(rows[k].get("u") == r.u);
      CHECK(rows[k].get("xphat_v") == r.xphat_v);
      CHECK(rows[k].get("h_x") == r.h_x);
      CHECK(rows[k].get("h_e_delta") == r.h_e_delta);
      CHECK(rows[k].get("d_norm") == r.d_norm);
      CHECK(rows[k].qp_status == sim::to_string(r.qp_status));
    }
    const auto a = summarize(log);
    const auto b = summarize(a.name, a.kind, rows);
    CHECK(a.min_h_x == b.min_h_x);
    CHECK(a.t_min_h_x == b.t_min_h_x);
    CHECK(a.first_h_x_violation_t == b.first_h_x_violation_t);
    CHECK(a.delta_empirical == b.delta_empirical);
    CHECK(a.max_abs_u == b.max_abs_u);
    CHECK(a.active_steps == b.active_steps);
    CHECK(a.infeasible_steps == b.infeasible_steps);
  }

  TEST_CASE("CSV header has the fixed column order") {
    sim::TrajectoryLog empty;
    std::ostringstream out;
    write_csv(out, empty);
    CHECK(out.str() ==
          "t,D,v,u,u_delayed,xp_D,xp_v,xphat_D,xphat_v,v_corr,h_x,h_e,h_u,r_e,r_u,h_e_delta,"
          "h_u_delta,qp_status,d_norm\n");
  }

  TEST_CASE("five-scenario run writes logs, a summary, and never overwrites") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "acc.ini";
    std::ofstream(cfg) << kShortConfig;
    const std::vector<std::string> names{"delay_free", "naive", "predictor", "mismatch",
                                         "mismatch_robust"};
    std::ostringstream log;
    const auto first = run(RunManifest{cfg.string(), (tmp.path / "out").string(), names}, log);
    CHECK(first.exit_status == 0);
    REQUIRE(first.csv_files.size() == 5);
    for (const auto& n : names) CHECK(fs::exists(tmp.path / "out" / (n + ".csv")));
    CHECK(first.summary_file == tmp.path / "out" / "summary.csv");

    const std::string summary = slurp(first.summary_file);
    std::istringstream lines(summary);
    std::string line;
    bool naive_has_violation_time = false;
    while (std::getline(lines, line)) {
      if (line.rfind("naive,", 0) == 0) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() >= 6);
        naive_has_violation_time = cells[5] != "none" && std::stod(cells[5]) > 0.0;
      }
    }
    CHECK(naive_has_violation_time);

    const auto second = run(RunManifest{cfg.string(), (tmp.path / "out").string(), names}, log);
    CHECK(second.exit_status == 0);
    CHECK(second.csv_files[0] == tmp.path / "out" / "delay_free-1.csv");
    CHECK(second.summary_file == tmp.path / "out" / "summary-1.csv");
    for (std::size_t i = 0; i < names.size(); ++i) {
      CHECK(slurp(first.csv_files[i]) == slurp(second.csv_files[i]));
    }
  }

  TEST_CASE("empty scenario list is a no-op") {
    TempDir tmp;
    std::ostringstream log;
    const auto out = run(RunManifest{"/nonexistent.ini", (tmp.path / "o").string(), {}}, log);
    CHECK(out.exit_status == 0);
    CHECK(out.csv_files.empty());
    CHECK(log.str().find("warning") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp.path / "o"));
  }

  TEST_CASE("a failing scenario sets the exit status") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "bad.ini";
    std::ofstream(cfg) << "horizon = 3\n[ok]\nscenario = delay-free\n[bad]\nscenario = naive\n"
                          "u_hist = -3\nu0 = -3\n";
    std::ostringstream log;
    const auto out = run(RunManifest{cfg.string(), (tmp.path / "o").string(), {"ok", "bad"}}, log);
    CHECK(out.exit_status != 0);
    REQUIRE(out.summaries.size() == 2);
    CHECK(out.summaries[0].ok);
    CHECK_FALSE(out.summaries[1].ok);
    CHECK(slurp(out.summary_file).find("bad,naive,error") != std::string::npos);
  }

  TEST_CASE("unknown scenario name") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "a.ini";
    std::ofstream(cfg) << "[a]\nscenario = naive\n";
    std::ostringstream log;
    CHECK_THROWS_AS(run(RunManifest{cfg.string(), tmp.path.string(), {"b"}}, log), MisuseError);
  }

  TEST_CASE("feasibility sweep agrees with the solver") {
    for (bool robust : {false, true}) {
      const auto s = feasibility_sweep(acc::AccParams{}, robust);
      CHECK(s.points == 30 * 30 * 21);
      CHECK(s.disagreements == 0);
      CHECK(s.failed_cond1 == 0);
    }
  }
}
