#include "icbf/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include "icbf/config.hpp"
#include "icbf/errors.hpp"
#include "icbf/sim.hpp"

namespace icbf {

namespace fs = std::filesystem;

fs::path unique_path(const fs::path& dir, const std::string& stem, const std::string& ext) {
  fs::path p = dir / (stem + ext);
  for (int n = 1; fs::exists(p); ++n) p = dir / (stem + "-" + std::to_string(n) + ext);
  return p;
}

namespace {

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace

RunOutcome run(const RunManifest& manifest, std::ostream& log) {
  RunOutcome outcome;
  if (manifest.scenarios.empty()) {
    log << "warning: no scenarios selected, nothing to do\n";
    return outcome;
  }
  const std::vector<sim::ScenarioConfig> all = parse_config_file(manifest.config_path);
  std::vector<sim::ScenarioConfig> configs;
  for (const auto& name : manifest.scenarios) {
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& c) { return c.name == name; });
    if (it == all.end()) {
      throw MisuseError("scenario '" + name + "' not found in " + manifest.config_path);
    }
    configs.push_back(*it);
  }

  const fs::path dir(manifest.output_dir);
  fs::create_directories(dir);

  for (const auto& cfg : configs) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const sim::TrajectoryLog result = sim::run_scenario(cfg);
      const fs::path csv = unique_path(dir, cfg.name, ".csv");
      write_file(csv, [&](std::ostream& out) { write_csv(out, result); });
      outcome.csv_files.push_back(csv);
      outcome.summaries.push_back(summarize(result));
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      log << cfg.name << " (" << sim::to_string(cfg.scenario) << "): " << result.steps.size()
          << " steps in " << secs << " s -> " << csv.string() << '\n';
    } catch (const std::exception& e) {
      ScenarioSummary s;
      s.name = cfg.name;
      s.kind = sim::to_string(cfg.scenario);
      s.ok = false;
      s.error = e.what();
      outcome.summaries.push_back(s);
      outcome.exit_status = 1;
      log << "error: scenario '" << cfg.name << "': " << e.what() << '\n';
    }
  }

  outcome.summary_file = unique_path(dir, "summary", ".csv");
  write_file(outcome.summary_file,
             [&](std::ostream& out) { write_summary(out, outcome.summaries); });
  log << "summary -> " << outcome.summary_file.string() << '\n';
  return outcome;
}

FeasibilitySweep feasibility_sweep(const acc::AccParams& params, bool robust,
                                   const FeasibilityGrid& grid) {
  const sim::SafetyFilter filter(params, robust);
  FeasibilitySweep out;
  auto lin = [](double lo, double hi, int n, int i) {
    return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  };
  for (int i = 0; i < grid.n_D; ++i) {
    for (int j = 0; j < grid.n_v; ++j) {
      for (int k = 0; k < grid.n_u; ++k) {
        const StateVec z = acc::AccState{lin(grid.D_min, grid.D_max, grid.n_D, i),
                                         lin(grid.v_min, grid.v_max, grid.n_v, j)}
                               .vec();
        InputVec u(1);
        u[0] = lin(-params.u_max, params.u_max, grid.n_u, k);
        const auto ev = filter.evaluate(z, u);
        ++out.points;
        if (ev.verdict.ok) ++out.compatible;
        if (ev.result.feasible) ++out.feasible;
        if (ev.verdict.ok != ev.result.feasible) ++out.disagreements;
        switch (ev.verdict.failed_condition) {
          case FailedCondition::cond1: ++out.failed_cond1; break;
          case FailedCondition::cond2: ++out.failed_cond2; break;
          case FailedCondition::cond3: ++out.failed_cond3; break;
          case FailedCondition::none: break;
        }
      }
    }
  }
  return out;
}

}  // namespace icbf
