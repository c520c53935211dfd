#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "icbf/acc_model.hpp"
#include "icbf/csv_log.hpp"

namespace icbf {

struct RunManifest {
  std::string config_path;
  std::string output_dir;
  // Section names to run, in order. An empty list runs nothing.
  std::vector<std::string> scenarios;
  static constexpr bool deterministic = true;
};

struct RunOutcome {
  int exit_status = 0;
  std::vector<ScenarioSummary> summaries;
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path summary_file;
};

// Returns `dir / (stem + ext)`, or the first free `stem-N + ext` when that
// file already exists.
std::filesystem::path unique_path(const std::filesystem::path& dir, const std::string& stem,
                                  const std::string& ext);

// Runs the selected scenarios in order, writing one CSV each plus
// summary.csv. A scenario that throws is reported as an error row and the
// exit status becomes 1; the remaining scenarios still run. Progress and
// warnings go to `log`.
RunOutcome run(const RunManifest& manifest, std::ostream& log);

struct FeasibilityGrid {
  double D_min = 5.0, D_max = 150.0;
  double v_min = 0.0, v_max = 35.0;
  int n_D = 30, n_v = 30, n_u = 21;  // u spans [-u_max, u_max]
};

struct FeasibilitySweep {
  long points = 0;
  long compatible = 0;
  long feasible = 0;
  long disagreements = 0;
  long failed_cond1 = 0;
  long failed_cond2 = 0;
  long failed_cond3 = 0;
};

// Evaluates the ACC filter rows on a (D, v, u) grid and compares the
// closed-form compatibility verdict with the feasibility of solve_two.
FeasibilitySweep feasibility_sweep(const acc::AccParams& params, bool robust,
                                   const FeasibilityGrid& grid = {});

}  // namespace icbf
