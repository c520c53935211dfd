#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "icbf/sim.hpp"

namespace icbf {

inline constexpr std::array<const char*, 19> kCsvColumns = {
    "t",       "D",       "v",      "u",    "u_delayed", "xp_D",      "xp_v",
    "xphat_D", "xphat_v", "v_corr", "h_x",  "h_e",       "h_u",       "r_e",
    "r_u",     "h_e_delta", "h_u_delta", "qp_status", "d_norm"};

// One parsed CSV line. Numeric columns keep their header order; qp_status is
// carried separately as text.
struct CsvRow {
  std::array<double, 18> values{};
  std::string qp_status;

  double get(const std::string& column) const;
};

// Writes the header and one line per step; numbers use 17 significant digits.
void write_csv(std::ostream& out, const sim::TrajectoryLog& log);
std::vector<CsvRow> read_csv(std::istream& in);

// h_x below -kViolationTol counts as a constraint violation in summaries.
inline constexpr double kViolationTol = 1e-6;

struct ScenarioSummary {
  std::string name;
  std::string kind;
  bool ok = true;
  std::string error;
  double min_h_x = 0.0;
  double t_min_h_x = 0.0;
  std::optional<double> first_h_x_violation_t;
  double min_h_u = 0.0;
  double max_abs_u = 0.0;
  long active_steps = 0;
  long infeasible_steps = 0;
  double delta_empirical = 0.0;
};

ScenarioSummary summarize(const sim::TrajectoryLog& log);
// Same figures, recomputed from CSV rows.
ScenarioSummary summarize(const std::string& name, const std::string& kind,
                          const std::vector<CsvRow>& rows);

void write_summary(std::ostream& out, const std::vector<ScenarioSummary>& rows);

}  // namespace icbf
