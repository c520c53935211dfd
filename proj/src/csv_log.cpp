#include "icbf/csv_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "icbf/errors.hpp"

namespace icbf {
namespace {

constexpr std::size_t kStatusColumn = 17;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double CsvRow::get(const std::string& column) const {
  std::size_t slot = 0;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i == kStatusColumn) continue;
    if (column == kCsvColumns[i]) return values[slot];
    ++slot;
  }
  throw MisuseError("no numeric CSV column '" + column + "'");
}

void write_csv(std::ostream& out, const sim::TrajectoryLog& log) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    out << (i ? "," : "") << kCsvColumns[i];
  }
  out << '\n';
  for (const auto& r : log.steps) {
    out << num(r.t) << ',' << num(r.D) << ',' << num(r.v) << ',' << num(r.u) << ','
        << num(r.u_delayed) << ',' << num(r.xp_D) << ',' << num(r.xp_v) << ','
        << num(r.xphat_D) << ',' << num(r.xphat_v) << ',' << num(r.v_corr) << ','
        << num(r.h_x) << ',' << num(r.h_e) << ',' << num(r.h_u) << ',' << num(r.r_e) << ','
        << num(r.r_u) << ',' << num(r.h_e_delta) << ',' << num(r.h_u_delta) << ','
        << sim::to_string(r.qp_status) << ',' << num(r.d_norm) << '\n';
  }
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    CsvRow row;
    std::size_t col = 0;
    std::size_t slot = 0;
    while (std::getline(fields, cell, ',')) {
      if (col == kStatusColumn) {
        row.qp_status = cell;
      } else {
        if (slot >= row.values.size()) throw Error("CSV row has too many columns");
        row.values[slot++] = std::strtod(cell.c_str(), nullptr);
      }
      ++col;
    }
    if (col != kCsvColumns.size()) throw Error("CSV row has " + std::to_string(col) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

ScenarioSummary summarize(const sim::TrajectoryLog& log) {
  ScenarioSummary s;
  s.name = log.cfg.name;
  s.kind = sim::to_string(log.cfg.scenario);
  s.min_h_x = std::numeric_limits<double>::infinity();
  s.min_h_u = std::numeric_limits<double>::infinity();
  for (const auto& r : log.steps) {
    if (r.h_x < s.min_h_x) {
      s.min_h_x = r.h_x;
      s.t_min_h_x = r.t;
    }
    if (r.h_x < -kViolationTol && !s.first_h_x_violation_t) s.first_h_x_violation_t = r.t;
    s.min_h_u = std::min(s.min_h_u, r.h_u);
    s.max_abs_u = std::max(s.max_abs_u, std::abs(r.u));
    if (r.qp_status == sim::QpStatus::active) ++s.active_steps;
    if (r.qp_status == sim::QpStatus::infeasible_fallback) ++s.infeasible_steps;
    s.delta_empirical = std::max(s.delta_empirical, r.d_norm);
  }
  return s;
}

ScenarioSummary summarize(const std::string& name, const std::string& kind,
                          const std::vector<CsvRow>& rows) {
  ScenarioSummary s;
  s.name = name;
  s.kind = kind;
  s.min_h_x = std::numeric_limits<double>::infinity();
  s.min_h_u = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const double t = r.get("t");
    const double hx = r.get("h_x");
    if (hx < s.min_h_x) {
      s.min_h_x = hx;
      s.t_min_h_x = t;
    }
    if (hx < -kViolationTol && !s.first_h_x_violation_t) s.first_h_x_violation_t = t;
    s.min_h_u = std::min(s.min_h_u, r.get("h_u"));
    s.max_abs_u = std::max(s.max_abs_u, std::abs(r.get("u")));
    if (r.qp_status == "active") ++s.active_steps;
    if (r.qp_status == "infeasible-fallback") ++s.infeasible_steps;
    s.delta_empirical = std::max(s.delta_empirical, r.get("d_norm"));
  }
  return s;
}

void write_summary(std::ostream& out, const std::vector<ScenarioSummary>& rows) {
  out << "scenario,kind,status,min_h_x,t_min_h_x,first_h_x_violation_t,min_h_u,max_abs_u,"
         "active_steps,infeasible_steps,delta_empirical,error\n";
  for (const auto& s : rows) {
    out << s.name << ',' << s.kind << ',' << (s.ok ? "ok" : "error") << ',';
    if (s.ok) {
      out << num(s.min_h_x) << ',' << num(s.t_min_h_x) << ','
          << (s.first_h_x_violation_t ? num(*s.first_h_x_violation_t) : "none") << ','
          << num(s.min_h_u) << ',' << num(s.max_abs_u) << ',' << s.active_steps << ','
          << s.infeasible_steps << ',' << num(s.delta_empirical) << ",\n";
    } else {
      std::string msg = s.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << ",,,,,,,," << msg << '\n';
    }
  }
}

}  // namespace icbf
