#include <CLI11.hpp>
#include <iostream>

#include "icbf/config.hpp"
#include "icbf/errors.hpp"
#include "icbf/runner.hpp"
#include "icbf/selftest.hpp"

namespace {

int cmd_run(const std::string& config, const std::string& out, std::vector<std::string> names) {
  if (names.empty()) {
    for (const auto& c : icbf::parse_config_file(config)) names.push_back(c.name);
  }
  const icbf::RunManifest manifest{config, out, names};
  return icbf::run(manifest, std::cerr).exit_status;
}

int cmd_check_feasibility(const std::string& config) {
  const auto scenarios = icbf::parse_config_file(config);
  if (scenarios.empty()) {
    std::cerr << "warning: no scenarios in " << config << '\n';
    return 0;
  }
  int status = 0;
  std::cout << "scenario,robust,points,compatible,feasible,cond1,cond2,cond3,disagreements\n";
  for (const auto& c : scenarios) {
    const auto s = icbf::feasibility_sweep(c.params, c.robust_enabled);
    std::cout << c.name << ',' << (c.robust_enabled ? "yes" : "no") << ',' << s.points << ','
              << s.compatible << ',' << s.feasible << ',' << s.failed_cond1 << ','
              << s.failed_cond2 << ',' << s.failed_cond3 << ',' << s.disagreements << '\n';
    if (s.disagreements != 0) status = 1;
  }
  return status;
}

int cmd_selftest(long scale) {
  icbf::selftest::Options opt;
  if (scale > 1) {
    opt.single /= scale;
    opt.pairs /= scale;
    opt.antiparallel /= scale;
    opt.compat /= scale;
    opt.gradient_points /= scale;
  }
  return icbf::selftest::report(std::cout, icbf::selftest::run_all(opt)) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integral CBF safety filter simulator for input-delayed systems"};
  app.require_subcommand(1);

  std::string config, out;
  std::vector<std::string> names;
  auto* run = app.add_subcommand("run", "simulate scenarios and write CSV logs");
  run->add_option("--config", config, "scenario file")->required();
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--scenario", names, "section to run (repeatable; default: all)");

  auto* feas = app.add_subcommand("check-feasibility",
                                  "sweep the ACC state-input box and report compatibility");
  feas->add_option("--config", config, "scenario file")->required();

  long scale = 1;
  auto* self = app.add_subcommand("selftest", "run the oracle property suites");
  self->add_option("--reduce", scale, "divide every suite's case count by this factor")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out, names);
    if (*feas) return cmd_check_feasibility(config);
    if (*self) return cmd_selftest(scale);
  } catch (const icbf::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
