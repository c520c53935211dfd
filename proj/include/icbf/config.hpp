#pragma once

#include <string>
#include <vector>

#include "icbf/sim.hpp"

namespace icbf {

// Parses an INI-style scenario document. Keys before the first section are
// defaults for every section; each section is one scenario and must name
// its `scenario` kind. Missing keys take the ACC reference values
// (dt = 1e-3, horizon = 60, fallback = prioritize-state).
//
//   tau = 1.2
//   [mismatch_robust]
//   scenario = predictor
//   tau_hat = 0.6
//   robust_enabled = true     ; becomes predictor-mismatch-robust
//
// Throws ParseError naming the offending key.
std::vector<sim::ScenarioConfig> parse_config(const std::string& text);
std::vector<sim::ScenarioConfig> parse_config_file(const std::string& path);

// Every key the parser accepts.
const std::vector<std::string>& config_keys();

}  // namespace icbf
