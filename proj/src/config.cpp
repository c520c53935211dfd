#include "icbf/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "icbf/errors.hpp"

namespace icbf {
namespace {

namespace pt = boost::property_tree;
using sim::ScenarioConfig;
using sim::ScenarioKind;

double parse_number(const std::string& key, const std::string& raw) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(value)) {
    throw ParseError("key '" + key + "': expected a number, got '" + raw + "'", key);
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  std::string s = raw;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ParseError("key '" + key + "': expected a boolean, got '" + raw + "'", key);
}

std::map<std::string, double*> numeric_fields(ScenarioConfig& c) {
  auto& p = c.params;
  return {
      {"c0", &p.c0},           {"c1", &p.c1},
      {"c2", &p.c2},           {"K_v", &p.K_v},
      {"alpha_phi", &p.alpha_phi},
      {"mu0_e", &p.mu0_e},     {"mu0_u", &p.mu0_u},
      {"sigma0_e", &p.sigma0_e}, {"sigma0_u", &p.sigma0_u},
      {"lambda", &p.lambda},   {"u_max", &p.u_max},
      {"T_h", &p.T_h},         {"D_sf", &p.D_sf},
      {"v_L", &p.v_L},         {"v_d", &p.v_d},
      {"gamma_x", &p.gamma_x}, {"gamma_e", &p.gamma_e},
      {"gamma_u", &p.gamma_u}, {"tau", &c.tau},
      {"tau_hat", &c.tau_hat}, {"horizon", &c.horizon},
      {"dt", &c.dt},           {"D0", &c.D0},
      {"v0", &c.v0},           {"u0", &c.u0},
      {"u_hist", &c.u_hist},
  };
}

using Entries = std::vector<std::pair<std::string, std::string>>;

ScenarioConfig build(const std::string& section, const Entries& defaults, const Entries& own) {
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : defaults) kv[k] = v;
  for (const auto& [k, v] : own) kv[k] = v;

  ScenarioConfig c;
  c.name = section;
  const auto kind_it = kv.find("scenario");
  if (kind_it == kv.end()) {
    throw ParseError("section [" + section + "]: missing required key 'scenario'", "scenario");
  }
  const auto kind = sim::scenario_from_string(kind_it->second);
  if (!kind) {
    throw ParseError("section [" + section + "]: unknown scenario '" + kind_it->second + "'",
                     "scenario");
  }
  c.scenario = *kind;

  auto fields = numeric_fields(c);
  std::optional<bool> robust;
  for (const auto& [key, raw] : kv) {
    if (key == "scenario") continue;
    if (auto it = fields.find(key); it != fields.end()) {
      *it->second = parse_number(key, raw);
    } else if (key == "robust_enabled") {
      robust = parse_bool(key, raw);
    } else if (key == "fallback") {
      if (raw == "error") {
        c.fallback = sim::FallbackPolicy::error;
      } else if (raw == "prioritize-state") {
        c.fallback = sim::FallbackPolicy::prioritize_state;
      } else {
        throw ParseError("key 'fallback': expected error or prioritize-state", key);
      }
    } else if (key == "delta") {
      c.delta = parse_number(key, raw);
    } else {
      throw ParseError("section [" + section + "]: unknown key '" + key + "'", key);
    }
  }

  if (!(c.dt > 0.0)) throw ParseError("key 'dt' must be positive", "dt");
  if (!(c.horizon > 0.0)) throw ParseError("key 'horizon' must be positive", "horizon");
  if (!(c.tau >= 0.0)) throw ParseError("key 'tau' must be non-negative", "tau");
  if (!(c.tau_hat >= 0.0)) throw ParseError("key 'tau_hat' must be non-negative", "tau_hat");
  if (c.delta && !(*c.delta >= 0.0)) throw ParseError("key 'delta' must be non-negative", "delta");

  const bool has_tau_hat = kv.count("tau_hat") > 0;
  switch (c.scenario) {
    case ScenarioKind::delay_free:
      c.tau = 0.0;
      c.tau_hat = 0.0;
      c.robust_enabled = robust.value_or(false);
      break;
    case ScenarioKind::naive:
      c.tau_hat = c.tau;
      c.robust_enabled = robust.value_or(false);
      break;
    case ScenarioKind::predictor:
      if (!has_tau_hat) c.tau_hat = c.tau;
      c.robust_enabled = robust.value_or(false);
      if (c.tau_hat != c.tau) {
        c.scenario = c.robust_enabled ? ScenarioKind::predictor_mismatch_robust
                                      : ScenarioKind::predictor_mismatch;
      }
      break;
    case ScenarioKind::predictor_mismatch:
      if (!has_tau_hat) c.tau_hat = 0.5 * c.tau;
      c.robust_enabled = robust.value_or(false);
      if (c.robust_enabled) c.scenario = ScenarioKind::predictor_mismatch_robust;
      break;
    case ScenarioKind::predictor_mismatch_robust:
      if (!has_tau_hat) c.tau_hat = 0.5 * c.tau;
      if (robust && !*robust) {
        throw ParseError("section [" + section +
                             "]: predictor-mismatch-robust contradicts robust_enabled = false",
                         "robust_enabled");
      }
      c.robust_enabled = true;
      break;
  }

  try {
    c.validate();
  } catch (const MisuseError& e) {
    throw ParseError("section [" + section + "]: " + e.what(), section);
  }
  return c;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    ScenarioConfig c;
    std::vector<std::string> out;
    for (const auto& [k, _] : numeric_fields(c)) out.push_back(k);
    for (const char* k : {"scenario", "robust_enabled", "fallback", "delta"}) out.emplace_back(k);
    std::sort(out.begin(), out.end());
    return out;
  }();
  return keys;
}

std::vector<ScenarioConfig> parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what(), "");
  }

  Entries defaults;
  std::vector<std::pair<std::string, Entries>> sections;
  for (const auto& [name, node] : tree) {
    // read_ini yields leaf values for top-level keys and subtrees for sections.
    if (node.empty() && !node.data().empty()) {
      defaults.emplace_back(name, node.data());
      continue;
    }
    Entries own;
    for (const auto& [k, v] : node) own.emplace_back(k, v.data());
    sections.emplace_back(name, std::move(own));
  }

  const auto& known = config_keys();
  for (const auto& [k, _] : defaults) {
    if (!std::binary_search(known.begin(), known.end(), k)) {
      throw ParseError("unknown key '" + k + "'", k);
    }
  }
  // A document without sections describes a single scenario.
  if (sections.empty()) {
    const auto it = std::find_if(defaults.begin(), defaults.end(),
                                 [](const auto& e) { return e.first == "scenario"; });
    if (it != defaults.end()) sections.emplace_back(it->second, Entries{});
  }

  std::vector<ScenarioConfig> out;
  out.reserve(sections.size());
  for (const auto& [name, own] : sections) out.push_back(build(name, defaults, own));
  return out;
}

std::vector<ScenarioConfig> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace icbf
