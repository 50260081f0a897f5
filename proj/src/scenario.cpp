#include "siri/scenario.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace siri {

void Scenario::validate() const {
  siri::validate(params);
  siri::validate(weights);
  siri::validate(bounds);
  siri::validate(x0);
  grid().validate();
}

Scenario preset(int case_id) {
  Scenario s;
  s.bounds = {0.2, 0.9};
  s.x0 = {0.8, 0.2, 0.0};
  s.horizon = 60.0;
  s.n_steps = 600;
  switch (case_id) {
    case 1:
      s.label = "case-1";
      s.weights = {7.1, 2.0, 7.0};
      s.params = {1.0, 2.5, 0.38};
      break;
    case 2:
      s.label = "case-2";
      s.weights = {0.3, 2.0, 5.0};
      s.params = {1.0, 2.0, 0.1};
      break;
    case 3:
      s.label = "case-3";
      s.weights = {0.3, 3.0, 5.0};
      s.params = {3.0, 2.0, 0.1};
      break;
    default:
      throw UsageError("unknown case id " + std::to_string(case_id) + " (expected 1, 2 or 3)");
  }
  return s;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

double parse_number(const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ConfigError(ConfigError::Kind::parse, key, e.line,
                      "line " + std::to_string(e.line) + ": " + key + " is not a number: '" +
                          e.value + "'");
  return v;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(ConfigError::Kind::parse, {}, line_no,
                          "line " + std::to_string(line_no) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(ConfigError::Kind::parse, {}, line_no,
                        "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(ConfigError::Kind::parse, {}, line_no,
                        "line " + std::to_string(line_no) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (entries.count(full))
      throw ConfigError(ConfigError::Kind::parse, full, line_no,
                        "line " + std::to_string(line_no) + ": duplicate key " + full);
    entries[full] = {value, line_no};
  }

  const auto require = [&](const std::string& key) -> double {
    const auto it = entries.find(key);
    if (it == entries.end())
      throw ConfigError(ConfigError::Kind::missing_key, key, 0, "missing key " + key);
    return parse_number(key, it->second);
  };
  const auto invariant = [&](const std::string& key, bool ok, const std::string& msg) {
    if (ok) return;
    const auto it = entries.find(key);
    const int line = it == entries.end() ? 0 : it->second.line;
    throw ConfigError(ConfigError::Kind::invariant, key, line,
                      (line ? "line " + std::to_string(line) + ": " : std::string()) + msg);
  };

  Scenario s;
  if (const auto it = entries.find("label"); it != entries.end()) s.label = it->second.value;

  s.params.beta = require("params.beta");
  s.params.beta_hat = require("params.beta_hat");
  s.params.gamma = require("params.gamma");
  invariant("params.beta", s.params.beta > 0.0, "beta must be > 0");
  invariant("params.beta_hat", s.params.beta_hat > 0.0, "beta_hat must be > 0");
  invariant("params.gamma", s.params.gamma > 0.0, "gamma must be > 0");

  s.weights.c_P = require("weights.c_P");
  s.weights.c_V = require("weights.c_V");
  s.weights.c_I = require("weights.c_I");
  invariant("weights.c_P", s.weights.c_P >= 0.0, "c_P must be >= 0");
  invariant("weights.c_V", s.weights.c_V >= 0.0, "c_V must be >= 0");
  invariant("weights.c_I", s.weights.c_I >= 0.0, "c_I must be >= 0");

  s.bounds.u_P_min = require("bounds.u_P_min");
  s.bounds.u_V_max = require("bounds.u_V_max");
  invariant("bounds.u_P_min", s.bounds.u_P_min > 0.0, "u_P_min must be > 0");
  invariant("bounds.u_P_min", s.bounds.u_P_min <= 1.0, "u_P_min must be <= 1");
  invariant("bounds.u_V_max", s.bounds.u_V_max >= 0.0, "u_V_max must be >= 0");
  invariant("bounds.u_V_max", s.bounds.u_V_max < 1.0, "u_V_max must be < 1");

  EpidemicState x0{require("initial.x_S"), require("initial.x_I"), require("initial.x_R")};
  invariant("initial.x_S", x0.x_S >= 0.0 && x0.x_S <= 1.0, "x_S must lie in [0, 1]");
  invariant("initial.x_I", x0.x_I >= 0.0 && x0.x_I <= 1.0, "x_I must lie in [0, 1]");
  invariant("initial.x_R", x0.x_R >= 0.0 && x0.x_R <= 1.0, "x_R must lie in [0, 1]");
  std::ostringstream sum;
  sum.precision(17);
  sum << x0.sum();
  invariant("initial", std::abs(x0.sum() - 1.0) <= kSimplexTol,
            "simplex violation: x_S + x_I + x_R = " + sum.str() + " (must equal 1)");
  s.x0 = normalized(x0);

  if (entries.count("grid.T")) s.horizon = require("grid.T");
  if (entries.count("grid.n_steps")) {
    const double n = require("grid.n_steps");
    invariant("grid.n_steps", n >= 1.0 && n == std::floor(n), "n_steps must be a positive integer");
    s.n_steps = static_cast<std::size_t>(n);
  }
  invariant("grid.T", s.horizon > 0.0, "T must be > 0");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(ConfigError::Kind::io, {}, 0, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream os;
  os.precision(17);
  if (!s.label.empty()) os << "label = " << s.label << "\n\n";
  os << "[params]\n"
     << "beta = " << s.params.beta << "\n"
     << "beta_hat = " << s.params.beta_hat << "\n"
     << "gamma = " << s.params.gamma << "\n\n"
     << "[weights]\n"
     << "c_P = " << s.weights.c_P << "\n"
     << "c_V = " << s.weights.c_V << "\n"
     << "c_I = " << s.weights.c_I << "\n\n"
     << "[bounds]\n"
     << "u_P_min = " << s.bounds.u_P_min << "\n"
     << "u_V_max = " << s.bounds.u_V_max << "\n\n"
     << "[initial]\n"
     << "x_S = " << s.x0.x_S << "\n"
     << "x_I = " << s.x0.x_I << "\n"
     << "x_R = " << s.x0.x_R << "\n\n"
     << "[grid]\n"
     << "T = " << s.horizon << "\n"
     << "n_steps = " << s.n_steps << "\n";
  return os.str();
}

}  // namespace siri
