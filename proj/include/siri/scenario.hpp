#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "siri/model.hpp"
#include "siri/ode.hpp"

namespace siri {

struct Scenario {
  std::string label;
  ModelParams params;
  CostWeights weights;
  ControlBounds bounds;
  EpidemicState x0;
  double horizon = 60.0;
  std::size_t n_steps = 600;

  TimeGrid grid() const { return {horizon, n_steps}; }
  ReducedState z0() const { return {0.0, x0.x_S, x0.x_R}; }
  /// gamma < beta_hat u_P_min; recorded, not enforced.
  bool endemic() const { return params.gamma < params.beta_hat * bounds.u_P_min; }

  /// Throws DomainError / std::invalid_argument on the first violated invariant.
  void validate() const;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Config loading failure with the offending line or key.
class ConfigError : public std::runtime_error {
 public:
  enum class Kind { parse, missing_key, invariant, io };

  ConfigError(Kind kind, std::string key, int line, const std::string& what)
      : std::runtime_error(what), kind_(kind), key_(std::move(key)), line_(line) {}

  Kind kind() const { return kind_; }
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  std::string key_;
  int line_;
};

/// Preset cases 1..3 with bounds (0.2, 0.9), x0 = (0.8, 0.2, 0), T = 60 d, 600 steps.
Scenario preset(int case_id);

/// Flat sectioned key = value text: [params], [weights], [bounds], [initial], [grid].
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario; values are written with 17 significant digits.
std::string format_scenario(const Scenario& s);

}  // namespace siri
