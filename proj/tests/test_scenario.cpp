#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "siri/scenario.hpp"

using namespace siri;

namespace {

const char* kCase2 = R"(label = demo
# comment line
[params]
beta = 1
beta_hat = 2   ; trailing comment
gamma = 0.1

[weights]
c_P = 0.3
c_V = 2
c_I = 5

[bounds]
u_P_min = 0.2
u_V_max = 0.9

[initial]
x_S = 0.8
x_I = 0.2
x_R = 0

[grid]
T = 60
n_steps = 600
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  return text;
}

ConfigError parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError(ConfigError::Kind::io, {}, 0, "");
}

}  // namespace

TEST_CASE("presets") {
  const Scenario s1 = preset(1);
  CHECK(s1.params.beta == 1.0);
  CHECK(s1.params.beta_hat == 2.5);
  CHECK(s1.params.gamma == 0.38);
  CHECK(s1.weights.c_P == 7.1);
  CHECK(s1.weights.c_V == 2.0);
  CHECK(s1.weights.c_I == 7.0);
  const Scenario s3 = preset(3);
  CHECK(s3.params.beta == 3.0);
  CHECK(s3.weights.c_V == 3.0);
  for (int c = 1; c <= 3; ++c) {
    const Scenario s = preset(c);
    CHECK(s.bounds.u_P_min == 0.2);
    CHECK(s.bounds.u_V_max == 0.9);
    CHECK(s.x0.x_S == 0.8);
    CHECK(s.x0.x_I == 0.2);
    CHECK(s.x0.x_R == 0.0);
    CHECK(s.horizon == 60.0);
    CHECK(s.n_steps == 600);
    CHECK(s.endemic());
    CHECK_NOTHROW(s.validate());
  }
  CHECK_THROWS_AS(preset(0), UsageError);
  CHECK_THROWS_AS(preset(4), UsageError);
}

TEST_CASE("parsing") {
  SUBCASE("the documented layout with comments") {
    const Scenario s = parse_scenario(kCase2);
    const Scenario p = preset(2);
    CHECK(s.label == "demo");
    CHECK(s.params.beta_hat == p.params.beta_hat);
    CHECK(s.weights.c_I == p.weights.c_I);
    CHECK(s.bounds.u_V_max == p.bounds.u_V_max);
    CHECK(s.x0.x_S == p.x0.x_S);
    CHECK(s.n_steps == 600);
  }
  SUBCASE("grid is optional") {
    const std::string text = std::string(kCase2).substr(0, std::string(kCase2).find("[grid]"));
    const Scenario s = parse_scenario(text);
    CHECK(s.horizon == 60.0);
    CHECK(s.n_steps == 600);
  }
  SUBCASE("round trip through the formatter") {
    for (int c = 1; c <= 3; ++c) {
      Scenario s = preset(c);
      s.horizon = 47.25;
      s.n_steps = 378;
      const Scenario back = parse_scenario(format_scenario(s));
      CHECK(back.label == s.label);
      CHECK(back.params.gamma == s.params.gamma);
      CHECK(back.weights.c_P == s.weights.c_P);
      CHECK(back.bounds.u_P_min == s.bounds.u_P_min);
      CHECK(back.x0.x_I == s.x0.x_I);
      CHECK(back.horizon == s.horizon);
      CHECK(back.n_steps == s.n_steps);
      CHECK(format_scenario(back) == format_scenario(s));
    }
  }
  SUBCASE("small simplex drift is normalized") {
    const Scenario s = parse_scenario(replace(kCase2, "x_S = 0.8", "x_S = 0.8000000001"));
    CHECK(s.x0.sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("config errors") {
  SUBCASE("u_P_min = 0") {
    const ConfigError e = parse_error(replace(kCase2, "u_P_min = 0.2", "u_P_min = 0"));
    CHECK(e.kind() == ConfigError::Kind::invariant);
    CHECK(e.key() == "bounds.u_P_min");
    CHECK(e.line() == 14);
    CHECK(std::string(e.what()).find("u_P_min must be > 0") != std::string::npos);
  }
  SUBCASE("simplex violation") {
    const ConfigError e = parse_error(replace(kCase2, "x_R = 0", "x_R = 0.1"));
    CHECK(e.kind() == ConfigError::Kind::invariant);
    CHECK(std::string(e.what()).find("simplex violation") != std::string::npos);
  }
  SUBCASE("missing key") {
    const ConfigError e = parse_error(replace(kCase2, "gamma = 0.1", ""));
    CHECK(e.kind() == ConfigError::Kind::missing_key);
    CHECK(e.key() == "params.gamma");
  }
  SUBCASE("duplicate key") {
    const ConfigError e = parse_error(replace(kCase2, "gamma = 0.1", "gamma = 0.1\ngamma = 0.2"));
    CHECK(e.kind() == ConfigError::Kind::parse);
    CHECK(e.line() == 7);
  }
  SUBCASE("not a number") {
    const ConfigError e = parse_error(replace(kCase2, "c_V = 2", "c_V = two"));
    CHECK(e.kind() == ConfigError::Kind::parse);
    CHECK(e.key() == "weights.c_V");
    CHECK(e.line() == 10);
  }
  SUBCASE("malformed lines") {
    CHECK(parse_error(replace(kCase2, "[bounds]", "[bounds")).line() == 13);
    CHECK(parse_error(replace(kCase2, "c_I = 5", "c_I 5")).line() == 11);
    CHECK(parse_error(replace(kCase2, "c_I = 5", "= 5")).kind() == ConfigError::Kind::parse);
  }
  SUBCASE("other invariants") {
    CHECK(parse_error(replace(kCase2, "beta = 1", "beta = -1")).key() == "params.beta");
    CHECK(parse_error(replace(kCase2, "u_V_max = 0.9", "u_V_max = 1")).key() == "bounds.u_V_max");
    CHECK(parse_error(replace(kCase2, "n_steps = 600", "n_steps = 2.5")).key() == "grid.n_steps");
    CHECK(parse_error(replace(kCase2, "T = 60", "T = 0")).key() == "grid.T");
  }
  SUBCASE("unreadable file") {
    try {
      load_scenario("/nonexistent/dir/scenario.ini");
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.kind() == ConfigError::Kind::io);
    }
  }
}

TEST_CASE("loading from disk") {
  const auto path = std::filesystem::temp_directory_path() / "siri_test_scenario.ini";
  {
    std::ofstream out(path);
    out << format_scenario(preset(3));
  }
  const Scenario s = load_scenario(path);
  std::filesystem::remove(path);
  CHECK(s.params.beta == 3.0);
  CHECK(s.label == "case-3");
}

TEST_CASE("endemic flag is recorded, not enforced") {
  Scenario s = preset(2);
  s.params.gamma = 1.0;
  CHECK_FALSE(s.endemic());
  CHECK_NOTHROW(s.validate());
}
