#include <doctest.h>

#include <cmath>

#include "siri/scenario.hpp"
#include "siri/sweep.hpp"

using namespace siri;

TEST_CASE("random states") {
  const auto a = random_states(500, 7);
  const auto b = random_states(500, 7);
  const auto c = random_states(500, 8);
  REQUIRE(a.size() == 500);
  bool differs = false;
  double mean_s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].x_C == 0.0);
    CHECK(a[k].x_S >= 0.0);
    CHECK(a[k].x_R >= 0.0);
    CHECK(a[k].x_S + a[k].x_R <= 1.0);
    CHECK(a[k].x_S == b[k].x_S);
    CHECK(a[k].x_R == b[k].x_R);
    differs = differs || a[k].x_S != c[k].x_S;
    mean_s += a[k].x_S / 500.0;
  }
  CHECK(differs);
  // Each coordinate of the uniform simplex distribution has mean 1/3.
  CHECK(std::abs(mean_s - 1.0 / 3.0) < 0.05);
}

TEST_CASE("random controls stay in the box") {
  const ControlBounds b{0.2, 0.9};
  for (const ControlSignal& u : random_controls(10, 20.0, 40, b, 3)) {
    CHECK(u.horizon == 20.0);
    CHECK(u.segments() == 40);
    CHECK_NOTHROW(u.validate(b));
  }
}

TEST_CASE("parallel bracket sweep matches the serial one") {
  const Scenario sc = preset(1);
  const auto states = random_states(300, 11);
  const auto s = bracket_error_sweep_serial(states, sc.params, sc.weights);
  const auto p = bracket_error_sweep(states, sc.params, sc.weights);
  REQUIRE(s.size() == p.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(s[k].fgv == p[k].fgv);
    CHECK(s[k].gpgv == p[k].gpgv);
    CHECK(s[k].f_gpgv == p[k].f_gpgv);
    CHECK(s[k].gp_gpgv == p[k].gp_gpgv);
    CHECK(s[k].gv_gpgv == p[k].gv_gpgv);
  }
  const BracketErrors m = max_errors(s);
  CHECK(m.worst() >= m.gpgv);
  CHECK(m.worst() < 1e-5);
}

TEST_CASE("parallel finite differences match the serial ones") {
  Scenario sc = preset(2);
  sc.horizon = 20.0;
  sc.n_steps = 200;
  const ControlSignal u = random_controls(1, sc.horizon, 40, sc.bounds, 5).front();
  const Objective J = [&](const ControlSignal& v) { return objective(v, sc); };
  const Gradient s = fd_gradient_serial(J, u, 1e-5);
  const Gradient p = fd_gradient(J, u, 1e-5);
  CHECK(s.cost == objective(u, sc));
  CHECK(s.d_uP == p.d_uP);
  CHECK(s.d_uV == p.d_uV);
  const Gradient d = gradient_discrete(u, sc);
  for (std::size_t k = 0; k < 40; ++k) {
    CHECK(std::abs(s.d_uP[k] - d.d_uP[k]) < 1e-5 * (1.0 + std::abs(d.d_uP[k])));
  }
  SUBCASE("exceptions escape the parallel region") {
    const Objective bad = [](const ControlSignal&) -> double { throw std::runtime_error("boom"); };
    CHECK_THROWS_AS(fd_gradient(bad, u, 1e-5), std::runtime_error);
  }
}

TEST_CASE("parallel solves match serial solves") {
  std::vector<Scenario> cases{preset(1), preset(2), preset(3)};
  const auto s = solve_all_serial(cases, {});
  const auto p = solve_all(cases, {});
  REQUIRE(s.size() == 3);
  REQUIRE(p.size() == 3);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(s[c].report.final_cost == p[c].report.final_cost);
    CHECK(s[c].report.iterations == p[c].report.iterations);
    CHECK(s[c].controls.u_P == p[c].controls.u_P);
    CHECK(s[c].controls.u_V == p[c].controls.u_V);
  }
  SUBCASE("a failing case is reported") {
    SolveOptions bad;
    bad.segments = 7;
    CHECK_THROWS(solve_all(cases, bad));
  }
}
