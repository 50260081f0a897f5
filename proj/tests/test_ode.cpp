#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "siri/ode.hpp"
#include "siri/pmp.hpp"
#include "siri/scenario.hpp"
#include "siri/sweep.hpp"

using namespace siri;

namespace {

Trajectory run(const Scenario& sc, const ControlSignal& u) {
  return integrate_forward(sc.z0(), u, sc.params, sc.weights, sc.grid());
}

double max_norm(const ReducedState& a, const ReducedState& b) {
  return std::max({std::abs(a.x_C - b.x_C), std::abs(a.x_S - b.x_S), std::abs(a.x_R - b.x_R)});
}

}  // namespace

TEST_CASE("no infection stays no infection") {
  Scenario sc = preset(1);
  sc.x0 = {0.6, 0.0, 0.4};
  for (const ControlSignal& u : random_controls(5, sc.horizon, 120, sc.bounds, 3)) {
    const Trajectory t = run(sc, u);
    for (const ReducedState& z : t.z) CHECK(std::abs(z.x_I()) < 1e-12);
  }
}

TEST_CASE("simulations stay on the simplex") {
  for (int c = 1; c <= 3; ++c) {
    const Scenario sc = preset(c);
    for (const ControlSignal& u : random_controls(5, sc.horizon, 60, sc.bounds, 40 + c)) {
      for (const EpidemicState& s : simulate_full(sc.x0, u, sc.params, sc.grid())) {
        CHECK(std::abs(s.sum() - 1.0) < 1e-9);
        for (double v : {s.x_S, s.x_I, s.x_R}) {
          CHECK(v >= -1e-9);
          CHECK(v <= 1.0 + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("RK4 error ratio under step halving") {
  Scenario sc = preset(2);
  const ControlSignal u = ControlSignal::constant(sc.horizon, 1, {0.5, 0.2});
  const auto terminal = [&](std::size_t n) {
    Scenario s = sc;
    s.n_steps = n;
    return run(s, u).z.back();
  };
  const std::size_t n0 = 120;
  const ReducedState ref = terminal(8 * n0);
  const double e1 = max_norm(terminal(n0), ref);
  const double e2 = max_norm(terminal(2 * n0), ref);
  const double ratio = e1 / e2;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("costate terminal condition and constant lambda_C") {
  const Scenario sc = preset(1);
  for (const ControlSignal& u : random_controls(3, sc.horizon, 120, sc.bounds, 9)) {
    Trajectory t = run(sc, u);
    const std::vector<CostateVec> lam = integrate_costate_backward(t, sc.params, sc.weights);
    CHECK(lam.back().lambda_C == 1.0);
    CHECK(lam.back().lambda_S == 0.0);
    CHECK(lam.back().lambda_R == 0.0);
    for (const CostateVec& l : lam) CHECK(std::abs(l.lambda_C - 1.0) < 1e-12);
  }
}

TEST_CASE("initial costates are the sensitivities of the terminal cost") {
  Scenario sc = preset(2);
  sc.horizon = 10.0;
  sc.n_steps = 100;
  const ControlSignal u = random_controls(1, sc.horizon, 10, sc.bounds, 21).front();
  Trajectory t = run(sc, u);
  const std::vector<CostateVec> lam = integrate_costate_backward(t, sc.params, sc.weights);

  const auto J = [&](int which, oracle::LD d) {
    oracle::State z0 = oracle::initial(sc);
    z0[which] += d;
    return oracle::terminal(u, sc, sc.n_steps, z0)[0];
  };
  const double dS = static_cast<double>(oracle::central([&](oracle::LD d) { return J(1, d); }, 0, 1e-5L));
  const double dR = static_cast<double>(oracle::central([&](oracle::LD d) { return J(2, d); }, 0, 1e-5L));
  CHECK(oracle::rel_err(lam[0].lambda_S, dS) < 1e-4);
  CHECK(oracle::rel_err(lam[0].lambda_R, dR) < 1e-4);
}

TEST_CASE("Hamiltonian is constant under constant controls") {
  for (int c = 1; c <= 3; ++c) {
    const Scenario sc = preset(c);
    const ControlValue cu{0.6, 0.3};
    Trajectory t = run(sc, ControlSignal::constant(sc.horizon, 1, cu));
    attach_costates(t, sc.params, sc.weights);
    const double h0 = hamiltonian(t.z[0], cu, t.costates[0], sc.params, sc.weights);
    for (std::size_t k = 0; k < t.z.size(); ++k) {
      const double h = hamiltonian(t.z[k], cu, t.costates[k], sc.params, sc.weights);
      CHECK(std::abs(h - h0) <= 1e-6 * (1.0 + std::abs(h0)));
    }
  }
}

TEST_CASE("terminal cost equals a fine trapezoid of the running cost") {
  for (int c = 1; c <= 3; ++c) {
    const Scenario sc = preset(c);
    const ControlSignal u = random_controls(1, sc.horizon, 120, sc.bounds, 70 + c).front();
    const double xc = run(sc, u).terminal_cost();
    const double quad = static_cast<double>(oracle::trapezoid_cost(u, sc, 4));
    CHECK(oracle::rel_err(xc, quad) < 1e-5);
  }
}

TEST_CASE("simulate_full examples") {
  SUBCASE("long run reaches the stable endemic equilibrium") {
    const Scenario sc = preset(1);
    const ControlSignal u = ControlSignal::constant(400.0, 1, {0.2, 0.1});
    const auto path = simulate_full({0.79, 0.2, 0.01}, u, sc.params, {400.0, 4000});
    CHECK(std::abs(path.back().x_S - 0.0) < 1e-3);
    CHECK(std::abs(path.back().x_I - 0.24) < 1e-3);
    CHECK(std::abs(path.back().x_R - 0.76) < 1e-3);
  }
  SUBCASE("the disease-free state does not move") {
    const auto path = simulate_full({0, 0, 1}, ControlSignal::constant(60, 1, {0.5, 0.5}),
                                    preset(1).params, {60, 600});
    for (const EpidemicState& s : path) {
      CHECK(s.x_S == 0.0);
      CHECK(s.x_I == 0.0);
      CHECK(s.x_R == 1.0);
    }
  }
  SUBCASE("without recovery or vaccination x_R stays empty") {
    const ModelParams p{1.0, 2.0, 0.0};
    const auto path =
        simulate_full({0.8, 0.2, 0.0}, ControlSignal::constant(60, 1, {0.7, 0.0}), p, {60, 600});
    for (const EpidemicState& s : path) CHECK(s.x_R == 0.0);
  }
}

TEST_CASE("integration errors") {
  const Scenario sc = preset(1);
  SUBCASE("control segments must align with the grid") {
    const ControlSignal u = ControlSignal::constant(sc.horizon, 7, {1.0, 0.0});
    CHECK_THROWS_AS(run(sc, u), std::invalid_argument);
  }
  SUBCASE("wrong control count") {
    CHECK_THROWS_AS(integrate_forward(sc.z0(), std::vector<ControlValue>(3), sc.params, sc.weights,
                                      sc.grid()),
                    std::invalid_argument);
  }
  SUBCASE("missing controls in the backward pass") {
    Trajectory t = run(sc, ControlSignal::constant(sc.horizon, 1, {1.0, 0.0}));
    t.controls.clear();
    CHECK_THROWS_AS(integrate_costate_backward(t, sc.params, sc.weights), std::invalid_argument);
  }
  SUBCASE("a step far too large diverges and names the node") {
    Scenario bad = sc;
    bad.params = {40.0, 40.0, 0.1};
    bad.n_steps = 6;
    try {
      run(bad, ControlSignal::constant(bad.horizon, 1, {1.0, 0.0}));
      FAIL("expected divergence");
    } catch (const IntegrationDiverged& e) {
      CHECK(e.node() >= 1);
      CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
  }
}

TEST_CASE("x_C is nondecreasing and starts at 0") {
  const Scenario sc = preset(3);
  const Trajectory t = run(sc, random_controls(1, sc.horizon, 120, sc.bounds, 5).front());
  CHECK(t.z[0].x_C == 0.0);
  for (std::size_t k = 1; k < t.z.size(); ++k) CHECK(t.z[k].x_C >= t.z[k - 1].x_C);
}
