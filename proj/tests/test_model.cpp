#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "siri/model.hpp"
#include "siri/scenario.hpp"

using namespace siri;

namespace {

const ModelParams kCase1{1.0, 2.5, 0.38};
const ModelParams kCase2{1.0, 2.0, 0.1};
const ModelParams kCase3{3.0, 2.0, 0.1};
const CostWeights kW1{7.1, 2.0, 7.0};
const CostWeights kW2{0.3, 2.0, 5.0};
const CostWeights kW3{0.3, 3.0, 5.0};
const ControlBounds kBounds{0.2, 0.9};

EpidemicState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double a = U(rng), b = U(rng);
  if (a > b) std::swap(a, b);
  return {a, b - a, 1.0 - b};
}

ControlValue random_control(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> up(0.2, 1.0), uv(0.0, 0.9);
  return {up(rng), uv(rng)};
}

}  // namespace

TEST_CASE("rhs_full at the disease-free state is zero") {
  const Vec3 d = rhs_full({0, 0, 1}, {0.5, 0.3}, kCase1);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 0.0);
  CHECK(d[2] == 0.0);
}

TEST_CASE("rhs_full matches hand substitution for case 2") {
  const Vec3 d = rhs_full({0.8, 0.2, 0.0}, {1.0, 0.0}, kCase2);
  CHECK(d[0] == doctest::Approx(-0.16).epsilon(1e-15));
  CHECK(d[1] == doctest::Approx(0.14).epsilon(1e-15));
  CHECK(d[2] == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("rhs_full conserves the population") {
  std::mt19937_64 rng(11);
  for (const ModelParams& p : {kCase1, kCase2, kCase3}) {
    for (int i = 0; i < 200; ++i) {
      const Vec3 d = rhs_full(random_state(rng), random_control(rng), p);
      CHECK(std::abs(d[0] + d[1] + d[2]) < 1e-15);
    }
  }
}

TEST_CASE("rhs_full rejects states off the simplex") {
  CHECK_THROWS_AS(rhs_full({0.8, 0.2, 0.1}, {1.0, 0.0}, kCase1), DomainError);
  CHECK_THROWS_AS(rhs_full({-0.1, 0.6, 0.5}, {1.0, 0.0}, kCase1), DomainError);
}

TEST_CASE("fields_reduced matches hand substitution") {
  const VectorFields v = fields_reduced({0.0, 0.8, 0.0}, kCase2, kW2);
  const Vec3 f{1.24, 0.0, 0.02}, gp{-0.24, -0.16, 0.0}, gv{1.6, -0.8, 0.8};
  for (int i = 0; i < 3; ++i) {
    CHECK(v.f[i] == doctest::Approx(f[i]).epsilon(1e-14));
    CHECK(v.g_P[i] == doctest::Approx(gp[i]).epsilon(1e-14));
    CHECK(v.g_V[i] == doctest::Approx(gv[i]).epsilon(1e-14));
  }
}

TEST_CASE("fields_reduced degenerate states") {
  SUBCASE("x_I = 0 removes infection terms from g_P") {
    const VectorFields v = fields_reduced({0.0, 0.3, 0.7}, kCase1, kW1);
    CHECK(v.g_P[1] == 0.0);
    CHECK(v.g_P[2] == 0.0);
  }
  SUBCASE("x_S = 0 gives g_V = 0") {
    const VectorFields v = fields_reduced({0.0, 0.0, 0.4}, kCase1, kW1);
    for (double c : v.g_V) CHECK(c == 0.0);
  }
}

TEST_CASE("Mayer cost component equals the running cost") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const EpidemicState s = random_state(rng);
    const ControlValue u = random_control(rng);
    const Vec3 r = rhs_reduced({0.0, s.x_S, s.x_R}, u, kCase1, kW1);
    const double expect = kW1.c_P * (1 - u.u_P) * (s.x_S + s.x_R) + kW1.c_V * u.u_V * s.x_S +
                          kW1.c_I * (1 - s.x_S - s.x_R);
    CHECK(std::abs(r[0] - expect) < 1e-14);
    CHECK(std::abs(running_cost(s.x_S, s.x_I, s.x_R, u, kW1) - expect) < 1e-13);
  }
}

TEST_CASE("full and two-state right-hand sides agree") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const EpidemicState s = random_state(rng);
    const ControlValue u = random_control(rng);
    const Vec3 full = rhs_full(s, u, kCase2);
    const auto red = rhs_reduced2(s.x_S, s.x_I, u, kCase2);
    CHECK(std::abs(full[0] - red[0]) < 1e-14);
    CHECK(std::abs(full[1] - red[1]) < 1e-14);
  }
}

TEST_CASE("equilibria") {
  SUBCASE("case 1 endemic equilibrium") {
    const EquilibriumReport r = equilibria(kCase1, 0.2, 0.1);
    REQUIRE(r.ee_exists());
    CHECK(std::abs(r.ee->state.x_S - 0.0) < 1e-12);
    CHECK(std::abs(r.ee->state.x_I - 0.24) < 1e-12);
    CHECK(std::abs(r.ee->state.x_R - 0.76) < 1e-12);
  }
  SUBCASE("no endemic equilibrium above threshold") {
    const EquilibriumReport r = equilibria({1.0, 2.5, 0.6}, 0.2, 0.1);
    CHECK_FALSE(r.ee_exists());
  }
  SUBCASE("disease-free equilibrium always present") {
    for (const ModelParams& p : {kCase1, kCase2, kCase3, ModelParams{1.0, 2.5, 0.6}}) {
      const EquilibriumReport r = equilibria(p, 0.5, 0.3);
      CHECK(r.dfe.state.x_S == 0.0);
      CHECK(r.dfe.state.x_I == 0.0);
      CHECK(r.dfe.state.x_R == 1.0);
    }
  }
  SUBCASE("u_V = 0 is rejected") {
    CHECK_THROWS_AS(equilibria(kCase1, 0.2, 0.0), UnsupportedRegime);
  }
  SUBCASE("equilibria are fixed points") {
    for (const ModelParams& p : {kCase1, kCase2, kCase3}) {
      for (double up : {0.2, 0.5, 1.0}) {
        const ControlValue u{up, 0.1};
        const EquilibriumReport r = equilibria(p, up, 0.1);
        const Vec3 d = rhs_full(r.dfe.state, u, p);
        CHECK(std::hypot(d[0], d[1], d[2]) < 1e-12);
        if (r.ee) {
          const Vec3 e = rhs_full(r.ee->state, u, p);
          CHECK(std::hypot(e[0], e[1], e[2]) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("two-state Jacobian") {
  SUBCASE("diagonal at the disease-free state") {
    const Mat2 j = jacobian_reduced2(0.0, 0.0, {0.2, 0.1}, kCase1);
    CHECK(j[0][0] == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(j[1][1] == doctest::Approx(0.12).epsilon(1e-14));
    CHECK(j[0][1] == 0.0);
    CHECK(j[1][0] == 0.0);
  }
  SUBCASE("finite-difference agreement") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
      const EpidemicState s = random_state(rng);
      const ControlValue u = random_control(rng);
      const Mat2 j = jacobian_reduced2(s.x_S, s.x_I, u, kCase1);
      const double h = 1e-6;
      for (int c = 0; c < 2; ++c) {
        double xp[2] = {s.x_S, s.x_I}, xm[2] = {s.x_S, s.x_I};
        xp[c] += h;
        xm[c] -= h;
        const auto fp = rhs_reduced2(xp[0], xp[1], u, kCase1);
        const auto fm = rhs_reduced2(xm[0], xm[1], u, kCase1);
        for (int r = 0; r < 2; ++r) CHECK(std::abs(j[r][c] - (fp[r] - fm[r]) / (2 * h)) < 1e-6);
      }
    }
  }
}

TEST_CASE("stability classification") {
  SUBCASE("case 1 with (0.2, 0.1)") {
    const StabilityTags t = classify_stability(kCase1, 0.2, 0.1);
    CHECK(t.dfe == Stability::unstable);
    REQUIRE(t.ee.has_value());
    CHECK(*t.ee == Stability::stable);
  }
  SUBCASE("above threshold") {
    const StabilityTags t = classify_stability({1.0, 2.5, 0.6}, 0.2, 0.1);
    CHECK(t.dfe == Stability::stable);
    CHECK_FALSE(t.ee.has_value());
  }
  SUBCASE("boundary is inconclusive") {
    const StabilityTags t = classify_stability({1.0, 2.0, 0.5}, 0.25, 0.1);
    CHECK(t.dfe == Stability::inconclusive);
  }
  SUBCASE("stable tags have eigenvalues in the left half-plane") {
    for (const ModelParams& p : {kCase1, kCase2, kCase3, ModelParams{1.0, 2.5, 0.6}}) {
      for (double up : {0.2, 0.6, 1.0}) {
        const EquilibriumReport r = equilibria(p, up, 0.1);
        const auto check = [](const Equilibrium& e) {
          if (e.stability != Stability::stable) return;
          CHECK(e.eigenvalues[0].real() < 0.0);
          CHECK(e.eigenvalues[1].real() < 0.0);
        };
        check(r.dfe);
        if (r.ee) check(*r.ee);
      }
    }
  }
}

TEST_CASE("endemic threshold ratio") {
  CHECK(endemic_threshold_ratio(kCase1, 0.2) == doctest::Approx(0.5 / 0.38).epsilon(1e-14));
  CHECK(endemic_threshold_ratio(kCase2, 0.2) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(endemic_threshold_ratio({1.0, 2.0, 0.5}, 0.25) == 1.0);
}

TEST_CASE("assumption checks") {
  SUBCASE("case 1 passes with hand-substituted sides") {
    const AssumptionReport a = check_assumptions(kCase1, kW1, kBounds);
    CHECK(a.all_pass());
    CHECK(std::abs(a.a2_ii_lhs - oracle::table::case1_a2_ii) < 1e-9);
    CHECK(std::abs(a.a2_iii_lhs - oracle::table::case1_a2_iii) < 1e-9);
    CHECK(std::abs(a.a2_ii_lhs + 6.26) < 1e-9);
    CHECK(std::abs(a.a2_iii_lhs + 0.98) < 1e-9);
  }
  SUBCASE("case 2 passes") {
    const AssumptionReport a = check_assumptions(kCase2, kW2, kBounds);
    CHECK(a.all_pass());
    CHECK(std::abs(a.a2_ii_lhs + 1.2) < 1e-9);
    CHECK(std::abs(a.a2_iii_lhs + 3.96) < 1e-9);
  }
  SUBCASE("case 3 fails A1") {
    const AssumptionReport a = check_assumptions(kCase3, kW3, kBounds);
    CHECK_FALSE(a.a1);
    CHECK_FALSE(a.all_pass());
  }
  SUBCASE("A2(i) equality within tolerance counts as a violation") {
    // (beta - beta_hat)(c_I - c_P) = -0.2 = -beta c_V gamma
    const AssumptionReport a = check_assumptions({1.0, 2.0, 0.1}, {0.3, 2.0, 0.5}, kBounds);
    CHECK_FALSE(a.a2_i);
  }
}

TEST_CASE("validation and normalization") {
  CHECK_THROWS_AS(validate(ModelParams{0.0, 1.0, 0.1}), DomainError);
  CHECK_THROWS_AS(validate(CostWeights{-1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(ControlBounds{0.0, 0.9}), DomainError);
  CHECK_THROWS_AS(validate(ControlValue{0.1, 0.0}, kBounds), DomainError);
  CHECK_NOTHROW(validate(ControlValue{0.2, 0.9}, kBounds));
  const EpidemicState n = normalized({0.8, 0.2, 1e-10});
  CHECK(std::abs(n.sum() - 1.0) < 1e-15);
  CHECK_THROWS_AS(normalized({0.8, 0.1, 0.0}), DomainError);
}
