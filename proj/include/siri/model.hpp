#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace siri {

using Vec3 = std::array<double, 3>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Tolerance for |x_S + x_I + x_R - 1| when a state is accepted.
inline constexpr double kSimplexTol = 1e-9;

/// Raised when a state or parameter lies outside the model's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for analyses the model does not cover (e.g. u_V_eq = 0 equilibria).
class UnsupportedRegime : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Disease rates, all per day.
struct ModelParams {
  double beta = 0.0;      // first-time infection
  double beta_hat = 0.0;  // reinfection of recovered
  double gamma = 0.0;     // recovery
};

struct CostWeights {
  double c_P = 0.0;  // protection
  double c_V = 0.0;  // vaccination
  double c_I = 0.0;  // infection
};

struct ControlBounds {
  double u_P_min = 0.2;
  double u_V_max = 0.9;
};

/// Population fractions on the simplex.
struct EpidemicState {
  double x_S = 0.0;
  double x_I = 0.0;
  double x_R = 0.0;

  double sum() const { return x_S + x_I + x_R; }
};

/// Mayer-form state z = (x_C, x_S, x_R); x_I is implicit.
struct ReducedState {
  double x_C = 0.0;
  double x_S = 0.0;
  double x_R = 0.0;

  double x_I() const { return 1.0 - x_S - x_R; }
  Vec3 vec() const { return {x_C, x_S, x_R}; }
  static ReducedState from_vec(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

struct ControlValue {
  double u_P = 1.0;
  double u_V = 0.0;
};

/// Drift and control vector fields of the Mayer-form dynamics.
struct VectorFields {
  Vec3 f{};
  Vec3 g_P{};
  Vec3 g_V{};
};

enum class Stability { stable, unstable, inconclusive };

std::string to_string(Stability s);

struct Equilibrium {
  EpidemicState state;
  Stability stability = Stability::inconclusive;
  std::array<std::complex<double>, 2> eigenvalues{};
};

struct EquilibriumReport {
  Equilibrium dfe;
  std::optional<Equilibrium> ee;

  bool ee_exists() const { return ee.has_value(); }
};

struct StabilityTags {
  Stability dfe = Stability::inconclusive;
  std::optional<Stability> ee;
};

/// Assumption checks with the evaluated left-hand sides kept for reporting.
struct AssumptionReport {
  bool a1 = false;  // beta_hat > beta

  bool a2_i = false;
  double a2_i_lhs = 0.0;  // (beta - beta_hat)(c_I - c_P)
  double a2_i_rhs = 0.0;  // -beta c_V gamma

  bool a2_ii = false;
  double a2_ii_lhs = 0.0;

  bool a2_iii = false;
  double a2_iii_lhs = 0.0;

  bool endemic_condition = false;  // gamma < beta_hat u_P_min

  bool all_pass() const { return a1 && a2_i && a2_ii && a2_iii && endemic_condition; }
};

// Validation. Each throws DomainError naming the offending field.
void validate(const ModelParams& p);
void validate(const CostWeights& w);
void validate(const ControlBounds& b);
void validate(const EpidemicState& s, double tol = kSimplexTol);
void validate(const ReducedState& z, double tol = kSimplexTol);
void validate(const ControlValue& u, const ControlBounds& b, double tol = 0.0);

/// Checks the simplex tolerance, then divides by the component sum.
/// Used only when a state enters the system (configs, CLI flags).
EpidemicState normalized(const EpidemicState& s);

/// Controlled SIRI right-hand side (x_S', x_I', x_R').
/// The x_I component is assembled as the negative sum of the other two.
Vec3 rhs_full(const EpidemicState& s, const ControlValue& u, const ModelParams& p);

/// Unchecked kernel behind rhs_full, used inside the integrators.
Vec3 rhs_full_unchecked(const EpidemicState& s, const ControlValue& u, const ModelParams& p);

VectorFields fields_reduced(const ReducedState& z, const ModelParams& p, const CostWeights& w);

/// f(z) + g_P(z) u_P + g_V(z) u_V.
Vec3 rhs_reduced(const ReducedState& z, const ControlValue& u, const ModelParams& p,
                 const CostWeights& w);

/// c_P (1 - u_P)(x_S + x_R) + c_V u_V x_S + c_I x_I.
double running_cost(double x_S, double x_I, double x_R, const ControlValue& u,
                    const CostWeights& w);

/// Two-state (x_S, x_I) dynamics with x_R = 1 - x_S - x_I substituted.
std::array<double, 2> rhs_reduced2(double x_S, double x_I, const ControlValue& u,
                                   const ModelParams& p);

Mat2 jacobian_reduced2(double x_S, double x_I, const ControlValue& u, const ModelParams& p);

std::array<std::complex<double>, 2> eigenvalues(const Mat2& m);

/// Requires 0 < u_V_eq; throws UnsupportedRegime otherwise.
EquilibriumReport equilibria(const ModelParams& p, double u_P_eq, double u_V_eq);

StabilityTags classify_stability(const ModelParams& p, double u_P_eq, double u_V_eq);

/// beta_hat u_P / gamma; exceeds 1 exactly when the endemic equilibrium exists.
double endemic_threshold_ratio(const ModelParams& p, double u_P);

AssumptionReport check_assumptions(const ModelParams& p, const CostWeights& w,
                                   const ControlBounds& b);

}  // namespace siri
