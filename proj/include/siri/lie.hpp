#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "siri/model.hpp"

namespace siri {

using Mat3 = std::array<Vec3, 3>;  // row-major
using VectorField = std::function<Vec3(const Vec3&)>;

/// Default central-difference step for numeric brackets.
inline constexpr double kBracketStep = 1e-5;

/// The bracket family that drives the switching-function derivatives.
struct BracketSet {
  Vec3 fgv{};      // [f, g_V]
  Vec3 gpgv{};     // [g_P, g_V]
  Vec3 f_gpgv{};   // [f, [g_P, g_V]]
  Vec3 gp_gpgv{};  // [g_P, [g_P, g_V]]
  Vec3 gv_gpgv{};  // [g_V, [g_P, g_V]]
};

struct SingularityCoefficients {
  double epsilon = 0.0;
  double mu = 0.0;
  std::optional<double> kappa;  // empty when the denominator vanishes

  bool kappa_defined() const { return kappa.has_value(); }
};

struct SingularCandidate {
  std::optional<double> u_P;
  std::string reason;  // set when u_P is empty
};

struct SimultaneousSingularity {
  bool not_excluded = false;
  double required_x_I = 0.0;  // c_P (beta - beta_hat) / (c_V beta beta_hat)
};

/// Central-difference Jacobian, rows = output components.
Mat3 jacobian_fd(const VectorField& F, const Vec3& x, double h = kBracketStep);

/// [F, G](x) = DG(x) F(x) - DF(x) G(x).
Vec3 lie_bracket_numeric(const VectorField& F, const VectorField& G, const Vec3& x,
                         double h = kBracketStep);

/// Vector fields f, g_P, g_V as callables on z = (x_C, x_S, x_R).
VectorField drift_field(const ModelParams& p, const CostWeights& w);
VectorField protection_field(const ModelParams& p, const CostWeights& w);
VectorField vaccination_field(const ModelParams& p, const CostWeights& w);

/// Closed-form brackets.
BracketSet bracket_set_closed(const ReducedState& z, const ModelParams& p, const CostWeights& w);

/// All five brackets by nested finite differences (inner bracket is itself numeric).
BracketSet bracket_set_numeric(const ReducedState& z, const ModelParams& p, const CostWeights& w,
                               double h = kBracketStep);

/// Determinant of (g_V, g_P, [f + g_P u_P, g_V]) in factorized form:
/// minor * x_S^2 * x_I * u_P.
double delta1(const ReducedState& z, double u_P, const ModelParams& p, const CostWeights& w);

/// The 3x3 minor of delta1 alone.
double delta1_minor(const ReducedState& z, const ModelParams& p, const CostWeights& w);

/// Denominator of kappa: (beta_hat - beta)(c_I - c_P) + beta c_V gamma.
double kappa_denominator(const ModelParams& p, const CostWeights& w);

/// Expansion [g_P,[g_P,g_V]] = eps g_V + mu [g_P,g_V] + kappa [f,[g_P,g_V]].
SingularityCoefficients singularity_coefficients(const ReducedState& z, const ModelParams& p,
                                                 const CostWeights& w);

/// -1/kappa, the only singular u_P value compatible with a singular u_V.
SingularCandidate singular_up_candidate(const ReducedState& z, const ModelParams& p,
                                        const CostWeights& w);

/// Left-hand side that must equal 2 x_I for the candidate to be 1.
double candidate_at_one_lhs(const ModelParams& p, const CostWeights& w);

/// Left-hand side that must equal 2 x_I for the candidate to be u_P_min.
double candidate_at_min_lhs(const ModelParams& p, const CostWeights& w, const ControlBounds& b);

/// Whether the zero set of the delta1 minor can meet the simplex.
/// Reports "not excluded" (never "possible") when x_I would have to lie in [0, 1].
SimultaneousSingularity simultaneous_singularity_possible(const ModelParams& p,
                                                          const CostWeights& w,
                                                          const ControlBounds& b);

double det3(const Mat3& m);

}  // namespace siri
