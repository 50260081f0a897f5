#pragma once

#include <optional>
#include <string>
#include <vector>

#include "siri/ode.hpp"
#include "siri/pmp.hpp"
#include "siri/scenario.hpp"

namespace siri {

enum class Method { direct_shooting, fbsm };

std::string to_string(Method m);

struct SolveOptions {
  Method method = Method::direct_shooting;
  std::size_t segments = 120;
  std::size_t max_iters = 2000;
  double grad_tol = 1e-6;  // on the Euclidean norm of the projected-gradient step

  double armijo_step = 1.0;
  double armijo_shrink = 0.5;
  double armijo_sigma = 1e-4;
  std::size_t max_backtracks = 60;

  double fbsm_damping = 0.3;
  double fbsm_tol = 1e-6;  // max control change between sweeps

  /// Defaults to the no-intervention corner u_P = 1, u_V = 0.
  std::optional<ControlSignal> initial;

  /// Snap values within 1e-2 of a bound onto it, keeping the result only if J
  /// grows by at most 1e-6 relative.
  bool sharpen = false;

  DiagnoseOptions diagnose;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct SolveReport {
  Method method = Method::direct_shooting;
  std::vector<double> cost_history;
  double final_cost = 0.0;
  double projected_grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double pmp_residual = 0.0;
  DiagnosticsReport diagnostics;
  std::string message;
};

struct SolveResult {
  ControlSignal controls;
  SolveReport report;
  Trajectory trajectory;  // with costates and switching values attached
};

struct Gradient {
  double cost = 0.0;
  std::vector<double> d_uP;
  std::vector<double> d_uV;
  Trajectory trajectory;
};

/// J = x_C(T) for piecewise-constant controls on the scenario grid.
double objective(const ControlSignal& u, const Scenario& sc);

/// dJ/du_Q[k] as the integral of phi_Q over segment k (Simpson, with a 3/8 panel for odd
/// node counts).
Gradient gradient_adjoint(const ControlSignal& u, const Scenario& sc);

/// Exact gradient of the discrete objective, by reverse sweep through the RK4 stages.
/// Line searches need this: the quadrature gradient above carries an O(h^4) bias.
Gradient gradient_discrete(const ControlSignal& u, const Scenario& sc);

/// Integral of equally spaced samples by composite Simpson / Simpson 3/8.
double integrate_samples(const double* y, std::size_t intervals, double h);

/// Euclidean projection onto the per-segment box.
ControlSignal project(const ControlSignal& u, const ControlBounds& b);

/// || P(u - g) - u ||_2.
double projected_gradient_norm(const ControlSignal& u, const Gradient& g, const ControlBounds& b);

/// Largest violation of the box KKT conditions, each term scaled by 1 + |grad|.
double kkt_violation(const ControlSignal& u, const Gradient& g, const ControlBounds& b,
                     double bound_tol = 1e-9);

SolveResult solve_direct(const Scenario& sc, const SolveOptions& opts = {});
SolveResult solve_fbsm(const Scenario& sc, const SolveOptions& opts = {});
SolveResult solve(const Scenario& sc, const SolveOptions& opts = {});

}  // namespace siri
