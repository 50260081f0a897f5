#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "siri/lie.hpp"
#include "siri/ode.hpp"
#include "siri/solver.hpp"

namespace siri {

/// Uniform samples on the state simplex, x_C = 0. Deterministic for a seed.
std::vector<ReducedState> random_states(std::size_t n, std::uint64_t seed);

/// Uniform samples in the control box, one signal per entry.
std::vector<ControlSignal> random_controls(std::size_t n, double horizon, std::size_t segments,
                                           const ControlBounds& b, std::uint64_t seed);

/// Max-norm error of each closed-form bracket against its numeric counterpart.
struct BracketErrors {
  double fgv = 0.0;
  double gpgv = 0.0;
  double f_gpgv = 0.0;
  double gp_gpgv = 0.0;
  double gv_gpgv = 0.0;

  double worst() const;
};

BracketErrors bracket_errors(const ReducedState& z, const ModelParams& p, const CostWeights& w,
                             double h = kBracketStep);

/// Per-state bracket errors. The parallel version splits states over OpenMP threads and
/// returns the same values in the same order as the serial one.
std::vector<BracketErrors> bracket_error_sweep_serial(const std::vector<ReducedState>& states,
                                                      const ModelParams& p, const CostWeights& w,
                                                      double h = kBracketStep);
std::vector<BracketErrors> bracket_error_sweep(const std::vector<ReducedState>& states,
                                               const ModelParams& p, const CostWeights& w,
                                               double h = kBracketStep);

/// Componentwise maximum over a sweep.
BracketErrors max_errors(const std::vector<BracketErrors>& errs);

using Objective = std::function<double(const ControlSignal&)>;

/// Central-difference gradient with respect to every segment value, u_P first then u_V.
/// `J` must be safe to call concurrently for the parallel version.
Gradient fd_gradient_serial(const Objective& J, const ControlSignal& u, double step);
Gradient fd_gradient(const Objective& J, const ControlSignal& u, double step);

/// Independent solves; the parallel version runs one scenario per thread.
std::vector<SolveResult> solve_all_serial(const std::vector<Scenario>& cases,
                                          const SolveOptions& opts);
std::vector<SolveResult> solve_all(const std::vector<Scenario>& cases, const SolveOptions& opts);

}  // namespace siri
