#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "siri/model.hpp"

namespace siri {

/// Tolerance on state invariants before an integration is declared diverged.
inline constexpr double kDivergenceTol = 1e-7;

class IntegrationDiverged : public std::runtime_error {
 public:
  IntegrationDiverged(std::size_t node, const std::string& what)
      : std::runtime_error("integration diverged at node " + std::to_string(node) + ": " + what),
        node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// Uniform grid on [0, horizon].
struct TimeGrid {
  double horizon = 60.0;
  std::size_t n_steps = 600;

  double step() const { return horizon / static_cast<double>(n_steps); }
  std::size_t node_count() const { return n_steps + 1; }
  double time(std::size_t k) const { return horizon * static_cast<double>(k) / static_cast<double>(n_steps); }

  /// Throws std::invalid_argument unless horizon > 0 and n_steps > 0.
  void validate() const;
};

/// Piecewise-constant controls on equal segments of [0, horizon].
/// The integration grid must refine the segment grid (n_steps a multiple of segments()).
struct ControlSignal {
  double horizon = 60.0;
  std::vector<double> u_P;
  std::vector<double> u_V;

  std::size_t segments() const { return u_P.size(); }
  ControlValue at(std::size_t segment) const { return {u_P[segment], u_V[segment]}; }

  static ControlSignal constant(double horizon, std::size_t segments, ControlValue u);

  /// Throws DomainError if any value leaves the box.
  void validate(const ControlBounds& b) const;

  /// Expands to one control per integration step of `grid`.
  std::vector<ControlValue> per_step(const TimeGrid& grid) const;
};

struct CostateVec {
  double lambda_C = 1.0;
  double lambda_S = 0.0;
  double lambda_R = 0.0;

  Vec3 vec() const { return {lambda_C, lambda_S, lambda_R}; }
};

struct SwitchingValues {
  double phi_P = 0.0;
  double phi_V = 0.0;
};

/// States per node, controls per step; costates and switching values are
/// filled in by the backward pass.
struct Trajectory {
  TimeGrid grid;
  std::vector<ReducedState> z;
  std::vector<ControlValue> controls;
  std::vector<CostateVec> costates;
  std::vector<SwitchingValues> phi;

  bool has_costates() const { return costates.size() == z.size() && !z.empty(); }

  /// Control applied from node k onward; the last node repeats the final step.
  ControlValue control_at_node(std::size_t k) const {
    return controls[k < controls.size() ? k : controls.size() - 1];
  }
  double terminal_cost() const { return z.back().x_C; }
};

/// Classical RK4 on the Mayer-form dynamics.
/// Throws IntegrationDiverged on the first node breaking an invariant by more than 1e-7.
Trajectory integrate_forward(const ReducedState& z0, const ControlSignal& u, const ModelParams& p,
                             const CostWeights& w, const TimeGrid& grid);

/// Same, but with per-step controls already expanded.
Trajectory integrate_forward(const ReducedState& z0, std::vector<ControlValue> controls,
                             const ModelParams& p, const CostWeights& w, const TimeGrid& grid);

/// Backward RK4 for the costates from lambda(T) = (1, 0, 0). Stage states come from a
/// cubic Hermite interpolant of the stored nodes using the step's control.
std::vector<CostateVec> integrate_costate_backward(const Trajectory& traj, const ModelParams& p,
                                                   const CostWeights& w);

/// Costate right-hand side -(dF/dz)^T lambda.
CostateVec costate_rhs(const ReducedState& z, const ControlValue& u, const CostateVec& lam,
                       const ModelParams& p, const CostWeights& w);

/// RK4 on the full three-state model (no cost accounting).
std::vector<EpidemicState> simulate_full(const EpidemicState& state0, const ControlSignal& u,
                                         const ModelParams& p, const TimeGrid& grid);

}  // namespace siri
