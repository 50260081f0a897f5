#pragma once

#include <string>
#include <vector>

#include "siri/model.hpp"
#include "siri/ode.hpp"

namespace siri {

enum class Input { P, V };

std::string to_string(Input q);

struct SwitchEvent {
  Input input = Input::P;
  double time = 0.0;
  double from = 0.0;
  double to = 0.0;
};

struct SingularInterval {
  Input input = Input::P;
  double t_start = 0.0;
  double t_end = 0.0;
  double mean_abs_phi = 0.0;
  std::size_t first_node = 0;
  std::size_t last_node = 0;

  double length() const { return t_end - t_start; }
};

struct KappaSummary {
  bool defined = false;
  double min = 0.0;
  double max = 0.0;
  // Range of the singular u_P candidate -1/kappa over nodes where it is finite.
  double candidate_min = 0.0;
  double candidate_max = 0.0;
  bool candidate_ever_admissible = false;
};

struct DiagnosticsReport {
  std::vector<SwitchEvent> switch_times;
  std::vector<SingularInterval> singular_intervals;
  double pmp_residual = 0.0;
  double delta1_min_abs = 0.0;
  std::vector<double> delta1_trace;
  KappaSummary kappa;
};

double hamiltonian(const ReducedState& z, const ControlValue& u, const CostateVec& lam,
                   const ModelParams& p, const CostWeights& w);

/// phi_Q = <lambda, g_Q(z)>.
SwitchingValues switching_functions(const ReducedState& z, const CostateVec& lam,
                                    const ModelParams& p, const CostWeights& w);

/// Minimizer of the affine Hamiltonian; holds `prev` where |phi| <= tol.
ControlValue bang_bang_policy(const SwitchingValues& phi, const ControlBounds& b,
                              const ControlValue& prev, double tol);

/// Fills costates and switching values on a forward trajectory.
void attach_costates(Trajectory& traj, const ModelParams& p, const CostWeights& w);

/// Complementarity residual of the Hamiltonian-minimization condition, maximised
/// over nodes. Nodes with exempt[k] = true are skipped (pass an empty vector for none).
double pmp_residual(const Trajectory& traj, const ControlBounds& b,
                    const std::vector<bool>& exempt = {});

/// Per-node residual terms behind pmp_residual.
std::vector<double> pmp_residual_trace(const Trajectory& traj, const ControlBounds& b);

/// Step boundaries where the control jumps by more than jump_tol, in time order.
std::vector<SwitchEvent> detect_switches(const std::vector<double>& u_path, Input input,
                                         const TimeGrid& grid, double jump_tol);

/// Both inputs of a trajectory, merged in time order.
std::vector<SwitchEvent> detect_switches(const Trajectory& traj, double jump_tol);

/// Maximal runs of nodes with |phi| < eps lasting at least min_len.
std::vector<SingularInterval> detect_singular_arcs(const std::vector<double>& phi_path, Input input,
                                                   const TimeGrid& grid, double eps,
                                                   double min_len);

struct DiagnoseOptions {
  double jump_tol = 1e-2;
  double singular_eps_rel = 1e-3;  // eps = singular_eps_rel * max |phi| over the run
  double singular_min_len = 2.0;   // days
  double delta1_floor = 1e-6;      // nodes with x_S or x_I below this are skipped for delta1_min_abs
};

/// Node mask of the singular intervals found by `diagnose`.
std::vector<bool> singular_node_mask(const Trajectory& traj,
                                     const std::vector<SingularInterval>& intervals);

DiagnosticsReport diagnose(const Trajectory& traj, const ModelParams& p, const CostWeights& w,
                           const ControlBounds& b, const DiagnoseOptions& opts = {});

}  // namespace siri
