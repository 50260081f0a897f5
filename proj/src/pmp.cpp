#include "siri/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "siri/lie.hpp"

namespace siri {

std::string to_string(Input q) { return q == Input::P ? "u_P" : "u_V"; }

double hamiltonian(const ReducedState& z, const ControlValue& u, const CostateVec& lam,
                   const ModelParams& p, const CostWeights& w) {
  const Vec3 rhs = rhs_reduced(z, u, p, w);
  return lam.lambda_C * rhs[0] + lam.lambda_S * rhs[1] + lam.lambda_R * rhs[2];
}

SwitchingValues switching_functions(const ReducedState& z, const CostateVec& lam,
                                    const ModelParams& p, const CostWeights& w) {
  const VectorFields v = fields_reduced(z, p, w);
  const Vec3 l = lam.vec();
  SwitchingValues s;
  s.phi_P = l[0] * v.g_P[0] + l[1] * v.g_P[1] + l[2] * v.g_P[2];
  s.phi_V = l[0] * v.g_V[0] + l[1] * v.g_V[1] + l[2] * v.g_V[2];
  return s;
}

ControlValue bang_bang_policy(const SwitchingValues& phi, const ControlBounds& b,
                              const ControlValue& prev, double tol) {
  ControlValue u = prev;
  if (phi.phi_P > tol)
    u.u_P = b.u_P_min;
  else if (phi.phi_P < -tol)
    u.u_P = 1.0;
  if (phi.phi_V > tol)
    u.u_V = 0.0;
  else if (phi.phi_V < -tol)
    u.u_V = b.u_V_max;
  // A held value may come from a different box; keep the output admissible.
  u.u_P = std::clamp(u.u_P, b.u_P_min, 1.0);
  u.u_V = std::clamp(u.u_V, 0.0, b.u_V_max);
  return u;
}

void attach_costates(Trajectory& traj, const ModelParams& p, const CostWeights& w) {
  traj.costates = integrate_costate_backward(traj, p, w);
  traj.phi.resize(traj.z.size());
  for (std::size_t k = 0; k < traj.z.size(); ++k)
    traj.phi[k] = switching_functions(traj.z[k], traj.costates[k], p, w);
}

std::vector<double> pmp_residual_trace(const Trajectory& traj, const ControlBounds& b) {
  if (!traj.has_costates() || traj.phi.size() != traj.z.size())
    throw std::invalid_argument("pmp_residual needs costates and switching values");
  std::vector<double> out(traj.z.size());
  for (std::size_t k = 0; k < traj.z.size(); ++k) {
    const SwitchingValues& s = traj.phi[k];
    const ControlValue u = traj.control_at_node(k);
    out[k] = std::max(0.0, s.phi_P) * (u.u_P - b.u_P_min) +
             std::max(0.0, -s.phi_P) * (1.0 - u.u_P) + std::max(0.0, s.phi_V) * u.u_V +
             std::max(0.0, -s.phi_V) * (b.u_V_max - u.u_V);
  }
  return out;
}

double pmp_residual(const Trajectory& traj, const ControlBounds& b,
                    const std::vector<bool>& exempt) {
  const std::vector<double> trace = pmp_residual_trace(traj, b);
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (k < exempt.size() && exempt[k]) continue;
    worst = std::max(worst, trace[k]);
  }
  return worst;
}

std::vector<SwitchEvent> detect_switches(const std::vector<double>& u_path, Input input,
                                         const TimeGrid& grid, double jump_tol) {
  if (!(jump_tol > 0.0)) throw std::invalid_argument("jump_tol must be > 0");
  if (!u_path.empty() && u_path.size() != grid.n_steps)
    throw std::invalid_argument("control path length must equal the number of grid steps");
  std::vector<SwitchEvent> out;
  for (std::size_t k = 1; k < u_path.size(); ++k) {
    if (std::abs(u_path[k] - u_path[k - 1]) > jump_tol)
      out.push_back({input, grid.time(k), u_path[k - 1], u_path[k]});
  }
  return out;
}

std::vector<SwitchEvent> detect_switches(const Trajectory& traj, double jump_tol) {
  std::vector<double> up(traj.controls.size());
  std::vector<double> uv(traj.controls.size());
  for (std::size_t k = 0; k < traj.controls.size(); ++k) {
    up[k] = traj.controls[k].u_P;
    uv[k] = traj.controls[k].u_V;
  }
  std::vector<SwitchEvent> out = detect_switches(up, Input::P, traj.grid, jump_tol);
  const std::vector<SwitchEvent> v = detect_switches(uv, Input::V, traj.grid, jump_tol);
  out.insert(out.end(), v.begin(), v.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const SwitchEvent& a, const SwitchEvent& b) { return a.time < b.time; });
  return out;
}

std::vector<SingularInterval> detect_singular_arcs(const std::vector<double>& phi_path, Input input,
                                                   const TimeGrid& grid, double eps,
                                                   double min_len) {
  if (!(eps > 0.0) || !(min_len > 0.0))
    throw std::invalid_argument("eps and min_len must be > 0");
  if (!phi_path.empty() && phi_path.size() != grid.node_count())
    throw std::invalid_argument("switching-function path needs one value per grid node");

  std::vector<SingularInterval> out;
  std::size_t k = 0;
  const std::size_t n = phi_path.size();
  while (k < n) {
    if (!(std::abs(phi_path[k]) < eps)) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    double sum = 0.0;
    while (k < n && std::abs(phi_path[k]) < eps) sum += std::abs(phi_path[k++]);
    const std::size_t last = k - 1;
    SingularInterval iv{input, grid.time(first), grid.time(last),
                        sum / static_cast<double>(last - first + 1), first, last};
    if (iv.length() >= min_len) out.push_back(iv);
  }
  return out;
}

std::vector<bool> singular_node_mask(const Trajectory& traj,
                                     const std::vector<SingularInterval>& intervals) {
  std::vector<bool> mask(traj.z.size(), false);
  for (const SingularInterval& iv : intervals)
    for (std::size_t k = iv.first_node; k <= iv.last_node && k < mask.size(); ++k) mask[k] = true;
  return mask;
}

DiagnosticsReport diagnose(const Trajectory& traj, const ModelParams& p, const CostWeights& w,
                           const ControlBounds& b, const DiagnoseOptions& opts) {
  DiagnosticsReport rep;
  rep.switch_times = detect_switches(traj, opts.jump_tol);

  if (traj.has_costates() && traj.phi.size() == traj.z.size()) {
    std::vector<double> phi_p(traj.phi.size());
    std::vector<double> phi_v(traj.phi.size());
    double max_p = 0.0;
    double max_v = 0.0;
    for (std::size_t k = 0; k < traj.phi.size(); ++k) {
      phi_p[k] = traj.phi[k].phi_P;
      phi_v[k] = traj.phi[k].phi_V;
      max_p = std::max(max_p, std::abs(phi_p[k]));
      max_v = std::max(max_v, std::abs(phi_v[k]));
    }
    if (max_p > 0.0) {
      auto iv = detect_singular_arcs(phi_p, Input::P, traj.grid, opts.singular_eps_rel * max_p,
                                     opts.singular_min_len);
      rep.singular_intervals.insert(rep.singular_intervals.end(), iv.begin(), iv.end());
    }
    if (max_v > 0.0) {
      auto iv = detect_singular_arcs(phi_v, Input::V, traj.grid, opts.singular_eps_rel * max_v,
                                     opts.singular_min_len);
      rep.singular_intervals.insert(rep.singular_intervals.end(), iv.begin(), iv.end());
    }
    rep.pmp_residual = pmp_residual(traj, b, singular_node_mask(traj, rep.singular_intervals));
  }

  rep.delta1_trace.resize(traj.z.size());
  rep.delta1_min_abs = std::numeric_limits<double>::infinity();
  bool any = false;
  rep.kappa.candidate_min = std::numeric_limits<double>::infinity();
  rep.kappa.candidate_max = -std::numeric_limits<double>::infinity();
  rep.kappa.min = std::numeric_limits<double>::infinity();
  rep.kappa.max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.z.size(); ++k) {
    const ReducedState& z = traj.z[k];
    rep.delta1_trace[k] = delta1(z, traj.control_at_node(k).u_P, p, w);
    if (z.x_S > opts.delta1_floor && z.x_I() > opts.delta1_floor) {
      rep.delta1_min_abs = std::min(rep.delta1_min_abs, std::abs(rep.delta1_trace[k]));
      any = true;
    }
    const SingularityCoefficients c = singularity_coefficients(z, p, w);
    if (!c.kappa) continue;
    rep.kappa.defined = true;
    rep.kappa.min = std::min(rep.kappa.min, *c.kappa);
    rep.kappa.max = std::max(rep.kappa.max, *c.kappa);
    if (*c.kappa != 0.0) {
      const double cand = -1.0 / *c.kappa;
      rep.kappa.candidate_min = std::min(rep.kappa.candidate_min, cand);
      rep.kappa.candidate_max = std::max(rep.kappa.candidate_max, cand);
      if (cand >= b.u_P_min && cand <= 1.0) rep.kappa.candidate_ever_admissible = true;
    }
  }
  if (!any) rep.delta1_min_abs = 0.0;
  if (!rep.kappa.defined) rep.kappa.min = rep.kappa.max = 0.0;
  if (rep.kappa.candidate_min > rep.kappa.candidate_max)
    rep.kappa.candidate_min = rep.kappa.candidate_max = 0.0;
  return rep;
}

}  // namespace siri
