#include "siri/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

namespace siri {

std::vector<ReducedState> random_states(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<ReducedState> out(n);
  for (ReducedState& z : out) {
    double a = U(rng);
    double b = U(rng);
    if (a > b) std::swap(a, b);
    z = {0.0, a, 1.0 - b};  // x_I = b - a
  }
  return out;
}

std::vector<ControlSignal> random_controls(std::size_t n, double horizon, std::size_t segments,
                                           const ControlBounds& b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> up(b.u_P_min, 1.0);
  std::uniform_real_distribution<double> uv(0.0, b.u_V_max);
  std::vector<ControlSignal> out(n);
  for (ControlSignal& u : out) {
    u = ControlSignal::constant(horizon, segments, {});
    for (std::size_t k = 0; k < segments; ++k) {
      u.u_P[k] = up(rng);
      u.u_V[k] = uv(rng);
    }
  }
  return out;
}

double BracketErrors::worst() const { return std::max({fgv, gpgv, f_gpgv, gp_gpgv, gv_gpgv}); }

namespace {

double max_diff(const Vec3& a, const Vec3& b) {
  return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

}  // namespace

BracketErrors bracket_errors(const ReducedState& z, const ModelParams& p, const CostWeights& w,
                             double h) {
  const BracketSet c = bracket_set_closed(z, p, w);
  const BracketSet n = bracket_set_numeric(z, p, w, h);
  return {max_diff(c.fgv, n.fgv), max_diff(c.gpgv, n.gpgv), max_diff(c.f_gpgv, n.f_gpgv),
          max_diff(c.gp_gpgv, n.gp_gpgv), max_diff(c.gv_gpgv, n.gv_gpgv)};
}

std::vector<BracketErrors> bracket_error_sweep_serial(const std::vector<ReducedState>& states,
                                                      const ModelParams& p, const CostWeights& w,
                                                      double h) {
  std::vector<BracketErrors> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = bracket_errors(states[i], p, w, h);
  return out;
}

std::vector<BracketErrors> bracket_error_sweep(const std::vector<ReducedState>& states,
                                               const ModelParams& p, const CostWeights& w,
                                               double h) {
  std::vector<BracketErrors> out(states.size());
  const auto n = static_cast<std::ptrdiff_t>(states.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = bracket_errors(states[i], p, w, h);
  return out;
}

BracketErrors max_errors(const std::vector<BracketErrors>& errs) {
  BracketErrors m;
  for (const BracketErrors& e : errs) {
    m.fgv = std::max(m.fgv, e.fgv);
    m.gpgv = std::max(m.gpgv, e.gpgv);
    m.f_gpgv = std::max(m.f_gpgv, e.f_gpgv);
    m.gp_gpgv = std::max(m.gp_gpgv, e.gp_gpgv);
    m.gv_gpgv = std::max(m.gv_gpgv, e.gv_gpgv);
  }
  return m;
}

namespace {

// Component i < n perturbs u_P[i], otherwise u_V[i - n].
double fd_component(const Objective& J, const ControlSignal& u, double step, std::size_t i) {
  const std::size_t n = u.segments();
  ControlSignal plus = u;
  ControlSignal minus = u;
  std::vector<double>& vp = i < n ? plus.u_P : plus.u_V;
  std::vector<double>& vm = i < n ? minus.u_P : minus.u_V;
  const std::size_t k = i < n ? i : i - n;
  vp[k] += step;
  vm[k] -= step;
  return (J(plus) - J(minus)) / (2.0 * step);
}

Gradient unpack(const std::vector<double>& all, std::size_t n) {
  Gradient g;
  g.d_uP.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
  g.d_uV.assign(all.begin() + static_cast<std::ptrdiff_t>(n), all.end());
  return g;
}

}  // namespace

Gradient fd_gradient_serial(const Objective& J, const ControlSignal& u, double step) {
  const std::size_t n = u.segments();
  std::vector<double> all(2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) all[i] = fd_component(J, u, step, i);
  Gradient g = unpack(all, n);
  g.cost = J(u);
  return g;
}

Gradient fd_gradient(const Objective& J, const ControlSignal& u, double step) {
  const std::size_t n = u.segments();
  std::vector<double> all(2 * n);
  const auto m = static_cast<std::ptrdiff_t>(2 * n);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    try {
      all[i] = fd_component(J, u, step, static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(siri_fd_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  Gradient g = unpack(all, n);
  g.cost = J(u);
  return g;
}

std::vector<SolveResult> solve_all_serial(const std::vector<Scenario>& cases,
                                          const SolveOptions& opts) {
  std::vector<SolveResult> out;
  out.reserve(cases.size());
  for (const Scenario& sc : cases) out.push_back(solve(sc, opts));
  return out;
}

std::vector<SolveResult> solve_all(const std::vector<Scenario>& cases, const SolveOptions& opts) {
  std::vector<SolveResult> out(cases.size());
  std::vector<std::exception_ptr> errs(cases.size());
  const auto n = static_cast<std::ptrdiff_t>(cases.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = solve(cases[i], opts);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace siri
