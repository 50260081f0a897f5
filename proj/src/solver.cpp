#include "siri/solver.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <cmath>

namespace siri {

std::string to_string(Method m) { return m == Method::fbsm ? "fbsm" : "direct"; }

void SolveOptions::validate() const {
  if (segments == 0) throw std::invalid_argument("segments must be > 0");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be > 0");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (!(armijo_step > 0.0)) throw std::invalid_argument("armijo initial step must be > 0");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0))
    throw std::invalid_argument("armijo shrink factor must lie in (0, 1)");
  if (!(armijo_sigma > 0.0 && armijo_sigma < 1.0))
    throw std::invalid_argument("armijo sufficient-decrease constant must lie in (0, 1)");
  if (!(fbsm_damping > 0.0 && fbsm_damping <= 1.0))
    throw std::invalid_argument("fbsm damping must lie in (0, 1]");
  if (!(fbsm_tol > 0.0)) throw std::invalid_argument("fbsm tolerance must be > 0");
}

double objective(const ControlSignal& u, const Scenario& sc) {
  return integrate_forward(sc.z0(), u, sc.params, sc.weights, sc.grid()).terminal_cost();
}

double integrate_samples(const double* y, std::size_t intervals, double h) {
  if (intervals == 0) return 0.0;
  if (intervals == 1) return 0.5 * h * (y[0] + y[1]);
  double sum = 0.0;
  std::size_t simpson = intervals;
  if (intervals % 2 == 1) {
    simpson = intervals - 3;
    const double* t = y + simpson;
    sum += 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
  }
  for (std::size_t i = 0; i + 2 <= simpson; i += 2)
    sum += h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
  return sum;
}

Gradient gradient_adjoint(const ControlSignal& u, const Scenario& sc) {
  const TimeGrid grid = sc.grid();
  Gradient g;
  g.trajectory = integrate_forward(sc.z0(), u, sc.params, sc.weights, grid);
  attach_costates(g.trajectory, sc.params, sc.weights);
  g.cost = g.trajectory.terminal_cost();

  const std::size_t nseg = u.segments();
  const std::size_t per = grid.n_steps / nseg;
  const double h = grid.step();
  std::vector<double> phi_p(grid.node_count());
  std::vector<double> phi_v(grid.node_count());
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    phi_p[k] = g.trajectory.phi[k].phi_P;
    phi_v[k] = g.trajectory.phi[k].phi_V;
  }
  g.d_uP.resize(nseg);
  g.d_uV.resize(nseg);
  for (std::size_t s = 0; s < nseg; ++s) {
    g.d_uP[s] = integrate_samples(phi_p.data() + s * per, per, h);
    g.d_uV[s] = integrate_samples(phi_v.data() + s * per, per, h);
  }
  return g;
}

Gradient gradient_discrete(const ControlSignal& u, const Scenario& sc) {
  const TimeGrid grid = sc.grid();
  Gradient g;
  g.trajectory = integrate_forward(sc.z0(), u, sc.params, sc.weights, grid);
  g.cost = g.trajectory.terminal_cost();

  const std::size_t nseg = u.segments();
  const std::size_t per = grid.n_steps / nseg;
  const double h = grid.step();
  const ModelParams& p = sc.params;
  const CostWeights& w = sc.weights;
  g.d_uP.assign(nseg, 0.0);
  g.d_uV.assign(nseg, 0.0);

  const auto add = [](const Vec3& x, double a, const Vec3& y) {
    return Vec3{x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
  };
  const auto dot = [](const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  // (dF/dz)^T a, via the costate right-hand side which returns its negative.
  const auto jt = [&](const Vec3& y, const ControlValue& c, const Vec3& a) {
    const CostateVec d = costate_rhs(ReducedState::from_vec(y), c, {a[0], a[1], a[2]}, p, w);
    return Vec3{-d.lambda_C, -d.lambda_S, -d.lambda_R};
  };

  // Reverse sweep through the RK4 stages of each step.
  Vec3 a{1.0, 0.0, 0.0};
  for (std::size_t k = grid.n_steps; k-- > 0;) {
    const ControlValue c = g.trajectory.controls[k];
    const auto rhs = [&](const Vec3& y) { return rhs_reduced(ReducedState::from_vec(y), c, p, w); };
    const Vec3 y1 = g.trajectory.z[k].vec();
    const Vec3 k1 = rhs(y1);
    const Vec3 y2 = add(y1, h / 2.0, k1);
    const Vec3 k2 = rhs(y2);
    const Vec3 y3 = add(y1, h / 2.0, k2);
    const Vec3 k3 = rhs(y3);
    const Vec3 y4 = add(y1, h, k3);

    const Vec3 b4 = add(Vec3{}, h / 6.0, a);
    const Vec3 s4 = jt(y4, c, b4);
    const Vec3 b3 = add(add(Vec3{}, h / 3.0, a), h, s4);
    const Vec3 s3 = jt(y3, c, b3);
    const Vec3 b2 = add(add(Vec3{}, h / 3.0, a), h / 2.0, s3);
    const Vec3 s2 = jt(y2, c, b2);
    const Vec3 b1 = add(add(Vec3{}, h / 6.0, a), h / 2.0, s2);
    const Vec3 s1 = jt(y1, c, b1);

    double dp = 0.0;
    double dv = 0.0;
    const std::array<std::pair<const Vec3*, const Vec3*>, 4> stages{
        {{&y1, &b1}, {&y2, &b2}, {&y3, &b3}, {&y4, &b4}}};
    for (const auto& [y, b] : stages) {
      const VectorFields v = fields_reduced(ReducedState::from_vec(*y), p, w);
      dp += dot(v.g_P, *b);
      dv += dot(v.g_V, *b);
    }
    g.d_uP[k / per] += dp;
    g.d_uV[k / per] += dv;
    for (int i = 0; i < 3; ++i) a[i] += s1[i] + s2[i] + s3[i] + s4[i];
  }
  return g;
}

ControlSignal project(const ControlSignal& u, const ControlBounds& b) {
  ControlSignal out = u;
  for (std::size_t k = 0; k < out.segments(); ++k) {
    out.u_P[k] = std::clamp(out.u_P[k], b.u_P_min, 1.0);
    out.u_V[k] = std::clamp(out.u_V[k], 0.0, b.u_V_max);
  }
  return out;
}

namespace {

ControlSignal step_along(const ControlSignal& u, const Gradient& g, double step,
                         const ControlBounds& b) {
  ControlSignal out = u;
  for (std::size_t k = 0; k < u.segments(); ++k) {
    out.u_P[k] -= step * g.d_uP[k];
    out.u_V[k] -= step * g.d_uV[k];
  }
  return project(out, b);
}

double decrease(const ControlSignal& from, const ControlSignal& to, const Gradient& g) {
  double d = 0.0;
  for (std::size_t k = 0; k < from.segments(); ++k)
    d += g.d_uP[k] * (from.u_P[k] - to.u_P[k]) + g.d_uV[k] * (from.u_V[k] - to.u_V[k]);
  return d;
}

ControlSignal initial_guess(const Scenario& sc, const SolveOptions& opts) {
  if (opts.initial) {
    ControlSignal u = *opts.initial;
    if (u.segments() != opts.segments)
      throw std::invalid_argument("initial guess has the wrong number of segments");
    u.validate(sc.bounds);
    return u;
  }
  return ControlSignal::constant(sc.horizon, opts.segments, {1.0, 0.0});
}

void check_setup(const Scenario& sc, const SolveOptions& opts) {
  sc.validate();
  opts.validate();
  if (sc.n_steps % opts.segments != 0)
    throw std::invalid_argument("integration steps (" + std::to_string(sc.n_steps) +
                                ") must be a multiple of the control segments (" +
                                std::to_string(opts.segments) + ")");
}

ControlSignal sharpened(const ControlSignal& u, const ControlBounds& b) {
  constexpr double snap = 1e-2;
  ControlSignal out = u;
  for (std::size_t k = 0; k < out.segments(); ++k) {
    if (out.u_P[k] - b.u_P_min < snap) out.u_P[k] = b.u_P_min;
    if (1.0 - out.u_P[k] < snap) out.u_P[k] = 1.0;
    if (out.u_V[k] < snap) out.u_V[k] = 0.0;
    if (b.u_V_max - out.u_V[k] < snap) out.u_V[k] = b.u_V_max;
  }
  return out;
}

SolveResult finish(const Scenario& sc, const SolveOptions& opts, ControlSignal u,
                   SolveReport report) {
  if (opts.sharpen) {
    const ControlSignal snapped = sharpened(u, sc.bounds);
    const double j0 = objective(u, sc);
    const double j1 = objective(snapped, sc);
    if (j1 <= j0 + 1e-6 * std::abs(j0)) u = snapped;
  }
  Gradient g = gradient_adjoint(u, sc);
  report.final_cost = g.cost;
  report.projected_grad_norm =
      report.method == Method::direct_shooting
          ? projected_gradient_norm(u, gradient_discrete(u, sc), sc.bounds)
          : projected_gradient_norm(u, g, sc.bounds);
  report.diagnostics = diagnose(g.trajectory, sc.params, sc.weights, sc.bounds, opts.diagnose);
  report.pmp_residual = report.diagnostics.pmp_residual;
  return {std::move(u), std::move(report), std::move(g.trajectory)};
}

}  // namespace

double projected_gradient_norm(const ControlSignal& u, const Gradient& g, const ControlBounds& b) {
  const ControlSignal p = step_along(u, g, 1.0, b);
  double s = 0.0;
  for (std::size_t k = 0; k < u.segments(); ++k) {
    s += (p.u_P[k] - u.u_P[k]) * (p.u_P[k] - u.u_P[k]);
    s += (p.u_V[k] - u.u_V[k]) * (p.u_V[k] - u.u_V[k]);
  }
  return std::sqrt(s);
}

double kkt_violation(const ControlSignal& u, const Gradient& g, const ControlBounds& b,
                     double bound_tol) {
  const auto term = [bound_tol](double value, double grad, double lo, double hi) {
    const bool at_lo = value <= lo + bound_tol;
    const bool at_hi = value >= hi - bound_tol;
    // Descent direction is -grad: at the lower bound grad must be >= 0, at the upper <= 0.
    double v = std::abs(grad);
    if (at_lo && grad >= 0.0) v = 0.0;
    if (at_hi && grad <= 0.0) v = 0.0;
    return v / (1.0 + std::abs(grad));
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < u.segments(); ++k) {
    worst = std::max(worst, term(u.u_P[k], g.d_uP[k], b.u_P_min, 1.0));
    worst = std::max(worst, term(u.u_V[k], g.d_uV[k], 0.0, b.u_V_max));
  }
  return worst;
}

SolveResult solve_direct(const Scenario& sc, const SolveOptions& opts) {
  check_setup(sc, opts);
  ControlSignal u = initial_guess(sc, opts);

  SolveReport report;
  report.method = Method::direct_shooting;
  Gradient g = gradient_discrete(u, sc);
  report.cost_history.push_back(g.cost);

  // Trial steps grow after each accepted step; with bang-bang structure most
  // components sit on a bound and the step mainly scales the few interior ones.
  const double max_step = opts.armijo_step * 1e6;
  double step = opts.armijo_step;
  std::size_t it = 0;
  for (; it < opts.max_iters; ++it) {
    report.projected_grad_norm = projected_gradient_norm(u, g, sc.bounds);
    if (report.projected_grad_norm <= opts.grad_tol) {
      report.converged = true;
      report.message = "projected-gradient norm below tolerance";
      break;
    }
    bool accepted = false;
    for (std::size_t bt = 0; bt < opts.max_backtracks; ++bt) {
      const ControlSignal cand = step_along(u, g, step, sc.bounds);
      const double dec = decrease(u, cand, g);
      if (dec > 0.0) {
        const double jc = objective(cand, sc);
        if (jc <= g.cost - opts.armijo_sigma * dec && jc < g.cost) {
          u = cand;
          accepted = true;
          break;
        }
      }
      step *= opts.armijo_shrink;
    }
    if (!accepted) {
      report.message = "line search failed to decrease the objective";
      break;
    }
    g = gradient_discrete(u, sc);
    report.cost_history.push_back(g.cost);
    step = std::min(step / opts.armijo_shrink, max_step);
  }
  report.iterations = it;
  if (!report.converged && report.message.empty())
    report.message = "iteration limit reached";
  return finish(sc, opts, std::move(u), std::move(report));
}

SolveResult solve_fbsm(const Scenario& sc, const SolveOptions& opts) {
  check_setup(sc, opts);
  ControlSignal u = initial_guess(sc, opts);

  SolveReport report;
  report.method = Method::fbsm;
  const double seg_len = sc.horizon / static_cast<double>(opts.segments);
  const double w = opts.fbsm_damping;

  std::size_t it = 0;
  for (; it < opts.max_iters; ++it) {
    const Gradient g = gradient_adjoint(u, sc);
    report.cost_history.push_back(g.cost);

    double scale = 0.0;
    for (const SwitchingValues& s : g.trajectory.phi)
      scale = std::max({scale, std::abs(s.phi_P), std::abs(s.phi_V)});
    const double tol = 1e-8 * (1.0 + scale);

    double change = 0.0;
    ControlSignal next = u;
    for (std::size_t k = 0; k < u.segments(); ++k) {
      // Segment-averaged switching functions drive the piecewise-constant update.
      const SwitchingValues avg{g.d_uP[k] / seg_len, g.d_uV[k] / seg_len};
      const ControlValue bb = bang_bang_policy(avg, sc.bounds, u.at(k), tol);
      next.u_P[k] = (1.0 - w) * u.u_P[k] + w * bb.u_P;
      next.u_V[k] = (1.0 - w) * u.u_V[k] + w * bb.u_V;
      change = std::max({change, std::abs(next.u_P[k] - u.u_P[k]), std::abs(next.u_V[k] - u.u_V[k])});
    }
    u = project(next, sc.bounds);
    if (change < opts.fbsm_tol) {
      report.converged = true;
      report.message = "control change below tolerance";
      ++it;
      break;
    }
  }
  report.iterations = it;
  if (!report.converged) report.message = "iteration limit reached without a fixed point";
  return finish(sc, opts, std::move(u), std::move(report));
}

SolveResult solve(const Scenario& sc, const SolveOptions& opts) {
  return opts.method == Method::fbsm ? solve_fbsm(sc, opts) : solve_direct(sc, opts);
}

}  // namespace siri
