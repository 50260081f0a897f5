#include "siri/ode.hpp"

#include <array>
#include <cmath>

namespace siri {

void TimeGrid::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("time grid horizon must be > 0");
  if (n_steps == 0) throw std::invalid_argument("time grid needs at least one step");
}

ControlSignal ControlSignal::constant(double horizon, std::size_t segments, ControlValue u) {
  ControlSignal s;
  s.horizon = horizon;
  s.u_P.assign(segments, u.u_P);
  s.u_V.assign(segments, u.u_V);
  return s;
}

void ControlSignal::validate(const ControlBounds& b) const {
  for (std::size_t k = 0; k < segments(); ++k) siri::validate(at(k), b);
}

std::vector<ControlValue> ControlSignal::per_step(const TimeGrid& grid) const {
  if (u_P.empty() || u_P.size() != u_V.size())
    throw std::invalid_argument("control signal needs equal, non-empty u_P and u_V arrays");
  if (std::abs(horizon - grid.horizon) > 1e-12 * grid.horizon)
    throw std::invalid_argument("control signal horizon differs from the time grid horizon");
  if (grid.n_steps % segments() != 0)
    throw std::invalid_argument("segment boundaries must coincide with grid nodes (n_steps = " +
                                std::to_string(grid.n_steps) + ", segments = " +
                                std::to_string(segments()) + ")");
  const std::size_t per = grid.n_steps / segments();
  std::vector<ControlValue> out(grid.n_steps);
  for (std::size_t k = 0; k < grid.n_steps; ++k) out[k] = at(k / per);
  return out;
}

namespace {

Vec3 axpy(const Vec3& x, double a, const Vec3& y) {
  return {x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
}

Vec3 rk4_combine(const Vec3& x, double h, const Vec3& k1, const Vec3& k2, const Vec3& k3,
                 const Vec3& k4) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

void check_node(std::size_t k, const ReducedState& z, double prev_cost) {
  const double tol = kDivergenceTol;
  if (!std::isfinite(z.x_C) || !std::isfinite(z.x_S) || !std::isfinite(z.x_R))
    throw IntegrationDiverged(k, "non-finite state");
  if (z.x_S < -tol) throw IntegrationDiverged(k, "x_S < 0");
  if (z.x_R < -tol) throw IntegrationDiverged(k, "x_R < 0");
  if (z.x_I() < -tol) throw IntegrationDiverged(k, "x_S + x_R > 1");
  if (z.x_C < prev_cost - tol) throw IntegrationDiverged(k, "x_C decreased");
}

}  // namespace

Trajectory integrate_forward(const ReducedState& z0, std::vector<ControlValue> controls,
                             const ModelParams& p, const CostWeights& w, const TimeGrid& grid) {
  grid.validate();
  validate(z0);
  if (controls.size() != grid.n_steps)
    throw std::invalid_argument("need one control per integration step");

  Trajectory traj;
  traj.grid = grid;
  traj.controls = std::move(controls);
  traj.z.resize(grid.node_count());
  traj.z[0] = z0;
  traj.z[0].x_C = 0.0;

  // x_I is carried as a fourth stage variable. RK4 preserves the linear invariant
  // x_S + x_I + x_R = 1, so this is the same scheme as stepping z alone, but x_I = 0
  // stays exactly 0 instead of being rebuilt from 1 - x_S - x_R with rounding.
  using Vec4 = std::array<double, 4>;  // (x_C, x_S, x_I, x_R)
  const auto rhs4 = [&](const Vec4& v, const ControlValue& u) {
    const Vec3 d = rhs_full_unchecked({v[1], v[2], v[3]}, u, p);
    return Vec4{running_cost(v[1], v[2], v[3], u, w), d[0], d[1], d[2]};
  };
  const auto axpy4 = [](const Vec4& x, double a, const Vec4& y) {
    return Vec4{x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2], x[3] + a * y[3]};
  };

  const double h = grid.step();
  Vec4 x{0.0, z0.x_S, z0.x_I(), z0.x_R};
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    const ControlValue u = traj.controls[k];
    const Vec4 k1 = rhs4(x, u);
    const Vec4 k2 = rhs4(axpy4(x, h / 2.0, k1), u);
    const Vec4 k3 = rhs4(axpy4(x, h / 2.0, k2), u);
    const Vec4 k4 = rhs4(axpy4(x, h, k3), u);
    for (int i = 0; i < 4; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    traj.z[k + 1] = {x[0], x[1], x[3]};
    check_node(k + 1, traj.z[k + 1], traj.z[k].x_C);
    if (x[2] < -kDivergenceTol) throw IntegrationDiverged(k + 1, "x_I < 0");
  }
  return traj;
}

Trajectory integrate_forward(const ReducedState& z0, const ControlSignal& u, const ModelParams& p,
                             const CostWeights& w, const TimeGrid& grid) {
  return integrate_forward(z0, u.per_step(grid), p, w, grid);
}

CostateVec costate_rhs(const ReducedState& z, const ControlValue& u, const CostateVec& lam,
                       const ModelParams& p, const CostWeights& w) {
  const double xs = z.x_S;
  const double xr = z.x_R;
  const double up = u.u_P;
  const double uv = u.u_V;
  // Partial derivatives of (F_C, F_S, F_R) with respect to x_S and x_R; F does not depend on x_C.
  const double dC_dS = w.c_P - w.c_I - w.c_P * up + w.c_V * uv;
  const double dC_dR = w.c_P - w.c_I - w.c_P * up;
  const double dS_dS = -p.beta * (1.0 - 2.0 * xs - xr) * up - uv;
  const double dS_dR = p.beta * xs * up;
  const double dR_dS = -p.gamma + p.beta_hat * xr * up + uv;
  const double dR_dR = -p.gamma - p.beta_hat * (1.0 - xs - 2.0 * xr) * up;
  CostateVec d;
  d.lambda_C = 0.0;
  d.lambda_S = -(lam.lambda_C * dC_dS + lam.lambda_S * dS_dS + lam.lambda_R * dR_dS);
  d.lambda_R = -(lam.lambda_C * dC_dR + lam.lambda_S * dS_dR + lam.lambda_R * dR_dR);
  return d;
}

std::vector<CostateVec> integrate_costate_backward(const Trajectory& traj, const ModelParams& p,
                                                   const CostWeights& w) {
  const TimeGrid& grid = traj.grid;
  if (traj.z.size() != grid.node_count()) throw std::invalid_argument("trajectory has no states");
  if (traj.controls.size() != grid.n_steps)
    throw std::invalid_argument("trajectory is missing controls");

  const double h = grid.step();
  std::vector<CostateVec> lam(grid.node_count());
  lam.back() = {1.0, 0.0, 0.0};

  const auto step = [](const CostateVec& l, double a, const CostateVec& d) {
    return CostateVec{l.lambda_C + a * d.lambda_C, l.lambda_S + a * d.lambda_S,
                      l.lambda_R + a * d.lambda_R};
  };

  for (std::size_t k = grid.n_steps; k-- > 0;) {
    const ControlValue u = traj.controls[k];
    const ReducedState& z0 = traj.z[k];
    const ReducedState& z1 = traj.z[k + 1];
    const Vec3 f0 = rhs_reduced(z0, u, p, w);
    const Vec3 f1 = rhs_reduced(z1, u, p, w);
    // Cubic Hermite at the step midpoint.
    Vec3 mid{};
    const Vec3 a = z0.vec();
    const Vec3 b = z1.vec();
    for (int i = 0; i < 3; ++i) mid[i] = 0.5 * (a[i] + b[i]) + h / 8.0 * (f0[i] - f1[i]);
    const ReducedState zm = ReducedState::from_vec(mid);

    const CostateVec& l1 = lam[k + 1];
    const CostateVec k1 = costate_rhs(z1, u, l1, p, w);
    const CostateVec k2 = costate_rhs(zm, u, step(l1, -h / 2.0, k1), p, w);
    const CostateVec k3 = costate_rhs(zm, u, step(l1, -h / 2.0, k2), p, w);
    const CostateVec k4 = costate_rhs(z0, u, step(l1, -h, k3), p, w);
    CostateVec out;
    out.lambda_C = l1.lambda_C;
    out.lambda_S =
        l1.lambda_S - h / 6.0 * (k1.lambda_S + 2.0 * k2.lambda_S + 2.0 * k3.lambda_S + k4.lambda_S);
    out.lambda_R =
        l1.lambda_R - h / 6.0 * (k1.lambda_R + 2.0 * k2.lambda_R + 2.0 * k3.lambda_R + k4.lambda_R);
    lam[k] = out;
  }
  return lam;
}

std::vector<EpidemicState> simulate_full(const EpidemicState& state0, const ControlSignal& u,
                                         const ModelParams& p, const TimeGrid& grid) {
  grid.validate();
  validate(state0);
  const std::vector<ControlValue> controls = u.per_step(grid);

  const auto to_vec = [](const EpidemicState& s) { return Vec3{s.x_S, s.x_I, s.x_R}; };
  const auto from_vec = [](const Vec3& v) { return EpidemicState{v[0], v[1], v[2]}; };

  std::vector<EpidemicState> path(grid.node_count());
  path[0] = state0;
  const double h = grid.step();
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    const ControlValue c = controls[k];
    const auto rhs = [&](const Vec3& v) { return rhs_full_unchecked(from_vec(v), c, p); };
    const Vec3 x = to_vec(path[k]);
    const Vec3 k1 = rhs(x);
    const Vec3 k2 = rhs(axpy(x, h / 2.0, k1));
    const Vec3 k3 = rhs(axpy(x, h / 2.0, k2));
    const Vec3 k4 = rhs(axpy(x, h, k3));
    path[k + 1] = from_vec(rk4_combine(x, h, k1, k2, k3, k4));
    const EpidemicState& s = path[k + 1];
    for (double v : {s.x_S, s.x_I, s.x_R}) {
      if (!std::isfinite(v) || v < -kDivergenceTol || v > 1.0 + kDivergenceTol)
        throw IntegrationDiverged(k + 1, "fraction outside [0, 1]");
    }
    if (std::abs(s.sum() - 1.0) > kDivergenceTol)
      throw IntegrationDiverged(k + 1, "simplex drift");
  }
  return path;
}

}  // namespace siri
