#include "siri/lie.hpp"

#include <cmath>

namespace siri {

Mat3 jacobian_fd(const VectorField& F, const Vec3& x, double h) {
  Mat3 jac{};
  for (int j = 0; j < 3; ++j) {
    Vec3 xp = x;
    Vec3 xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec3 fp = F(xp);
    const Vec3 fm = F(xm);
    for (int i = 0; i < 3; ++i) jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

namespace {

Vec3 matvec(const Mat3& m, const Vec3& v) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return out;
}

}  // namespace

Vec3 lie_bracket_numeric(const VectorField& F, const VectorField& G, const Vec3& x, double h) {
  const Vec3 dg_f = matvec(jacobian_fd(G, x, h), F(x));
  const Vec3 df_g = matvec(jacobian_fd(F, x, h), G(x));
  return {dg_f[0] - df_g[0], dg_f[1] - df_g[1], dg_f[2] - df_g[2]};
}

VectorField drift_field(const ModelParams& p, const CostWeights& w) {
  return [p, w](const Vec3& v) { return fields_reduced(ReducedState::from_vec(v), p, w).f; };
}

VectorField protection_field(const ModelParams& p, const CostWeights& w) {
  return [p, w](const Vec3& v) { return fields_reduced(ReducedState::from_vec(v), p, w).g_P; };
}

VectorField vaccination_field(const ModelParams& p, const CostWeights& w) {
  return [p, w](const Vec3& v) { return fields_reduced(ReducedState::from_vec(v), p, w).g_V; };
}

BracketSet bracket_set_closed(const ReducedState& z, const ModelParams& p, const CostWeights& w) {
  const double xs = z.x_S;
  const double xr = z.x_R;
  const double xi = z.x_I();
  const double b = p.beta;
  const double bh = p.beta_hat;
  const double g = p.gamma;

  BracketSet s;
  s.fgv = {0.0, 0.0, 0.0};
  s.gpgv = {-b * w.c_V * xs * xi, 0.0, -xs * (b - bh) * xi};
  s.f_gpgv = {xs * xi * ((bh - b) * (w.c_I - w.c_P) + b * w.c_V * g), 0.0, 0.0};
  s.gp_gpgv = {
      xs * xi * ((bh - b) * w.c_P + b * b * w.c_V * (1.0 - xr - 2.0 * xs) - b * bh * w.c_V * xr),
      b * xs * xs * (b - bh) * xi,
      xs * (b - bh) * xi * ((b - bh) * (1.0 - xr) + (bh - 2.0 * b) * xs)};
  // [g_V, [g_P, g_V]] = -[g_P, g_V]
  s.gv_gpgv = {-s.gpgv[0], -s.gpgv[1], -s.gpgv[2]};
  return s;
}

BracketSet bracket_set_numeric(const ReducedState& z, const ModelParams& p, const CostWeights& w,
                               double h) {
  const VectorField f = drift_field(p, w);
  const VectorField gp = protection_field(p, w);
  const VectorField gv = vaccination_field(p, w);
  const VectorField gpgv = [gp, gv, h](const Vec3& x) { return lie_bracket_numeric(gp, gv, x, h); };
  // The outer difference acts on a field that already carries O(eps/h) roundoff,
  // so it uses a wider step.
  const double outer = 10.0 * h;
  const Vec3 x = z.vec();
  BracketSet s;
  s.fgv = lie_bracket_numeric(f, gv, x, h);
  s.gpgv = gpgv(x);
  s.f_gpgv = lie_bracket_numeric(f, gpgv, x, outer);
  s.gp_gpgv = lie_bracket_numeric(gp, gpgv, x, outer);
  s.gv_gpgv = lie_bracket_numeric(gv, gpgv, x, outer);
  return s;
}

double delta1_minor(const ReducedState& z, const ModelParams& p, const CostWeights& w) {
  const double xs = z.x_S;
  const double xr = z.x_R;
  const double xi = z.x_I();
  const Mat3 m{{{w.c_V, -w.c_P * (xs + xr), -p.beta * w.c_V},
                {-1.0, -p.beta * xs * xi, 0.0},
                {1.0, -p.beta_hat * xr * xi, p.beta_hat - p.beta}}};
  return det3(m);
}

double delta1(const ReducedState& z, double u_P, const ModelParams& p, const CostWeights& w) {
  const double xs = z.x_S;
  return delta1_minor(z, p, w) * xs * xs * z.x_I() * u_P;
}

double kappa_denominator(const ModelParams& p, const CostWeights& w) {
  return (p.beta_hat - p.beta) * (w.c_I - w.c_P) + p.beta * w.c_V * p.gamma;
}

SingularityCoefficients singularity_coefficients(const ReducedState& z, const ModelParams& p,
                                                 const CostWeights& w) {
  const double xi = z.x_I();
  const double db = p.beta_hat - p.beta;
  SingularityCoefficients c;
  c.epsilon = p.beta * z.x_S * db * xi;
  c.mu = db * xi;
  // Same relative zero tolerance as the A2(i) check.
  const double den = kappa_denominator(p, w);
  const double scale = 1.0 + std::abs(p.beta * w.c_V * p.gamma);
  if (std::abs(den) >= 1e-9 * scale) {
    c.kappa = (db * w.c_P + p.beta * p.beta_hat * w.c_V * (1.0 - 2.0 * z.x_S - 2.0 * z.x_R)) / den;
  }
  return c;
}

SingularCandidate singular_up_candidate(const ReducedState& z, const ModelParams& p,
                                        const CostWeights& w) {
  const SingularityCoefficients c = singularity_coefficients(z, p, w);
  if (!c.kappa) return {std::nullopt, "kappa undefined: (beta_hat - beta)(c_I - c_P) + beta c_V gamma = 0"};
  if (*c.kappa == 0.0) return {std::nullopt, "kappa is zero"};
  return {-1.0 / *c.kappa, {}};
}

double candidate_at_one_lhs(const ModelParams& p, const CostWeights& w) {
  return (p.beta - p.beta_hat) * w.c_I - p.beta * w.c_V * p.gamma + p.beta * p.beta_hat * w.c_V;
}

double candidate_at_min_lhs(const ModelParams& p, const CostWeights& w, const ControlBounds& b) {
  return (p.beta - p.beta_hat) * (w.c_I - w.c_P * (1.0 - b.u_P_min)) +
         p.beta * p.beta_hat * w.c_V * b.u_P_min;
}

SimultaneousSingularity simultaneous_singularity_possible(const ModelParams& p,
                                                          const CostWeights& w,
                                                          const ControlBounds& /*b*/) {
  SimultaneousSingularity out;
  if (w.c_V == 0.0) {
    // The minor reduces to c_P (beta - beta_hat)(x_S + x_R): no x_I constraint remains.
    out.not_excluded = w.c_P * (p.beta - p.beta_hat) == 0.0;
    return out;
  }
  out.required_x_I = w.c_P * (p.beta - p.beta_hat) / (w.c_V * p.beta * p.beta_hat);
  out.not_excluded = out.required_x_I >= 0.0 && out.required_x_I <= 1.0;
  return out;
}

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace siri
