#include "siri/model.hpp"

#include <cmath>
#include <sstream>

namespace siri {

namespace {

bool finite(double v) { return std::isfinite(v); }

[[noreturn]] void fail(const std::string& what) { throw DomainError(what); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::unstable:
      return "unstable";
    case Stability::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

void validate(const ModelParams& p) {
  if (!finite(p.beta) || p.beta <= 0.0) fail("beta must be > 0 and finite, got " + fmt(p.beta));
  if (!finite(p.beta_hat) || p.beta_hat <= 0.0)
    fail("beta_hat must be > 0 and finite, got " + fmt(p.beta_hat));
  if (!finite(p.gamma) || p.gamma <= 0.0) fail("gamma must be > 0 and finite, got " + fmt(p.gamma));
}

void validate(const CostWeights& w) {
  if (!finite(w.c_P) || w.c_P < 0.0) fail("c_P must be >= 0 and finite, got " + fmt(w.c_P));
  if (!finite(w.c_V) || w.c_V < 0.0) fail("c_V must be >= 0 and finite, got " + fmt(w.c_V));
  if (!finite(w.c_I) || w.c_I < 0.0) fail("c_I must be >= 0 and finite, got " + fmt(w.c_I));
}

void validate(const ControlBounds& b) {
  if (!finite(b.u_P_min) || b.u_P_min <= 0.0) fail("u_P_min must be > 0, got " + fmt(b.u_P_min));
  if (b.u_P_min > 1.0) fail("u_P_min must be <= 1, got " + fmt(b.u_P_min));
  if (!finite(b.u_V_max) || b.u_V_max < 0.0) fail("u_V_max must be >= 0, got " + fmt(b.u_V_max));
  if (b.u_V_max >= 1.0) fail("u_V_max must be < 1, got " + fmt(b.u_V_max));
}

void validate(const EpidemicState& s, double tol) {
  for (double v : {s.x_S, s.x_I, s.x_R}) {
    if (!finite(v) || v < -tol || v > 1.0 + tol)
      fail("state component outside [0, 1]: " + fmt(v));
  }
  if (std::abs(s.sum() - 1.0) > tol)
    fail("simplex violation: x_S + x_I + x_R = " + fmt(s.sum()));
}

void validate(const ReducedState& z, double tol) {
  if (!finite(z.x_C) || z.x_C < -tol) fail("x_C must be >= 0, got " + fmt(z.x_C));
  if (!finite(z.x_S) || z.x_S < -tol) fail("x_S must be >= 0, got " + fmt(z.x_S));
  if (!finite(z.x_R) || z.x_R < -tol) fail("x_R must be >= 0, got " + fmt(z.x_R));
  if (z.x_S + z.x_R > 1.0 + tol) fail("x_S + x_R must be <= 1, got " + fmt(z.x_S + z.x_R));
}

void validate(const ControlValue& u, const ControlBounds& b, double tol) {
  if (!finite(u.u_P) || u.u_P < b.u_P_min - tol || u.u_P > 1.0 + tol)
    fail("u_P outside [u_P_min, 1]: " + fmt(u.u_P));
  if (!finite(u.u_V) || u.u_V < -tol || u.u_V > b.u_V_max + tol)
    fail("u_V outside [0, u_V_max]: " + fmt(u.u_V));
}

EpidemicState normalized(const EpidemicState& s) {
  validate(s);
  const double total = s.sum();
  return {s.x_S / total, s.x_I / total, s.x_R / total};
}

Vec3 rhs_full_unchecked(const EpidemicState& s, const ControlValue& u, const ModelParams& p) {
  const double infect_s = p.beta * s.x_S * s.x_I * u.u_P;
  const double infect_r = p.beta_hat * s.x_R * s.x_I * u.u_P;
  const double vacc = s.x_S * u.u_V;
  const double recov = p.gamma * s.x_I;
  const double dS = -infect_s - vacc;
  const double dR = -infect_r + vacc + recov;
  return {dS, -(dS + dR), dR};
}

Vec3 rhs_full(const EpidemicState& s, const ControlValue& u, const ModelParams& p) {
  validate(s);
  return rhs_full_unchecked(s, u, p);
}

VectorFields fields_reduced(const ReducedState& z, const ModelParams& p, const CostWeights& w) {
  const double xs = z.x_S;
  const double xr = z.x_R;
  const double xi = z.x_I();
  VectorFields v;
  v.f = {w.c_P * (xs + xr) + w.c_I * xi, 0.0, p.gamma * xi};
  v.g_P = {-w.c_P * (xs + xr), -p.beta * xs * xi, -p.beta_hat * xr * xi};
  v.g_V = {w.c_V * xs, -xs, xs};
  return v;
}

Vec3 rhs_reduced(const ReducedState& z, const ControlValue& u, const ModelParams& p,
                 const CostWeights& w) {
  const VectorFields v = fields_reduced(z, p, w);
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = v.f[i] + v.g_P[i] * u.u_P + v.g_V[i] * u.u_V;
  return out;
}

double running_cost(double x_S, double x_I, double x_R, const ControlValue& u,
                    const CostWeights& w) {
  return w.c_P * (1.0 - u.u_P) * (x_S + x_R) + w.c_V * u.u_V * x_S + w.c_I * x_I;
}

std::array<double, 2> rhs_reduced2(double x_S, double x_I, const ControlValue& u,
                                   const ModelParams& p) {
  const double x_R = 1.0 - x_S - x_I;
  return {-p.beta * x_S * x_I * u.u_P - x_S * u.u_V,
          p.beta * x_S * x_I * u.u_P + p.beta_hat * x_R * x_I * u.u_P - p.gamma * x_I};
}

Mat2 jacobian_reduced2(double x_S, double x_I, const ControlValue& u, const ModelParams& p) {
  Mat2 j{};
  j[0][0] = -p.beta * x_I * u.u_P - u.u_V;
  j[0][1] = -p.beta * x_S * u.u_P;
  j[1][0] = (p.beta - p.beta_hat) * x_I * u.u_P;
  j[1][1] = p.beta * x_S * u.u_P + p.beta_hat * (1.0 - x_S - 2.0 * x_I) * u.u_P - p.gamma;
  return j;
}

std::array<std::complex<double>, 2> eigenvalues(const Mat2& m) {
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det, 0.0));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

namespace {

void check_equilibrium_inputs(double u_P_eq, double u_V_eq) {
  if (!(u_V_eq > 0.0))
    throw UnsupportedRegime("u_V_eq must be > 0; the u_V = 0 equilibria are those of the "
                            "uncontrolled SIRI model");
  if (!(u_P_eq > 0.0) || u_P_eq > 1.0) throw DomainError("u_P_eq must lie in (0, 1]");
}

Stability dfe_tag(const ModelParams& p, double u_P_eq) {
  const double threshold = p.beta_hat * u_P_eq;
  if (p.gamma > threshold) return Stability::stable;
  if (p.gamma < threshold) return Stability::unstable;
  return Stability::inconclusive;
}

}  // namespace

StabilityTags classify_stability(const ModelParams& p, double u_P_eq, double u_V_eq) {
  check_equilibrium_inputs(u_P_eq, u_V_eq);
  StabilityTags tags;
  tags.dfe = dfe_tag(p, u_P_eq);
  if (p.gamma < p.beta_hat * u_P_eq) tags.ee = Stability::stable;
  return tags;
}

EquilibriumReport equilibria(const ModelParams& p, double u_P_eq, double u_V_eq) {
  const StabilityTags tags = classify_stability(p, u_P_eq, u_V_eq);
  const ControlValue u{u_P_eq, u_V_eq};

  EquilibriumReport rep;
  rep.dfe.state = {0.0, 0.0, 1.0};
  rep.dfe.stability = tags.dfe;
  rep.dfe.eigenvalues = eigenvalues(jacobian_reduced2(0.0, 0.0, u, p));

  if (tags.ee) {
    const double x_R = p.gamma / (p.beta_hat * u_P_eq);
    Equilibrium ee;
    ee.state = {0.0, 1.0 - x_R, x_R};
    ee.stability = *tags.ee;
    ee.eigenvalues = eigenvalues(jacobian_reduced2(0.0, ee.state.x_I, u, p));
    rep.ee = ee;
  }
  return rep;
}

double endemic_threshold_ratio(const ModelParams& p, double u_P) {
  return p.beta_hat * u_P / p.gamma;
}

AssumptionReport check_assumptions(const ModelParams& p, const CostWeights& w,
                                   const ControlBounds& b) {
  const double db = p.beta - p.beta_hat;
  AssumptionReport r;
  r.a1 = p.beta_hat > p.beta;

  r.a2_i_lhs = db * (w.c_I - w.c_P);
  r.a2_i_rhs = -p.beta * w.c_V * p.gamma;
  r.a2_i = std::abs(r.a2_i_lhs - r.a2_i_rhs) >= 1e-9 * (1.0 + std::abs(r.a2_i_rhs));

  r.a2_ii_lhs = db * w.c_I + p.beta * p.beta_hat * w.c_V - p.beta * w.c_V * p.gamma;
  r.a2_ii = r.a2_ii_lhs < 0.0;

  r.a2_iii_lhs =
      db * (w.c_I - w.c_P * (1.0 - b.u_P_min)) + p.beta * p.beta_hat * w.c_V * b.u_P_min;
  r.a2_iii = r.a2_iii_lhs < 0.0;

  r.endemic_condition = p.gamma < p.beta_hat * b.u_P_min;
  return r;
}

}  // namespace siri
