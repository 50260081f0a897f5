#include "siri/report.hpp"

#include <cmath>

#include "siri/io.hpp"

namespace siri {

namespace {

// JSON has no infinities; report them as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json complex_pair(const std::complex<double>& c) { return Json::array({c.real(), c.imag()}); }

Json to_json(const Equilibrium& e) {
  return {{"state", {e.state.x_S, e.state.x_I, e.state.x_R}},
          {"stability", to_string(e.stability)},
          {"eigenvalues", {complex_pair(e.eigenvalues[0]), complex_pair(e.eigenvalues[1])}}};
}

}  // namespace

Json to_json(const Scenario& s) {
  return {{"label", s.label},
          {"params", {{"beta", s.params.beta}, {"beta_hat", s.params.beta_hat}, {"gamma", s.params.gamma}}},
          {"weights", {{"c_P", s.weights.c_P}, {"c_V", s.weights.c_V}, {"c_I", s.weights.c_I}}},
          {"bounds", {{"u_P_min", s.bounds.u_P_min}, {"u_V_max", s.bounds.u_V_max}}},
          {"initial", {{"x_S", s.x0.x_S}, {"x_I", s.x0.x_I}, {"x_R", s.x0.x_R}}},
          {"grid", {{"T", s.horizon}, {"n_steps", s.n_steps}}},
          {"endemic_condition", s.endemic()}};
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.label = j.value("label", "");
  const Json& p = j.at("params");
  s.params = {p.at("beta").get<double>(), p.at("beta_hat").get<double>(), p.at("gamma").get<double>()};
  const Json& w = j.at("weights");
  s.weights = {w.at("c_P").get<double>(), w.at("c_V").get<double>(), w.at("c_I").get<double>()};
  const Json& b = j.at("bounds");
  s.bounds = {b.at("u_P_min").get<double>(), b.at("u_V_max").get<double>()};
  const Json& x = j.at("initial");
  s.x0 = {x.at("x_S").get<double>(), x.at("x_I").get<double>(), x.at("x_R").get<double>()};
  const Json& g = j.at("grid");
  s.horizon = g.at("T").get<double>();
  s.n_steps = g.at("n_steps").get<std::size_t>();
  s.validate();
  return s;
}

Json to_json(const SolveOptions& o) {
  Json j = {{"method", to_string(o.method)},
            {"segments", o.segments},
            {"max_iters", o.max_iters},
            {"grad_tol", o.grad_tol},
            {"armijo", {{"step", o.armijo_step}, {"shrink", o.armijo_shrink}, {"sigma", o.armijo_sigma},
                        {"max_backtracks", o.max_backtracks}}},
            {"fbsm", {{"damping", o.fbsm_damping}, {"tol", o.fbsm_tol}}},
            {"sharpen", o.sharpen},
            {"diagnose", {{"jump_tol", o.diagnose.jump_tol},
                          {"singular_eps_rel", o.diagnose.singular_eps_rel},
                          {"singular_min_len", o.diagnose.singular_min_len},
                          {"delta1_floor", o.diagnose.delta1_floor}}}};
  if (o.initial)
    j["initial"] = {{"horizon", o.initial->horizon}, {"u_P", o.initial->u_P}, {"u_V", o.initial->u_V}};
  return j;
}

SolveOptions options_from_json(const Json& j) {
  SolveOptions o;
  const std::string m = j.at("method").get<std::string>();
  if (m == "direct")
    o.method = Method::direct_shooting;
  else if (m == "fbsm")
    o.method = Method::fbsm;
  else
    throw std::invalid_argument("unknown method '" + m + "'");
  o.segments = j.at("segments").get<std::size_t>();
  o.max_iters = j.at("max_iters").get<std::size_t>();
  o.grad_tol = j.at("grad_tol").get<double>();
  const Json& a = j.at("armijo");
  o.armijo_step = a.at("step").get<double>();
  o.armijo_shrink = a.at("shrink").get<double>();
  o.armijo_sigma = a.at("sigma").get<double>();
  o.max_backtracks = a.at("max_backtracks").get<std::size_t>();
  o.fbsm_damping = j.at("fbsm").at("damping").get<double>();
  o.fbsm_tol = j.at("fbsm").at("tol").get<double>();
  o.sharpen = j.at("sharpen").get<bool>();
  const Json& d = j.at("diagnose");
  o.diagnose = {d.at("jump_tol").get<double>(), d.at("singular_eps_rel").get<double>(),
                d.at("singular_min_len").get<double>(), d.at("delta1_floor").get<double>()};
  if (j.contains("initial")) {
    const Json& i = j.at("initial");
    ControlSignal u;
    u.horizon = i.at("horizon").get<double>();
    u.u_P = i.at("u_P").get<std::vector<double>>();
    u.u_V = i.at("u_V").get<std::vector<double>>();
    o.initial = u;
  }
  o.validate();
  return o;
}

Json to_json(const DiagnosticsReport& d, bool with_trace) {
  Json sw = Json::array();
  for (const SwitchEvent& e : d.switch_times)
    sw.push_back({{"input", to_string(e.input)}, {"time", e.time}, {"from", e.from}, {"to", e.to}});
  Json sing = Json::array();
  for (const SingularInterval& s : d.singular_intervals)
    sing.push_back({{"input", to_string(s.input)},
                    {"t_start", s.t_start},
                    {"t_end", s.t_end},
                    {"mean_abs_phi", s.mean_abs_phi}});
  Json j = {{"switch_times", sw},
            {"singular_intervals", sing},
            {"pmp_residual", d.pmp_residual},
            {"delta1_min_abs", number(d.delta1_min_abs)},
            {"kappa", {{"defined", d.kappa.defined},
                       {"min", d.kappa.min},
                       {"max", d.kappa.max},
                       {"candidate_min", d.kappa.candidate_min},
                       {"candidate_max", d.kappa.candidate_max},
                       {"candidate_ever_admissible", d.kappa.candidate_ever_admissible}}}};
  if (with_trace) j["delta1_trace"] = d.delta1_trace;
  return j;
}

Json to_json(const SolveReport& r) {
  return {{"method", to_string(r.method)},
          {"converged", r.converged},
          {"message", r.message},
          {"iterations", r.iterations},
          {"final_cost", r.final_cost},
          {"projected_grad_norm", r.projected_grad_norm},
          {"pmp_residual", r.pmp_residual},
          {"cost_history", r.cost_history},
          {"diagnostics", to_json(r.diagnostics)}};
}

Json to_json(const AssumptionReport& a) {
  return {{"A1", {{"pass", a.a1}}},
          {"A2_i", {{"pass", a.a2_i}, {"lhs", a.a2_i_lhs}, {"rhs", a.a2_i_rhs}}},
          {"A2_ii", {{"pass", a.a2_ii}, {"lhs", a.a2_ii_lhs}}},
          {"A2_iii", {{"pass", a.a2_iii}, {"lhs", a.a2_iii_lhs}}},
          {"endemic_condition", {{"pass", a.endemic_condition}}},
          {"all_pass", a.all_pass()}};
}

Json to_json(const EquilibriumReport& e) {
  Json j = {{"dfe", to_json(e.dfe)}};
  j["ee"] = e.ee ? to_json(*e.ee) : Json(nullptr);
  return j;
}

Json to_json(const BracketErrors& e) {
  return {{"[f,g_V]", e.fgv},
          {"[g_P,g_V]", e.gpgv},
          {"[f,[g_P,g_V]]", e.f_gpgv},
          {"[g_P,[g_P,g_V]]", e.gp_gpgv},
          {"[g_V,[g_P,g_V]]", e.gv_gpgv}};
}

Json to_json(const Manifest& m) {
  Json j = {{"tool", "siri"},
            {"version", kToolVersion},
            {"command", m.command},
            {"argv", m.argv},
            {"scenario", to_json(m.scenario)}};
  if (m.has_options) j["options"] = to_json(m.options);
  j["inputs"] = m.extra;
  j["files"] = m.files;
  return j;
}

Manifest manifest_from_json(const Json& j) {
  Manifest m;
  m.command = j.at("command").get<std::string>();
  m.argv = j.value("argv", std::vector<std::string>{});
  m.scenario = scenario_from_json(j.at("scenario"));
  if (j.contains("options")) {
    m.has_options = true;
    m.options = options_from_json(j.at("options"));
  }
  if (j.contains("inputs")) m.extra = j.at("inputs");
  m.files = j.value("files", std::vector<std::string>{});
  return m;
}

void write_json(const Json& j, const std::filesystem::path& path) {
  write_file_atomic(path, j.dump(2) + "\n");
}

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw IoError(path, e.what());
  }
}

}  // namespace siri
