#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "siri/io.hpp"
#include "siri/lie.hpp"
#include "siri/model.hpp"
#include "siri/ode.hpp"
#include "siri/pmp.hpp"
#include "siri/report.hpp"
#include "siri/scenario.hpp"
#include "siri/solver.hpp"
#include "siri/sweep.hpp"

namespace siri {

namespace fs = std::filesystem;

namespace {

// Options shared by every command that takes a scenario.
struct Source {
  CLI::Option* case_opt = nullptr;
  CLI::Option* config_opt = nullptr;
  CLI::Option* replay_opt = nullptr;
  std::string case_id;
  std::string config;
  std::string replay;
};

void add_source(CLI::App* cmd, Source& s, bool with_replay) {
  s.case_opt = cmd->add_option("--case", s.case_id, "Preset case 1, 2 or 3");
  s.config_opt = cmd->add_option("--config", s.config, "Scenario config file");
  s.case_opt->excludes(s.config_opt);
  if (with_replay) {
    s.replay_opt = cmd->add_option("--replay", s.replay, "Rerun from a manifest.json");
    s.replay_opt->excludes(s.case_opt)->excludes(s.config_opt);
  }
}

int parse_case(const std::string& id) {
  if (id == "1" || id == "2" || id == "3") return id[0] - '0';
  throw UsageError("unknown case '" + id + "' (expected 1, 2 or 3)");
}

std::vector<Scenario> scenarios_from(const Source& s, bool allow_all) {
  if (s.case_opt->count()) {
    if (s.case_id == "all") {
      if (!allow_all) throw UsageError("--case all is only supported by solve");
      return {preset(1), preset(2), preset(3)};
    }
    return {preset(parse_case(s.case_id))};
  }
  if (s.config_opt->count()) return {load_scenario(s.config)};
  throw UsageError("one of --case or --config is required");
}

struct GridOverride {
  CLI::Option* t_opt = nullptr;
  CLI::Option* steps_opt = nullptr;
  double horizon = 0.0;
  std::size_t steps = 0;
};

void add_grid(CLI::App* cmd, GridOverride& g) {
  g.t_opt = cmd->add_option("--T", g.horizon, "Horizon in days");
  g.steps_opt = cmd->add_option("--steps", g.steps, "Integration steps");
}

// A new horizon without --steps keeps the step size.
void apply_grid(Scenario& sc, const GridOverride& g) {
  if (g.t_opt->count()) {
    const double h = sc.grid().step();
    sc.horizon = g.horizon;
    if (!g.steps_opt->count())
      sc.n_steps = static_cast<std::size_t>(std::max(1.0, std::round(g.horizon / h)));
  }
  if (g.steps_opt->count()) sc.n_steps = g.steps;
  sc.validate();
}

std::vector<std::string> argv_vector(int argc, const char* const* argv) {
  return {argv, argv + argc};
}

void write_run(const fs::path& dir, const Trajectory& traj, const ControlSignal& u,
               const PlotOptions& plot, const Json& report, Manifest manifest) {
  fs::create_directories(dir);
  write_trajectory_csv(traj, dir / "trajectory.csv");
  write_controls_csv(u, dir / "controls.csv");
  write_plots_svg(traj, plot, dir);
  write_json(report, dir / "report.json");
  manifest.files = {"trajectory.csv", "controls.csv", "controls.svg", "states.svg", "report.json"};
  write_json(to_json(manifest), dir / "manifest.json");
}

Json terminal_json(const ReducedState& z) {
  return {{"x_S", z.x_S}, {"x_I", z.x_I()}, {"x_R", z.x_R}, {"x_C", z.x_C}};
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  Source src;
  GridOverride grid;
  double u_P = 1.0;
  double u_V = 0.0;
  std::string out;
};

int run_simulate(SimulateArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Scenario sc;
  ControlValue u{a.u_P, a.u_V};
  if (a.src.replay_opt->count()) {
    const Manifest m = manifest_from_json(read_json(a.src.replay));
    if (m.command != "simulate") throw UsageError("manifest is not from a simulate run");
    sc = m.scenario;
    u = {m.extra.at("u_P").get<double>(), m.extra.at("u_V").get<double>()};
  } else {
    sc = scenarios_from(a.src, false).front();
    apply_grid(sc, a.grid);
  }
  validate(u, sc.bounds);

  const ControlSignal signal = ControlSignal::constant(sc.horizon, 1, u);
  Trajectory traj = integrate_forward(sc.z0(), signal, sc.params, sc.weights, sc.grid());
  attach_costates(traj, sc.params, sc.weights);
  const std::vector<EpidemicState> full = simulate_full(sc.x0, signal, sc.params, sc.grid());
  double drift = 0.0;
  for (const EpidemicState& s : full) drift = std::max(drift, std::abs(s.sum() - 1.0));

  Json report = {{"label", sc.label},
                 {"controls", {{"u_P", u.u_P}, {"u_V", u.u_V}}},
                 {"grid", {{"T", sc.horizon}, {"n_steps", sc.n_steps}}},
                 {"terminal", terminal_json(traj.z.back())},
                 {"terminal_full", {{"x_S", full.back().x_S}, {"x_I", full.back().x_I}, {"x_R", full.back().x_R}}},
                 {"max_simplex_error", drift},
                 {"cost", traj.terminal_cost()}};
  if (a.src.replay_opt->count() || !a.out.empty()) {
    if (a.out.empty()) throw UsageError("--replay needs --out");
    Manifest m;
    m.command = "simulate";
    m.argv = argv;
    m.scenario = sc;
    m.extra = {{"u_P", u.u_P}, {"u_V", u.u_V}};
    write_run(a.out, traj, signal, {sc.label, sc.bounds, {}}, report, m);
  }
  out << report.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EquilibriaArgs {
  Source src;
  double u_P = 0.0;
  double u_V = 0.0;
};

int run_equilibria(EquilibriaArgs& a, std::ostream& out) {
  const Scenario sc = scenarios_from(a.src, false).front();
  validate(ControlValue{a.u_P, a.u_V}, sc.bounds);
  const EquilibriumReport eq = equilibria(sc.params, a.u_P, a.u_V);
  Json j = {{"label", sc.label},
            {"u_eq", {{"u_P", a.u_P}, {"u_V", a.u_V}}},
            {"threshold_ratio", endemic_threshold_ratio(sc.params, a.u_P)}};
  j.update(to_json(eq));
  out << j.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

int run_check(Source& src, std::ostream& out) {
  const Scenario sc = scenarios_from(src, false).front();
  const AssumptionReport rep = check_assumptions(sc.params, sc.weights, sc.bounds);
  const SimultaneousSingularity sim = simultaneous_singularity_possible(sc.params, sc.weights, sc.bounds);
  Json j = {{"label", sc.label}, {"assumptions", to_json(rep)}};
  j["singular_candidates"] = {{"at_one_lhs", candidate_at_one_lhs(sc.params, sc.weights)},
                              {"at_min_lhs", candidate_at_min_lhs(sc.params, sc.weights, sc.bounds)}};
  j["simultaneous_singularity"] = {{"not_excluded", sim.not_excluded},
                                   {"required_x_I", sim.required_x_I}};
  out << j.dump(2) << "\n";
  return rep.all_pass() ? kExitOk : kExitAssumptions;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  Source src;
  GridOverride grid;
  std::string method = "direct";
  CLI::Option* method_opt = nullptr;
  std::size_t segments = 120;
  CLI::Option* segments_opt = nullptr;
  std::size_t max_iters = 2000;
  CLI::Option* iters_opt = nullptr;
  double grad_tol = 1e-6;
  CLI::Option* tol_opt = nullptr;
  bool sharpen = false;
  std::string out;
};

int run_solve(SolveArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  std::vector<Scenario> cases;
  SolveOptions opts;
  if (a.src.replay_opt->count()) {
    const Manifest m = manifest_from_json(read_json(a.src.replay));
    if (m.command != "solve" || !m.has_options) throw UsageError("manifest is not from a solve run");
    cases = {m.scenario};
    opts = m.options;
  } else {
    cases = scenarios_from(a.src, true);
    for (Scenario& sc : cases) apply_grid(sc, a.grid);
    if (a.method == "direct")
      opts.method = Method::direct_shooting;
    else if (a.method == "fbsm")
      opts.method = Method::fbsm;
    else
      throw UsageError("unknown method '" + a.method + "' (expected direct or fbsm)");
    opts.segments = a.segments;
    opts.max_iters = a.max_iters;
    opts.grad_tol = a.grad_tol;
    opts.sharpen = a.sharpen;
  }
  opts.validate();

  const bool batch = cases.size() > 1;
  const std::vector<SolveResult> results = batch ? solve_all(cases, opts) : std::vector{solve(cases[0], opts)};

  Json summary = Json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Scenario& sc = cases[i];
    const SolveResult& r = results[i];
    const fs::path dir = batch ? fs::path(a.out) / sc.label : fs::path(a.out);
    Manifest m;
    m.command = "solve";
    m.argv = argv;
    m.scenario = sc;
    m.has_options = true;
    m.options = opts;
    Json report = to_json(r.report);
    report["label"] = sc.label;
    report["solution"] = {{"u_P", r.controls.u_P}, {"u_V", r.controls.u_V}};
    write_run(dir, r.trajectory, r.controls, {sc.label, sc.bounds, r.report.diagnostics.switch_times},
              report, m);
    Json s = {{"label", sc.label}, {"dir", dir.string()}};
    s.update(to_json(r.report));
    s.erase("cost_history");
    summary.push_back(s);
  }
  out << (batch ? summary : summary[0]).dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DiagnoseArgs {
  std::string run;
  DiagnoseOptions opts;
  CLI::Option* jump_opt = nullptr;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* len_opt = nullptr;
};

int run_diagnose(DiagnoseArgs& a, std::ostream& out) {
  const fs::path dir = a.run;
  const Manifest m = manifest_from_json(read_json(dir / "manifest.json"));
  const Trajectory traj = read_trajectory_csv(dir / "trajectory.csv");
  const Scenario& sc = m.scenario;
  if (traj.grid.n_steps != sc.n_steps || std::abs(traj.grid.horizon - sc.horizon) > 1e-9 * sc.horizon)
    throw IoError(dir / "trajectory.csv", "grid does not match the manifest scenario");

  DiagnoseOptions d = m.has_options ? m.options.diagnose : DiagnoseOptions{};
  if (a.jump_opt->count()) d.jump_tol = a.opts.jump_tol;
  if (a.eps_opt->count()) d.singular_eps_rel = a.opts.singular_eps_rel;
  if (a.len_opt->count()) d.singular_min_len = a.opts.singular_min_len;

  const DiagnosticsReport rep = diagnose(traj, sc.params, sc.weights, sc.bounds, d);
  Json j = {{"label", sc.label}, {"run", dir.string()}, {"final_cost", traj.terminal_cost()}};
  j.update(to_json(rep, true));
  out << j.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BracketsArgs {
  Source src;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  double step = kBracketStep;
  bool json = false;
};

int run_brackets(BracketsArgs& a, std::ostream& out) {
  const Scenario sc = scenarios_from(a.src, false).front();
  if (a.samples == 0) throw UsageError("--samples must be > 0");
  if (!(a.step > 0.0)) throw UsageError("--step must be > 0");
  const std::vector<ReducedState> states = random_states(a.samples, a.seed);
  const BracketErrors worst = max_errors(bracket_error_sweep(states, sc.params, sc.weights, a.step));

  double fgv = 0.0;
  double skew = 0.0;
  for (const ReducedState& z : states) {
    const BracketSet c = bracket_set_closed(z, sc.params, sc.weights);
    for (int i = 0; i < 3; ++i) {
      fgv = std::max(fgv, std::abs(c.fgv[i]));
      skew = std::max(skew, std::abs(c.gv_gpgv[i] + c.gpgv[i]));
    }
  }

  if (a.json) {
    out << Json{{"label", sc.label},
                {"samples", a.samples},
                {"seed", a.seed},
                {"step", a.step},
                {"max_abs_error", to_json(worst)},
                {"identity_fgv", fgv},
                {"identity_gv_gpgv", skew}}
               .dump(2)
        << "\n";
    return kExitOk;
  }
  char line[128];
  out << sc.label << ": closed form vs numeric, " << a.samples << " states, step " << a.step << "\n";
  const std::pair<const char*, double> rows[] = {{"[f,g_V]", worst.fgv},
                                                 {"[g_P,g_V]", worst.gpgv},
                                                 {"[f,[g_P,g_V]]", worst.f_gpgv},
                                                 {"[g_P,[g_P,g_V]]", worst.gp_gpgv},
                                                 {"[g_V,[g_P,g_V]]", worst.gv_gpgv}};
  std::snprintf(line, sizeof line, "%-18s %14s\n", "bracket", "max |err|");
  out << line;
  for (const auto& [name, err] : rows) {
    std::snprintf(line, sizeof line, "%-18s %14.3e\n", name, err);
    out << line;
  }
  std::snprintf(line, sizeof line, "max |[f,g_V]| = %.3e, max |[g_V,[g_P,g_V]] + [g_P,g_V]| = %.3e\n",
                fgv, skew);
  out << line;
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal protection and vaccination control for a SIRI epidemic model"};
  app.name("siri");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Integrate under constant controls");
  add_source(sim_cmd, sim.src, true);
  add_grid(sim_cmd, sim.grid);
  CLI::Option* sim_up = sim_cmd->add_option("--uP", sim.u_P, "Constant u_P (default 1)");
  CLI::Option* sim_uv = sim_cmd->add_option("--uV", sim.u_V, "Constant u_V (default 0)");
  sim_cmd->add_option("--out", sim.out, "Directory for CSV, SVG, report and manifest");

  EquilibriaArgs eq;
  CLI::App* eq_cmd = app.add_subcommand("equilibria", "Equilibria and their stability");
  add_source(eq_cmd, eq.src, false);
  eq_cmd->add_option("--uP", eq.u_P, "Equilibrium u_P")->required();
  eq_cmd->add_option("--uV", eq.u_V, "Equilibrium u_V (> 0)")->required();

  Source chk;
  CLI::App* chk_cmd = app.add_subcommand("check-assumptions", "Exit 2 unless every assumption holds");
  add_source(chk_cmd, chk, false);

  SolveArgs sol;
  CLI::App* sol_cmd = app.add_subcommand("solve", "Compute optimal controls");
  add_source(sol_cmd, sol.src, true);
  sol.src.case_opt->description("Preset case 1, 2, 3 or all");
  add_grid(sol_cmd, sol.grid);
  sol.method_opt = sol_cmd->add_option("--method", sol.method, "direct or fbsm");
  sol.segments_opt = sol_cmd->add_option("--segments", sol.segments, "Control segments");
  sol.iters_opt = sol_cmd->add_option("--max-iters", sol.max_iters, "Iteration limit");
  sol.tol_opt = sol_cmd->add_option("--grad-tol", sol.grad_tol, "Projected-gradient tolerance");
  CLI::Option* sharpen_opt = sol_cmd->add_flag("--sharpen", sol.sharpen, "Snap near-bound values onto the bounds");
  sol_cmd->add_option("--out", sol.out, "Output directory")->required();
  for (CLI::Option* o : {sol.grid.t_opt, sol.grid.steps_opt, sol.method_opt, sol.segments_opt,
                         sol.iters_opt, sol.tol_opt, sharpen_opt})
    sol.src.replay_opt->excludes(o);
  for (CLI::Option* o : {sim.grid.t_opt, sim.grid.steps_opt, sim_up, sim_uv}) sim.src.replay_opt->excludes(o);

  DiagnoseArgs dia;
  CLI::App* dia_cmd = app.add_subcommand("diagnose", "Switches, singular arcs, Delta1 and PMP residual of a run");
  dia_cmd->add_option("--run", dia.run, "Run directory written by solve or simulate")->required();
  dia.jump_opt = dia_cmd->add_option("--jump-tol", dia.opts.jump_tol, "Switch detection threshold");
  dia.eps_opt = dia_cmd->add_option("--eps-rel", dia.opts.singular_eps_rel, "Singular threshold relative to max |phi|");
  dia.len_opt = dia_cmd->add_option("--min-len", dia.opts.singular_min_len, "Minimum singular interval in days");

  BracketsArgs br;
  CLI::App* br_cmd = app.add_subcommand("brackets", "Closed-form vs numeric Lie-bracket errors");
  add_source(br_cmd, br.src, false);
  br_cmd->add_option("--samples", br.samples, "Random states");
  br_cmd->add_option("--seed", br.seed, "RNG seed");
  br_cmd->add_option("--step", br.step, "Finite-difference step");
  br_cmd->add_flag("--json", br.json, "Print JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const std::vector<std::string> args = argv_vector(argc, argv);
  try {
    if (*sim_cmd) return run_simulate(sim, args, out);
    if (*eq_cmd) return run_equilibria(eq, out);
    if (*chk_cmd) return run_check(chk, out);
    if (*sol_cmd) return run_solve(sol, args, out);
    if (*dia_cmd) return run_diagnose(dia, out);
    if (*br_cmd) return run_brackets(br, out);
  } catch (const ConfigError& e) {
    err << "siri: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "siri: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "siri: " << e.what() << "\n";
    return kExitFailure;
  } catch (const IntegrationDiverged& e) {
    err << "siri: " << e.what() << "\n";
    return kExitFailure;
  } catch (const Json::exception& e) {
    err << "siri: malformed manifest: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    err << "siri: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "siri: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "siri: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace siri
