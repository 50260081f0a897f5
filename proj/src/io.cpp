#include "siri/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace siri {

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp, "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError(tmp, "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError(path, "rename failed: " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

void append_number(std::string& s, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  s.append(buf, static_cast<std::size_t>(n));
}

std::vector<double> split_numbers(const std::string& line, std::size_t line_no) {
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (true) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(p, end, v);
    if (ec != std::errc())
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": bad number");
    out.push_back(v);
    if (ptr == end) break;
    if (*ptr != ',')
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected ','");
    p = ptr + 1;
  }
  return out;
}

}  // namespace

std::string format_trajectory_csv(const Trajectory& traj) {
  if (traj.z.empty() || traj.controls.empty())
    throw std::invalid_argument("cannot write an empty trajectory");
  const bool with_costates = traj.has_costates() && traj.phi.size() == traj.z.size();
  std::string s = kTrajectoryHeader;
  s += '\n';
  s.reserve(traj.z.size() * 220);
  for (std::size_t k = 0; k < traj.z.size(); ++k) {
    const ReducedState& z = traj.z[k];
    const ControlValue u = traj.control_at_node(k);
    const CostateVec lam = with_costates ? traj.costates[k] : CostateVec{1.0, 0.0, 0.0};
    const SwitchingValues phi = with_costates ? traj.phi[k] : SwitchingValues{};
    const double row[] = {traj.grid.time(k), z.x_S,     z.x_I(),     z.x_R,
                          z.x_C,             u.u_P,     u.u_V,       phi.phi_P,
                          phi.phi_V,         lam.lambda_S, lam.lambda_R};
    for (std::size_t i = 0; i < std::size(row); ++i) {
      if (i) s += ',';
      append_number(s, row[i]);
    }
    s += '\n';
  }
  return s;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  write_file_atomic(path, format_trajectory_csv(traj));
}

Trajectory parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader)
    throw std::invalid_argument("csv header mismatch; expected " + std::string(kTrajectoryHeader));

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    rows.push_back(split_numbers(line, line_no));
    if (rows.back().size() != 11)
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 11 columns");
  }
  if (rows.size() < 2) throw std::invalid_argument("csv needs at least two nodes");

  Trajectory traj;
  traj.grid = {rows.back()[0], rows.size() - 1};
  traj.grid.validate();
  traj.z.resize(rows.size());
  traj.costates.resize(rows.size());
  traj.phi.resize(rows.size());
  traj.controls.resize(rows.size() - 1);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::vector<double>& r = rows[k];
    traj.z[k] = {r[4], r[1], r[3]};
    traj.phi[k] = {r[7], r[8]};
    traj.costates[k] = {1.0, r[9], r[10]};
    if (k + 1 < rows.size()) traj.controls[k] = {r[5], r[6]};
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  try {
    return parse_trajectory_csv(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw IoError(path, e.what());
  }
}

std::string format_controls_csv(const ControlSignal& u) {
  std::string s = "segment,t_start,t_end,u_P,u_V\n";
  const double len = u.horizon / static_cast<double>(u.segments());
  for (std::size_t k = 0; k < u.segments(); ++k) {
    s += std::to_string(k);
    for (double v : {len * static_cast<double>(k), len * static_cast<double>(k + 1), u.u_P[k],
                     u.u_V[k]}) {
      s += ',';
      append_number(s, v);
    }
    s += '\n';
  }
  return s;
}

void write_controls_csv(const ControlSignal& u, const std::filesystem::path& path) {
  write_file_atomic(path, format_controls_csv(u));
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 360.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 44.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double t_max;
  double y_min;
  double y_max;

  double x(double t) const { return kLeft + (kWidth - kLeft - kRight) * t / t_max; }
  double y(double v) const {
    return kHeight - kBottom - (kHeight - kTop - kBottom) * (v - y_min) / (y_max - y_min);
  }
};

struct Series {
  std::string name;
  std::string color;
  std::vector<double> t;
  std::vector<double> v;
};

std::string polyline(const Frame& f, const Series& s) {
  std::string pts;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (i) pts += ' ';
    pts += fmt(f.x(s.t[i])) + "," + fmt(f.y(std::clamp(s.v[i], f.y_min, f.y_max)));
  }
  return "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" + pts +
         "\"/>\n";
}

std::string hline(const Frame& f, double v, const std::string& color, const std::string& label) {
  return "<line x1=\"" + fmt(f.x(0)) + "\" y1=\"" + fmt(f.y(v)) + "\" x2=\"" + fmt(f.x(f.t_max)) +
         "\" y2=\"" + fmt(f.y(v)) + "\" stroke=\"" + color +
         "\" stroke-width=\"0.8\" stroke-dasharray=\"4 3\"/>\n" + "<text x=\"" +
         fmt(f.x(f.t_max) - 4) + "\" y=\"" + fmt(f.y(v) - 3) +
         "\" font-size=\"10\" text-anchor=\"end\" fill=\"" + color + "\">" + escape(label) +
         "</text>\n";
}

std::string axes(const Frame& f, const std::string& title, const std::string& y_label) {
  std::string s;
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
       "\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" +
       escape(title) + "</text>\n";
  s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(f.y(f.y_min)) + "\" x2=\"" +
       fmt(kWidth - kRight) + "\" y2=\"" + fmt(f.y(f.y_min)) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(f.y(f.y_min)) + "\" x2=\"" + fmt(kLeft) +
       "\" y2=\"" + fmt(f.y(f.y_max)) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 6; ++i) {
    const double t = f.t_max * i / 6.0;
    s += "<text x=\"" + fmt(f.x(t)) + "\" y=\"" + fmt(kHeight - kBottom + 16) +
         "\" font-size=\"10\" text-anchor=\"middle\">" + fmt(t) + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = f.y_min + (f.y_max - f.y_min) * i / 4.0;
    s += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(f.y(v) + 3) +
         "\" font-size=\"10\" text-anchor=\"end\">" + fmt(v) + "</text>\n";
  }
  s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"" + fmt(kHeight - 8) +
       "\" font-size=\"11\" text-anchor=\"middle\">t [days]</text>\n";
  s += "<text x=\"14\" y=\"" + fmt(kHeight / 2) +
       "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 " + fmt(kHeight / 2) +
       ")\">" + escape(y_label) + "</text>\n";
  return s;
}

std::string legend(const std::vector<Series>& series) {
  std::string s;
  double x = kLeft + 10;
  for (const Series& ser : series) {
    s += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop + 6) + "\" x2=\"" + fmt(x + 18) +
         "\" y2=\"" + fmt(kTop + 6) + "\" stroke=\"" + ser.color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fmt(x + 22) + "\" y=\"" + fmt(kTop + 10) + "\" font-size=\"11\">" +
         escape(ser.name) + "</text>\n";
    x += 80;
  }
  return s;
}

std::string document(const std::string& body) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt(kWidth) + "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " +
         fmt(kHeight) + "\" font-family=\"sans-serif\">\n" + body + "</svg>\n";
}

void require_points(const Trajectory& traj) {
  if (traj.z.empty() || traj.controls.empty())
    throw std::invalid_argument("cannot plot an empty trajectory");
}

}  // namespace

std::string render_controls_svg(const Trajectory& traj, const PlotOptions& opts) {
  require_points(traj);
  const Frame f{traj.grid.horizon, 0.0, 1.05};
  // Step plot: each control holds its value across the step.
  Series up{"u_P", "#1f77b4", {}, {}};
  Series uv{"u_V", "#d62728", {}, {}};
  for (std::size_t k = 0; k < traj.controls.size(); ++k) {
    const double t0 = traj.grid.time(k);
    const double t1 = traj.grid.time(k + 1);
    const ControlValue u = traj.controls[k];
    if (k == 0 || traj.controls[k - 1].u_P != u.u_P) {
      up.t.push_back(t0);
      up.v.push_back(u.u_P);
    }
    if (k == 0 || traj.controls[k - 1].u_V != u.u_V) {
      uv.t.push_back(t0);
      uv.v.push_back(u.u_V);
    }
    if (k + 1 == traj.controls.size() || traj.controls[k + 1].u_P != u.u_P) {
      up.t.push_back(t1);
      up.v.push_back(u.u_P);
    }
    if (k + 1 == traj.controls.size() || traj.controls[k + 1].u_V != u.u_V) {
      uv.t.push_back(t1);
      uv.v.push_back(u.u_V);
    }
  }
  std::string body = axes(f, opts.title.empty() ? "controls" : opts.title + ": controls", "control");
  body += hline(f, opts.bounds.u_P_min, "#7f7f7f", "u_P_min");
  body += hline(f, 1.0, "#7f7f7f", "u_P max = 1");
  body += hline(f, opts.bounds.u_V_max, "#bcbd22", "u_V_max");
  body += hline(f, 0.0, "#bcbd22", "");
  for (const SwitchEvent& e : opts.switches) {
    body += "<line x1=\"" + fmt(f.x(e.time)) + "\" y1=\"" + fmt(f.y(0)) + "\" x2=\"" +
            fmt(f.x(e.time)) + "\" y2=\"" + fmt(f.y(f.y_max)) +
            "\" stroke=\"#2ca02c\" stroke-width=\"0.8\" stroke-dasharray=\"2 2\"/>\n";
  }
  body += polyline(f, up);
  body += polyline(f, uv);
  body += legend({up, uv});
  return document(body);
}

std::string render_states_svg(const Trajectory& traj, const PlotOptions& opts) {
  require_points(traj);
  const Frame f{traj.grid.horizon, 0.0, 1.0};
  Series s{"x_S", "#1f77b4", {}, {}};
  Series i{"x_I", "#d62728", {}, {}};
  Series r{"x_R", "#2ca02c", {}, {}};
  for (std::size_t k = 0; k < traj.z.size(); ++k) {
    const double t = traj.grid.time(k);
    for (Series* ser : {&s, &i, &r}) ser->t.push_back(t);
    s.v.push_back(traj.z[k].x_S);
    i.v.push_back(traj.z[k].x_I());
    r.v.push_back(traj.z[k].x_R);
  }
  std::string body = axes(f, opts.title.empty() ? "states" : opts.title + ": states", "fraction");
  body += polyline(f, s);
  body += polyline(f, i);
  body += polyline(f, r);
  body += legend({s, i, r});
  return document(body);
}

PlotFiles write_plots_svg(const Trajectory& traj, const PlotOptions& opts,
                          const std::filesystem::path& dir) {
  PlotFiles files{dir / "controls.svg", dir / "states.svg"};
  const std::string controls = render_controls_svg(traj, opts);
  const std::string states = render_states_svg(traj, opts);
  write_file_atomic(files.controls, controls);
  write_file_atomic(files.states, states);
  return files;
}

}  // namespace siri
