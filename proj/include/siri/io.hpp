#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "siri/ode.hpp"
#include "siri/pmp.hpp"

namespace siri {

inline constexpr const char* kTrajectoryHeader =
    "t,x_S,x_I,x_R,x_C,u_P,u_V,phi_P,phi_V,lambda_S,lambda_R";

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// One row per node. Costate and switching columns are 0 when the trajectory has none
/// (lambda_C is implied to be 1).
std::string format_trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Rebuilds a trajectory (states, per-step controls, costates, phi) from a written CSV.
Trajectory parse_trajectory_csv(const std::string& text);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// segment,t_start,t_end,u_P,u_V
std::string format_controls_csv(const ControlSignal& u);
void write_controls_csv(const ControlSignal& u, const std::filesystem::path& path);

struct PlotOptions {
  std::string title;
  ControlBounds bounds;
  std::vector<SwitchEvent> switches;  // drawn as dashed verticals on the controls plot
};

struct PlotFiles {
  std::filesystem::path controls;
  std::filesystem::path states;
};

/// Throws std::invalid_argument on an empty trajectory.
std::string render_controls_svg(const Trajectory& traj, const PlotOptions& opts);
std::string render_states_svg(const Trajectory& traj, const PlotOptions& opts);

/// controls.svg and states.svg in `dir`.
PlotFiles write_plots_svg(const Trajectory& traj, const PlotOptions& opts,
                          const std::filesystem::path& dir);

}  // namespace siri
