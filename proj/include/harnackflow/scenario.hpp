#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "harnackflow/harnack.hpp"

namespace hflow {

// One simulation request, read from a flat key = value file ('#' comments).
struct Scenario {
  std::string name = "unnamed";
  double K = 1.0;
  int n = 2;
  std::string F_name = "mean";
  double p = 1.0;

  // initial data
  std::string shape = "geodesic_sphere";  // geodesic_sphere | perturbed_sphere
  double r = 0.7853981633974483;          // pi/4
  double amplitude = 0.0;
  int mode = 2;
  double noise = 0.0;  // seeded low-mode radial noise on top of the shape
  unsigned long seed = 0;
  int nodes = 200;

  // flow controls
  double t_end = 0.1;
  double cfl = 0.25;
  double fixed_dt = 0.0;
  int window = 8;
  int snapshot_stride = 0;
  bool allow_regrid = true;

  std::vector<std::string> monitors;
  double tol_scale = 1.0;
  std::string out;  // output directory; empty writes nothing
};

Scenario parse_scenario_text(const std::string& text, const std::string& name_hint);
Scenario parse_scenario_file(const std::string& path);

// Command line overrides applied on top of the file.
struct RunOverrides {
  std::optional<std::string> out;
  std::optional<double> tol_scale;
  std::optional<unsigned long> seed;
  std::optional<int> nodes;
  bool quiet = false;
};

// Exit codes of a run, also used by the process.
inline constexpr int kExitPass = 0;
inline constexpr int kExitMonitorFail = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitConvexityLost = 3;

struct RunOutcome {
  int exit_code = kExitPass;
  std::string reason;  // machine-readable: "reason=..." line content
  MonitorReport report;
  std::vector<SeriesRow> rows;
  double final_t = 0.0;
  long steps = 0;
  int regrids = 0;
  int rejects = 0;
};

// Validates, builds the initial profile, evolves with monitors attached,
// writes series / snapshots / summary when an output directory is set.
// Never throws for scenario-level problems; the outcome carries the exit code.
RunOutcome run_scenario(const Scenario& sc, const RunOverrides& ov, std::ostream& log);

// Runs every *.cfg under dir (sorted by name). Returns the worst exit code.
int run_suite(const std::string& dir, const RunOverrides& ov, std::ostream& log);

// The initial hypersurface of a scenario (exposed for tests and validation).
ProfileCurve build_initial_profile(const Scenario& sc);

}  // namespace hflow
