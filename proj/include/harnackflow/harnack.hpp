#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "harnackflow/curvature_function.hpp"
#include "harnackflow/flow.hpp"

namespace hflow {

// Material time derivative of the normal speed f along Lagrangian nodes, by
// centered differencing of a measurement triple. err is a per-node estimate of
// the differencing error, from the spread of the one-sided quotients.
struct MaterialDerivative {
  Eigen::ArrayXd dtf;
  Eigen::ArrayXd err;
  double dt = 0.0;
};
MaterialDerivative material_dtf(const Snapshot& prev, const Snapshot& now, const Snapshot& next);

// --- pointwise verification quantities --------------------------------------
//
// All of these live on the positive cone and couple the hypersurface to the
// ambient curvature K. The rotationally symmetric point is (km, kr) with
// multiplicity (1, n-1); V is the tangential drift of the track that turns the
// normal flow into the frame with u = (d/dt log f), with
// ||V||^2 = (ds_f)^2 / km^2.

// coupling = p K F^{p-1} sum_i F^i. Non-negative for K >= 0; for p = 1 it is
// bounded below by corner_value(F) * K.
double coupling_point(const CurvatureFunction& F, double p, double K, double km, double kr);

// remainder = (1-p) K ||V||^2 + (2p/F) K (F (f^2 + ||V||^2) - F^1 km ||V||^2),
// the ambient term left in the rate evolution after completing the square.
double remainder_point(const CurvatureFunction& F, double p, double K, double km, double kr,
                       double V2);

// Real roots of ((p+1)/p) b^2 - (4/p) S b + (2/p) S^2 + R, ordered, or absent
// when the discriminant (1-p)/2 S^2 - p(p+1)/4 R is negative.
std::optional<std::pair<double, double>> rate_floor_roots(double S, double R, double p);

// Largest admissible rate floor at one point: min(2S/(p+1), lower root if the
// roots are real).
double rate_beta_bound(double S, double R, double p);

// Per-node diagnostics at the middle state of a triple.
struct HarnackDiagnostics {
  double t = 0.0;
  double dt = 0.0;
  Eigen::ArrayXd dtf;
  Eigen::ArrayXd dtf_err;
  Eigen::ArrayXd u;              // (dtf - b(grad f, grad f)) / f
  Eigen::ArrayXd coupling;
  Eigen::ArrayXd remainder;
  Eigen::ArrayXd pinch;          // pinching margin, >= 0 means in hypothesis
  Eigen::ArrayXd slack_harnack;  // dtf - b(grad f, grad f) + p/((p+1)t) f
  Eigen::ArrayXd slack_corner;   // p = 1 only: dtf - b - corner K F + F/(2t); else empty
  double beta_bound = 0.0;       // min over nodes of rate_beta_bound
};
HarnackDiagnostics harnack_diagnostics(const Snapshot& prev, const Snapshot& now,
                                       const Snapshot& next, const CurvatureFunction& F,
                                       double p);

// Residual of the mean curvature evolution identity
//   dt H = lap H + (|A|^2 + n K) H
// under the normal mean curvature flow, per node. O(h^2 + dt^2) on smooth data.
Eigen::ArrayXd h_evolution_residual(const Snapshot& prev, const Snapshot& now,
                                    const Snapshot& next);

// --- run monitors ------------------------------------------------------------

enum class MonitorId {
  HarnackHp,      // 0 < p < 1 mean flow: slack_harnack >= -tol
  HarnackPinched, // p > 1: slack_harnack >= -tol wherever pinch >= 0; coverage reported
  HarnackCorner,  // p = 1: slack_corner >= -tol and coupling >= corner K - tol
  RateFloor,      // u - beta + p/((p+1)t) >= -tol with the run-global beta
  RateMonotone,   // mean flow, p = 1: spatial min of u non-decreasing
  KappaFloor,     // mean flow, 0 < p < 1: min kappa_1(t) >= (initial min)/n - tol
  HEvolution,     // mean flow, p = 1: evolution residual small
  HMinMonotone,   // mean flow: min H non-decreasing up to 1e-6 max H
};

MonitorId parse_monitor(std::string_view name);
std::string monitor_name(MonitorId id);

struct MonitorConfig {
  std::vector<MonitorId> monitors;
  double tol_scale = 1.0;
};

// One aggregate record per measurement time; written out as the series file.
struct SeriesRow {
  double t = 0.0;
  double dt = 0.0;
  double h = 0.0;  // max node spacing at measurement
  double slack_harnack_min = 0.0;
  double slack_corner_min = 0.0;  // NaN when p != 1
  double rate_slack_min = 0.0;    // filled after the run, needs the global beta
  double pinch_min = 0.0;
  double coverage = 1.0;  // fraction of nodes with pinch >= 0
  double coupling_min = 0.0;
  double remainder_min = 0.0;
  double kappa1_min = 0.0;
  double tilde_h_max = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  double u_min = 0.0;
  double beta_bound = 0.0;
  double residual_max = 0.0;  // NaN unless the evolution residual monitor is on
  double dtf_err_max = 0.0;
};

struct MonitorVerdict {
  MonitorId id;
  bool pass = false;
  double worst = 0.0;     // most negative slack (or largest violation), sign as checked
  double tol = 0.0;       // tolerance it was compared against
  std::string detail;
};

struct MonitorReport {
  std::vector<MonitorVerdict> verdicts;
  double beta = 0.0;      // run-global rate floor (RateFloor only)
  double coverage = 1.0;  // overall pinching coverage
  long measurements = 0;
  bool all_pass() const;
  const MonitorVerdict* find(MonitorId id) const;
};

// Consumes measurement triples from evolve() and renders verdicts against
// discretization-aware tolerances C (h^2 + dt^2). The constants C were fixed
// once against geodesic sphere runs, where every violation is pure
// discretization error, and are not adjusted per scenario; tol_scale is the
// only knob.
class RunMonitor {
 public:
  RunMonitor(const SpaceForm& space, const CurvatureFunction& F, double p, MonitorConfig cfg);

  void begin(const Snapshot& initial);
  void on_triple(const Snapshot& prev, const Snapshot& now, const Snapshot& next, bool fresh);
  MonitorReport finish();

  const std::vector<SeriesRow>& rows() const { return rows_; }
  bool wants(MonitorId id) const;

 private:
  SpaceForm space_;
  CurvatureFunction F_;
  double p_;
  MonitorConfig cfg_;
  std::vector<SeriesRow> rows_;

  bool begun_ = false;
  double initial_min_kappa1_ = 0.0;
  double initial_tilde_h_max_ = 0.0;
  double prev_u_min_ = 0.0;  // running max of min u for the monotone check
  bool have_prev_u_ = false;
  double worst_monotone_drop_ = 0.0;
  double worst_monotone_tol_ = 0.0;
  long total_nodes_measured_ = 0;
  long pinched_nodes_ = 0;
};

}  // namespace hflow
