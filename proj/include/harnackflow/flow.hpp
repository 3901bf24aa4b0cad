#pragma once

#include <Eigen/Core>
#include <functional>

#include "harnackflow/ambient.hpp"
#include "harnackflow/geometry.hpp"
#include "harnackflow/ode.hpp"
#include "harnackflow/profile.hpp"

namespace hflow {

// Contraction x' = -F^p nu of a convex rotationally symmetric hypersurface,
// integrated on the meridian nodes (which then move with the flow).
struct FlowConfig {
  double p = 1.0;
  double t_end = 0.1;
  double cfl = 0.25;        // dt = cfl * min_spacing^2 / max diffusion coefficient
  double fixed_dt = 0.0;    // > 0 overrides the CFL choice
  int window = 8;           // steps per measurement window; dt frozen inside a window
  int snapshot_stride = 0;  // emit every k-th state to on_snapshot; 0 = first/last only
  double max_kappa_step = 0.2;  // relative curvature change per step before rejection
  int max_dt_halvings = 10;
  bool allow_regrid = true;
};

struct Snapshot {
  double t;
  ProfileCurve curve;
  GeometryFields fields;
};

// on_triple receives three consecutive accepted states with a common dt, for
// centered time differencing at the middle one. The flag is true when the
// middle state starts a fresh Lagrangian segment (start of run, or first
// triple after a regrid broke node identity). Triples of a window are emitted
// only once the whole window is accepted.
struct FlowCallbacks {
  std::function<void(const Snapshot&, const Snapshot&, const Snapshot&, bool)> on_triple;
  std::function<void(const Snapshot&)> on_snapshot;
};

struct FlowResult {
  ProfileCurve curve;
  double t = 0.0;
  long steps = 0;
  int regrids = 0;
  int rejects = 0;
};

// One RK4 step of the node positions with per-stage field recomputation.
// base holds the fields of c (reused as stage one). Throws StepRejected when an
// intermediate stage leaves the chart or loses convexity; convexity loss of the
// input state itself propagates as ConvexityLost.
ProfileCurve rk4_step(const ProfileCurve& c, const GeometryFields& base,
                      const CurvatureFunction& F, double p, double dt);

FlowResult evolve(const ProfileCurve& initial, const CurvatureFunction& F, const FlowConfig& cfg,
                  const FlowCallbacks& cb = {});

// --- geodesic spheres under the same flow -----------------------------------
//
// Spheres about the pole stay spheres; the radius obeys
//   dr/dt = -(n kappa(r))^p,  kappa(r) = sqrt(K) cot(sqrt(K) r)  (1/r for K = 0).
// Exit events (collapse at r = 0 forward; the equator r = pi/(2 sqrt(K))
// backward, reachable only for p < 1) are resolved by quadrature of the exact
// time integral once the adaptive integrator gets close.

struct SphereEvent {
  bool hit = false;
  double time = 0.0;
};

struct SphereFlowResult {
  Eigen::ArrayXd t;  // accepted times, ordered from t0 towards t1
  Eigen::ArrayXd r;
  SphereEvent collapse;  // forward exit
  SphereEvent equator;   // backward exit, K > 0 and p < 1 only
};

SphereFlowResult sphere_flow(const SpaceForm& space, double p, double r0, double t0, double t1,
                             const OdeOptions& opt = {});

// Radius at a single time; throws ConfigError when the trajectory exits first.
double sphere_radius(const SpaceForm& space, double p, double r0, double t);

// Time for the sphere of radius r0 to shrink to a point, by quadrature.
double sphere_collapse_time(const SpaceForm& space, double p, double r0);

// Backward lifespan of the shrinking hemisphere-to-point solution for K > 0,
// 0 < p < 1: total time from the equator to collapse.
double quasi_ancient_time(const SpaceForm& space, double p);

}  // namespace hflow
