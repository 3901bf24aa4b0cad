#pragma once

#include <stdexcept>
#include <string>

namespace hflow {

// Scenario or argument problem detected before any flow step ran.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Strict convexity failed: some principal curvature dropped to <= 0.
// `time` is NaN when the failure occurred outside a flow (e.g. initial data).
struct ConvexityLost : std::runtime_error {
  int node;
  double time;
  double kappa;
  ConvexityLost(int node_, double time_, double kappa_, const std::string& what)
      : std::runtime_error(what), node(node_), time(time_), kappa(kappa_) {}
};

// Adjacent nodes collapsed onto each other; the meridian is no longer resolved.
struct ResolutionError : std::runtime_error {
  int node;
  ResolutionError(int node_, const std::string& what)
      : std::runtime_error(what), node(node_) {}
};

// A time step changed the curvature too violently and was refused.
struct StepRejected : std::runtime_error {
  double kappa_change;
  StepRejected(double change, const std::string& what)
      : std::runtime_error(what), kappa_change(change) {}
};

// A measurement triple was requested across a regrid or dt change.
struct WindowViolation : std::runtime_error {
  explicit WindowViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hflow
