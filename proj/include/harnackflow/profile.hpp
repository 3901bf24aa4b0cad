#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>

#include "harnackflow/ambient.hpp"

namespace hflow {

// Two-dimensional orbit space of the rotation action, in geodesic polar
// coordinates (rho, alpha) about a pole on the axis:
//   metric  d rho^2 + m(rho)^2 d alpha^2,   warp  w = m(rho) sin(alpha),
// with m = rho for K = 0 and m = sin(sqrt(K) rho)/sqrt(K) for K > 0.
// The rotation axis is {alpha = 0} united with {alpha = pi}.
struct OrbitMetric {
  double K;

  double m(double rho) const {
    if (K == 0.0) return rho;
    const double rk = std::sqrt(K);
    return std::sin(rk * rho) / rk;
  }
  double dm(double rho) const {
    if (K == 0.0) return 1.0;
    return std::cos(std::sqrt(K) * rho);
  }
  double warp(double rho, double alpha) const { return m(rho) * std::sin(alpha); }
  // rho range of the chart: (0, pi/sqrt(K)) for K > 0, (0, inf) otherwise.
  double rho_max() const {
    return K > 0.0 ? M_PI / std::sqrt(K) : std::numeric_limits<double>::infinity();
  }
};

// Meridian of a closed rotationally symmetric hypersurface, as nodes
// (rho_i, alpha_i) ordered by increasing alpha, endpoints on the axis
// (alpha = 0 and alpha = pi exactly). Ghost nodes for stencils come from
// reflecting across the axis.
struct ProfileCurve {
  SpaceForm space;
  Eigen::ArrayXd rho;
  Eigen::ArrayXd alpha;

  int nodes() const { return static_cast<int>(rho.size()); }
  int n() const { return space.n(); }
  OrbitMetric metric() const { return {space.K}; }

  // Structural checks: sizes, endpoint pinning, chart range. Throws ConfigError.
  void validate() const;
};

// Geodesic sphere of radius r about the pole: {rho = r}, uniform arclength.
// Requires 0 < r < pi/(2 sqrt(K)) for K > 0 (strict convexity), r > 0 for K = 0.
ProfileCurve geodesic_sphere_profile(double r, double K, int n, int N);

// r(alpha) = r + amplitude * cos(mode * alpha), resampled to uniform arclength.
// mode = 0 or amplitude = 0 reduces to the geodesic sphere.
ProfileCurve perturbed_sphere_profile(double r, double amplitude, int mode, double K, int n,
                                      int N);

// General graph rho = rho(alpha) over [0, pi], built on a fine grid and
// resampled to uniform arclength. The graph must stay inside the chart and,
// for a smooth closed hypersurface, have vanishing slope at the axis.
ProfileCurve radial_graph_profile(const std::function<double(double)>& rho_of_alpha, double K,
                                  int n, int N);

// Nodal speed |d gamma / d xi| and cumulative arclength on the index grid.
struct CurveSpeed {
  Eigen::ArrayXd v;  // speed per node
  Eigen::ArrayXd s;  // arclength from the first node
  double length() const { return s[s.size() - 1]; }
};
CurveSpeed curve_speed(const ProfileCurve& c);

// Resample to uniform arclength with the same node count, shape-preserving
// (monotone cubic in arclength, componentwise). Endpoints stay on the axis.
ProfileCurve regrid(const ProfileCurve& c);

}  // namespace hflow
