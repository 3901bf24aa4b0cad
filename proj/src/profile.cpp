#include "harnackflow/profile.hpp"

#include <cmath>

#include "harnackflow/errors.hpp"
#include "harnackflow/gridmath.hpp"
#include "harnackflow/interp.hpp"

namespace hflow {

void ProfileCurve::validate() const {
  const int N = nodes();
  if (N < 16) throw ConfigError("ProfileCurve: need at least 16 nodes");
  if (alpha.size() != N) throw ConfigError("ProfileCurve: rho/alpha size mismatch");
  if (alpha[0] != 0.0 || alpha[N - 1] != M_PI)
    throw ConfigError("ProfileCurve: endpoints must sit on the axis (alpha = 0, pi)");
  const OrbitMetric g = metric();
  for (int i = 0; i < N; ++i) {
    if (!(rho[i] > 0.0) || !(rho[i] < g.rho_max()))
      throw ConfigError("ProfileCurve: rho out of chart range at node " + std::to_string(i));
    if (!(alpha[i] >= 0.0) || !(alpha[i] <= M_PI))
      throw ConfigError("ProfileCurve: alpha out of [0, pi] at node " + std::to_string(i));
    if (i > 0 && !(alpha[i] > alpha[i - 1]))
      throw ConfigError("ProfileCurve: alpha must increase strictly, node " + std::to_string(i));
  }
}

CurveSpeed curve_speed(const ProfileCurve& c) {
  using grid::Reflect;
  const OrbitMetric g = c.metric();
  const Eigen::ArrayXd rp = grid::pad2(c.rho, Reflect::Even, Reflect::Even);
  const Eigen::ArrayXd ap = grid::pad2(c.alpha, Reflect::Odd, Reflect::Odd);
  const Eigen::ArrayXd r1 = grid::d1_4(rp);
  const Eigen::ArrayXd a1 = grid::d1_4(ap);
  Eigen::ArrayXd m(c.nodes());
  for (int i = 0; i < c.nodes(); ++i) m[i] = g.m(c.rho[i]);
  CurveSpeed out;
  out.v = (r1.square() + m.square() * a1.square()).sqrt();
  const Eigen::ArrayXd vp = grid::pad2(out.v, Reflect::Even, Reflect::Even);
  out.s = grid::cumulative_length(out.v, grid::d1_4(vp));
  return out;
}

ProfileCurve geodesic_sphere_profile(double r, double K, int n, int N) {
  const OrbitMetric g{K};
  if (!(r > 0.0) || !(r < 0.5 * g.rho_max()))
    throw ConfigError("geodesic_sphere_profile: need 0 < r < pi/(2 sqrt(K))");
  if (N < 16) throw ConfigError("geodesic_sphere_profile: need at least 16 nodes");
  ProfileCurve c{SpaceForm(n + 1, K), Eigen::ArrayXd::Constant(N, r),
                 Eigen::ArrayXd::LinSpaced(N, 0.0, M_PI)};
  c.alpha[0] = 0.0;
  c.alpha[N - 1] = M_PI;
  return c;
}

ProfileCurve perturbed_sphere_profile(double r, double amplitude, int mode, double K, int n,
                                      int N) {
  if (mode == 0 || amplitude == 0.0) return geodesic_sphere_profile(r, K, n, N);
  if (mode < 0) throw ConfigError("perturbed_sphere_profile: mode must be >= 0");
  const OrbitMetric g{K};
  if (!(r > 0.0) || !(r < 0.5 * g.rho_max()))
    throw ConfigError("perturbed_sphere_profile: need 0 < r < pi/(2 sqrt(K))");
  return radial_graph_profile(
      [=](double a) { return r + amplitude * std::cos(mode * a); }, K, n, N);
}

ProfileCurve radial_graph_profile(const std::function<double(double)>& rho_of_alpha, double K,
                                  int n, int N) {
  if (N < 16) throw ConfigError("radial_graph_profile: need at least 16 nodes");
  const OrbitMetric g{K};

  // Sample the graph directly on a uniform alpha grid. The stencils downstream
  // differentiate along the node index, so the mildly non-uniform physical
  // spacing costs nothing, while resampling through an interpolant would leave
  // non-smooth position jitter that second derivatives amplify.
  ProfileCurve out{SpaceForm(n + 1, K), Eigen::ArrayXd(N), Eigen::ArrayXd(N)};
  for (int i = 0; i < N; ++i) {
    const double a = M_PI * i / (N - 1);
    out.alpha[i] = a;
    out.rho[i] = rho_of_alpha(a);
  }
  out.alpha[0] = 0.0;
  out.alpha[N - 1] = M_PI;
  for (int i = 0; i < N; ++i)
    if (!(out.rho[i] > 0.0) || !(out.rho[i] < g.rho_max()))
      throw ConfigError("radial_graph_profile: graph leaves the chart");
  return out;
}

ProfileCurve regrid(const ProfileCurve& c) {
  const int N = c.nodes();
  const CurveSpeed cs = curve_speed(c);
  const MonotoneCubic rho_of_s(cs.s, c.rho);
  const MonotoneCubic alpha_of_s(cs.s, c.alpha);
  ProfileCurve out{c.space, Eigen::ArrayXd(N), Eigen::ArrayXd(N)};
  const double L = cs.length();
  for (int i = 0; i < N; ++i) {
    const double si = L * i / (N - 1);
    out.rho[i] = rho_of_s(si);
    out.alpha[i] = alpha_of_s(si);
  }
  out.rho[0] = c.rho[0];
  out.rho[N - 1] = c.rho[N - 1];
  out.alpha[0] = 0.0;
  out.alpha[N - 1] = M_PI;
  return out;
}

}  // namespace hflow
