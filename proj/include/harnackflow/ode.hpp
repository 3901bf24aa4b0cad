#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace hflow {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  int max_steps = 2000000;
};

struct ScalarOdeResult {
  std::vector<double> t;
  std::vector<double> y;
  bool reached_end = false;   // integrated to t1 without the stop predicate firing
  bool stopped = false;       // stop predicate fired
};

// Dormand-Prince 5(4) with PI step control for a single scalar ODE y' = f(t, y).
// Integrates from t0 to t1 (either direction). `stop(t, y)` ends the run early;
// the last accepted state is kept.
template <class RHS, class Stop>
ScalarOdeResult integrate_scalar(RHS&& f, double t0, double y0, double t1,
                                 const OdeOptions& opt, Stop&& stop) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                          e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

  ScalarOdeResult res;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0, y = y0;
  res.t.push_back(t);
  res.y.push_back(y);
  if (stop(t, y)) {
    res.stopped = true;
    return res;
  }

  double k1 = f(t, y);
  double dt = std::min(opt.max_step, 1e-4 * std::max(1.0, std::abs(y)) /
                                         std::max(1e-12, std::abs(k1)));
  dt = std::min(dt, std::abs(t1 - t0));
  if (dt <= 0.0) dt = 1e-8;

  for (int it = 0; it < opt.max_steps; ++it) {
    if (dir * (t - t1) >= 0.0) {
      res.reached_end = true;
      break;
    }
    dt = std::min(dt, std::abs(t1 - t));
    const double h = dir * dt;

    const double k2 = f(t + h * a21, y + h * a21 * k1);
    const double k3 = f(t + h * (3.0 / 10), y + h * (a31 * k1 + a32 * k2));
    const double k4 = f(t + h * (4.0 / 5), y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = f(t + h * (8.0 / 9), y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = f(t + h, y5);
    const double y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y), std::abs(y5));
    const double err = std::abs(y5 - y4) / sc;

    if (err <= 1.0 || dt <= 1e-14 * std::max(1.0, std::abs(t))) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      res.t.push_back(t);
      res.y.push_back(y);
      if (stop(t, y)) {
        res.stopped = true;
        break;
      }
    }
    const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    dt = std::min(opt.max_step, dt * std::clamp(fac, 0.2, 5.0));
  }
  return res;
}

template <class RHS>
ScalarOdeResult integrate_scalar(RHS&& f, double t0, double y0, double t1,
                                 const OdeOptions& opt = {}) {
  return integrate_scalar(std::forward<RHS>(f), t0, y0, t1, opt,
                          [](double, double) { return false; });
}

}  // namespace hflow
