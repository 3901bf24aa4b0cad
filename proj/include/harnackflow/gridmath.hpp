#pragma once

#include <Eigen/Core>

namespace hflow::grid {

using Eigen::ArrayXd;

// Reflection rule for ghost nodes past the meridian endpoints. `Even` mirrors
// values (profile functions symmetric across the axis), `Odd` mirrors about the
// endpoint value (odd extension, used for the angle coordinate and the warp).
enum class Reflect { Even, Odd };

// Extend a nodal array by two ghost values on each side.
inline ArrayXd pad2(const ArrayXd& a, Reflect left, Reflect right) {
  const Eigen::Index n = a.size();
  ArrayXd out(n + 4);
  out.segment(2, n) = a;
  for (int k = 1; k <= 2; ++k) {
    out[2 - k] = left == Reflect::Even ? a[k] : 2.0 * a[0] - a[k];
    out[n + 1 + k] = right == Reflect::Even ? a[n - 1 - k] : 2.0 * a[n - 1] - a[n - 1 - k];
  }
  return out;
}

// 4th-order centered first derivative on the unit index grid; input padded by 2.
inline ArrayXd d1_4(const ArrayXd& p) {
  const Eigen::Index n = p.size() - 4;
  return (p.segment(0, n) - 8.0 * p.segment(1, n) + 8.0 * p.segment(3, n) - p.segment(4, n)) /
         12.0;
}

// 4th-order centered second derivative; input padded by 2.
inline ArrayXd d2_4(const ArrayXd& p) {
  const Eigen::Index n = p.size() - 4;
  return (-p.segment(0, n) + 16.0 * p.segment(1, n) - 30.0 * p.segment(2, n) +
          16.0 * p.segment(3, n) - p.segment(4, n)) /
         12.0;
}

// 2nd-order centered first derivative; input padded by 2 (outer ghosts unused).
inline ArrayXd d1_2(const ArrayXd& p) {
  const Eigen::Index n = p.size() - 4;
  return (p.segment(3, n) - p.segment(1, n)) / 2.0;
}

// 2nd-order centered second derivative; input padded by 2.
inline ArrayXd d2_2(const ArrayXd& p) {
  const Eigen::Index n = p.size() - 4;
  return p.segment(3, n) - 2.0 * p.segment(2, n) + p.segment(1, n);
}

// Cumulative integral of a nodal speed on the unit index grid, corrected
// trapezoid (Euler-Maclaurin, O(h^4)); dv is the nodal derivative of v.
inline ArrayXd cumulative_length(const ArrayXd& v, const ArrayXd& dv) {
  const Eigen::Index n = v.size();
  ArrayXd s(n);
  s[0] = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    s[i + 1] = s[i] + 0.5 * (v[i] + v[i + 1]) - (dv[i + 1] - dv[i]) / 12.0;
  return s;
}

}  // namespace hflow::grid
