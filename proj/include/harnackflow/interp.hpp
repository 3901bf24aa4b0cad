#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace hflow {

// Shape-preserving piecewise cubic interpolant (Fritsch-Carlson slopes).
// Monotone data stays monotone; no overshoot between nodes.
class MonotoneCubic {
 public:
  MonotoneCubic(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) : x_(x), y_(y) {
    const Eigen::Index n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("MonotoneCubic: bad sizes");
    d_.resize(n);
    Eigen::ArrayXd h(n - 1), del(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      if (!(h[i] > 0.0)) throw std::invalid_argument("MonotoneCubic: x not increasing");
      del[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
      d_[0] = d_[1] = del[0];
    } else {
      for (Eigen::Index i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] <= 0.0) {
          d_[i] = 0.0;
        } else {
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
      }
      d_[0] = edge_slope(h[0], h[1], del[0], del[1]);
      d_[n - 1] = edge_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }
  }

  double operator()(double xq) const {
    const Eigen::Index n = x_.size();
    Eigen::Index lo = 0, hi = n - 1;
    if (xq <= x_[0]) {
      hi = 1;
    } else if (xq >= x_[n - 1]) {
      lo = n - 2;
    } else {
      while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (x_[mid] <= xq ? lo : hi) = mid;
      }
    }
    const double h = x_[lo + 1] - x_[lo];
    const double u = (xq - x_[lo]) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    return h00 * y_[lo] + h * h10 * d_[lo] + h01 * y_[lo + 1] + h * h11 * d_[lo + 1];
  }

 private:
  static double edge_slope(double h0, double h1, double del0, double del1) {
    double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0.0)
      d = 0.0;
    else if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0))
      d = 3.0 * del0;
    return d;
  }

  Eigen::ArrayXd x_, y_, d_;
};

}  // namespace hflow
