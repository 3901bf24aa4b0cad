#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hflow {

// Simply connected space form N^{n+1} of constant sectional curvature K >= 0.
struct SpaceForm {
  int ambient_dim;  // n + 1
  double K;

  SpaceForm(int ambient_dim_, double K_) : ambient_dim(ambient_dim_), K(K_) {
    if (ambient_dim < 2) throw std::invalid_argument("SpaceForm: ambient_dim must be >= 2");
    if (!(K >= 0.0) || !std::isfinite(K))
      throw std::invalid_argument("SpaceForm: K must be finite and >= 0");
  }

  int n() const { return ambient_dim - 1; }
  // Ricci is n*K times the metric; scalar curvature follows.
  double ricci_factor() const { return n() * K; }
  double scalar_curvature() const { return n() * (n() + 1) * K; }
};

// Curvature bounds of the ambient space, user-supplied. grad_rm_norm bounds the
// covariant derivative of the curvature tensor; it is an input, never computed.
struct AmbientBounds {
  double c1;            // positive lower bound on sectional curvature
  double grad_rm_norm;  // upper bound on |grad Rm|

  AmbientBounds(double c1_, double grad_rm_norm_) : c1(c1_), grad_rm_norm(grad_rm_norm_) {
    if (!(c1 > 0.0) || !std::isfinite(c1))
      throw std::invalid_argument("AmbientBounds: c1 must be finite and > 0");
    if (!(grad_rm_norm >= 0.0) || !std::isfinite(grad_rm_norm))
      throw std::invalid_argument("AmbientBounds: grad_rm_norm must be finite and >= 0");
  }

  // Space forms have parallel curvature; only defined for K > 0 (c1 must be positive).
  static AmbientBounds of(const SpaceForm& space) {
    if (!(space.K > 0.0))
      throw std::invalid_argument("AmbientBounds::of: space form must have K > 0");
    return AmbientBounds(space.K, 0.0);
  }
};

// Curvature tensor of a space form, evaluated from pairwise inner products:
//   Rm(X,Y,Z,W) = K * (<X,W><Y,Z> - <X,Z><Y,W>).
inline double riem(double K, double xw, double yz, double xz, double yw) {
  return K * (xw * yz - xz * yw);
}

// Convenience overload computing the inner products in flat coordinates.
inline double riem(double K, const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                   const Eigen::VectorXd& Z, const Eigen::VectorXd& W) {
  return riem(K, X.dot(W), Y.dot(Z), X.dot(Z), Y.dot(W));
}

// Mean-curvature threshold above which the ambient curvature gradient cannot
// break the Harnack estimate for the H^p flow, 0 < p < 1:
//   H >= 2 n p / min(1 - p, 2p) * |grad Rm|.
// Zero for space forms (parallel curvature).
inline double mean_curvature_threshold(int n, double p, const AmbientBounds& bounds) {
  if (n < 1) throw std::invalid_argument("mean_curvature_threshold: n must be >= 1");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("mean_curvature_threshold: requires 0 < p < 1");
  return 2.0 * n * p / std::min(1.0 - p, 2.0 * p) * bounds.grad_rm_norm;
}

}  // namespace hflow
