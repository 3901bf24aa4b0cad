#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <utility>

namespace hflow {

// Admissible curvature function F on the positive cone: symmetric, strictly
// monotone, 1-homogeneous, convex, normalized to F(1,...,1) = n.
//
// Three families:
//   mean         F = sum kappa_i
//   quad_norm    F = sqrt(n * sum kappa_i^2)
//   power_mean   F = n * (mean of kappa_i^q)^(1/q), q >= 1
// power_mean reduces to mean at q = 1 and to quad_norm at q = 2.
class CurvatureFunction {
 public:
  enum class Kind { Mean, QuadNorm, PowerMean };

  static CurvatureFunction mean(int n);
  static CurvatureFunction quad_norm(int n);
  static CurvatureFunction power_mean(int n, double q);
  // Accepts "mean", "quad_norm", "power_mean:<q>".
  static CurvatureFunction parse(std::string_view name, int n);

  double value(const Eigen::VectorXd& kappa) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& kappa) const;
  Eigen::MatrixXd hess(const Eigen::VectorXd& kappa) const;

  // Fast path for rotational symmetry: kappa = (km, kr, ..., kr).
  double value_rot(double km, double kr) const;
  // (dF/d km, dF/d kr) with kr any of the repeated slots.
  std::pair<double, double> grad_rot(double km, double kr) const;
  double grad_sum_rot(double km, double kr) const;  // sum_i dF/d kappa_i

  // Continuous extension of F to the cone corner (0,...,0,1).
  double corner_value() const;

  int dim() const { return n_; }
  Kind kind() const { return kind_; }
  double exponent() const { return q_; }
  std::string name() const;

 private:
  CurvatureFunction(Kind kind, int n, double q);
  void check_domain(const Eigen::VectorXd& kappa) const;

  Kind kind_;
  int n_;
  double q_;  // power_mean exponent; 1 for mean, 2 for quad_norm
};

// sum_i F^i kappa_i - F; identically zero for 1-homogeneous F.
double euler_residual(const CurvatureFunction& F, const Eigen::VectorXd& kappa);

// Pinching margin for the p > 1 Harnack hypothesis. With kappa sorted
// ascending: sum_{i<n} F^i kappa_i - (p-1)/(p+1) * F^n kappa_n.
// Non-negative means the point is pinched enough.
double pinching_deficit(const CurvatureFunction& F, const Eigen::VectorXd& kappa, double p);

}  // namespace hflow
