#include "harnackflow/curvature_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hflow {

CurvatureFunction::CurvatureFunction(Kind kind, int n, double q) : kind_(kind), n_(n), q_(q) {
  if (n < 1) throw std::invalid_argument("CurvatureFunction: n must be >= 1");
  if (kind == Kind::PowerMean && !(q >= 1.0))
    throw std::invalid_argument("CurvatureFunction: power_mean needs q >= 1");
}

CurvatureFunction CurvatureFunction::mean(int n) { return {Kind::Mean, n, 1.0}; }
CurvatureFunction CurvatureFunction::quad_norm(int n) { return {Kind::QuadNorm, n, 2.0}; }
CurvatureFunction CurvatureFunction::power_mean(int n, double q) {
  return {Kind::PowerMean, n, q};
}

CurvatureFunction CurvatureFunction::parse(std::string_view name, int n) {
  if (name == "mean") return mean(n);
  if (name == "quad_norm") return quad_norm(n);
  constexpr std::string_view prefix = "power_mean:";
  if (name.substr(0, prefix.size()) == prefix) {
    const std::string qs(name.substr(prefix.size()));
    size_t pos = 0;
    double q = std::stod(qs, &pos);
    if (pos != qs.size()) throw std::invalid_argument("CurvatureFunction: bad exponent in '" +
                                                      std::string(name) + "'");
    return power_mean(n, q);
  }
  throw std::invalid_argument("CurvatureFunction: unknown name '" + std::string(name) + "'");
}

std::string CurvatureFunction::name() const {
  switch (kind_) {
    case Kind::Mean: return "mean";
    case Kind::QuadNorm: return "quad_norm";
    case Kind::PowerMean: return "power_mean:" + std::to_string(q_);
  }
  return {};
}

void CurvatureFunction::check_domain(const Eigen::VectorXd& kappa) const {
  if (kappa.size() != n_) throw std::invalid_argument("CurvatureFunction: kappa size != n");
  for (int i = 0; i < n_; ++i)
    if (!(kappa[i] > 0.0))
      throw std::domain_error("CurvatureFunction: kappa outside the positive cone");
}

double CurvatureFunction::value(const Eigen::VectorXd& kappa) const {
  check_domain(kappa);
  switch (kind_) {
    case Kind::Mean: return kappa.sum();
    case Kind::QuadNorm: return std::sqrt(n_ * kappa.squaredNorm());
    case Kind::PowerMean: {
      const double A = kappa.array().pow(q_).sum();
      return std::pow(n_, 1.0 - 1.0 / q_) * std::pow(A, 1.0 / q_);
    }
  }
  return 0.0;
}

Eigen::VectorXd CurvatureFunction::grad(const Eigen::VectorXd& kappa) const {
  check_domain(kappa);
  switch (kind_) {
    case Kind::Mean: return Eigen::VectorXd::Ones(n_);
    case Kind::QuadNorm: {
      const double F = std::sqrt(n_ * kappa.squaredNorm());
      return (n_ / F) * kappa;
    }
    case Kind::PowerMean: {
      const double A = kappa.array().pow(q_).sum();
      const double c = std::pow(n_, 1.0 - 1.0 / q_) * std::pow(A, 1.0 / q_ - 1.0);
      return c * kappa.array().pow(q_ - 1.0).matrix();
    }
  }
  return {};
}

Eigen::MatrixXd CurvatureFunction::hess(const Eigen::VectorXd& kappa) const {
  check_domain(kappa);
  switch (kind_) {
    case Kind::Mean: return Eigen::MatrixXd::Zero(n_, n_);
    case Kind::QuadNorm: {
      const double F = std::sqrt(n_ * kappa.squaredNorm());
      Eigen::MatrixXd H = (n_ / F) * Eigen::MatrixXd::Identity(n_, n_);
      H.noalias() -= (n_ * n_ / (F * F * F)) * kappa * kappa.transpose();
      return H;
    }
    case Kind::PowerMean: {
      // F = c A^{1/q}; F_ij = c(q-1) A^{1/q-2} [A k_i^{q-2} d_ij - k_i^{q-1} k_j^{q-1}]
      const double A = kappa.array().pow(q_).sum();
      const double c = std::pow(n_, 1.0 - 1.0 / q_);
      const double s = c * (q_ - 1.0) * std::pow(A, 1.0 / q_ - 2.0);
      const Eigen::VectorXd km1 = kappa.array().pow(q_ - 1.0).matrix();
      Eigen::MatrixXd H = (A * s) * kappa.array().pow(q_ - 2.0).matrix().asDiagonal();
      H.noalias() -= s * km1 * km1.transpose();
      return H;
    }
  }
  return {};
}

double CurvatureFunction::value_rot(double km, double kr) const {
  if (!(km > 0.0) || (n_ > 1 && !(kr > 0.0)))
    throw std::domain_error("CurvatureFunction: kappa outside the positive cone");
  if (n_ == 1) kr = km;  // no rotational slots; keep pow() off invalid input
  const int m = n_ - 1;
  switch (kind_) {
    case Kind::Mean: return km + m * kr;
    case Kind::QuadNorm: return std::sqrt(n_ * (km * km + m * kr * kr));
    case Kind::PowerMean: {
      const double A = std::pow(km, q_) + m * std::pow(kr, q_);
      return std::pow(n_, 1.0 - 1.0 / q_) * std::pow(A, 1.0 / q_);
    }
  }
  return 0.0;
}

std::pair<double, double> CurvatureFunction::grad_rot(double km, double kr) const {
  if (!(km > 0.0) || (n_ > 1 && !(kr > 0.0)))
    throw std::domain_error("CurvatureFunction: kappa outside the positive cone");
  if (n_ == 1) kr = km;
  const int m = n_ - 1;
  switch (kind_) {
    case Kind::Mean: return {1.0, 1.0};
    case Kind::QuadNorm: {
      const double F = std::sqrt(n_ * (km * km + m * kr * kr));
      return {n_ * km / F, n_ * kr / F};
    }
    case Kind::PowerMean: {
      const double A = std::pow(km, q_) + m * std::pow(kr, q_);
      const double c = std::pow(n_, 1.0 - 1.0 / q_) * std::pow(A, 1.0 / q_ - 1.0);
      return {c * std::pow(km, q_ - 1.0), c * std::pow(kr, q_ - 1.0)};
    }
  }
  return {0.0, 0.0};
}

double CurvatureFunction::grad_sum_rot(double km, double kr) const {
  auto [gm, gr] = grad_rot(km, kr);
  return gm + (n_ - 1) * gr;
}

double CurvatureFunction::corner_value() const {
  switch (kind_) {
    case Kind::Mean: return 1.0;
    case Kind::QuadNorm: return std::sqrt(static_cast<double>(n_));
    case Kind::PowerMean: return std::pow(n_, 1.0 - 1.0 / q_);
  }
  return 0.0;
}

double euler_residual(const CurvatureFunction& F, const Eigen::VectorXd& kappa) {
  return F.grad(kappa).dot(kappa) - F.value(kappa);
}

double pinching_deficit(const CurvatureFunction& F, const Eigen::VectorXd& kappa, double p) {
  Eigen::VectorXd k = kappa;
  std::sort(k.data(), k.data() + k.size());
  const Eigen::VectorXd g = F.grad(k);
  const int n = static_cast<int>(k.size());
  double lower = 0.0;
  for (int i = 0; i + 1 < n; ++i) lower += g[i] * k[i];
  return lower - (p - 1.0) / (p + 1.0) * g[n - 1] * k[n - 1];
}

}  // namespace hflow
