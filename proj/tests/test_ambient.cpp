#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>
#include <stdexcept>

#include "harnackflow/ambient.hpp"

using namespace hflow;

TEST_CASE("space form basics") {
  SpaceForm s3(4, 1.0);
  CHECK(s3.n() == 3);
  CHECK(s3.ricci_factor() == doctest::Approx(3.0));
  CHECK(s3.scalar_curvature() == doctest::Approx(12.0));

  SpaceForm flat(3, 0.0);
  CHECK(flat.n() == 2);
  CHECK(flat.ricci_factor() == 0.0);
  CHECK(flat.scalar_curvature() == 0.0);

  SpaceForm scaled(3, 4.0);
  CHECK(scaled.scalar_curvature() == doctest::Approx(2.0 * 3.0 * 4.0));

  CHECK_THROWS_AS(SpaceForm(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpaceForm(3, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpaceForm(3, std::nan("")), std::invalid_argument);
}

TEST_CASE("ambient bounds") {
  AmbientBounds b(0.5, 2.0);
  CHECK(b.c1 == 0.5);
  CHECK(b.grad_rm_norm == 2.0);

  auto sb = AmbientBounds::of(SpaceForm(4, 2.5));
  CHECK(sb.c1 == 2.5);
  CHECK(sb.grad_rm_norm == 0.0);

  CHECK_THROWS_AS(AmbientBounds(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(AmbientBounds(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(AmbientBounds::of(SpaceForm(3, 0.0)), std::invalid_argument);
}

TEST_CASE("curvature tensor of a space form") {
  // Orthonormal plane: Rm(X,Y,Y,X) = K.
  CHECK(riem(2.0, 1.0, 1.0, 0.0, 0.0) == doctest::Approx(2.0));

  std::mt19937 gen(7u);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto rv = [&]() {
    Eigen::VectorXd v(4);
    for (int i = 0; i < 4; ++i) v[i] = uni(gen);
    return v;
  };

  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd X = rv(), Y = rv(), Z = rv(), W = rv();
    double K = 0.5 + 0.1 * trial;
    double r = riem(K, X, Y, Z, W);
    // Antisymmetry in each slot pair, symmetry under pair exchange.
    CHECK(riem(K, Y, X, Z, W) == doctest::Approx(-r).epsilon(1e-12));
    CHECK(riem(K, X, Y, W, Z) == doctest::Approx(-r).epsilon(1e-12));
    CHECK(riem(K, Z, W, X, Y) == doctest::Approx(r).epsilon(1e-12));
    // First Bianchi identity.
    double bianchi = r + riem(K, Y, Z, X, W) + riem(K, Z, X, Y, W);
    CHECK(std::abs(bianchi) <= 1e-12);
    // Sectional curvature of any nondegenerate plane is K.
    double area2 = X.dot(X) * Y.dot(Y) - X.dot(Y) * X.dot(Y);
    if (area2 > 1e-6) CHECK(riem(K, X, Y, Y, X) / area2 == doctest::Approx(K).epsilon(1e-10));
  }
}

TEST_CASE("mean curvature threshold") {
  CHECK(mean_curvature_threshold(2, 0.5, AmbientBounds(1.0, 1.0)) == doctest::Approx(4.0));
  CHECK(mean_curvature_threshold(3, 0.25, AmbientBounds(1.0, 2.0)) == doctest::Approx(6.0));
  // min(1-p, 2p) switches branch at p = 1/3.
  CHECK(mean_curvature_threshold(2, 0.75, AmbientBounds(1.0, 1.0)) ==
        doctest::Approx(2.0 * 2.0 * 0.75 / 0.25));

  // Space forms have parallel curvature, so the threshold degenerates to zero:
  // the estimate holds for every strictly convex hypersurface.
  auto sb = AmbientBounds::of(SpaceForm(3, 1.0));
  for (double p : {0.1, 0.25, 0.5, 0.9}) {
    CHECK(mean_curvature_threshold(2, p, sb) == 0.0);
  }

  CHECK_THROWS_AS(mean_curvature_threshold(2, 1.0, AmbientBounds(1.0, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(mean_curvature_threshold(2, 0.0, AmbientBounds(1.0, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(mean_curvature_threshold(0, 0.5, AmbientBounds(1.0, 1.0)),
                  std::invalid_argument);
}
