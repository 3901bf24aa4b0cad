#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "harnackflow/errors.hpp"
#include "harnackflow/geometry.hpp"
#include "harnackflow/profile.hpp"

using Eigen::ArrayXd;
using namespace hflow;

namespace {

double max_abs(const ArrayXd& a) { return a.abs().maxCoeff(); }

// Worst disagreement between the stencil pipeline and the embedding reference.
double oracle_gap(const ProfileCurve& c) {
  auto F = CurvatureFunction::mean(c.n());
  GeometryFields g = compute_fields(c, F, 1.0);
  EmbeddingCurvatures e = fd_embedding_oracle(c);
  return std::max(max_abs(g.kappa_prof - e.kappa_prof), max_abs(g.kappa_rot - e.kappa_rot));
}

}  // namespace

TEST_CASE("geodesic spheres are umbilic to machine precision") {
  struct Case {
    double K, r;
    int n;
  };
  for (const Case& cs : {Case{1.0, M_PI / 4, 2}, Case{0.0, 2.0, 3}, Case{4.0, 0.5, 2}}) {
    ProfileCurve c = geodesic_sphere_profile(cs.r, cs.K, cs.n, 64);
    auto F = CurvatureFunction::mean(cs.n);
    GeometryFields g = compute_fields(c, F, 0.5);

    const double kexact =
        cs.K > 0.0 ? std::sqrt(cs.K) / std::tan(std::sqrt(cs.K) * cs.r) : 1.0 / cs.r;
    CHECK(max_abs(g.kappa_prof - kexact) <= 1e-12 * std::abs(kexact));
    CHECK(max_abs(g.kappa_rot - kexact) <= 1e-12 * std::abs(kexact));
    CHECK(max_abs(g.H - cs.n * kexact) <= 1e-11 * cs.n * std::abs(kexact));
    CHECK(max_abs(g.F_val - g.H) == 0.0);  // mean flow
    CHECK(max_abs(g.f - g.F_val.sqrt()) <= 1e-14);

    // Spheres are level sets of rho: normal is the rho direction, f is constant.
    CHECK(max_abs(g.nu_rho - 1.0) <= 1e-10);
    CHECK(max_abs(g.nu_alpha) <= 1e-10);
    CHECK(max_abs(g.ds_f) <= 1e-9);
    CHECK(max_abs(g.b_grad_f) <= 1e-9);

    OrbitMetric om{cs.K};
    CHECK(g.length == doctest::Approx(M_PI * om.m(cs.r)).epsilon(1e-10));
    CHECK(g.max_spacing == doctest::Approx(g.min_spacing).epsilon(1e-10));
    for (int i = 0; i < c.nodes(); ++i) {
      CHECK(g.w[i] == doctest::Approx(om.warp(c.rho[i], c.alpha[i])).epsilon(1e-12));
    }

    CurveSpeed sp = curve_speed(c);
    CHECK(sp.length() == doctest::Approx(M_PI * om.m(cs.r)).epsilon(1e-10));
  }
}

TEST_CASE("off-center geodesic spheres are umbilic through the graph constructor") {
  // A geodesic sphere about a center at distance d from the chart origin is a
  // genuinely non-constant graph rho(alpha), but still has kappa = cot(R) at
  // every node. Strong oracle: the spherical law of cosines gives the graph.
  const double R = 0.7, d = 0.45;
  const double kexact = 1.0 / std::tan(R);
  ProfileCurve c = radial_graph_profile(
      [&](double al) {
        const double A = std::cos(d), B = std::sin(d) * std::cos(al);
        return std::atan2(B, A) + std::acos(std::cos(R) / std::hypot(A, B));
      },
      1.0, 2, 128);
  CHECK(c.rho[0] == doctest::Approx(R + d).epsilon(1e-12));
  CHECK(c.rho[c.nodes() - 1] == doctest::Approx(R - d).epsilon(1e-12));
  auto F = CurvatureFunction::mean(2);
  GeometryFields g = compute_fields(c, F, 1.0);
  CHECK(max_abs(g.kappa_prof - kexact) <= 2e-6);
  CHECK(max_abs(g.kappa_rot - kexact) <= 2e-6);
}

TEST_CASE("axis endpoints are umbilic by construction") {
  ProfileCurve c = perturbed_sphere_profile(M_PI / 4, 0.04, 3, 1.0, 2, 80);
  auto F = CurvatureFunction::mean(2);
  GeometryFields g = compute_fields(c, F, 1.0);
  const int N = c.nodes();
  CHECK(g.kappa_rot[0] == g.kappa_prof[0]);
  CHECK(g.kappa_rot[N - 1] == g.kappa_prof[N - 1]);
  CHECK(g.w[0] == 0.0);
  CHECK(g.w[N - 1] == 0.0);
  CHECK(g.ds_f[0] == 0.0);
  CHECK(g.ds_f[N - 1] == 0.0);
}

TEST_CASE("kappa_vec layout") {
  ProfileCurve c = geodesic_sphere_profile(0.7, 1.0, 3, 48);
  GeometryFields g = compute_fields(c, CurvatureFunction::mean(3), 1.0);
  Eigen::VectorXd k = g.kappa_vec(10);
  REQUIRE(k.size() == 3);
  CHECK(k[0] == g.kappa_prof[10]);
  CHECK(k[1] == g.kappa_rot[10]);
  CHECK(k[2] == g.kappa_rot[10]);
}

TEST_CASE("embedding oracle agrees on spheres at 2nd order") {
  // compute_fields is exact on spheres, so the gap is the oracle's own error.
  auto gap_at = [](int N) { return oracle_gap(geodesic_sphere_profile(0.9, 1.0, 2, N)); };
  const double e1 = gap_at(48), e2 = gap_at(96), e3 = gap_at(192);
  CHECK(e3 < 1e-4);
  CHECK(std::log2(e1 / e2) > 1.7);
  CHECK(std::log2(e2 / e3) > 1.7);
}

TEST_CASE("embedding oracle mutual convergence on perturbed profiles") {
  struct Case {
    double K, r, amp;
    int mode, n;
  };
  for (const Case& cs : {Case{1.0, M_PI / 4, 0.05, 3, 2}, Case{0.0, 1.0, 0.1, 2, 3}}) {
    auto gap_at = [&](int N) {
      return oracle_gap(perturbed_sphere_profile(cs.r, cs.amp, cs.mode, cs.K, cs.n, N));
    };
    const double e1 = gap_at(64), e2 = gap_at(128), e3 = gap_at(256);
    CHECK(std::log2(e1 / e2) > 1.7);
    CHECK(std::log2(e2 / e3) > 1.7);
  }
}

TEST_CASE("laplacian eigenfunction on geodesic spheres") {
  // On the sphere rho = r the function cos(alpha) is a first spherical
  // harmonic: Laplacian = -(n / m(r)^2) cos(alpha).
  for (int n : {2, 3}) {
    auto err_at = [&](int N) {
      ProfileCurve c = geodesic_sphere_profile(0.8, 1.0, n, N);
      ArrayXd psi = c.alpha.cos();
      ArrayXd lap = laplacian_scalar(c, psi);
      const double m = std::sin(0.8);
      return max_abs(lap + (n / (m * m)) * psi);
    };
    const double e1 = err_at(64), e2 = err_at(128);
    CHECK(e1 < 5e-3);
    CHECK(std::log2(e1 / e2) > 1.7);
  }

  // Constants are harmonic.
  ProfileCurve c = geodesic_sphere_profile(1.0, 0.0, 2, 40);
  CHECK(max_abs(laplacian_scalar(c, ArrayXd::Constant(40, 3.7))) <= 1e-11);
}

TEST_CASE("regrid restores uniform arclength spacing") {
  // Same circle, badly skewed parametrization.
  const int N = 120;
  const double r = 0.9;
  ProfileCurve skew = geodesic_sphere_profile(r, 1.0, 2, N);
  for (int i = 0; i < N; ++i) {
    const double u = double(i) / (N - 1);
    skew.alpha[i] = M_PI * u + 0.25 * std::sin(2.0 * M_PI * u);
  }
  skew.validate();

  ProfileCurve even = regrid(skew);
  even.validate();
  CHECK(even.alpha[0] == 0.0);
  CHECK(even.alpha[N - 1] == M_PI);
  // Constant rho survives interpolation exactly; spacing becomes uniform.
  CHECK(max_abs(even.rho - r) <= 1e-12);
  GeometryFields g = compute_fields(even, CurvatureFunction::mean(2), 1.0);
  CHECK((g.max_spacing - g.min_spacing) / g.max_spacing <= 1e-3);
  CHECK(g.length == doctest::Approx(M_PI * std::sin(r)).epsilon(1e-6));

  // A uniform profile regrids to itself.
  ProfileCurve sph = geodesic_sphere_profile(r, 1.0, 2, N);
  ProfileCurve again = regrid(sph);
  CHECK(max_abs(again.rho - sph.rho) <= 1e-10);
  CHECK(max_abs(again.alpha - sph.alpha) <= 1e-8);
}

TEST_CASE("regrid preserves a genuinely curved shape") {
  ProfileCurve c = perturbed_sphere_profile(1.0, 0.12, 2, 0.0, 2, 160);
  GeometryFields before = compute_fields(c, CurvatureFunction::mean(2), 1.0);
  ProfileCurve rc = regrid(c);
  GeometryFields after = compute_fields(rc, CurvatureFunction::mean(2), 1.0);
  CHECK(after.length == doctest::Approx(before.length).epsilon(1e-7));
  // Monotone C1 resampling costs a few percent in curvature on a shape this
  // strongly perturbed; the bound here guards against gross distortion only.
  CHECK(max_abs(after.kappa_prof - before.kappa_prof) <= 0.08);
  CHECK(max_abs(after.kappa_rot - before.kappa_rot) <= 0.08);
}

TEST_CASE("convexity loss is detected") {
  // r(alpha) = 1 + 0.5 cos(5 alpha) has concave dents.
  ProfileCurve c = perturbed_sphere_profile(1.0, 0.5, 5, 0.0, 2, 200);
  CHECK_THROWS_AS(compute_fields(c, CurvatureFunction::mean(2), 1.0), ConvexityLost);
}

TEST_CASE("profile validation") {
  ProfileCurve c = geodesic_sphere_profile(0.7, 1.0, 2, 32);
  CHECK_NOTHROW(c.validate());

  ProfileCurve bad_end = c;
  bad_end.alpha[0] = 0.01;
  CHECK_THROWS_AS(bad_end.validate(), ConfigError);

  ProfileCurve bad_chart = c;
  bad_chart.rho[5] = 4.0;  // outside (0, pi) for K = 1
  CHECK_THROWS_AS(bad_chart.validate(), ConfigError);

  ProfileCurve bad_order = c;
  bad_order.alpha[4] = bad_order.alpha[6];
  CHECK_THROWS_AS(bad_order.validate(), ConfigError);

  CHECK_THROWS_AS(geodesic_sphere_profile(2.0, 1.0, 2, 32), ConfigError);   // past equator
  CHECK_THROWS_AS(geodesic_sphere_profile(-1.0, 0.0, 2, 32), ConfigError);
  CHECK_THROWS_AS(perturbed_sphere_profile(1.0, 1.5, 2, 0.0, 2, 64), ConfigError);  // leaves chart
}
