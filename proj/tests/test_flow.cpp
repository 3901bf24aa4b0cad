#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "harnackflow/errors.hpp"
#include "harnackflow/flow.hpp"

using namespace hflow;

namespace {

// Exact radius for the mean flow (p = 1) on the unit sphere, n arbitrary:
// cos r(t) = cos r0 * exp(n t).
double mean_flow_radius_k1(int n, double r0, double t) {
  return std::acos(std::cos(r0) * std::exp(n * t));
}

}  // namespace

TEST_CASE("sphere flow closed forms, K = 1, p = 1") {
  SpaceForm s(3, 1.0);  // n = 2
  const double r0 = M_PI / 3;

  for (double t : {0.05, 0.1, 0.2, 0.3}) {
    CHECK(sphere_radius(s, 1.0, r0, t) ==
          doctest::Approx(mean_flow_radius_k1(2, r0, t)).epsilon(1e-9));
  }

  // Collapse at ln(2)/2 for r0 = pi/3.
  const double tc = 0.5 * std::log(2.0);
  CHECK(sphere_collapse_time(s, 1.0, r0) == doctest::Approx(tc).epsilon(1e-10));

  SphereFlowResult res = sphere_flow(s, 1.0, r0, 0.0, 1.0);
  CHECK(res.collapse.hit);
  CHECK(res.collapse.time == doctest::Approx(tc).epsilon(1e-8));
  CHECK(res.r[res.r.size() - 1] == 0.0);
  CHECK_FALSE(res.equator.hit);
  for (int i = 0; i + 1 < res.t.size(); ++i) CHECK(res.t[i] < res.t[i + 1]);
}

TEST_CASE("sphere flow closed forms, K = 0") {
  SpaceForm s(3, 0.0);  // n = 2

  // p = 1: r = sqrt(r0^2 - 2 n t); collapse at r0^2 / (2n).
  CHECK(sphere_collapse_time(s, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(sphere_radius(s, 1.0, 1.0, 0.2) ==
        doctest::Approx(std::sqrt(1.0 - 4.0 * 0.2)).epsilon(2e-8));

  // p = 2: r = (r0^3 - 3 n^2 t)^(1/3); collapse at r0^3 / (3 n^2).
  CHECK(sphere_collapse_time(s, 2.0, 1.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(sphere_radius(s, 2.0, 1.0, 0.02) ==
        doctest::Approx(std::cbrt(1.0 - 12.0 * 0.02)).epsilon(1e-8));

  // Backward: radius grows without bound, no events.
  SphereFlowResult back = sphere_flow(s, 1.0, 1.0, 0.0, -3.0);
  CHECK_FALSE(back.collapse.hit);
  CHECK_FALSE(back.equator.hit);
  CHECK(back.t[back.t.size() - 1] == doctest::Approx(-3.0));
  CHECK(back.r[back.r.size() - 1] == doctest::Approx(std::sqrt(13.0)).epsilon(1e-9));
}

TEST_CASE("quadrature and ODE agree on travel times") {
  SpaceForm s(3, 1.0);
  // Time to shrink from 0.7 to 0.3 by quadrature differences, checked by ODE.
  const double t_ab = sphere_collapse_time(s, 0.7, 0.7) - sphere_collapse_time(s, 0.7, 0.3);
  CHECK(sphere_radius(s, 0.7, 0.7, t_ab) == doctest::Approx(0.3).epsilon(1e-7));
}

TEST_CASE("backward flow for p > 1 approaches but never reaches the equator") {
  SpaceForm s(3, 1.0);  // n = 2
  SphereFlowResult res = sphere_flow(s, 2.0, M_PI / 3, 0.0, -10.0);
  CHECK_FALSE(res.collapse.hit);
  CHECK_FALSE(res.equator.hit);
  const int m = static_cast<int>(res.r.size());
  for (int i = 0; i + 1 < m; ++i) {
    CHECK(res.r[i] < res.r[i + 1]);        // radius grows backwards
    CHECK(res.r[i + 1] < M_PI / 2);        // strictly below the equator
  }
  // Independently computed reference for r(-10), n = 2.
  CHECK(res.r[m - 1] == doctest::Approx(1.5471220098279799).epsilon(1e-6));
}

TEST_CASE("backward flow for p < 1 exits at the equator in finite time") {
  SpaceForm s(3, 1.0);
  SphereFlowResult res = sphere_flow(s, 0.5, M_PI / 4, 0.0, -3.0);
  CHECK(res.equator.hit);
  CHECK(res.equator.time < 0.0);
  CHECK(res.r[res.r.size() - 1] == doctest::Approx(M_PI / 2).epsilon(1e-12));

  // Total lifespan equator -> point splits at r0.
  const double total = quasi_ancient_time(s, 0.5);
  CHECK(std::abs(res.equator.time) + sphere_collapse_time(s, 0.5, M_PI / 4) ==
        doctest::Approx(total).epsilon(1e-8));
}

TEST_CASE("quasi ancient lifespan closed form") {
  // K = 1: T = (pi/2) sec(p pi / 2) / n^p.
  auto closed = [](int n, double p) {
    return M_PI / 2.0 / std::cos(p * M_PI / 2.0) / std::pow(n, p);
  };
  struct Case {
    int n;
    double p, frozen;
  };
  for (const Case& c : {Case{2, 0.5, 1.5707963267948966}, Case{3, 0.25, 1.2918860760394886},
                        Case{2, 0.25, 1.4297069626654968}, Case{2, 0.75, 2.4406624510758914}}) {
    SpaceForm s(c.n + 1, 1.0);
    const double T = quasi_ancient_time(s, c.p);
    CHECK(T == doctest::Approx(closed(c.n, c.p)).epsilon(1e-9));
    CHECK(T == doctest::Approx(c.frozen).epsilon(1e-10));
  }

  // Scaling in K: T(K) = K^{-(p+1)/2} T(1).
  SpaceForm s4(3, 4.0);
  SpaceForm s1(3, 1.0);
  CHECK(quasi_ancient_time(s4, 0.5) ==
        doctest::Approx(std::pow(4.0, -0.75) * quasi_ancient_time(s1, 0.5)).epsilon(1e-9));

  CHECK_THROWS_AS(quasi_ancient_time(SpaceForm(3, 0.0), 0.5), ConfigError);
  CHECK_THROWS_AS(quasi_ancient_time(s1, 1.0), ConfigError);
}

TEST_CASE("sphere argument validation") {
  SpaceForm s(3, 1.0);
  CHECK_THROWS_AS(sphere_radius(s, 1.0, 2.0, 0.1), ConfigError);    // past the equator
  CHECK_THROWS_AS(sphere_radius(s, -1.0, 0.5, 0.1), ConfigError);
  CHECK_THROWS_AS(sphere_radius(s, 1.0, 0.5, 10.0), ConfigError);   // collapses first
  // Backward p = 1 runs long enough to enter the equator band are refused.
  CHECK_THROWS_AS(sphere_flow(s, 1.0, M_PI / 4, 0.0, -50.0), ConfigError);
}

TEST_CASE("meridian flow reproduces the sphere ODE") {
  struct Case {
    double K, p, r0, t_end, tol;
    int n;
  };
  for (const Case& c : {Case{1.0, 1.0, M_PI / 3, 0.1, 1e-8, 2},
                        Case{1.0, 0.5, M_PI / 3, 0.1, 1e-7, 3},
                        Case{0.0, 1.0, 1.0, 0.1, 1e-8, 2}}) {
    SpaceForm space(c.n + 1, c.K);
    ProfileCurve init = geodesic_sphere_profile(c.r0, c.K, c.n, 64);
    FlowConfig cfg;
    cfg.p = c.p;
    cfg.t_end = c.t_end;
    FlowResult res = evolve(init, CurvatureFunction::mean(c.n), cfg);
    const double r_exact = sphere_radius(space, c.p, c.r0, c.t_end);
    CHECK(res.t == doctest::Approx(c.t_end).epsilon(1e-12));
    CHECK(res.steps > 0);
    CHECK((res.curve.rho - r_exact).abs().maxCoeff() <= c.tol);
  }
}

TEST_CASE("single step is 4th order in time") {
  ProfileCurve c = geodesic_sphere_profile(M_PI / 3, 1.0, 2, 64);
  auto F = CurvatureFunction::mean(2);
  GeometryFields base = compute_fields(c, F, 1.0);
  SpaceForm space(3, 1.0);

  auto one_step_err = [&](double dt) {
    ProfileCurve next = rk4_step(c, base, F, 1.0, dt);
    const double truth = sphere_radius(space, 1.0, M_PI / 3, dt);
    return (next.rho - truth).abs().maxCoeff();
  };
  const double e1 = one_step_err(0.02), e2 = one_step_err(0.01);
  const double order = std::log2(e1 / e2);
  CHECK(order > 4.3);  // local truncation order 5
  CHECK(order < 5.7);
}

TEST_CASE("window and snapshot bookkeeping") {
  ProfileCurve init = geodesic_sphere_profile(M_PI / 4, 1.0, 2, 48);
  FlowConfig cfg;
  cfg.p = 1.0;
  cfg.fixed_dt = 1e-4;
  cfg.t_end = 16e-4;
  cfg.window = 4;
  cfg.snapshot_stride = 4;

  int triples = 0, snapshots = 0, fresh_count = 0;
  bool first_was_fresh = false;
  double worst_dt_skew = 0.0;
  FlowCallbacks cb;
  cb.on_triple = [&](const Snapshot& a, const Snapshot& b, const Snapshot& c2, bool fresh) {
    if (triples == 0) first_was_fresh = fresh;
    if (fresh) ++fresh_count;
    ++triples;
    worst_dt_skew = std::max(worst_dt_skew, std::abs((c2.t - b.t) - (b.t - a.t)));
    CHECK(b.t > a.t);
    CHECK(c2.t > b.t);
  };
  cb.on_snapshot = [&](const Snapshot&) { ++snapshots; };

  FlowResult res = evolve(init, CurvatureFunction::mean(2), cfg, cb);
  CHECK(res.steps == 16);
  CHECK(triples == 12);          // 3 interior triples per 4-step window
  CHECK(first_was_fresh);
  CHECK(fresh_count == 1);
  CHECK(worst_dt_skew <= 1e-15);
  CHECK(snapshots == 5);         // initial + steps 4, 8, 12, 16
  CHECK(res.rejects == 0);
  CHECK(res.regrids == 0);
}

TEST_CASE("oversized steps are rejected and halved") {
  // Coarse mesh on purpose: with 16 nodes the diffusive stability limit sits
  // near the kappa-change threshold, so the per-step guard is what shapes the
  // run rather than high-frequency amplification.
  ProfileCurve init = geodesic_sphere_profile(1.2, 0.0, 2, 16);
  FlowConfig cfg;
  cfg.p = 1.0;
  cfg.fixed_dt = 0.6;  // collapse is at 0.36; every window must halve its way down
  cfg.t_end = 0.25;
  cfg.window = 2;
  FlowResult res = evolve(init, CurvatureFunction::mean(2), cfg);
  CHECK(res.rejects >= 2);
  CHECK(res.t == doctest::Approx(0.25).epsilon(1e-12));
  const double truth = std::sqrt(1.2 * 1.2 - 4.0 * 0.25);
  CHECK((res.curve.rho - truth).abs().maxCoeff() <= 1e-3);
}

TEST_CASE("flow configuration validation") {
  ProfileCurve init = geodesic_sphere_profile(0.7, 1.0, 2, 32);
  FlowConfig cfg;
  cfg.t_end = 0.0;
  CHECK_THROWS_AS(evolve(init, CurvatureFunction::mean(2), cfg), ConfigError);
  cfg.t_end = 0.1;
  cfg.window = 1;
  CHECK_THROWS_AS(evolve(init, CurvatureFunction::mean(2), cfg), ConfigError);
  cfg.window = 8;
  CHECK_THROWS_AS(evolve(init, CurvatureFunction::mean(3), cfg), ConfigError);  // dim mismatch
  cfg.p = -0.5;
  CHECK_THROWS_AS(evolve(init, CurvatureFunction::mean(2), cfg), ConfigError);
}
