#include "harnackflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "harnackflow/errors.hpp"
#include "harnackflow/quadrature.hpp"

namespace hflow {

namespace {

using Eigen::ArrayXd;

// Node velocities for x' = -f nu. The alpha component vanishes on the axis by
// symmetry; pin it exactly so the endpoints never leave alpha = 0, pi.
void velocity(const GeometryFields& gf, ArrayXd& vrho, ArrayXd& valpha) {
  vrho = -gf.f * gf.nu_rho;
  valpha = -gf.f * gf.nu_alpha;
  valpha[0] = 0.0;
  valpha[valpha.size() - 1] = 0.0;
}

ProfileCurve advanced(const ProfileCurve& c, const ArrayXd& vr, const ArrayXd& va, double dt) {
  ProfileCurve out{c.space, c.rho + dt * vr, c.alpha + dt * va};
  const OrbitMetric g = out.metric();
  const double hi = g.rho_max();
  for (int i = 0; i < out.nodes(); ++i)
    if (!(out.rho[i] > 0.0) || !(out.rho[i] < hi))
      throw StepRejected(std::numeric_limits<double>::infinity(),
                         "step left the coordinate chart");
  return out;
}

double max_rel_kappa_change(const GeometryFields& a, const GeometryFields& b) {
  double worst = 0.0;
  for (int i = 0; i < a.kappa_prof.size(); ++i) {
    worst = std::max(worst,
                     std::abs(b.kappa_prof[i] - a.kappa_prof[i]) / std::abs(a.kappa_prof[i]));
    worst =
        std::max(worst, std::abs(b.kappa_rot[i] - a.kappa_rot[i]) / std::abs(a.kappa_rot[i]));
  }
  return worst;
}

// Largest diffusion coefficient of the linearized speed, p F^{p-1} max_i F^i.
double max_diffusion(const GeometryFields& gf, const CurvatureFunction& F, double p) {
  double worst = 0.0;
  for (int i = 0; i < gf.F_val.size(); ++i) {
    const auto [gm, gr] = F.grad_rot(gf.kappa_prof[i], gf.kappa_rot[i]);
    const double coef = p * std::pow(gf.F_val[i], p - 1.0) * std::max(gm, gr);
    worst = std::max(worst, coef);
  }
  return worst;
}

}  // namespace

ProfileCurve rk4_step(const ProfileCurve& c, const GeometryFields& base,
                      const CurvatureFunction& F, double p, double dt) {
  ArrayXd vr1, va1, vr2, va2, vr3, va3, vr4, va4;
  velocity(base, vr1, va1);
  try {
    const ProfileCurve c2 = advanced(c, vr1, va1, 0.5 * dt);
    velocity(compute_fields(c2, F, p), vr2, va2);
    const ProfileCurve c3 = advanced(c, vr2, va2, 0.5 * dt);
    velocity(compute_fields(c3, F, p), vr3, va3);
    const ProfileCurve c4 = advanced(c, vr3, va3, dt);
    velocity(compute_fields(c4, F, p), vr4, va4);
  } catch (const ConvexityLost& e) {
    throw StepRejected(std::numeric_limits<double>::infinity(), e.what());
  }
  const ArrayXd vr = (vr1 + 2.0 * vr2 + 2.0 * vr3 + vr4) / 6.0;
  const ArrayXd va = (va1 + 2.0 * va2 + 2.0 * va3 + va4) / 6.0;
  return advanced(c, vr, va, dt);
}

FlowResult evolve(const ProfileCurve& initial, const CurvatureFunction& F, const FlowConfig& cfg,
                  const FlowCallbacks& cb) {
  if (!(cfg.p > 0.0) || !std::isfinite(cfg.p)) throw ConfigError("evolve: p must be > 0");
  if (!(cfg.t_end > 0.0)) throw ConfigError("evolve: t_end must be > 0");
  if (cfg.window < 2) throw ConfigError("evolve: window must be >= 2");
  if (F.dim() != initial.n()) throw ConfigError("evolve: curvature function dimension mismatch");
  initial.validate();

  FlowResult res{initial, 0.0, 0, 0, 0};
  Snapshot cur{0.0, initial, compute_fields(initial, F, cfg.p)};
  if (cb.on_snapshot) cb.on_snapshot(cur);
  long last_emitted = 0;
  bool fresh = true;

  const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
  while (cur.t < cfg.t_end - t_eps) {
    const double remaining = cfg.t_end - cur.t;
    double dt = cfg.fixed_dt > 0.0
                    ? cfg.fixed_dt
                    : cfg.cfl * cur.fields.min_spacing * cur.fields.min_spacing /
                          max_diffusion(cur.fields, F, cfg.p);
    int halvings = 0;
    std::vector<Snapshot> states;
    for (;;) {
      int nsteps = cfg.window;
      if (nsteps * dt > remaining) {
        nsteps = std::max(1, static_cast<int>(std::ceil(remaining / dt - 1e-9)));
        dt = remaining / nsteps;
      }
      states.clear();
      states.push_back(cur);
      try {
        for (int k = 1; k <= nsteps; ++k) {
          ProfileCurve next = rk4_step(states.back().curve, states.back().fields, F, cfg.p, dt);
          GeometryFields nf = compute_fields(next, F, cfg.p);
          const double change = max_rel_kappa_change(states.back().fields, nf);
          if (change > cfg.max_kappa_step)
            throw StepRejected(change, "curvature changed too fast in one step");
          states.push_back({cur.t + k * dt, std::move(next), std::move(nf)});
        }
        break;
      } catch (const StepRejected&) {
        if (++halvings > cfg.max_dt_halvings) throw;
        ++res.rejects;
        dt *= 0.5;
      } catch (const ConvexityLost& e) {
        // a candidate state broke convexity; retry smaller before calling it real
        if (++halvings > cfg.max_dt_halvings)
          throw ConvexityLost(e.node, cur.t, e.kappa, e.what());
        ++res.rejects;
        dt *= 0.5;
      }
    }

    const int accepted = static_cast<int>(states.size()) - 1;
    for (int k = 1; k + 1 <= accepted; ++k) {
      if (cb.on_triple) cb.on_triple(states[k - 1], states[k], states[k + 1], fresh && k == 1);
      if (k == 1) fresh = false;
    }
    if (accepted >= 2) fresh = false;
    if (cb.on_snapshot && cfg.snapshot_stride > 0) {
      for (int k = 1; k <= accepted; ++k) {
        const long global = res.steps + k;
        if (global % cfg.snapshot_stride == 0) {
          cb.on_snapshot(states[k]);
          last_emitted = global;
        }
      }
    }
    res.steps += accepted;
    cur = std::move(states.back());
    if (cur.t > cfg.t_end - t_eps) cur.t = cfg.t_end;

    if (cfg.allow_regrid && cur.t < cfg.t_end - t_eps) {
      const double h = cur.fields.length / (cur.curve.nodes() - 1);
      if (cur.fields.max_spacing > 2.0 * h || cur.fields.min_spacing < 0.5 * h) {
        cur.curve = regrid(cur.curve);
        cur.fields = compute_fields(cur.curve, F, cfg.p);
        ++res.regrids;
        fresh = true;
      }
    }
  }

  if (cb.on_snapshot && last_emitted != res.steps) cb.on_snapshot(cur);
  res.curve = std::move(cur.curve);
  res.t = cur.t;
  return res;
}

// --- sphere runs ------------------------------------------------------------

namespace {

void check_sphere_args(const SpaceForm& space, double p, double r0) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("sphere flow: p must be > 0");
  const double lim = space.K > 0.0 ? M_PI / (2.0 * std::sqrt(space.K))
                                   : std::numeric_limits<double>::infinity();
  if (!(r0 > 0.0) || !(r0 < lim))
    throw ConfigError("sphere flow: r0 must lie in (0, pi/(2 sqrt(K)))");
}

// Normal speed of the geodesic sphere of radius r.
double sphere_speed(const SpaceForm& space, double p, double r) {
  const int n = space.n();
  if (space.K == 0.0) return std::pow(n / r, p);
  const double rk = std::sqrt(space.K);
  return std::pow(n * rk * std::cos(rk * r) / std::sin(rk * r), p);
}

// Time for the radius to travel [ra, rb] under dr/dt = -speed, 0 < ra < rb,
// rb at most the equator (inclusive; the endpoint singularity for K > 0 is
// integrable when p < 1).
double travel_time(const SpaceForm& space, double p, double ra, double rb) {
  const int n = space.n();
  if (space.K == 0.0) {
    return (std::pow(rb, p + 1.0) - std::pow(ra, p + 1.0)) / ((p + 1.0) * std::pow(n, p));
  }
  const double rk = std::sqrt(space.K);
  const double req = M_PI / (2.0 * rk);
  const double scale = std::pow(n * rk, -p);
  auto integrand = [&](double da, double db) {
    // tan(sqrt(K) r) from the distance to the nearer endpoint
    if (da <= db) return std::pow(std::tan(rk * (ra + da)), p);
    const double deq = req - rb + db;  // distance to the equator
    return std::pow(std::sin(rk * deq) / std::cos(rk * deq), -p);
  };
  return scale * integrate_tanh_sinh(integrand, ra, rb);
}

}  // namespace

SphereFlowResult sphere_flow(const SpaceForm& space, double p, double r0, double t0, double t1,
                             const OdeOptions& opt) {
  check_sphere_args(space, p, r0);
  const double rk = space.K > 0.0 ? std::sqrt(space.K) : 0.0;
  const double req = space.K > 0.0 ? M_PI / (2.0 * rk) : std::numeric_limits<double>::infinity();
  const double r_lo = 1e-6;
  const double r_hi = space.K > 0.0 ? req - 1e-6 : std::numeric_limits<double>::infinity();

  auto rhs = [&](double, double r) { return -sphere_speed(space, p, r); };
  auto out_of_band = [&](double, double r) { return r < r_lo || r > r_hi; };
  ScalarOdeResult ode = integrate_scalar(rhs, t0, r0, t1, opt, out_of_band);

  SphereFlowResult res;
  res.t = Eigen::Map<const ArrayXd>(ode.t.data(), ode.t.size());
  res.r = Eigen::Map<const ArrayXd>(ode.y.data(), ode.y.size());

  if (ode.stopped) {
    const double ts = ode.t.back(), rs = ode.y.back();
    if (rs < r_lo) {
      res.collapse.hit = true;
      res.collapse.time = ts + travel_time(space, p, 1e-300, rs);
      const int m = static_cast<int>(res.t.size());
      res.t.conservativeResize(m + 1);
      res.r.conservativeResize(m + 1);
      res.t[m] = res.collapse.time;
      res.r[m] = 0.0;
    } else {
      if (!(p < 1.0))
        throw ConfigError("sphere flow: equator reached backwards, expected only for p < 1");
      res.equator.hit = true;
      res.equator.time = ts - travel_time(space, p, rs, req);
      const int m = static_cast<int>(res.t.size());
      res.t.conservativeResize(m + 1);
      res.r.conservativeResize(m + 1);
      res.t[m] = res.equator.time;
      res.r[m] = req;
    }
  }
  return res;
}

double sphere_radius(const SpaceForm& space, double p, double r0, double t) {
  if (t == 0.0) {
    check_sphere_args(space, p, r0);
    return r0;
  }
  SphereFlowResult res = sphere_flow(space, p, r0, 0.0, t);
  if (res.collapse.hit)
    throw ConfigError("sphere_radius: sphere collapses at t = " +
                      std::to_string(res.collapse.time) + " before requested time");
  if (res.equator.hit)
    throw ConfigError("sphere_radius: trajectory exits at the equator at t = " +
                      std::to_string(res.equator.time));
  return res.r[res.r.size() - 1];
}

double sphere_collapse_time(const SpaceForm& space, double p, double r0) {
  check_sphere_args(space, p, r0);
  return travel_time(space, p, 1e-300, r0);
}

double quasi_ancient_time(const SpaceForm& space, double p) {
  if (!(space.K > 0.0)) throw ConfigError("quasi_ancient_time: requires K > 0");
  if (!(p > 0.0) || !(p < 1.0)) throw ConfigError("quasi_ancient_time: requires 0 < p < 1");
  const double req = M_PI / (2.0 * std::sqrt(space.K));
  return travel_time(space, p, 1e-300, req);
}

}  // namespace hflow
