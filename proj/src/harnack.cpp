#include "harnackflow/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "harnackflow/errors.hpp"
#include "harnackflow/geometry.hpp"

namespace hflow {

namespace {

using Eigen::ArrayXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Frozen tolerance constants for tol = tol_scale * C * (h^2 + dt^2). Fixed
// against sphere and perturbed-sphere baselines and then left alone: the
// worst normalized speed-derivative noise observed was ~490 (h^2 + dt^2) and
// the evolution-identity residual ~320 (h^2 + dt^2) on amplitude-0.05 mode-3
// data; spatial-only quantities sit orders of magnitude below their bands.
constexpr double kCHarnack = 1000.0;
constexpr double kCCorner = 1000.0;
constexpr double kCRate = 1000.0;
constexpr double kCMonotone = 500.0;
constexpr double kCEvolution = 600.0;
constexpr double kCFloor = 10.0;

double tol_for(MonitorId id, double scale, double h, double dt) {
  double c = 0.0;
  switch (id) {
    case MonitorId::HarnackHp:
    case MonitorId::HarnackPinched:
      c = kCHarnack;
      break;
    case MonitorId::HarnackCorner:
      c = kCCorner;
      break;
    case MonitorId::RateFloor:
      c = kCRate;
      break;
    case MonitorId::RateMonotone:
      c = kCMonotone;
      break;
    case MonitorId::HEvolution:
      c = kCEvolution;
      break;
    case MonitorId::KappaFloor:
      c = kCFloor;
      break;
    case MonitorId::HMinMonotone:
      c = 0.0;  // fixed-form tolerance, handled by its check
      break;
  }
  return scale * c * (h * h + dt * dt);
}

// Tracks the single worst margin of an inequality "value >= -tol".
struct WorstMargin {
  double margin = kInf;  // value + tol, negative = violation
  double value = 0.0;
  double tol = 0.0;
  double t = 0.0;

  void feed(double v, double tolerance, double time) {
    if (v + tolerance < margin) {
      margin = v + tolerance;
      value = v;
      tol = tolerance;
      t = time;
    }
  }
  bool pass() const { return margin >= 0.0; }
};

std::string describe(const WorstMargin& w, const char* what) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s worst %.3e (tol %.3e) at t=%.6g", what, w.value, w.tol,
                w.t);
  return buf;
}

}  // namespace

MaterialDerivative material_dtf(const Snapshot& prev, const Snapshot& now, const Snapshot& next) {
  const auto N = now.fields.f.size();
  if (prev.fields.f.size() != N || next.fields.f.size() != N)
    throw WindowViolation("material_dtf: node identity broken inside a measurement triple");
  const double dt1 = now.t - prev.t;
  const double dt2 = next.t - now.t;
  if (!(dt1 > 0.0) || !(dt2 > 0.0) || std::abs(dt1 - dt2) > 1e-9 * std::max(dt1, dt2))
    throw WindowViolation("material_dtf: non-uniform time spacing inside a measurement triple");

  MaterialDerivative out;
  out.dt = 0.5 * (dt1 + dt2);
  out.dtf = (next.fields.f - prev.fields.f) / (2.0 * out.dt);
  // spread of forward and backward quotients, ~ dt |f''| / 2
  out.err = ((next.fields.f - 2.0 * now.fields.f + prev.fields.f) / (2.0 * out.dt)).abs();
  return out;
}

double coupling_point(const CurvatureFunction& F, double p, double K, double km, double kr) {
  const double Fv = F.value_rot(km, kr);
  return p * K * std::pow(Fv, p - 1.0) * F.grad_sum_rot(km, kr);
}

double remainder_point(const CurvatureFunction& F, double p, double K, double km, double kr,
                       double V2) {
  const double Fv = F.value_rot(km, kr);
  const double f = std::pow(Fv, p);
  const double F1 = F.grad_rot(km, kr).first;
  return (1.0 - p) * K * V2 + (2.0 * p / Fv) * K * (Fv * (f * f + V2) - F1 * km * V2);
}

std::optional<std::pair<double, double>> rate_floor_roots(double S, double R, double p) {
  const double disc = 0.5 * (1.0 - p) * S * S - 0.25 * p * (p + 1.0) * R;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double c = 2.0 / (p + 1.0);
  return std::make_pair(c * (S - root), c * (S + root));
}

double rate_beta_bound(double S, double R, double p) {
  const double cap = 2.0 * S / (p + 1.0);
  const auto roots = rate_floor_roots(S, R, p);
  return roots ? std::min(cap, roots->first) : cap;
}

HarnackDiagnostics harnack_diagnostics(const Snapshot& prev, const Snapshot& now,
                                       const Snapshot& next, const CurvatureFunction& F,
                                       double p) {
  MaterialDerivative md = material_dtf(prev, now, next);
  const GeometryFields& gf = now.fields;
  const int N = static_cast<int>(gf.f.size());
  const double K = now.curve.space.K;
  const double t = now.t;

  HarnackDiagnostics d;
  d.t = t;
  d.dt = md.dt;
  d.dtf = std::move(md.dtf);
  d.dtf_err = std::move(md.err);
  d.u = (d.dtf - gf.b_grad_f) / gf.f;
  d.coupling.resize(N);
  d.remainder.resize(N);
  d.pinch.resize(N);
  d.slack_harnack = d.dtf - gf.b_grad_f + (p / ((p + 1.0) * t)) * gf.f;
  if (p == 1.0) {
    const double corner = F.corner_value();
    d.slack_corner = d.dtf - gf.b_grad_f - corner * K * gf.F_val + gf.F_val / (2.0 * t);
  }

  d.beta_bound = kInf;
  for (int i = 0; i < N; ++i) {
    const double km = gf.kappa_prof[i], kr = gf.kappa_rot[i];
    const double V2 = gf.ds_f[i] * gf.ds_f[i] / (km * km);
    d.coupling[i] = coupling_point(F, p, K, km, kr);
    d.remainder[i] = remainder_point(F, p, K, km, kr, V2);
    d.pinch[i] = pinching_deficit(F, gf.kappa_vec(i), p);
    d.beta_bound = std::min(d.beta_bound, rate_beta_bound(d.coupling[i], d.remainder[i], p));
  }
  return d;
}

Eigen::ArrayXd h_evolution_residual(const Snapshot& prev, const Snapshot& now,
                                    const Snapshot& next) {
  const auto N = now.fields.H.size();
  if (prev.fields.H.size() != N || next.fields.H.size() != N)
    throw WindowViolation("h_evolution_residual: node identity broken");
  const double dt1 = now.t - prev.t, dt2 = next.t - now.t;
  if (!(dt1 > 0.0) || std::abs(dt1 - dt2) > 1e-9 * std::max(dt1, dt2))
    throw WindowViolation("h_evolution_residual: non-uniform time spacing");

  const GeometryFields& gf = now.fields;
  const double K = now.curve.space.K;
  const int n = gf.n;
  const ArrayXd dtH = (next.fields.H - prev.fields.H) / (dt1 + dt2);
  const ArrayXd lap = laplacian_scalar(now.curve, gf.H);
  const ArrayXd a2 = gf.kappa_prof.square() + (n - 1) * gf.kappa_rot.square();
  return dtH - lap - (a2 + n * K) * gf.H;
}

MonitorId parse_monitor(std::string_view name) {
  if (name == "harnack_hp") return MonitorId::HarnackHp;
  if (name == "harnack_pinched") return MonitorId::HarnackPinched;
  if (name == "harnack_corner") return MonitorId::HarnackCorner;
  if (name == "rate_floor") return MonitorId::RateFloor;
  if (name == "rate_monotone") return MonitorId::RateMonotone;
  if (name == "kappa_floor") return MonitorId::KappaFloor;
  if (name == "h_evolution") return MonitorId::HEvolution;
  if (name == "h_min_monotone") return MonitorId::HMinMonotone;
  throw ConfigError("unknown monitor: " + std::string(name));
}

std::string monitor_name(MonitorId id) {
  switch (id) {
    case MonitorId::HarnackHp: return "harnack_hp";
    case MonitorId::HarnackPinched: return "harnack_pinched";
    case MonitorId::HarnackCorner: return "harnack_corner";
    case MonitorId::RateFloor: return "rate_floor";
    case MonitorId::RateMonotone: return "rate_monotone";
    case MonitorId::KappaFloor: return "kappa_floor";
    case MonitorId::HEvolution: return "h_evolution";
    case MonitorId::HMinMonotone: return "h_min_monotone";
  }
  return "?";
}

bool MonitorReport::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

const MonitorVerdict* MonitorReport::find(MonitorId id) const {
  for (const auto& v : verdicts)
    if (v.id == id) return &v;
  return nullptr;
}

RunMonitor::RunMonitor(const SpaceForm& space, const CurvatureFunction& F, double p,
                       MonitorConfig cfg)
    : space_(space), F_(F), p_(p), cfg_(std::move(cfg)) {
  const bool is_mean = F_.kind() == CurvatureFunction::Kind::Mean;
  for (MonitorId id : cfg_.monitors) {
    switch (id) {
      case MonitorId::HarnackHp:
        if (!is_mean || !(p_ > 0.0 && p_ < 1.0) || !(space_.K > 0.0))
          throw ConfigError("harnack_hp requires the mean flow with 0 < p < 1 and K > 0");
        break;
      case MonitorId::HarnackPinched:
        if (!(p_ > 1.0) || !(space_.K > 0.0))
          throw ConfigError("harnack_pinched requires p > 1 and K > 0");
        break;
      case MonitorId::HarnackCorner:
        if (p_ != 1.0 || !(space_.K > 0.0))
          throw ConfigError("harnack_corner requires p = 1 and K > 0");
        break;
      case MonitorId::RateFloor:
        break;
      case MonitorId::RateMonotone:
        if (!is_mean || p_ != 1.0)
          throw ConfigError("rate_monotone requires the mean flow with p = 1");
        break;
      case MonitorId::KappaFloor:
        if (!is_mean || !(p_ > 0.0 && p_ < 1.0))
          throw ConfigError("kappa_floor requires the mean flow with 0 < p < 1");
        break;
      case MonitorId::HEvolution:
        if (!is_mean || p_ != 1.0)
          throw ConfigError("h_evolution requires the mean flow with p = 1");
        break;
      case MonitorId::HMinMonotone:
        if (!is_mean) throw ConfigError("h_min_monotone requires the mean flow");
        break;
    }
  }
}

bool RunMonitor::wants(MonitorId id) const {
  return std::find(cfg_.monitors.begin(), cfg_.monitors.end(), id) != cfg_.monitors.end();
}

void RunMonitor::begin(const Snapshot& initial) {
  const GeometryFields& gf = initial.fields;
  initial_min_kappa1_ = gf.kappa_prof.min(gf.kappa_rot).minCoeff();
  initial_tilde_h_max_ =
      (1.0 / gf.kappa_prof + (gf.n - 1) / gf.kappa_rot).maxCoeff();
  begun_ = true;
}

void RunMonitor::on_triple(const Snapshot& prev, const Snapshot& now, const Snapshot& next,
                           bool fresh) {
  if (!begun_) throw WindowViolation("RunMonitor: on_triple before begin");
  HarnackDiagnostics d = harnack_diagnostics(prev, now, next, F_, p_);
  const GeometryFields& gf = now.fields;
  const int N = static_cast<int>(gf.f.size());

  SeriesRow row;
  row.t = d.t;
  row.dt = d.dt;
  row.h = gf.max_spacing;
  row.slack_harnack_min = d.slack_harnack.minCoeff();
  row.slack_corner_min = p_ == 1.0 ? d.slack_corner.minCoeff() : kNaN;
  row.rate_slack_min = kNaN;  // needs the run-global beta
  row.pinch_min = d.pinch.minCoeff();
  row.coupling_min = d.coupling.minCoeff();
  row.remainder_min = d.remainder.minCoeff();
  row.kappa1_min = gf.kappa_prof.min(gf.kappa_rot).minCoeff();
  row.tilde_h_max = (1.0 / gf.kappa_prof + (gf.n - 1) / gf.kappa_rot).maxCoeff();
  row.h_min = gf.H.minCoeff();
  row.h_max = gf.H.maxCoeff();
  row.u_min = d.u.minCoeff();
  row.beta_bound = d.beta_bound;
  row.dtf_err_max = d.dtf_err.maxCoeff();
  row.residual_max = kNaN;
  if (wants(MonitorId::HEvolution))
    row.residual_max = h_evolution_residual(prev, now, next).abs().maxCoeff();

  int pinched = 0;
  double in_force_min = kInf;
  for (int i = 0; i < N; ++i) {
    if (d.pinch[i] >= 0.0) {
      ++pinched;
      in_force_min = std::min(in_force_min, d.slack_harnack[i]);
    }
  }
  total_nodes_measured_ += N;
  pinched_nodes_ += pinched;
  row.coverage = static_cast<double>(pinched) / N;
  if (wants(MonitorId::HarnackPinched))
    row.slack_harnack_min = pinched > 0 ? in_force_min : kNaN;

  if (wants(MonitorId::RateMonotone)) {
    // The minimum principle pushes min u up; individual material tracks may
    // still dip (a flattened spot rounding out sends its u from huge back to
    // generic values), so only the spatial minimum is monitored. The min is
    // also parametrisation independent, which keeps regrids harmless.
    const double tol = tol_for(MonitorId::RateMonotone, cfg_.tol_scale, row.h, row.dt);
    if (!fresh && have_prev_u_) {
      const double drop = prev_u_min_ - row.u_min;
      if (drop > worst_monotone_drop_) {
        worst_monotone_drop_ = drop;
        worst_monotone_tol_ = tol;
      }
      prev_u_min_ = std::max(prev_u_min_, row.u_min);
    } else {
      prev_u_min_ = row.u_min;
    }
    have_prev_u_ = true;
  }

  rows_.push_back(row);
}

MonitorReport RunMonitor::finish() {
  MonitorReport rep;
  rep.measurements = static_cast<long>(rows_.size());
  rep.coverage =
      total_nodes_measured_ > 0
          ? static_cast<double>(pinched_nodes_) / static_cast<double>(total_nodes_measured_)
          : 1.0;

  // Run-global rate floor and the slack series it implies.
  double beta = kInf;
  for (const SeriesRow& r : rows_) beta = std::min(beta, r.beta_bound);
  rep.beta = rows_.empty() ? 0.0 : beta;
  for (SeriesRow& r : rows_)
    r.rate_slack_min = r.u_min - rep.beta + p_ / ((p_ + 1.0) * r.t);

  for (MonitorId id : cfg_.monitors) {
    MonitorVerdict v;
    v.id = id;
    WorstMargin w;
    switch (id) {
      case MonitorId::HarnackHp:
      case MonitorId::HarnackPinched: {
        for (const SeriesRow& r : rows_) {
          if (std::isnan(r.slack_harnack_min)) continue;  // no in-force nodes at this time
          w.feed(r.slack_harnack_min, tol_for(id, cfg_.tol_scale, r.h, r.dt), r.t);
        }
        v.detail = describe(w, "harnack slack");
        if (id == MonitorId::HarnackPinched) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "; coverage %.4f", rep.coverage);
          v.detail += buf;
        }
        break;
      }
      case MonitorId::HarnackCorner: {
        for (const SeriesRow& r : rows_) {
          const double tol = tol_for(id, cfg_.tol_scale, r.h, r.dt);
          w.feed(r.slack_corner_min, tol, r.t);
          w.feed(r.coupling_min - F_.corner_value() * space_.K, tol, r.t);
        }
        v.detail = describe(w, "corner slack / coupling floor");
        break;
      }
      case MonitorId::RateFloor: {
        for (const SeriesRow& r : rows_)
          w.feed(r.rate_slack_min, tol_for(id, cfg_.tol_scale, r.h, r.dt), r.t);
        char buf[64];
        std::snprintf(buf, sizeof(buf), " (beta %.6g)", rep.beta);
        v.detail = describe(w, "rate slack") + buf;
        break;
      }
      case MonitorId::RateMonotone: {
        w.feed(-worst_monotone_drop_, worst_monotone_tol_, 0.0);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "largest rate drop %.3e (tol %.3e)",
                      worst_monotone_drop_, worst_monotone_tol_);
        v.detail = buf;
        break;
      }
      case MonitorId::KappaFloor: {
        const double floor = initial_min_kappa1_ / space_.n();
        for (const SeriesRow& r : rows_)
          w.feed(r.kappa1_min - floor, tol_for(id, cfg_.tol_scale, r.h, r.dt), r.t);
        char buf[96];
        std::snprintf(buf, sizeof(buf), " (floor %.6g = initial %.6g / n)", floor,
                      initial_min_kappa1_);
        v.detail = describe(w, "kappa floor margin") + buf;
        break;
      }
      case MonitorId::HEvolution: {
        for (const SeriesRow& r : rows_)
          w.feed(-r.residual_max, tol_for(id, cfg_.tol_scale, r.h, r.dt), r.t);
        v.detail = describe(w, "negated evolution residual");
        break;
      }
      case MonitorId::HMinMonotone: {
        double h_scale = 0.0;
        for (const SeriesRow& r : rows_) h_scale = std::max(h_scale, r.h_max);
        const double tol = 1e-6 * h_scale;
        double running = -kInf;
        for (const SeriesRow& r : rows_) {
          w.feed(r.h_min - running, tol, r.t);
          running = std::max(running, r.h_min);
        }
        v.detail = describe(w, "min H vs running max");
        break;
      }
    }
    v.pass = w.pass();
    v.worst = w.value;
    v.tol = w.tol;
    rep.verdicts.push_back(std::move(v));
  }
  return rep;
}

}  // namespace hflow
