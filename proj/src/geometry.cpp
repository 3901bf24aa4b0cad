#include "harnackflow/geometry.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>

#include "harnackflow/errors.hpp"
#include "harnackflow/gridmath.hpp"

namespace hflow {

using grid::Reflect;
using Eigen::ArrayXd;

Eigen::VectorXd GeometryFields::kappa_vec(int i) const {
  Eigen::VectorXd k(n);
  k[0] = kappa_prof[i];
  for (int j = 1; j < n; ++j) k[j] = kappa_rot[i];
  return k;
}

// Meridian geometry in the orbit-space chart. With unit-speed parameter s and
// frame (e_rho, e_alpha/m), the outward normal of a curve ordered by
// increasing alpha is nu = (m a', -r'/m)/v, and
//   kappa_prof = [ m (r' a'' - a' r'') + m' a' (m^2 a'^2 + 2 r'^2) ] / v^3
//   kappa_rot  = [ m m' sin(alpha) a' - cos(alpha) r' ] / (v m sin(alpha))
// (geodesic curvature against nu, and <grad w, nu>/w). Both give cot-type
// values > 0 on geodesic spheres; kappa_rot degenerates to kappa_prof at the
// axis (umbilic limit).
GeometryFields compute_fields(const ProfileCurve& c, const CurvatureFunction& F, double p) {
  const int N = c.nodes();
  const int n = c.n();
  const OrbitMetric g = c.metric();

  const ArrayXd rp = grid::pad2(c.rho, Reflect::Even, Reflect::Even);
  const ArrayXd ap = grid::pad2(c.alpha, Reflect::Odd, Reflect::Odd);
  const ArrayXd r1 = grid::d1_4(rp), r2 = grid::d2_4(rp);
  const ArrayXd a1 = grid::d1_4(ap), a2 = grid::d2_4(ap);

  ArrayXd m(N), dm(N);
  for (int i = 0; i < N; ++i) {
    m[i] = g.m(c.rho[i]);
    dm[i] = g.dm(c.rho[i]);
  }

  GeometryFields out;
  out.n = n;
  out.p = p;

  const ArrayXd v2 = r1.square() + m.square() * a1.square();
  out.speed = v2.sqrt();
  for (int i = 0; i < N; ++i)
    if (!(out.speed[i] > 1e-300))
      throw ResolutionError(i, "compute_fields: meridian not resolved at node " +
                                   std::to_string(i));
  const ArrayXd v3 = v2 * out.speed;

  out.kappa_prof =
      (m * (r1 * a2 - a1 * r2) + dm * a1 * (m.square() * a1.square() + 2.0 * r1.square())) / v3;

  const ArrayXd sin_a = c.alpha.sin();
  const ArrayXd cos_a = c.alpha.cos();
  out.kappa_rot.resize(N);
  for (int i = 0; i < N; ++i) {
    if (i == 0 || i == N - 1) {
      out.kappa_rot[i] = out.kappa_prof[i];  // umbilic limit on the axis
    } else {
      out.kappa_rot[i] = (m[i] * dm[i] * sin_a[i] * a1[i] - cos_a[i] * r1[i]) /
                         (out.speed[i] * m[i] * sin_a[i]);
    }
  }

  for (int i = 0; i < N; ++i) {
    const double k = std::min(out.kappa_prof[i], out.kappa_rot[i]);
    if (!(k > 0.0) || !std::isfinite(k))
      throw ConvexityLost(i, std::numeric_limits<double>::quiet_NaN(), k,
                          "strict convexity lost at node " + std::to_string(i));
  }

  out.H = out.kappa_prof + (n - 1) * out.kappa_rot;
  out.F_val.resize(N);
  for (int i = 0; i < N; ++i) out.F_val[i] = F.value_rot(out.kappa_prof[i], out.kappa_rot[i]);
  if (p == 1.0)
    out.f = out.F_val;
  else
    out.f = out.F_val.pow(p);

  out.nu_rho = m * a1 / out.speed;
  out.nu_alpha = -r1 / (out.speed * m);

  const ArrayXd fp = grid::pad2(out.f, Reflect::Even, Reflect::Even);
  out.ds_f = grid::d1_4(fp) / out.speed;
  out.ds_f[0] = 0.0;
  out.ds_f[N - 1] = 0.0;
  out.b_grad_f = out.ds_f.square() / out.kappa_prof;

  // validate() guarantees alpha hits the axis exactly at both ends, so the
  // warp vanishes there; sin(pi) in floating point does not, so pin it.
  out.w = m * sin_a;
  out.w[0] = 0.0;
  out.w[N - 1] = 0.0;
  const ArrayXd vp = grid::pad2(out.speed, Reflect::Even, Reflect::Even);
  out.s = grid::cumulative_length(out.speed, grid::d1_4(vp));
  out.length = out.s[N - 1];

  out.min_spacing = std::numeric_limits<double>::infinity();
  out.max_spacing = 0.0;
  for (int i = 0; i + 1 < N; ++i) {
    const double ds = out.s[i + 1] - out.s[i];
    out.min_spacing = std::min(out.min_spacing, ds);
    out.max_spacing = std::max(out.max_spacing, ds);
  }
  return out;
}

Eigen::ArrayXd laplacian_scalar(const ProfileCurve& c, const Eigen::ArrayXd& psi) {
  const int N = c.nodes();
  const int n = c.n();
  if (psi.size() != N) throw std::invalid_argument("laplacian_scalar: psi size mismatch");
  const OrbitMetric g = c.metric();

  const ArrayXd rp = grid::pad2(c.rho, Reflect::Even, Reflect::Even);
  const ArrayXd ap = grid::pad2(c.alpha, Reflect::Odd, Reflect::Odd);
  const ArrayXd r1 = grid::d1_4(rp);
  const ArrayXd a1 = grid::d1_4(ap);
  ArrayXd m(N);
  for (int i = 0; i < N; ++i) m[i] = g.m(c.rho[i]);
  const ArrayXd v = (r1.square() + m.square() * a1.square()).sqrt();

  const ArrayXd pp = grid::pad2(psi, Reflect::Even, Reflect::Even);
  const ArrayXd p1 = grid::d1_2(pp);
  const ArrayXd p2 = grid::d2_2(pp);
  const ArrayXd vpad = grid::pad2(v, Reflect::Even, Reflect::Even);
  const ArrayXd v1 = grid::d1_2(vpad);

  const ArrayXd psi_s = p1 / v;
  const ArrayXd psi_ss = (p2 - p1 * v1 / v) / v.square();

  const ArrayXd w = m * c.alpha.sin();
  ArrayXd wfix = w;
  wfix[0] = wfix[N - 1] = 0.0;  // exact on the axis
  const ArrayXd wp = grid::pad2(wfix, Reflect::Odd, Reflect::Odd);
  const ArrayXd w1 = grid::d1_2(wp);

  ArrayXd lap(N);
  for (int i = 0; i < N; ++i) {
    if (i == 0 || i == N - 1)
      lap[i] = n * psi_ss[i];  // pole limit
    else
      lap[i] = psi_ss[i] + (n - 1) * (w1[i] / (v[i] * w[i])) * psi_s[i];
  }
  return lap;
}

// --- embedding oracle -------------------------------------------------------
//
// Flat embedding of one meridian point together with one orbit direction.
// K > 0:  X = (cs(rho), sn(rho) cos(alpha), sn(rho) sin(alpha) cos(u),
//              sn(rho) sin(alpha) sin(u)) / scaled by 1/sqrt(K), in R^4;
// K = 0:  X = (rho cos(alpha), rho sin(alpha) cos(u), rho sin(alpha) sin(u))
// with u the orbit angle. Second fundamental form h_ij = -<X_ij, nu> against
// the unit normal nu orthogonal to X_xi, X_u (and to X itself when K > 0),
// oriented outward via <nu, X - C> > 0 for the pole C. Everything below is
// plain finite differences of X; no shared code with compute_fields.
namespace {

using Vec4 = Eigen::Vector4d;

Vec4 embed(const OrbitMetric& g, double rho, double alpha, double u) {
  if (g.K == 0.0)
    return {rho * std::cos(alpha), rho * std::sin(alpha) * std::cos(u),
            rho * std::sin(alpha) * std::sin(u), 0.0};
  const double rk = std::sqrt(g.K);
  const double R = 1.0 / rk;
  return {R * std::cos(rk * rho), R * std::sin(rk * rho) * std::cos(alpha),
          R * std::sin(rk * rho) * std::sin(alpha) * std::cos(u),
          R * std::sin(rk * rho) * std::sin(alpha) * std::sin(u)};
}

// Unit vector orthogonal to the span of the given vectors, via Gram-Schmidt on
// the standard basis.
Vec4 unit_orthogonal(std::initializer_list<Vec4> span) {
  Eigen::Matrix<double, 4, Eigen::Dynamic> B(4, span.size());
  int c = 0;
  for (const auto& v : span) B.col(c++) = v.normalized();
  for (int e = 0; e < 4; ++e) {
    Vec4 cand = Vec4::Unit(e);
    for (int k = 0; k < c; ++k) cand -= cand.dot(B.col(k)) * B.col(k);
    // second pass for numerical orthogonality
    for (int k = 0; k < c; ++k) cand -= cand.dot(B.col(k)) * B.col(k);
    if (cand.norm() > 1e-6) return cand.normalized();
  }
  throw std::runtime_error("fd_embedding_oracle: degenerate tangent space");
}

}  // namespace

EmbeddingCurvatures fd_embedding_oracle(const ProfileCurve& c) {
  const int N = c.nodes();
  const OrbitMetric g = c.metric();

  const ArrayXd rp = grid::pad2(c.rho, Reflect::Even, Reflect::Even);
  const ArrayXd ap = grid::pad2(c.alpha, Reflect::Odd, Reflect::Odd);

  // Mean spacing sets the orbit-direction step so both directions refine
  // together under mesh refinement.
  double mean_sp = 0.0;
  for (int i = 0; i + 1 < N; ++i) {
    const Vec4 a = embed(g, c.rho[i], c.alpha[i], 0.0);
    const Vec4 b = embed(g, c.rho[i + 1], c.alpha[i + 1], 0.0);
    mean_sp += (b - a).norm();
  }
  mean_sp /= (N - 1);

  const Vec4 pole = embed(g, g.K == 0.0 ? 0.0 : 1e-14, 1e-14, 0.0);

  EmbeddingCurvatures out;
  out.kappa_prof.resize(N);
  out.kappa_rot.resize(N);

  for (int i = 0; i < N; ++i) {
    const int j = i + 2;  // padded index
    const Vec4 Xm = embed(g, rp[j - 1], ap[j - 1], 0.0);
    const Vec4 X0 = embed(g, rp[j], ap[j], 0.0);
    const Vec4 Xp = embed(g, rp[j + 1], ap[j + 1], 0.0);
    const Vec4 Xxi = 0.5 * (Xp - Xm);
    const Vec4 Xxixi = Xp - 2.0 * X0 + Xm;

    const bool on_axis = (i == 0 || i == N - 1);

    Vec4 nu;
    double kp, kr;
    if (!on_axis) {
      // The orbit circle is exactly A + B cos u + C sin u, so a fixed angular
      // step gives a uniform relative truncation error; tying it to the mesh
      // spacing makes both directions refine at the same rate.
      const double du = std::min(mean_sp, 0.5);
      const Vec4 Xu_p = embed(g, c.rho[i], c.alpha[i], du);
      const Vec4 Xu_m = embed(g, c.rho[i], c.alpha[i], -du);
      const Vec4 Xu = (Xu_p - Xu_m) / (2.0 * du);
      const Vec4 Xuu = (Xu_p - 2.0 * X0 + Xu_m) / (du * du);

      nu = g.K > 0.0 ? unit_orthogonal({X0, Xxi, Xu}) : unit_orthogonal({Xxi, Xu});
      if (nu.dot(X0 - pole) < 0.0) nu = -nu;

      const double g11 = Xxi.squaredNorm();
      const double g22 = Xu.squaredNorm();
      kp = -Xxixi.dot(nu) / g11;
      kr = -Xuu.dot(nu) / g22;
    } else {
      nu = g.K > 0.0 ? unit_orthogonal({X0, Xxi}) : unit_orthogonal({Xxi});
      // the second orthogonal direction at the axis is the orbit limit; the
      // hypersurface is umbilic there, so report the meridian value twice
      if (g.K == 0.0) {
        // in R^3 the complement of Xxi is 2-dimensional; remove the orbit
        // direction e_z (orbit circle collapses on the axis, normal has no
        // z-component by symmetry)
        Vec4 t = Xxi.normalized();
        Vec4 cand = Vec4::Unit(0) - Vec4::Unit(0).dot(t) * t;
        cand[2] = 0.0;
        cand -= cand.dot(t) * t;
        if (cand.norm() < 1e-8) {
          cand = Vec4::Unit(1) - Vec4::Unit(1).dot(t) * t;
          cand[2] = 0.0;
          cand -= cand.dot(t) * t;
        }
        nu = cand.normalized();
      } else {
        Vec4 t = Xxi.normalized();
        Vec4 x0n = X0.normalized();
        Vec4 cand = Vec4::Zero();
        for (int e = 0; e < 3; ++e) {  // normal stays out of the orbit plane (e4)
          Vec4 trial = Vec4::Unit(e) - Vec4::Unit(e).dot(t) * t;
          trial -= trial.dot(x0n) * x0n;
          trial[3] = 0.0;
          trial -= trial.dot(t) * t;
          trial -= trial.dot(x0n) * x0n;
          if (trial.norm() > cand.norm()) cand = trial;
        }
        nu = cand.normalized();
      }
      if (nu.dot(X0 - pole) < 0.0) nu = -nu;
      const double g11 = Xxi.squaredNorm();
      kp = -Xxixi.dot(nu) / g11;
      kr = kp;
    }
    out.kappa_prof[i] = kp;
    out.kappa_rot[i] = kr;
  }
  return out;
}

}  // namespace hflow
