#pragma once

#include <Eigen/Core>

#include "harnackflow/curvature_function.hpp"
#include "harnackflow/profile.hpp"

namespace hflow {

// Pointwise geometry and speed data along the meridian. All arrays have one
// entry per node. The meridian direction is principal with curvature
// kappa_prof; the n-1 rotational directions share kappa_rot. At the axis
// endpoints kappa_rot carries its umbilic limit kappa_prof.
struct GeometryFields {
  Eigen::ArrayXd s;           // arclength from the alpha = 0 endpoint
  Eigen::ArrayXd w;           // orbit radius (warp) at the node
  Eigen::ArrayXd speed;       // |d gamma / d xi| on the index grid
  Eigen::ArrayXd nu_rho;      // outward unit normal, coordinate components
  Eigen::ArrayXd nu_alpha;
  Eigen::ArrayXd kappa_prof;
  Eigen::ArrayXd kappa_rot;
  Eigen::ArrayXd H;           // kappa_prof + (n-1) kappa_rot
  Eigen::ArrayXd F_val;       // F(kappa)
  Eigen::ArrayXd f;           // F^p, the normal speed
  Eigen::ArrayXd ds_f;        // arclength derivative of f
  Eigen::ArrayXd b_grad_f;    // b(grad f, grad f) = (ds_f)^2 / kappa_prof
  double length = 0.0;
  double min_spacing = 0.0;
  double max_spacing = 0.0;
  int n = 0;
  double p = 1.0;

  Eigen::VectorXd kappa_vec(int i) const;  // (kappa_prof, kappa_rot, ..., kappa_rot)
};

// Differentiates the node data and assembles all pointwise fields.
// 4th-order centered stencils with reflection ghosts; throws ConvexityLost when
// any principal curvature is <= 0 and ResolutionError when nodes coincide.
GeometryFields compute_fields(const ProfileCurve& c, const CurvatureFunction& F, double p);

// Laplace-Beltrami of a rotationally symmetric nodal scalar on the
// hypersurface: psi_ss + (n-1) (d/ds log w) psi_s, with limit n * psi_ss at
// the poles. 2nd-order centered stencils.
Eigen::ArrayXd laplacian_scalar(const ProfileCurve& c, const Eigen::ArrayXd& psi);

// Independent curvature reference: embeds the hypersurface in flat space and
// differentiates the embedding itself (2nd-order, meridian stencil over the
// nodes, orbit stencil matched to the node spacing). Shares nothing with
// compute_fields beyond the node positions. Intended for tests.
struct EmbeddingCurvatures {
  Eigen::ArrayXd kappa_prof;
  Eigen::ArrayXd kappa_rot;
};
EmbeddingCurvatures fd_embedding_oracle(const ProfileCurve& c);

}  // namespace hflow
