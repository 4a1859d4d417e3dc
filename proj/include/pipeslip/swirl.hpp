#pragma once

#include <Eigen/Dense>

#include "pipeslip/base_flow.hpp"
#include "pipeslip/radial.hpp"
#include "pipeslip/stream.hpp"

namespace pipeslip {

struct SwirlNormReport {
  double grad_sq = 0.0;   // int |(r v)'|^2 / r
  double xi2_l2_sq = 0.0; // xi^2 int |v|^2 r
  double u_l2_sq = 0.0;   // int U |v|^2 r
  double l2_sq = 0.0;     // int |v|^2 r
  double dz_l2 = 0.0;     // |xi| sqrt(l2_sq), the L2 norm of d_z v
  double h1 = 0.0;        // sqrt(l2_sq + grad_sq + xi2_l2_sq)
};

struct SwirlSolution {
  double xi = 0.0;
  Eigen::VectorXcd v_theta_hat;
  std::complex<double> boundary_trace;
  SwirlNormReport norms;
};

// Collocation matrix for  i xi U v - (L - xi^2) v  with row 0 replaced by
// v(0) = 0 and row n-1 by v'(1) - (1 - alpha) v(1) = 0; rows scaled to unit
// max-norm. alpha = 0 is allowed here.
Eigen::MatrixXcd assemble_swirl_operator(double xi, double alpha, const PoiseuilleProfile& profile,
                                         const RadialOperators& ops);

// Requires alpha > 0 and alpha equal to profile.params.alpha. At alpha = 0 and
// xi = 0 the homogeneous problem has the nontrivial solution v = c r; use
// nullspace_probe there.
SwirlSolution solve_swirl_mode(double xi, const Eigen::VectorXcd& f_theta_hat,
                               const PoiseuilleProfile& profile, const RadialOperators& ops,
                               double alpha);

SwirlNormReport swirl_norms(const Eigen::VectorXcd& v, double xi, const PoiseuilleProfile& profile,
                            const RadialOperators& ops);

IdentityGaps swirl_identity_residuals(const SwirlSolution& sol, const Eigen::VectorXcd& f_theta_hat,
                                      const PoiseuilleProfile& profile,
                                      const RadialOperators& ops);

struct NullspaceProbe {
  double sigma_min = 0.0;
  Eigen::VectorXcd null_vector;  // right singular vector, unit 2-norm
  // |<null_vector, r>| / (|null_vector| |r|) over the node samples
  double cosine_with_r = 0.0;
};

NullspaceProbe nullspace_probe(double xi, double alpha, const PoiseuilleProfile& profile,
                               const RadialOperators& ops);

// |v(0)| and |v'(1) - (1 - alpha) v(1)| relative to max |v|.
struct SwirlBoundaryResiduals {
  double axis = 0.0;
  double robin = 0.0;
};
SwirlBoundaryResiduals swirl_boundary_residuals(const SwirlSolution& sol, double alpha,
                                                const RadialOperators& ops);

}  // namespace pipeslip
