#pragma once

#include <optional>

#include <Eigen/Dense>

#include "pipeslip/base_flow.hpp"
#include "pipeslip/radial.hpp"

namespace pipeslip {

// Fourier-mode forcing (F^r, F^z) at axial frequency xi.
struct ModeForcing {
  double xi = 0.0;
  Eigen::VectorXcd f_r_hat;
  Eigen::VectorXcd f_z_hat;
  // d/dr F^z when known in closed form; otherwise d1 is applied to f_z_hat
  std::optional<Eigen::VectorXcd> df_z_hat;

  // f = i xi F^r - d/dr F^z
  Eigen::VectorXcd scalar_forcing(const RadialOperators& ops) const;
  // int (|F^r|^2 + |F^z|^2) r dr, square-rooted
  double norm(const RadialOperators& ops) const;
  void validate(const RadialOperators& ops) const;
};

// Scalars from the energy identities plus velocity norm proxies. All
// integrals are over (0,1); "grad" denotes |(r psi)'|^2 / r.
struct StreamNormReport {
  double l_psi_sq = 0.0;      // int |L psi|^2 r
  double grad_sq = 0.0;       // int |(r psi)'|^2 / r
  double psi_sq = 0.0;        // int |psi|^2 r
  double xi2_grad_sq = 0.0;   // xi^2 grad_sq
  double xi4_psi_sq = 0.0;    // xi^4 psi_sq
  double alpha_wall = 0.0;    // alpha |(r psi)'(1)|^2
  double u_grad_sq = 0.0;     // int U |(r psi)'|^2 / r
  double u_psi_sq = 0.0;      // int U |psi|^2 r
  double grad_l_psi_sq = 0.0; // int |(r L psi)'|^2 / r

  double v_r_l2 = 0.0;     // |xi| sqrt(psi_sq)
  double v_z_l2 = 0.0;     // sqrt(grad_sq)
  double dz_v_z_l2 = 0.0;  // |xi| sqrt(grad_sq)
  double l2 = 0.0;         // meridional velocity L2
  double h1 = 0.0;         // L2 + vorticity L2
  double h2 = 0.0;         // h1 + vorticity gradient
};

struct StreamSolution {
  double xi = 0.0;
  Eigen::VectorXcd psi_hat;
  Eigen::VectorXcd v_r_hat;
  Eigen::VectorXcd v_z_hat;
  Eigen::VectorXcd omega_hat;
  StreamNormReport norms;
};

struct Velocity {
  Eigen::VectorXcd v_r_hat;
  Eigen::VectorXcd v_z_hat;
  Eigen::VectorXcd omega_hat;
};

// Fourth-order collocation matrix for
//   i xi U (L - xi^2) psi - (L - xi^2)^2 psi
// with rows 0, 1 replaced by psi(0) = 0 and L psi(0) = 0, and rows n-2, n-1 by
// L psi(1) + alpha psi'(1) = 0 and psi(1) = 0. Every row is scaled to unit
// max-norm. Used for diagnostics; solve_mode uses the block system below.
Eigen::MatrixXcd assemble_mode_operator(double xi, const PoiseuilleProfile& profile,
                                        const RadialOperators& ops);

// Block stream/vorticity system in unknowns [psi; omega] (size 2n):
//   rows 0..n-1:   psi(0) = 0, then (L - xi^2) psi - omega = 0 at nodes 1..n-1
//   rows n..2n-1:  omega(0) = 0, then i xi U omega - (L - xi^2) omega = f at
//                  nodes 1..n-3, omega(1) + alpha psi'(1) = 0, psi(1) = 0
// Rows are scaled to unit max-norm; row_scale holds the applied factors.
struct BlockOperator {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd row_scale;
};
BlockOperator assemble_block_operator(double xi, const PoiseuilleProfile& profile,
                                      const RadialOperators& ops);

// Smallest singular value of the block operator.
double mode_operator_sigma_min(double xi, const PoiseuilleProfile& profile,
                               const RadialOperators& ops);

StreamSolution solve_mode(const ModeForcing& forcing, const PoiseuilleProfile& profile,
                          const RadialOperators& ops);

Velocity recover_velocity(const Eigen::VectorXcd& psi_hat, double xi, const RadialOperators& ops);
Velocity recover_velocity(const StreamSolution& sol, const RadialOperators& ops);

StreamNormReport stream_norms(const Eigen::VectorXcd& psi_hat, double xi,
                              const PoiseuilleProfile& profile, const RadialOperators& ops);

struct IdentityGaps {
  double real_gap = 0.0;
  double imag_gap = 0.0;
};

IdentityGaps energy_identity_residuals(const StreamSolution& sol, const ModeForcing& forcing,
                                       const PoiseuilleProfile& profile,
                                       const RadialOperators& ops);

// |psi(0)|, |psi(1)|, |L psi(0)|, |L psi(1) + alpha psi'(1)|, each divided by
// max |psi| (or 1 when psi = 0).
struct StreamBoundaryResiduals {
  double psi_axis = 0.0;
  double psi_wall = 0.0;
  double l_psi_axis = 0.0;
  double robin = 0.0;
  double max() const;
};
StreamBoundaryResiduals boundary_residuals(const StreamSolution& sol,
                                           const PoiseuilleProfile& profile,
                                           const RadialOperators& ops);

}  // namespace pipeslip
