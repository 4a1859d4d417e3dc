#include "pipeslip/stream.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pipeslip/error.hpp"

namespace pipeslip {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

void check_profile(const PoiseuilleProfile& profile, const RadialOperators& ops) {
  if (profile.u_bar.size() != ops.n_points || profile.du_bar.size() != ops.n_points) {
    throw std::invalid_argument("profile is not sampled on the operator grid");
  }
}

SolveContext context_of(double xi, const PoiseuilleProfile& profile, const RadialOperators& ops,
                        double cond) {
  return {profile.params.phi, xi, profile.params.alpha, ops.n_points, cond};
}

// (r g)' = g + r g'
Eigen::VectorXcd r_derivative(const Eigen::VectorXcd& g, const RadialOperators& ops) {
  Eigen::VectorXcd dg = ops.d1 * g;
  return g + ops.nodes.cast<cd>().cwiseProduct(dg);
}

void scale_rows(Eigen::MatrixXcd& m, Eigen::VectorXd& scale) {
  scale.resize(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double s = m.row(i).cwiseAbs().maxCoeff();
    scale[i] = (s > 0.0) ? 1.0 / s : 1.0;
    m.row(i) *= scale[i];
  }
}

}  // namespace

Eigen::VectorXcd ModeForcing::scalar_forcing(const RadialOperators& ops) const {
  Eigen::VectorXcd dfz = df_z_hat ? *df_z_hat : Eigen::VectorXcd(ops.d1.cast<cd>() * f_z_hat);
  return I * xi * f_r_hat - dfz;
}

double ModeForcing::norm(const RadialOperators& ops) const {
  const double s = ops.integrate_r(Eigen::VectorXd(f_r_hat.cwiseAbs2() + f_z_hat.cwiseAbs2()));
  return std::sqrt(std::max(s, 0.0));
}

void ModeForcing::validate(const RadialOperators& ops) const {
  if (!std::isfinite(xi)) throw std::invalid_argument("ModeForcing: xi must be finite");
  if (f_r_hat.size() != ops.n_points || f_z_hat.size() != ops.n_points ||
      (df_z_hat && df_z_hat->size() != ops.n_points)) {
    throw std::invalid_argument("ModeForcing: samples do not match the radial grid");
  }
  if (!f_r_hat.allFinite() || !f_z_hat.allFinite() || (df_z_hat && !df_z_hat->allFinite())) {
    throw std::invalid_argument("ModeForcing: non-finite forcing samples");
  }
}

Eigen::MatrixXcd assemble_mode_operator(double xi, const PoiseuilleProfile& profile,
                                        const RadialOperators& ops) {
  check_profile(profile, ops);
  const int n = ops.n_points;
  const double alpha = profile.params.alpha;
  Eigen::MatrixXcd shifted = ops.l_op.cast<cd>();
  shifted.diagonal().array() -= xi * xi;
  Eigen::MatrixXcd m = -(shifted * shifted);
  for (int i = 0; i < n; ++i) m.row(i) += I * xi * profile.u_bar[i] * shifted.row(i);

  m.row(0) = ops.axis_row.cast<cd>();
  m.row(1) = (ops.axis_row * ops.l_op).cast<cd>();
  m.row(n - 2) = (ops.l_op.row(n - 1) + alpha * ops.d1.row(n - 1)).cast<cd>();
  m.row(n - 1).setZero();
  m(n - 1, n - 1) = 1.0;
  Eigen::VectorXd scale;
  scale_rows(m, scale);
  return m;
}

BlockOperator assemble_block_operator(double xi, const PoiseuilleProfile& profile,
                                      const RadialOperators& ops) {
  check_profile(profile, ops);
  const int n = ops.n_points;
  const double alpha = profile.params.alpha;
  BlockOperator out;
  auto& m = out.matrix;
  m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);

  m.block(0, 0, 1, n) = ops.axis_row.cast<cd>();
  for (int i = 1; i < n; ++i) {
    m.block(i, 0, 1, n) = ops.l_op.row(i).cast<cd>();
    m(i, i) -= xi * xi;
    m(i, n + i) = -1.0;
  }
  m.block(n, n, 1, n) = ops.axis_row.cast<cd>();
  for (int i = 1; i <= n - 3; ++i) {
    m.block(n + i, n, 1, n) = -ops.l_op.row(i).cast<cd>();
    m(n + i, n + i) += xi * xi + I * xi * profile.u_bar[i];
  }
  m(2 * n - 2, 2 * n - 1) = 1.0;
  m.block(2 * n - 2, 0, 1, n) = (alpha * ops.d1.row(n - 1)).cast<cd>();
  m(2 * n - 1, n - 1) = 1.0;
  scale_rows(m, out.row_scale);
  return out;
}

double mode_operator_sigma_min(double xi, const PoiseuilleProfile& profile,
                               const RadialOperators& ops) {
  const auto block = assemble_block_operator(xi, profile, ops);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(block.matrix);
  return svd.singularValues().minCoeff();
}

Velocity recover_velocity(const Eigen::VectorXcd& psi_hat, double xi, const RadialOperators& ops) {
  if (psi_hat.size() != ops.n_points) {
    throw std::invalid_argument("recover_velocity: samples do not match the radial grid");
  }
  Velocity v;
  v.v_r_hat = I * xi * psi_hat;
  v.v_z_hat = -(psi_hat.cwiseQuotient(ops.nodes.cast<cd>()) + ops.d1.cast<cd>() * psi_hat);
  v.omega_hat = ops.l_op.cast<cd>() * psi_hat - xi * xi * psi_hat;
  return v;
}

Velocity recover_velocity(const StreamSolution& sol, const RadialOperators& ops) {
  return recover_velocity(sol.psi_hat, sol.xi, ops);
}

StreamNormReport stream_norms(const Eigen::VectorXcd& psi, double xi,
                              const PoiseuilleProfile& profile, const RadialOperators& ops) {
  check_profile(profile, ops);
  const int n = ops.n_points;
  const Eigen::VectorXcd lpsi = ops.l_op.cast<cd>() * psi;
  const Eigen::VectorXcd rpsi_d = r_derivative(psi, ops);
  const Eigen::VectorXcd rlpsi_d = r_derivative(lpsi, ops);
  const Eigen::VectorXd grad = rpsi_d.cwiseAbs2();
  const Eigen::VectorXd mod = psi.cwiseAbs2();
  const double x2 = xi * xi;

  StreamNormReport r;
  r.l_psi_sq = ops.integrate_r(Eigen::VectorXd(lpsi.cwiseAbs2()));
  r.grad_sq = ops.integrate_inv_r(grad);
  r.psi_sq = ops.integrate_r(mod);
  r.xi2_grad_sq = x2 * r.grad_sq;
  r.xi4_psi_sq = x2 * x2 * r.psi_sq;
  r.alpha_wall = profile.params.alpha * grad[n - 1];
  r.u_grad_sq = ops.integrate_inv_r(Eigen::VectorXd(profile.u_bar.cwiseProduct(grad)));
  r.u_psi_sq = ops.integrate_r(Eigen::VectorXd(profile.u_bar.cwiseProduct(mod)));
  r.grad_l_psi_sq = ops.integrate_inv_r(Eigen::VectorXd(rlpsi_d.cwiseAbs2()));

  r.v_r_l2 = std::abs(xi) * std::sqrt(r.psi_sq);
  r.v_z_l2 = std::sqrt(r.grad_sq);
  r.dz_v_z_l2 = std::abs(xi) * r.v_z_l2;
  const double l2_sq = x2 * r.psi_sq + r.grad_sq;
  // int |(L - xi^2) psi|^2 r = l_psi_sq + 2 xi^2 grad_sq + xi^4 psi_sq when psi(1) = 0
  const double vort_sq = r.l_psi_sq + 2.0 * r.xi2_grad_sq + r.xi4_psi_sq;
  const double grad_vort_sq =
      r.grad_l_psi_sq + x2 * r.l_psi_sq + x2 * r.xi2_grad_sq + x2 * r.xi4_psi_sq;
  r.l2 = std::sqrt(l2_sq);
  r.h1 = std::sqrt(l2_sq + vort_sq);
  r.h2 = std::sqrt(l2_sq + vort_sq + grad_vort_sq);
  return r;
}

StreamSolution solve_mode(const ModeForcing& forcing, const PoiseuilleProfile& profile,
                          const RadialOperators& ops) {
  check_profile(profile, ops);
  forcing.validate(ops);
  const int n = ops.n_points;
  const double xi = forcing.xi;
  const auto block = assemble_block_operator(xi, profile, ops);
  const Eigen::VectorXcd f = forcing.scalar_forcing(ops);

  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * n);
  for (int i = 1; i <= n - 3; ++i) rhs[n + i] = f[i] * block.row_scale[n + i];

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(block.matrix);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-15)) {
    throw NumericalError("stream mode operator is numerically singular",
                         context_of(xi, profile, ops, rcond > 0 ? 1.0 / rcond : INFINITY));
  }
  const Eigen::VectorXcd x = lu.solve(rhs);
  if (!x.allFinite()) {
    throw NumericalError("stream solve produced non-finite values",
                         context_of(xi, profile, ops, 1.0 / rcond));
  }

  StreamSolution sol;
  sol.xi = xi;
  sol.psi_hat = x.head(n);
  sol.omega_hat = x.tail(n);
  sol.v_r_hat = I * xi * sol.psi_hat;
  sol.v_z_hat = -r_derivative(sol.psi_hat, ops).cwiseQuotient(ops.nodes.cast<cd>());
  sol.norms = stream_norms(sol.psi_hat, xi, profile, ops);
  return sol;
}

IdentityGaps energy_identity_residuals(const StreamSolution& sol, const ModeForcing& forcing,
                                       const PoiseuilleProfile& profile,
                                       const RadialOperators& ops) {
  check_profile(profile, ops);
  const double xi = sol.xi;
  const auto& nr = sol.norms;
  const Eigen::VectorXcd f = forcing.scalar_forcing(ops);
  const Eigen::VectorXcd psi_conj = sol.psi_hat.conjugate();
  const cd f_psi = ops.integrate_r(Eigen::VectorXcd(f.cwiseProduct(psi_conj)));
  const cd coupling =
      ops.integrate_r(Eigen::VectorXcd(r_derivative(sol.psi_hat, ops).cwiseProduct(psi_conj)));
  const double c_alpha = wall_shear(profile.params);

  IdentityGaps gaps;
  {
    const double lhs = nr.l_psi_sq + 2.0 * nr.xi2_grad_sq + nr.xi4_psi_sq + nr.alpha_wall;
    const double t1 = -f_psi.real();
    const double t2 = -c_alpha * xi * coupling.imag();
    const double scale = std::max({std::abs(lhs), std::abs(t1), std::abs(t2)});
    gaps.real_gap = scale > 0.0 ? std::abs(lhs - t1 - t2) / scale : 0.0;
  }
  {
    const double a = xi * nr.u_grad_sq;
    const double b = xi * xi * xi * nr.u_psi_sq;
    const double rhs = -f_psi.imag();
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(rhs)});
    gaps.imag_gap = scale > 0.0 ? std::abs(a + b - rhs) / scale : 0.0;
  }
  return gaps;
}

double StreamBoundaryResiduals::max() const {
  return std::max({psi_axis, psi_wall, l_psi_axis, robin});
}

StreamBoundaryResiduals boundary_residuals(const StreamSolution& sol,
                                           const PoiseuilleProfile& profile,
                                           const RadialOperators& ops) {
  const int n = ops.n_points;
  const double x2 = sol.xi * sol.xi;
  const double scale = std::max(sol.psi_hat.cwiseAbs().maxCoeff(), 1e-300);
  // L psi = omega + xi^2 psi on the solved system
  const cd l_axis = ops.at_axis(sol.omega_hat) + x2 * ops.at_axis(sol.psi_hat);
  const cd l_wall = sol.omega_hat[n - 1] + x2 * sol.psi_hat[n - 1];
  const cd dpsi_wall = ops.d1.row(n - 1).cast<cd>().dot(sol.psi_hat);
  StreamBoundaryResiduals r;
  r.psi_axis = std::abs(ops.at_axis(sol.psi_hat)) / scale;
  r.psi_wall = std::abs(sol.psi_hat[n - 1]) / scale;
  r.l_psi_axis = std::abs(l_axis) / scale;
  r.robin = std::abs(l_wall + profile.params.alpha * dpsi_wall) / scale;
  return r;
}

}  // namespace pipeslip
