#include "pipeslip/swirl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pipeslip/error.hpp"

namespace pipeslip {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

Eigen::MatrixXcd unscaled_operator(double xi, double alpha, const PoiseuilleProfile& profile,
                                   const RadialOperators& ops) {
  if (profile.u_bar.size() != ops.n_points) {
    throw std::invalid_argument("profile is not sampled on the operator grid");
  }
  const int n = ops.n_points;
  Eigen::MatrixXcd m = -ops.l_op.cast<cd>();
  for (int i = 0; i < n; ++i) m(i, i) += xi * xi + I * xi * profile.u_bar[i];
  m.row(0) = ops.axis_row.cast<cd>();
  m.row(n - 1) = ops.d1.row(n - 1).cast<cd>();
  m(n - 1, n - 1) -= 1.0 - alpha;
  return m;
}

}  // namespace

Eigen::MatrixXcd assemble_swirl_operator(double xi, double alpha, const PoiseuilleProfile& profile,
                                         const RadialOperators& ops) {
  Eigen::MatrixXcd m = unscaled_operator(xi, alpha, profile, ops);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) /= m.row(i).cwiseAbs().maxCoeff();
  return m;
}

SwirlNormReport swirl_norms(const Eigen::VectorXcd& v, double xi, const PoiseuilleProfile& profile,
                            const RadialOperators& ops) {
  const Eigen::VectorXcd rv_d = v + ops.nodes.cast<cd>().cwiseProduct(ops.d1.cast<cd>() * v);
  const Eigen::VectorXd mod = v.cwiseAbs2();
  SwirlNormReport r;
  r.grad_sq = ops.integrate_inv_r(Eigen::VectorXd(rv_d.cwiseAbs2()));
  r.l2_sq = ops.integrate_r(mod);
  r.xi2_l2_sq = xi * xi * r.l2_sq;
  r.u_l2_sq = ops.integrate_r(Eigen::VectorXd(profile.u_bar.cwiseProduct(mod)));
  r.dz_l2 = std::abs(xi) * std::sqrt(r.l2_sq);
  r.h1 = std::sqrt(r.l2_sq + r.grad_sq + r.xi2_l2_sq);
  return r;
}

SwirlSolution solve_swirl_mode(double xi, const Eigen::VectorXcd& f_theta_hat,
                               const PoiseuilleProfile& profile, const RadialOperators& ops,
                               double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument(
        "solve_swirl_mode: alpha must be > 0; at alpha = 0 the swirl problem loses uniqueness "
        "(v = c r solves the homogeneous problem at xi = 0), use nullspace_probe");
  }
  if (alpha != profile.params.alpha) {
    throw std::invalid_argument("solve_swirl_mode: alpha differs from the base-flow profile");
  }
  if (f_theta_hat.size() != ops.n_points || !f_theta_hat.allFinite()) {
    throw std::invalid_argument("solve_swirl_mode: forcing samples invalid for the radial grid");
  }
  const int n = ops.n_points;
  Eigen::MatrixXcd m = unscaled_operator(xi, alpha, profile, ops);
  Eigen::VectorXcd rhs = f_theta_hat;
  rhs[0] = 0.0;
  rhs[n - 1] = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = m.row(i).cwiseAbs().maxCoeff();
    m.row(i) /= s;
    rhs[i] /= s;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const double rcond = lu.rcond();
  SolveContext ctx{profile.params.phi, xi, alpha, n, rcond > 0 ? 1.0 / rcond : INFINITY};
  if (!(rcond > 1e-15)) throw NumericalError("swirl operator is numerically singular", ctx);
  SwirlSolution sol;
  sol.xi = xi;
  sol.v_theta_hat = lu.solve(rhs);
  if (!sol.v_theta_hat.allFinite()) throw NumericalError("swirl solve produced non-finite values", ctx);
  sol.boundary_trace = sol.v_theta_hat[n - 1];
  sol.norms = swirl_norms(sol.v_theta_hat, xi, profile, ops);
  return sol;
}

IdentityGaps swirl_identity_residuals(const SwirlSolution& sol, const Eigen::VectorXcd& f_theta_hat,
                                      const PoiseuilleProfile& profile,
                                      const RadialOperators& ops) {
  const double alpha = profile.params.alpha;
  const cd fv = ops.integrate_r(Eigen::VectorXcd(f_theta_hat.cwiseProduct(sol.v_theta_hat.conjugate())));
  const auto& nr = sol.norms;
  const double wall = (alpha - 2.0) * std::norm(sol.boundary_trace);
  IdentityGaps gaps;
  {
    const double lhs = nr.grad_sq + wall + nr.xi2_l2_sq;
    const double scale = std::max({nr.grad_sq, std::abs(wall), nr.xi2_l2_sq, std::abs(fv.real())});
    gaps.real_gap = scale > 0.0 ? std::abs(lhs - fv.real()) / scale : 0.0;
  }
  {
    const double lhs = sol.xi * nr.u_l2_sq;
    const double scale = std::max(std::abs(lhs), std::abs(fv.imag()));
    gaps.imag_gap = scale > 0.0 ? std::abs(lhs - fv.imag()) / scale : 0.0;
  }
  return gaps;
}

NullspaceProbe nullspace_probe(double xi, double alpha, const PoiseuilleProfile& profile,
                               const RadialOperators& ops) {
  const Eigen::MatrixXcd m = assemble_swirl_operator(xi, alpha, profile, ops);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index k = 0;
  s.minCoeff(&k);
  NullspaceProbe out;
  out.sigma_min = s[k];
  out.null_vector = svd.matrixV().col(k);
  const Eigen::VectorXcd r = ops.nodes.cast<cd>();
  out.cosine_with_r = std::abs(r.dot(out.null_vector)) / (r.norm() * out.null_vector.norm());
  return out;
}

SwirlBoundaryResiduals swirl_boundary_residuals(const SwirlSolution& sol, double alpha,
                                                const RadialOperators& ops) {
  const int n = ops.n_points;
  const auto& v = sol.v_theta_hat;
  const double scale = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
  const cd dv = ops.d1.row(n - 1).cast<cd>().dot(v);
  SwirlBoundaryResiduals r;
  r.axis = std::abs(ops.at_axis(v)) / scale;
  r.robin = std::abs(dv - (1.0 - alpha) * v[n - 1]) / scale;
  return r;
}

}  // namespace pipeslip
