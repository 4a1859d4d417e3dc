#pragma once

#include <complex>
#include <memory>

#include <Eigen/Dense>

namespace pipeslip {

// Collocation grid on (0,1] with differentiation matrices, the singular
// operator L = d^2/dr^2 + (1/r) d/dr - 1/r^2 and quadrature rules.
//
// Nodes are the Chebyshev-Lobatto points of [0,1] with r = 0 removed:
//   r_j = sin^2(pi j / (2n)),  j = 1..n.
// All operators act on the degree n-1 polynomial interpolant through the
// nodes. Values at the axis are reached through `axis_row`.
struct RadialOperators {
  int n_points = 0;
  Eigen::VectorXd nodes;
  Eigen::MatrixXd d1;
  Eigen::MatrixXd d2;
  Eigen::MatrixXd l_op;
  // weights for  int_0^1 f(r) r dr
  Eigen::VectorXd quad_r;
  // weights for  int_0^1 f(r) / r dr,  exact when f = r * polynomial
  Eigen::VectorXd quad_inv_r;
  // weights for  int_0^1 f(r) dr
  Eigen::VectorXd quad_plain;
  // evaluates the interpolant at r = 0
  Eigen::RowVectorXd axis_row;
  Eigen::VectorXd bary_weights;

  int wall_index() const { return n_points - 1; }

  // barycentric evaluation matrix mapping node samples to values at `targets`
  Eigen::MatrixXd interpolation_matrix(const Eigen::VectorXd& targets) const;

  template <class Vec>
  auto integrate_r(const Vec& f) const {
    return quad_r.cast<typename Vec::Scalar>().dot(f);
  }
  template <class Vec>
  auto integrate_inv_r(const Vec& f) const {
    return quad_inv_r.cast<typename Vec::Scalar>().dot(f);
  }
  template <class Vec>
  auto integrate_plain(const Vec& f) const {
    return quad_plain.cast<typename Vec::Scalar>().dot(f);
  }
  template <class Vec>
  auto at_axis(const Vec& f) const {
    return axis_row.cast<typename Vec::Scalar>().dot(f);
  }
};

RadialOperators build_radial_operators(int n_points);

// Shared immutable operators, memoized per size. Thread-safe.
std::shared_ptr<const RadialOperators> radial_operators(int n_points);

double quad_inv_r(const RadialOperators& ops, const Eigen::VectorXd& f);
std::complex<double> quad_inv_r(const RadialOperators& ops, const Eigen::VectorXcd& f);
double quad_r(const RadialOperators& ops, const Eigen::VectorXd& f);
std::complex<double> quad_r(const RadialOperators& ops, const Eigen::VectorXcd& f);

// Samples of g on the nodes.
template <class F>
Eigen::VectorXd sample(const RadialOperators& ops, F&& g) {
  Eigen::VectorXd out(ops.n_points);
  for (int j = 0; j < ops.n_points; ++j) out[j] = g(ops.nodes[j]);
  return out;
}

template <class F>
Eigen::VectorXcd sample_complex(const RadialOperators& ops, F&& g) {
  Eigen::VectorXcd out(ops.n_points);
  for (int j = 0; j < ops.n_points; ++j) out[j] = g(ops.nodes[j]);
  return out;
}

// Smallest n allowed by build_radial_operators.
inline constexpr int min_radial_points = 8;

}  // namespace pipeslip
