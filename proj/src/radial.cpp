#include "pipeslip/radial.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pipeslip {

namespace {

// int_{-1}^{1} T_k(t) dt
double cheb_moment(int k) {
  if (k % 2 == 1) return 0.0;
  return 2.0 / (1.0 - double(k) * double(k));
}

}  // namespace

RadialOperators build_radial_operators(int n) {
  if (n < min_radial_points) {
    throw std::invalid_argument("build_radial_operators: n_points must be >= " +
                                std::to_string(min_radial_points) + ", got " +
                                std::to_string(n));
  }
  const double pi = std::numbers::pi;
  RadialOperators ops;
  ops.n_points = n;
  ops.nodes.resize(n);
  Eigen::VectorXd theta(n);
  for (int j = 0; j < n; ++j) {
    theta[j] = pi * double(j + 1) / (2.0 * n);
    const double s = std::sin(theta[j]);
    ops.nodes[j] = s * s;
  }
  ops.nodes[n - 1] = 1.0;

  // barycentric weights of the full Lobatto set restricted to r > 0:
  // the dropped node r = 0 contributes the factor (r_j - 0).
  ops.bary_weights.resize(n);
  for (int j = 0; j < n; ++j) {
    const int idx = j + 1;
    double w = (idx % 2 == 0) ? 1.0 : -1.0;
    if (idx == n) w *= 0.5;
    ops.bary_weights[j] = w * ops.nodes[j];
  }

  // r_i - r_j = sin(th_i + th_j) sin(th_i - th_j), free of cancellation
  auto diff = [&](int i, int j) {
    return std::sin(theta[i] + theta[j]) * std::sin(theta[i] - theta[j]);
  };

  const auto& w = ops.bary_weights;
  ops.d1 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      ops.d1(i, j) = (w[j] / w[i]) / diff(i, j);
      s += ops.d1(i, j);
    }
    ops.d1(i, i) = -s;
  }
  ops.d2 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      ops.d2(i, j) = 2.0 * ops.d1(i, j) * (ops.d1(i, i) - 1.0 / diff(i, j));
      s += ops.d2(i, j);
    }
    ops.d2(i, i) = -s;
  }
  ops.l_op = ops.d2;
  for (int i = 0; i < n; ++i) {
    const double r = ops.nodes[i];
    ops.l_op.row(i) += ops.d1.row(i) / r;
    ops.l_op(i, i) -= 1.0 / (r * r);
  }

  // axis row: barycentric formula at x = 0, where w_j / (0 - r_j) = -(-1)^j delta_j
  ops.axis_row.resize(n);
  {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      ops.axis_row[j] = -w[j] / ops.nodes[j];
      s += ops.axis_row[j];
    }
    ops.axis_row /= s;
  }

  // interpolatory quadrature: V^T q = moments, V_jk = T_k(2 r_j - 1)
  Eigen::MatrixXd vt(n, n);
  for (int j = 0; j < n; ++j) {
    const double phase = pi * double(j + 1) / double(n);
    for (int k = 0; k < n; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      vt(k, j) = sign * std::cos(double(k) * phase);
    }
  }
  Eigen::VectorXd mu_r(n), mu_plain(n);
  for (int k = 0; k < n; ++k) {
    const double ik = cheb_moment(k);
    const double jk = (k == 0) ? 0.0 : 0.5 * (cheb_moment(k + 1) + cheb_moment(std::abs(k - 1)));
    mu_r[k] = 0.25 * (jk + ik);
    mu_plain[k] = 0.5 * ik;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(vt);
  ops.quad_r = lu.solve(mu_r);
  ops.quad_plain = lu.solve(mu_plain);
  ops.quad_inv_r = ops.quad_plain.cwiseQuotient(ops.nodes);
  return ops;
}

Eigen::MatrixXd RadialOperators::interpolation_matrix(const Eigen::VectorXd& targets) const {
  const int m = static_cast<int>(targets.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, n_points);
  for (int i = 0; i < m; ++i) {
    const double x = targets[i];
    int hit = -1;
    for (int j = 0; j < n_points; ++j) {
      if (x == nodes[j]) {
        hit = j;
        break;
      }
    }
    if (hit >= 0) {
      out(i, hit) = 1.0;
      continue;
    }
    double s = 0.0;
    for (int j = 0; j < n_points; ++j) {
      out(i, j) = bary_weights[j] / (x - nodes[j]);
      s += out(i, j);
    }
    out.row(i) /= s;
  }
  return out;
}

std::shared_ptr<const RadialOperators> radial_operators(int n_points) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const RadialOperators>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(n_points);
    if (it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const RadialOperators>(build_radial_operators(n_points));
  std::lock_guard lock(mutex);
  return cache.emplace(n_points, std::move(built)).first->second;
}

double quad_inv_r(const RadialOperators& ops, const Eigen::VectorXd& f) {
  return ops.integrate_inv_r(f);
}
std::complex<double> quad_inv_r(const RadialOperators& ops, const Eigen::VectorXcd& f) {
  return ops.integrate_inv_r(f);
}
double quad_r(const RadialOperators& ops, const Eigen::VectorXd& f) { return ops.integrate_r(f); }
std::complex<double> quad_r(const RadialOperators& ops, const Eigen::VectorXcd& f) {
  return ops.integrate_r(f);
}

}  // namespace pipeslip
