#include "pipeslip/inequalities.hpp"

#include <cmath>
#include <stdexcept>

namespace pipeslip {

namespace {

using cd = std::complex<double>;

// L g for g with zero constant term: L r^k = (k^2 - 1) r^(k-2)
RadialPolynomial apply_l(const RadialPolynomial& g) {
  RadialPolynomial out;
  const auto& c = g.coeffs;
  out.coeffs.assign(c.size() > 2 ? c.size() - 2 : 1, 0.0);
  for (size_t k = 2; k < c.size(); ++k) out.coeffs[k - 2] += (double(k) * double(k) - 1.0) * c[k];
  return out;
}

Eigen::VectorXd abs2(const RadialPolynomial& p, const RadialOperators& ops) {
  return p.sample(ops).cwiseAbs2();
}

}  // namespace

std::string_view to_string(Inequality which) {
  switch (which) {
    case Inequality::PoincareWeighted: return "poincare_weighted";
    case Inequality::PoincareInterpolation: return "poincare_interpolation";
    case Inequality::PoincareLaplacian: return "poincare_laplacian";
    case Inequality::HardyLittlewoodPolya: return "hardy_littlewood_polya";
    case Inequality::HardyWeighted: return "hardy_weighted";
    case Inequality::InterpolationL2: return "interpolation_l2";
    case Inequality::InterpolationGradient: return "interpolation_gradient";
  }
  return "unknown";
}

bool has_explicit_constant(Inequality which) {
  switch (which) {
    case Inequality::PoincareWeighted:
    case Inequality::PoincareInterpolation:
    case Inequality::PoincareLaplacian:
    case Inequality::HardyLittlewoodPolya:
      return true;
    default:
      return false;
  }
}

const std::vector<Inequality>& all_inequalities() {
  static const std::vector<Inequality> all = {
      Inequality::PoincareWeighted,     Inequality::PoincareInterpolation, Inequality::PoincareLaplacian,
      Inequality::HardyLittlewoodPolya, Inequality::HardyWeighted,         Inequality::InterpolationL2,
      Inequality::InterpolationGradient};
  return all;
}

InequalitySides evaluate_inequality(Inequality which, const RadialPolynomial& g,
                                    const RadialOperators& ops) {
  const bool zero_axis = g.coeffs.empty() || std::abs(g.coeffs[0]) == 0.0;
  if (!zero_axis) throw std::invalid_argument("inequality sample must vanish at r = 0");
  const bool two_sided =
      which == Inequality::PoincareInterpolation || which == Inequality::PoincareLaplacian;
  if (two_sided && std::abs(g(1.0)) > 1e-12 * (1.0 + std::abs(g.derivative()(1.0)))) {
    throw std::invalid_argument("inequality sample must vanish at r = 1");
  }
  const Eigen::VectorXd w = (1.0 - ops.nodes.array().square()).matrix();
  const Eigen::VectorXd g2 = abs2(g, ops);
  const Eigen::VectorXd grad = abs2(g.times_r().derivative(), ops);  // |(r g)'|^2, vanishes at 0
  const double l2_r = ops.integrate_r(g2);
  const double grad_inv_r = ops.integrate_inv_r(grad);

  InequalitySides s;
  switch (which) {
    case Inequality::PoincareWeighted:
      s = {l2_r, grad_inv_r};
      break;
    case Inequality::PoincareInterpolation: {
      const double lg = ops.integrate_r(abs2(apply_l(g), ops));
      s = {grad_inv_r, std::sqrt(lg * l2_r)};
      break;
    }
    case Inequality::PoincareLaplacian:
      s = {grad_inv_r, ops.integrate_r(abs2(apply_l(g), ops))};
      break;
    case Inequality::HardyLittlewoodPolya:
      s = {ops.integrate_plain(g2),
           0.5 * ops.integrate_plain(Eigen::VectorXd(abs2(g.derivative(), ops).cwiseProduct(w)))};
      break;
    case Inequality::HardyWeighted:
      s = {l2_r, ops.integrate_inv_r(Eigen::VectorXd(grad.cwiseProduct(w)))};
      break;
    case Inequality::InterpolationL2: {
      const double a = ops.integrate_r(Eigen::VectorXd(g2.cwiseProduct(w)));
      s = {l2_r, std::pow(a, 2.0 / 3.0) * std::cbrt(grad_inv_r) + a};
      break;
    }
    case Inequality::InterpolationGradient: {
      const double a = ops.integrate_inv_r(Eigen::VectorXd(grad.cwiseProduct(w)));
      const double b = ops.integrate_r(abs2(apply_l(g), ops));
      s = {grad_inv_r, std::pow(a, 2.0 / 3.0) * std::cbrt(b) + a};
      break;
    }
  }
  return s;
}

RadialPolynomial sample_admissible(Inequality which, std::mt19937_64& rng) {
  const bool two_sided =
      which == Inequality::PoincareInterpolation || which == Inequality::PoincareLaplacian;
  std::uniform_int_distribution<int> degree(two_sided ? 2 : 1, 8);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = degree(rng);
  RadialPolynomial g;
  g.coeffs.assign(d + 1, 0.0);
  for (int k = 1; k <= d; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    g.coeffs[k] = cd(re, im);
  }
  if (two_sided) g.coeffs[1] -= g(1.0);
  return g;
}

std::vector<LemmaReport> inequality_suite(int n_samples, std::uint64_t seed, const RadialOperators& ops) {
  if (n_samples < 1) throw std::invalid_argument("inequality_suite: n_samples must be >= 1");
  std::vector<LemmaReport> out;
  std::uint64_t stream = 0;
  for (Inequality which : all_inequalities()) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * ++stream);
    LemmaReport rep;
    rep.which = which;
    rep.name = std::string(to_string(which));
    rep.explicit_constant = has_explicit_constant(which);
    for (int i = 0; i < n_samples; ++i) {
      const auto g = sample_admissible(which, rng);
      const auto s = evaluate_inequality(which, g, ops);
      ++rep.samples;
      if (s.rhs > 0.0) rep.max_ratio = std::max(rep.max_ratio, s.lhs / s.rhs);
      if (rep.explicit_constant && s.lhs > s.rhs * (1.0 + 1e-8)) ++rep.violations;
      if (!std::isfinite(s.lhs) || !std::isfinite(s.rhs)) ++rep.violations;
    }
    out.push_back(rep);
  }
  return out;
}

}  // namespace pipeslip
