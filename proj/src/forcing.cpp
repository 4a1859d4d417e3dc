#include "pipeslip/forcing.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pipeslip {

namespace {

using cd = std::complex<double>;

// int_0^1 |p|^2 r dr, exact from the coefficients
double weighted_sq(const RadialPolynomial& p) {
  double s = 0.0;
  const auto& c = p.coeffs;
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) s += (c[i] * std::conj(c[j])).real() / double(i + j + 2);
  return s;
}

// coefficients of r^offset * sum_k a_k r^(2k)
RadialPolynomial even_series(std::mt19937_64& rng, int offset, int terms) {
  std::normal_distribution<double> g(0.0, 1.0);
  RadialPolynomial p;
  p.coeffs.assign(offset + 2 * (terms - 1) + 1, 0.0);
  for (int k = 0; k < terms; ++k) {
    const double re = g(rng);
    const double im = g(rng);
    p.coeffs[offset + 2 * k] = cd(re, im);
  }
  return p;
}

}  // namespace

ForcingShape make_forcing_shape(const ForcingFamily& family) {
  if (!std::isfinite(family.amplitude) || family.amplitude < 0.0) {
    throw std::invalid_argument("forcing amplitude must be finite and nonnegative");
  }
  ForcingShape s;
  if (family.name == "default") {
    s.f_r.coeffs = {0.0, 1.0, 0.0, -1.0};
    s.f_z.coeffs = {1.0, 0.0, -1.0};
    s.f_theta.coeffs = {0.0, 1.0, -1.0};
  } else if (family.name == "random") {
    std::mt19937_64 rng(family.seed);
    s.f_r = even_series(rng, 1, 4);
    s.f_z = even_series(rng, 0, 4);
    s.f_theta = even_series(rng, 1, 4);
  } else {
    throw std::invalid_argument("unknown forcing family: " + family.name);
  }
  const double meridional = std::sqrt(weighted_sq(s.f_r) + weighted_sq(s.f_z));
  const double swirl = std::sqrt(weighted_sq(s.f_theta));
  s.f_r = s.f_r * (family.amplitude / meridional);
  s.f_z = s.f_z * (family.amplitude / meridional);
  s.f_theta = s.f_theta * (family.amplitude / swirl);
  return s;
}

ModeForcing mode_forcing(const ForcingShape& shape, double xi, const RadialOperators& ops) {
  ModeForcing f;
  f.xi = xi;
  f.f_r_hat = shape.f_r.sample(ops);
  f.f_z_hat = shape.f_z.sample(ops);
  f.df_z_hat = shape.f_z.derivative().sample(ops);
  return f;
}

Eigen::VectorXcd swirl_forcing(const ForcingShape& shape, const RadialOperators& ops) {
  return shape.f_theta.sample(ops);
}

}  // namespace pipeslip
