#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pipeslip/radial.hpp"

namespace pipeslip {

// Complex polynomial sum_k coeffs[k] r^k with exact derivatives.
struct RadialPolynomial {
  std::vector<std::complex<double>> coeffs;

  std::complex<double> operator()(double r) const;
  RadialPolynomial derivative() const;
  // r * p
  RadialPolynomial times_r() const;
  RadialPolynomial operator*(std::complex<double> a) const;
  RadialPolynomial operator-(const RadialPolynomial& o) const;
  Eigen::VectorXcd sample(const RadialOperators& ops) const;
  bool is_zero() const;
};

}  // namespace pipeslip
