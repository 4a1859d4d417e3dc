#include "pipeslip/bessel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pipeslip {

namespace {

constexpr double series_limit = 40.0;

void check(double rho) {
  if (!std::isfinite(rho) || rho < 0.0) {
    throw std::invalid_argument("bessel_i1: argument must be finite and nonnegative");
  }
}

// sum_k (rho/2)^(2k+1) / (k! (k+1)!); all terms positive
double series(double rho) {
  const double h = 0.5 * rho;
  const double h2 = h * h;
  double term = h;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= h2 / (double(k) * double(k + 1));
    sum += term;
    if (term <= 1e-17 * sum) break;
  }
  return sum;
}

// e^{-rho} I_1(rho) ~ (2 pi rho)^{-1/2} sum_j (-1)^j a_j(1) / rho^j
double asymptotic_scaled(double rho) {
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < 60; ++j) {
    const double odd = 2.0 * j - 1.0;
    const double next = -term * (4.0 - odd * odd) / (8.0 * j * rho);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * rho);
}

}  // namespace

double bessel_i1(double rho) {
  check(rho);
  if (rho <= series_limit) return series(rho);
  const double s = asymptotic_scaled(rho);
  if (rho > 700.0) {
    const double half = std::exp(0.5 * rho);
    return s * half * half;
  }
  return s * std::exp(rho);
}

double bessel_i1_scaled(double rho) {
  check(rho);
  if (rho <= series_limit) return series(rho) * std::exp(-rho);
  return asymptotic_scaled(rho);
}

double bessel_i1_ratio(double a, double b) {
  check(a);
  check(b);
  if (b == 0.0) throw std::invalid_argument("bessel_i1_ratio: denominator argument must be > 0");
  return bessel_i1_scaled(a) / bessel_i1_scaled(b) * std::exp(a - b);
}

}  // namespace pipeslip
