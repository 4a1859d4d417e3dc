#include "pipeslip/polynomial.hpp"

#include <algorithm>

namespace pipeslip {

using cd = std::complex<double>;

cd RadialPolynomial::operator()(double r) const {
  cd s = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * r + *it;
  return s;
}

RadialPolynomial RadialPolynomial::derivative() const {
  RadialPolynomial d;
  for (size_t k = 1; k < coeffs.size(); ++k) d.coeffs.push_back(double(k) * coeffs[k]);
  return d;
}

RadialPolynomial RadialPolynomial::times_r() const {
  RadialPolynomial d;
  d.coeffs.push_back(0.0);
  d.coeffs.insert(d.coeffs.end(), coeffs.begin(), coeffs.end());
  return d;
}

RadialPolynomial RadialPolynomial::operator*(cd a) const {
  RadialPolynomial d = *this;
  for (auto& c : d.coeffs) c *= a;
  return d;
}

RadialPolynomial RadialPolynomial::operator-(const RadialPolynomial& o) const {
  RadialPolynomial d;
  d.coeffs.assign(std::max(coeffs.size(), o.coeffs.size()), 0.0);
  for (size_t k = 0; k < coeffs.size(); ++k) d.coeffs[k] += coeffs[k];
  for (size_t k = 0; k < o.coeffs.size(); ++k) d.coeffs[k] -= o.coeffs[k];
  return d;
}

Eigen::VectorXcd RadialPolynomial::sample(const RadialOperators& ops) const {
  Eigen::VectorXcd v(ops.n_points);
  for (int j = 0; j < ops.n_points; ++j) v[j] = (*this)(ops.nodes[j]);
  return v;
}

bool RadialPolynomial::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](cd c) { return c == 0.0; });
}

}  // namespace pipeslip
