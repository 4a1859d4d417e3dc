#pragma once

// Test-side oracles: exact polynomial arithmetic in r, independent of the
// collocation machinery under test.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pipeslip/base_flow.hpp"

namespace testing_support {

using cd = std::complex<double>;

// sum_k c[k] r^k
struct Poly {
  std::vector<cd> c;

  cd operator()(double r) const {
    cd s = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * r + *it;
    return s;
  }
  Poly deriv() const {
    Poly d;
    for (size_t k = 1; k < c.size(); ++k) d.c.push_back(double(k) * c[k]);
    if (d.c.empty()) d.c.push_back(0.0);
    return d;
  }
  // L r^k = (k^2 - 1) r^(k-2); requires c[0] = c[2] = 0 for a polynomial result
  Poly lop() const {
    Poly d;
    d.c.assign(c.size() > 2 ? c.size() - 2 : 1, 0.0);
    for (size_t k = 1; k < c.size(); ++k) {
      if (k < 2) continue;
      d.c[k - 2] += (double(k) * k - 1.0) * c[k];
    }
    return d;
  }
  Poly operator+(const Poly& o) const {
    Poly s;
    s.c.assign(std::max(c.size(), o.c.size()), 0.0);
    for (size_t k = 0; k < c.size(); ++k) s.c[k] += c[k];
    for (size_t k = 0; k < o.c.size(); ++k) s.c[k] += o.c[k];
    return s;
  }
  Poly operator*(cd a) const {
    Poly s = *this;
    for (auto& x : s.c) x *= a;
    return s;
  }
  Poly operator*(const Poly& o) const {
    Poly s;
    s.c.assign(c.size() + o.c.size() - 1, 0.0);
    for (size_t i = 0; i < c.size(); ++i)
      for (size_t j = 0; j < o.c.size(); ++j) s.c[i + j] += c[i] * o.c[j];
    return s;
  }
  Poly operator-(const Poly& o) const { return *this + o * cd(-1.0); }

  template <class Ops>
  Eigen::VectorXcd at(const Ops& ops) const {
    Eigen::VectorXcd v(ops.n_points);
    for (int j = 0; j < ops.n_points; ++j) v[j] = (*this)(ops.nodes[j]);
    return v;
  }
};

inline Poly monomial(int k, cd a = 1.0) {
  Poly p;
  p.c.assign(k + 1, 0.0);
  p.c[k] = a;
  return p;
}

inline double max_abs(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }

inline double rel_err(const Eigen::VectorXcd& got, const Eigen::VectorXcd& want) {
  return max_abs(got - want) / std::max(max_abs(want), 1e-300);
}

// Random complex polynomial with terms r^k for k in [kmin, kmax].
inline Poly random_poly(std::mt19937_64& rng, int kmin, int kmax) {
  std::normal_distribution<double> g(0.0, 1.0);
  Poly p;
  p.c.assign(kmax + 1, 0.0);
  for (int k = kmin; k <= kmax; ++k) p.c[k] = cd(g(rng), g(rng));
  return p;
}

// U as a polynomial in r
inline Poly base_poly(const pipeslip::FlowParams& p) {
  Poly u;
  const double u0 = pipeslip::poiseuille_u(p, 0.0);
  u.c = {u0, 0.0, pipeslip::poiseuille_u(p, 1.0) - u0};
  return u;
}

// f = i xi U (L - xi^2) psi - (L - xi^2)^2 psi, computed on coefficients
inline Poly manufactured_forcing(const Poly& psi, double xi, const pipeslip::FlowParams& p) {
  const Poly w = psi.lop() - psi * cd(xi * xi);
  const Poly ww = w.lop() - w * cd(xi * xi);
  return base_poly(p) * w * cd(0.0, xi) - ww;
}

// quintic c r + (1 - c) r^3 - r^5 with c = -(8 + alpha)/(4 + alpha)
inline Poly quintic(double alpha) {
  const double c = -(8 + alpha) / (4 + alpha);
  Poly p;
  p.c = {0.0, c, 0.0, 1 - c, 0.0, -1.0};
  return p;
}

}  // namespace testing_support
