#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pipeslip/swirl.hpp"
#include "support.hpp"

using namespace pipeslip;
using namespace testing_support;

namespace {

constexpr cd I{0.0, 1.0};

Poly base_poly(const FlowParams& p) {
  Poly u;
  u.c = {poiseuille_u(p, 0.0), 0.0, (poiseuille_u(p, 1.0) - poiseuille_u(p, 0.0))};
  return u;
}

// F = i xi U v - (L - xi^2) v
Poly swirl_forcing(const Poly& v, double xi, const FlowParams& p) {
  return base_poly(p) * v * (I * xi) - (v.lop() - v * cd(xi * xi));
}

// r + a r^3 with v'(1) = (1 - alpha) v(1):  1 + 3a = (1 - alpha)(1 + a)
Poly robin_cubic(double alpha) {
  Poly v;
  v.c = {0.0, 1.0, 0.0, -alpha / (2.0 + alpha)};
  return v;
}

}  // namespace

TEST_CASE("manufactured swirl solutions are recovered") {
  // r (1 - r)^2 has v(1) = v'(1) = 0, so it satisfies the Robin row for every alpha
  Poly wall_flat;
  wall_flat.c = {0.0, 1.0, -2.0, 1.0};
  for (double alpha : {0.5, 2.0, 7.0}) {
    const Poly cubic = robin_cubic(alpha);
    CHECK(std::abs(cubic.deriv()(1.0) - (1 - alpha) * cubic(1.0)) < 1e-15);
    for (const Poly& v : {cubic, wall_flat}) {
      const FlowParams p{40.0, alpha};
      const double xi = 1.3;
      const auto ops = build_radial_operators(48);
      const auto prof = poiseuille_profile(p, ops);
      const Eigen::VectorXcd f = swirl_forcing(v, xi, p).at(ops);
      const auto sol = solve_swirl_mode(xi, f, prof, ops, alpha);
      CHECK(rel_err(sol.v_theta_hat, v.at(ops)) <= 1e-8);
      const auto gaps = swirl_identity_residuals(sol, f, prof, ops);
      CHECK(gaps.real_gap <= 1e-7);
      CHECK(gaps.imag_gap <= 1e-7);
      const auto bc = swirl_boundary_residuals(sol, alpha, ops);
      CHECK(bc.axis <= 1e-9);
      CHECK(bc.robin <= 1e-9);
    }
  }
}

TEST_CASE("zero swirl forcing gives zero") {
  const auto ops = build_radial_operators(24);
  const auto prof = poiseuille_profile({5.0, 1.0}, ops);
  const auto sol = solve_swirl_mode(2.0, Eigen::VectorXcd::Zero(24), prof, ops, 1.0);
  CHECK(max_abs(sol.v_theta_hat) == 0.0);
  const auto gaps = swirl_identity_residuals(sol, Eigen::VectorXcd::Zero(24), prof, ops);
  CHECK(gaps.real_gap == 0.0);
  CHECK(gaps.imag_gap == 0.0);
}

TEST_CASE("alpha must be positive and consistent with the profile") {
  const auto ops = build_radial_operators(16);
  const auto prof0 = poiseuille_profile({5.0, 0.0}, ops);
  CHECK_THROWS_AS(solve_swirl_mode(1.0, Eigen::VectorXcd::Ones(16), prof0, ops, 0.0),
                  std::invalid_argument);
  const auto prof1 = poiseuille_profile({5.0, 1.0}, ops);
  CHECK_THROWS_AS(solve_swirl_mode(1.0, Eigen::VectorXcd::Ones(16), prof1, ops, 2.0),
                  std::invalid_argument);
}

TEST_CASE("conjugate symmetry and identities on random forcing") {
  std::mt19937_64 rng(31);
  for (double phi : {1.0, 1e3, 1e4}) {
    const int n = phi > 100 ? 256 : 64;
    const auto ops = radial_operators(n);
    const double alpha = 0.7;
    const auto prof = poiseuille_profile({phi, alpha}, *ops);
    Poly fp = random_poly(rng, 1, 7);
    const Eigen::VectorXcd f = fp.at(*ops);
    const double xi = 2.0;
    const auto a = solve_swirl_mode(xi, f, prof, *ops, alpha);
    const auto b = solve_swirl_mode(-xi, f.conjugate(), prof, *ops, alpha);
    CHECK(max_abs(b.v_theta_hat - a.v_theta_hat.conjugate()) <= 1e-10 * max_abs(a.v_theta_hat));
    const auto gaps = swirl_identity_residuals(a, f, prof, *ops);
    MESSAGE("phi=" << phi << " swirl gaps " << gaps.real_gap << " " << gaps.imag_gap);
    CHECK(gaps.real_gap <= 1e-6);
    CHECK(gaps.imag_gap <= 1e-6);
  }
}

TEST_CASE("nullspace probe") {
  const auto ops = build_radial_operators(48);
  {
    const auto prof = poiseuille_profile({10.0, 0.0}, ops);
    const auto probe = nullspace_probe(0.0, 0.0, prof, ops);
    MESSAGE("xi=0 alpha=0 sigma_min " << probe.sigma_min << " cosine " << probe.cosine_with_r);
    CHECK(probe.sigma_min <= 1e-8);
    CHECK(probe.cosine_with_r >= 1 - 1e-6);
  }
  {
    const auto prof = poiseuille_profile({10.0, 1.0}, ops);
    const auto probe = nullspace_probe(0.0, 1.0, prof, ops);
    MESSAGE("xi=0 alpha=1 sigma_min " << probe.sigma_min);
    CHECK(probe.sigma_min > 1e-6);
  }
  {
    const auto prof = poiseuille_profile({10.0, 0.0}, ops);
    const auto probe = nullspace_probe(2.0, 0.0, prof, ops);
    MESSAGE("xi=2 alpha=0 sigma_min " << probe.sigma_min);
    CHECK(probe.sigma_min > 1e-6);
  }
}
