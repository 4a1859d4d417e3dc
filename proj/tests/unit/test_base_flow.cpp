#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pipeslip/base_flow.hpp"

using namespace pipeslip;

TEST_CASE("plug flow at alpha = 0, phi = pi") {
  const auto ops = build_radial_operators(32);
  const auto prof = poiseuille_profile({std::numbers::pi, 0.0}, ops);
  CHECK((prof.u_bar.array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(prof.du_bar.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("no-slip limit approaches 2(1 - r^2)") {
  const auto ops = build_radial_operators(32);
  const auto prof = poiseuille_profile({std::numbers::pi, 1e12}, ops);
  for (int j = 0; j < 32; ++j) {
    const double r = ops.nodes[j];
    CHECK(std::abs(prof.u_bar[j] - 2 * (1 - r * r)) <= 1e-10);
  }
}

TEST_CASE("flux, lower bound and wall identity over random parameters") {
  const auto ops = build_radial_operators(32);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logu(-3.0, 4.0);
  for (int t = 0; t < 200; ++t) {
    const double phi = std::pow(10.0, logu(rng));
    const double alpha = (t % 10 == 0) ? 0.0 : std::pow(10.0, logu(rng));
    const FlowParams p{phi, alpha};
    const auto prof = poiseuille_profile(p, ops);
    CHECK(std::abs(profile_flux(prof, ops) - phi) <= 1e-12 * phi);
    for (int j = 0; j < 32; ++j) {
      const double r = ops.nodes[j];
      CHECK(prof.u_bar[j] >= phi / std::numbers::pi * (1 - r * r) * (1 - 1e-14));
      // analytic derivative against a centered difference
      const double h = 1e-6;
      const double fd = (poiseuille_u(p, r + h) - poiseuille_u(p, r - h)) / (2 * h);
      CHECK(std::abs(prof.du_bar[j] - fd) <= 1e-8 * (phi + std::abs(fd)));
    }
    // Navier condition on U e_z at r = 1: U'(1) + alpha U(1) = 0, where
    // U(1) = 4 phi / (pi (4 + alpha)) and U'(1) = -4 alpha phi / (pi (4 + alpha))
    const double u1 = poiseuille_u(p, 1.0), du1 = poiseuille_du(p, 1.0);
    CHECK(std::abs(u1 - 4 * phi / (std::numbers::pi * (4 + alpha))) <= 1e-14 * phi);
    CHECK(std::abs(du1 + alpha * u1) <= 1e-13 * (std::abs(du1) + phi));
    CHECK(std::abs(wall_shear(p) + du1) <= 1e-13 * (std::abs(du1) + 1e-300));
  }
}

TEST_CASE("slip monotonicity") {
  // dU/dalpha = (phi / pi) (4 - 8 r^2) / (4 + alpha)^2
  const double phi = 3.0;
  const double pivot = 1.0 / std::sqrt(2.0);
  for (double r : {0.0, 0.3, 0.7, pivot, 0.8, 0.99, 1.0}) {
    double prev = poiseuille_u({phi, 0.0}, r);
    for (double a : {0.1, 1.0, 10.0, 100.0}) {
      const double u = poiseuille_u({phi, a}, r);
      if (r <= pivot) CHECK(u >= prev * (1 - 1e-15));
      if (r >= pivot) CHECK(u <= prev * (1 + 1e-15));
      prev = u;
    }
  }
}

TEST_CASE("invalid parameters are rejected") {
  const auto ops = build_radial_operators(16);
  CHECK_THROWS_AS(poiseuille_profile({-1.0, 1.0}, ops), std::invalid_argument);
  CHECK_THROWS_AS(poiseuille_profile({1.0, -1.0}, ops), std::invalid_argument);
  CHECK_THROWS_AS(poiseuille_profile({1.0, INFINITY}, ops), std::invalid_argument);
  CHECK_THROWS_AS(poiseuille_profile({NAN, 1.0}, ops), std::invalid_argument);
}
