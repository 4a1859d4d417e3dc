#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pipeslip/bessel.hpp"
#include "pipeslip/error.hpp"
#include "pipeslip/regime.hpp"

using namespace pipeslip;
using cd = std::complex<double>;

TEST_CASE("classification examples") {
  const RegimeThresholds t{0.1, 0.1};
  // (phi xi)^(1/3) = 21.54; 2.154 < 4 < 215.4; 1e-3 < 1 < 10
  CHECK(classify({1e4, 0.0}, 1.0, t) == RegimeLabel::MidIntermediateSlip);
  CHECK(classify({1e4, 0.0}, 1e-4, t) == RegimeLabel::LowFrequency);
  CHECK(classify({1e4, 0.0}, 50.0, t) == RegimeLabel::HighFrequency);
  CHECK(classify({1e4, 0.0}, 0.0, t) == RegimeLabel::LowFrequency);
  // boundaries resolve to the earlier label
  CHECK(classify({1e4, 0.0}, 1e-3, t) == RegimeLabel::LowFrequency);
  CHECK(classify({1e4, 0.0}, 10.0, t) == RegimeLabel::HighFrequency);
  // 4 + alpha <= 0.1 (1e4 * 1)^(1/3) fails at alpha = 0; needs large phi xi
  CHECK(classify({1e12, 0.0}, 1e3, t) == RegimeLabel::MidSmallSlip);
  CHECK(classify({1e4, 1e3}, 1.0, t) == RegimeLabel::MidLargeSlip);
}

TEST_CASE("classification is symmetric in xi and total") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lu(-4.0, 6.0);
  const RegimeThresholds t{0.1, 0.1};
  for (int i = 0; i < 2000; ++i) {
    const FlowParams p{std::pow(10.0, lu(rng)), i % 7 == 0 ? 0.0 : std::pow(10.0, lu(rng))};
    const double xi = std::pow(10.0, lu(rng));
    const auto l = classify(p, xi, t);
    CHECK(l == classify(p, -xi, t));
    CHECK(regime_from_string(to_string(l)) == l);
    const bool mid = xi > 1.0 / (t.eps1 * p.phi) && xi < t.eps1 * std::sqrt(p.phi);
    const bool is_mid = l != RegimeLabel::LowFrequency && l != RegimeLabel::HighFrequency;
    CHECK(mid == is_mid);
  }
}

TEST_CASE("threshold validation") {
  CHECK_THROWS_AS(classify({1.0, 1.0}, 1.0, {0.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(classify({1.0, 1.0}, 1.0, {0.1, 1.0}), std::invalid_argument);
}

TEST_CASE("beta and theta") {
  const auto bt = beta_theta({std::numbers::pi, 0.0}, 1.0);
  CHECK(bt.beta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(bt.theta == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
  const auto hi = beta_theta({1.0, 1.0}, 1e4);
  CHECK(hi.theta < 1e-4);
  CHECK(hi.beta == doctest::Approx(1e8).epsilon(1e-8));
  const auto slip = beta_theta({1.0, 1e12}, 2.0);
  CHECK(slip.beta == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(slip.theta < 1e-10);
  CHECK_THROWS_AS(beta_theta({1.0, 1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(beta_theta({1.0, 1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("property: beta-theta algebraic identities") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lu(-3.0, 4.0);
  for (int i = 0; i < 10000; ++i) {
    const FlowParams p{std::pow(10.0, lu(rng)), std::pow(10.0, lu(rng) - 1)};
    const double xi = std::pow(10.0, lu(rng));
    const auto bt = beta_theta(p, xi);
    const double b = 4 * p.phi * xi / (std::numbers::pi * (4 + p.alpha));
    CHECK(std::abs(bt.beta * bt.cos_theta - xi * xi) <= 1e-12 * xi * xi);
    CHECK(std::abs(bt.beta * bt.sin_theta - b) <= 1e-12 * b);
    CHECK(std::abs(bt.cos_theta * bt.cos_theta + bt.sin_theta * bt.sin_theta - 1) <= 1e-12);
    const double b2 = std::pow(p.phi * xi / std::numbers::pi, 2) * std::pow(4 / (4 + p.alpha), 2) +
                      std::pow(xi, 4);
    CHECK(std::abs(bt.beta * bt.beta - b2) <= 1e-12 * b2);
    CHECK(std::abs(std::cos(bt.theta) - bt.cos_theta) <= 1e-12);
    CHECK(bt.theta > 0.0);
    CHECK(bt.theta < std::numbers::pi / 2);
  }
}

TEST_CASE("small-slip boundary layer") {
  const auto ops = build_radial_operators(64);
  const FlowParams p{std::numbers::pi, 0.0};
  const auto bl = bl_profile_small_slip(p, 1.0, ops);
  CHECK(std::abs(bl.samples[63] - cd(1.0)) == 0.0);
  const double rate = std::pow(2.0, 0.25) * std::cos(std::numbers::pi / 8);
  CHECK(std::abs(ops.at_axis(Eigen::VectorXcd(bl.samples.cwiseAbs().cast<cd>()))) ==
        doctest::Approx(std::exp(-rate)).epsilon(1e-10));
  for (int j = 0; j < 64; ++j) {
    CHECK(std::abs(bl.samples[j]) ==
          doctest::Approx(std::exp(-rate * (1 - ops.nodes[j]))).epsilon(1e-14));
  }
  // conjugate for negative xi
  const auto neg = bl_profile_small_slip(p, -1.0, ops);
  CHECK((neg.samples - bl.samples.conjugate()).cwiseAbs().maxCoeff() == 0.0);
  // 1/e width scales like beta^(-1/2) at fixed theta: scaling xi by s and phi
  // by s keeps theta and multiplies beta by s^2
  for (double s : {2.0, 4.0}) {
    const auto a = beta_theta({10.0, 1.0}, 1.0);
    const auto b = beta_theta({10.0 * s, 1.0}, s);
    CHECK(b.theta == doctest::Approx(a.theta).epsilon(1e-13));
    const double wa = 1 / (std::sqrt(a.beta) * std::cos(a.theta / 2));
    const double wb = 1 / (std::sqrt(b.beta) * std::cos(b.theta / 2));
    CHECK(wb * std::sqrt(b.beta) == doctest::Approx(wa * std::sqrt(a.beta)).epsilon(1e-13));
    CHECK(wb == doctest::Approx(wa / s).epsilon(1e-13));
  }
}

TEST_CASE("large-slip boundary layer") {
  const auto ops = build_radial_operators(256);
  const FlowParams p{1e4, 1e3};
  const auto bl = bl_profile_large_slip(p, 1.0, ops);
  CHECK(std::abs(bl.samples[255] - cd(1.0)) <= 1e-10);
  CHECK(bl.beta == doctest::Approx(std::cbrt(4e4 / std::numbers::pi)).epsilon(1e-14));
  const double slope = log_modulus_slope(bl.samples, ops, 0.5 / bl.beta, 4.0 / bl.beta);
  MESSAGE("large-slip log-modulus slope " << slope << " vs |beta| " << bl.beta);
  CHECK(slope < 0.0);
  CHECK(-slope >= 0.5 * bl.beta);
  const auto neg = bl_profile_large_slip(p, -1.0, ops);
  CHECK((neg.samples - bl.samples.conjugate()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(bl_profile_large_slip({std::numbers::pi / 4 * 1e3, 1.0}, 1.0, ops).beta ==
        doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("cutoff chi") {
  CHECK(cutoff_chi(0.0) == 0.0);
  CHECK(cutoff_chi(0.25) == 0.0);
  CHECK(cutoff_chi(0.5) == 1.0);
  CHECK(cutoff_chi(1.0) == 1.0);
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double c = cutoff_chi(i / 1000.0);
    CHECK(c >= prev);
    CHECK(c <= 1.0);
    prev = c;
  }
}

TEST_CASE("I1 values") {
  CHECK(bessel_i1(0.0) == 0.0);
  // series partial sums at 0.1 with remainder below the next term
  double sum = 0.0, term = 0.05;
  for (int k = 0; k < 10; ++k) {
    if (k > 0) term *= 0.0025 / (k * (k + 1.0));
    sum += term;
  }
  CHECK(bessel_i1(0.1) == doctest::Approx(sum).epsilon(1e-15));
  CHECK(bessel_i1(0.1) == doctest::Approx(0.0500625260470927).epsilon(1e-14));
  for (double rho = 0.01; rho <= 50.0; rho *= 1.13) {
    CHECK(bessel_i1(rho) == doctest::Approx(std::cyl_bessel_i(1.0, rho)).epsilon(1e-12));
    CHECK(bessel_i1_scaled(rho) ==
          doctest::Approx(std::cyl_bessel_i(1.0, rho) * std::exp(-rho)).epsilon(1e-12));
  }
  CHECK(std::isfinite(bessel_i1_ratio(1999.0, 2000.0)));
  CHECK(bessel_i1_ratio(1999.0, 2000.0) == doctest::Approx(std::exp(-1.0) * std::sqrt(2000.0 / 1999.0)).epsilon(1e-6));
  CHECK(bessel_i1_ratio(3.0, 7.0) == doctest::Approx(std::cyl_bessel_i(1.0, 3.0) / std::cyl_bessel_i(1.0, 7.0)).epsilon(1e-12));
  CHECK_THROWS_AS(bessel_i1(-1.0), std::invalid_argument);
}

TEST_CASE("I1 satisfies the modified Bessel equation") {
  for (double rho : {0.3, 1.0, 5.0, 20.0, 39.0, 41.0, 60.0}) {
    const double h = 3e-3;
    auto f = [](double x) { return bessel_i1(x); };
    const double f0 = f(rho), fp1 = f(rho + h), fm1 = f(rho - h), fp2 = f(rho + 2 * h), fm2 = f(rho - 2 * h);
    const double d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
    const double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h);
    const double res = rho * rho * d2 + rho * d1 - (rho * rho + 1) * f0;
    CHECK(std::abs(res) <= 1e-9 * (rho * rho + 1) * f0);
  }
}

TEST_CASE("decay fit") {
  const auto ops = build_radial_operators(256);
  const FlowParams p{1e4, 0.0};
  CHECK(bl_decay_fit(Eigen::VectorXcd::Zero(256), p, 1.0, ops).flat_signal);
  const auto bl = bl_profile_small_slip(p, 1.0, ops);
  const auto fit = bl_decay_fit(bl.samples, p, 1.0, ops);
  MESSAGE("synthetic fit " << fit.fitted_rate << " predicted " << fit.predicted_rate);
  CHECK(fit.fitted_rate == doctest::Approx(fit.predicted_rate).epsilon(0.02));
  const auto coarse = build_radial_operators(8);
  CHECK_THROWS_AS(bl_decay_fit(Eigen::VectorXcd::Ones(8), {1e8, 0.0}, 10.0, coarse), ResolutionError);
}
