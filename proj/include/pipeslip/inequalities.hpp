#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pipeslip/polynomial.hpp"
#include "pipeslip/radial.hpp"

namespace pipeslip {

// Inequalities checked on random admissible polynomials g (all integrals over
// (0,1), G = |(r g)'|^2, W = 1 - r^2):
//   poincare_weighted        int |g|^2 r <= int G / r                    g(0) = 0
//   poincare_interpolation   int G / r <= (int |Lg|^2 r)^(1/2) (int |g|^2 r)^(1/2)
//                                                                         g(0) = g(1) = 0
//   poincare_laplacian       int G / r <= int |Lg|^2 r                   g(0) = g(1) = 0
//   hardy_littlewood_polya   int |g|^2 <= (1/2) int |g'|^2 W             g(0) = 0
//   hardy_weighted           int |g|^2 r <= C int G W / r                g(0) = 0
//   interpolation_l2         int |g|^2 r <= C [A^(2/3) B^(1/3) + A],
//                            A = int W |g|^2 r, B = int G / r           g(0) = 0
//   interpolation_gradient   int G / r <= C [A^(2/3) B^(1/3) + A],
//                            A = int W G / r, B = int |Lg|^2 r           g(0) = 0
// The first four have explicit constants; for the rest the reported ratio is
// lhs / (bracket without C).
enum class Inequality {
  PoincareWeighted,
  PoincareInterpolation,
  PoincareLaplacian,
  HardyLittlewoodPolya,
  HardyWeighted,
  InterpolationL2,
  InterpolationGradient,
};

std::string_view to_string(Inequality which);
bool has_explicit_constant(Inequality which);
const std::vector<Inequality>& all_inequalities();

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;  // includes the explicit constant when there is one
};

// Evaluates both sides by quadrature on exact polynomial samples. g must
// satisfy the hypotheses listed above (checked; std::invalid_argument).
InequalitySides evaluate_inequality(Inequality which, const RadialPolynomial& g,
                                    const RadialOperators& ops);

// Random g of degree 1..8 with complex normal coefficients, adjusted to the
// hypotheses of `which` (no constant term; g - g(1) r when g(1) = 0 is needed).
RadialPolynomial sample_admissible(Inequality which, std::mt19937_64& rng);

struct LemmaReport {
  Inequality which = Inequality::PoincareWeighted;
  std::string name;
  int samples = 0;
  int violations = 0;
  bool explicit_constant = false;
  double max_ratio = 0.0;  // max lhs / rhs over nonzero samples
};

// Each inequality gets n_samples random polynomials from its own stream of a
// std::mt19937_64 seeded from `seed`. The tolerance on explicit constants is
// lhs <= rhs (1 + 1e-8).
std::vector<LemmaReport> inequality_suite(int n_samples, std::uint64_t seed, const RadialOperators& ops);

}  // namespace pipeslip
