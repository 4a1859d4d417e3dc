#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "pipeslip/base_flow.hpp"
#include "pipeslip/radial.hpp"
#include "pipeslip/stream.hpp"

namespace pipeslip {

struct RegimeThresholds {
  double eps1 = 0.1;
  double delta = 0.1;
  void validate() const;
};

enum class RegimeLabel {
  LowFrequency,
  HighFrequency,
  MidSmallSlip,
  MidLargeSlip,
  MidIntermediateSlip,
};

std::string_view to_string(RegimeLabel label);
RegimeLabel regime_from_string(std::string_view name);

// Tests run in the order Low, High, MidSmall, MidLarge and the first match
// wins; xi = 0 is LowFrequency. Only |xi| enters.
RegimeLabel classify(const FlowParams& params, double xi, const RegimeThresholds& thresholds);

struct BetaTheta {
  double beta = 0.0;
  double theta = 0.0;
  // cos(theta) = xi^2 / beta and sin(theta) = b / beta with
  // b = 4 phi xi / (pi (4 + alpha)), stored directly
  double cos_theta = 1.0;
  double sin_theta = 0.0;
};

// Requires xi > 0.
BetaTheta beta_theta(const FlowParams& params, double xi);

enum class BoundaryLayerKind { SmallSlipExponential, LargeSlipAiry };

struct BoundaryLayerProfile {
  double beta = 0.0;   // beta for the small-slip kind, |beta| = (4 phi |xi| / pi)^(1/3) otherwise
  double theta = 0.0;  // pi/2 for the large-slip kind
  Eigen::VectorXcd samples;
  BoundaryLayerKind kind = BoundaryLayerKind::SmallSlipExponential;
};

// exp(-sqrt(beta) cos(theta/2) (1 - r)) exp(-i sqrt(beta) sin(theta/2) (1 - r));
// xi < 0 gives the complex conjugate. Requires xi != 0.
BoundaryLayerProfile bl_profile_small_slip(const FlowParams& params, double xi,
                                           const RadialOperators& ops);

// Near-wall layer of width 1/|beta|: with rho = |beta| (1 - r) and
// k = xi^2 / |beta|^2, solves phi'' = (i rho + k) phi with phi decaying, then
// psi'' - k psi = phi / |beta|^2 with psi, psi' vanishing far from the wall,
// normalized to psi = 1 at the wall. Requires phi > 0 and xi != 0. Throws
// ResolutionError if the sampled profile fails to decay.
BoundaryLayerProfile bl_profile_large_slip(const FlowParams& params, double xi,
                                           const RadialOperators& ops);

// Smooth monotone cutoff: 0 on [0, 1/4], 1 on [1/2, 1], quintic smoothstep between.
double cutoff_chi(double r);

struct DecayFit {
  double fitted_rate = 0.0;
  double predicted_rate = 0.0;
  int window_points = 0;
  bool flat_signal = false;  // zero input; rates are NaN
};

// Least-squares slope of log|psi - trend| against (1 - r) on
// 1 - r in [0.2, 2] / sqrt(beta); fitted_rate is minus that slope and
// predicted_rate = sqrt(beta) cos(theta/2). The trend is a cubic fitted on
// the nodes with sqrt(beta) cos(theta/2) (1 - r) >= 8, or zero when fewer than
// eight such nodes exist. Throws ResolutionError with fewer than three nodes
// in the window.
DecayFit bl_decay_fit(const Eigen::VectorXcd& psi, const FlowParams& params, double xi,
                      const RadialOperators& ops);
DecayFit bl_decay_fit(const StreamSolution& sol, const FlowParams& params,
                      const RadialOperators& ops);

// Generic least-squares slope of log|f| vs (1 - r) over 1 - r in [lo, hi].
double log_modulus_slope(const Eigen::VectorXcd& f, const RadialOperators& ops, double lo, double hi);

}  // namespace pipeslip
