#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pipeslip/base_flow.hpp"
#include "pipeslip/forcing.hpp"
#include "pipeslip/radial.hpp"

namespace pipeslip {

struct ModeComponents {
  Eigen::VectorXcd v_r;
  Eigen::VectorXcd v_theta;
  Eigen::VectorXcd v_z;
};

// Real axisymmetric vector field on (0,1] x [0, L), stored as radial samples of
// the Fourier coefficients for k = 0..K at xi_k = 2 pi k / L. The coefficients
// for -k are the complex conjugates, so reality holds by construction; mode 0
// is kept real. Physical values: v(r, z) = sum_{|k| <= K} v_k(r) e^{i xi_k z}.
struct AxisymField {
  double period_length = 0.0;
  int max_wavenumber = 0;
  std::shared_ptr<const RadialOperators> grid;
  std::vector<ModeComponents> modes;

  // n_modes = 2K + 1, odd and >= 1; period_length > 0
  static AxisymField zero(double period_length, int n_modes, std::shared_ptr<const RadialOperators> grid);

  int n_modes() const { return 2 * max_wavenumber + 1; }
  double xi(int k) const;
  // k in [-K, K]
  ModeComponents mode(int k) const;
  bool same_layout(const AxisymField& o) const;

  AxisymField& operator+=(const AxisymField& o);
  AxisymField& operator-=(const AxisymField& o);
  AxisymField& operator*=(double a);
  friend AxisymField operator+(AxisymField a, const AxisymField& b) { return a += b; }
  friend AxisymField operator-(AxisymField a, const AxisymField& b) { return a -= b; }
  friend AxisymField operator*(double s, AxisymField a) { return a *= s; }
  bool is_zero() const;
};

using AxisymForcing = AxisymField;

// Norm proxies on the periodic cell, with int over theta and z giving the
// weight 2 pi L per Fourier mode (each k > 0 counted twice):
//   l2^2 = sum_k int |v_k|^2 r dr
//   h1^2 = l2^2 + sum_k int (|d_r v_k|^2 + xi^2 |v_k|^2) r dr + int (|v_r|^2 + |v_theta|^2) / r dr
//   h2^2 = h1^2 + sum_k int |Delta_k v_k|^2 r dr, Delta_k the per-component
//          Laplacian (L - xi^2 on r, theta; d_rr + d_r / r - xi^2 on z)
//   h54 = h1^(3/4) h2^(1/4)
// vr_* restrict to the radial component; dz_vz_l2 is ||d_z v_z||,
// dz_vz_h14 = ||d_z v_z||^(3/4) ||d_z v_z||_{H1}^(1/4).
struct FieldNorms {
  double l2 = 0.0, h1 = 0.0, h2 = 0.0, h54 = 0.0;
  double vr_l2 = 0.0, vr_h54 = 0.0;
  double dz_vz_l2 = 0.0, dz_vz_h14 = 0.0;
};

FieldNorms field_norms(const AxisymField& v);
double field_l2(const AxisymField& v);

// Forcing with the radial shape on the listed wavenumbers (k > 0; k = 0 uses
// the real part), rescaled to the requested field L2 norm. swirl_free drops
// F^theta.
AxisymForcing make_axisym_forcing(const ForcingShape& shape, double period_length, int n_modes,
                                  const std::vector<int>& wavenumbers, double l2_norm, bool swirl_free,
                                  std::shared_ptr<const RadialOperators> grid);

// Grid size covering every mode of the period by the harness beta rule.
int nonlinear_grid_points(const FlowParams& params, double period_length, int n_modes,
                          int min_points = 48, int max_points = 512);

// Solves the meridional stream problem and, when F^theta is nonzero, the swirl
// problem for every k. F^theta != 0 with alpha = 0 is rejected.
AxisymField apply_T(const AxisymForcing& forcing, const PoiseuilleProfile& profile);

// Quadratic terms
//   F^r = -(v^r d_r v^r + v^z d_z v^r) + (v^theta)^2 / r
//   F^z = -(v^r d_r v^z + v^z d_z v^z)
//   F^theta = -(v^r d_r v^theta + v^z d_z v^theta) - v^r v^theta / r
// evaluated on M >= 3K + 1 equispaced z-points and truncated back to |k| <= K.
// Throws std::domain_error when v^r or v^theta does not vanish at the axis.
AxisymForcing nonlinear_terms(const AxisymField& v);

// Weak (tested) residual of the stream and swirl equations with total forcing
// F + N(v); pressure is absent because the meridional equation is in curl form.
// Test functions r^m (1 - r) for the stream equation and r^m for swirl,
// m = 1..8. Each part is max |residual| / max |term| over all modes and test
// functions. boundary holds the wall and axis conditions: value conditions
// relative to max |v|, slip conditions relative to max |d_r v|.
struct MomentumResidual {
  double meridional = 0.0;
  double swirl = 0.0;
  double boundary = 0.0;
  double max() const;
};
MomentumResidual momentum_residual(const AxisymField& v, const AxisymForcing& forcing,
                                   const PoiseuilleProfile& profile);

// max over modes of the divergence residual |d_r v^r + v^r / r + i xi v^z|
// relative to max |v|, and |int v^z_0 r dr| relative to max |v|.
double divergence_residual(const AxisymField& v);
double mode0_flux(const AxisymField& v);

struct PicardConfig {
  int max_iters = 50;
  double tol = 1e-10;
  int divergence_window = 5;
  std::optional<AxisymField> warm_start;
  void validate() const;
};

enum class Termination { Converged, MaxIterations, Diverged };
std::string_view to_string(Termination t);

struct IterationStep {
  int iteration = 0;
  double increment_norm = 0.0;      // h54 of v_{j+1} - v_j
  double relative_increment = 0.0;  // increment_norm / h54(v_{j+1})
  double residual_norm = 0.0;       // momentum_residual(v_{j+1}).max()
  double v_h54 = 0.0;
  double j_ratio = 0.0;    // v_h54 / (phi^(1/16) ||F||)
  double k_sum = 0.0;      // vr_h54 + dz_vz_h14
  double k_ratio = 0.0;    // k_sum / (phi^(-1/10) ||F||)
};

struct IterationTrace {
  std::vector<IterationStep> steps;
  Termination termination = Termination::MaxIterations;
  double forcing_norm = 0.0;
  bool diverged() const { return termination == Termination::Diverged; }
};

struct PicardResult {
  AxisymField v;
  IterationTrace trace;
};

// v_0 = T F (or the warm start), v_{j+1} = T F + T(N(v_j)) until the h54
// increment is <= tol * h54(v_{j+1}). Increments growing over
// `divergence_window` consecutive steps end the run with Termination::Diverged.
PicardResult picard_iterate(const AxisymForcing& forcing, const FlowParams& params,
                            const PicardConfig& config = {});

}  // namespace pipeslip
