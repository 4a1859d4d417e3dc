#include "pipeslip/base_flow.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pipeslip {

void FlowParams::validate() const {
  if (!std::isfinite(phi) || phi < 0.0) {
    throw std::invalid_argument("FlowParams: phi must be finite and nonnegative");
  }
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw std::invalid_argument("FlowParams: alpha must be finite and nonnegative");
  }
}

double poiseuille_u(const FlowParams& p, double r) {
  const double a = p.alpha;
  return ((4.0 + 2.0 * a) - 2.0 * a * r * r) / (4.0 + a) * p.phi / std::numbers::pi;
}

double poiseuille_du(const FlowParams& p, double r) {
  return -4.0 * p.alpha / (4.0 + p.alpha) * p.phi / std::numbers::pi * r;
}

double wall_shear(const FlowParams& p) {
  return 4.0 * p.phi / std::numbers::pi * p.alpha / (4.0 + p.alpha);
}

PoiseuilleProfile poiseuille_profile(const FlowParams& params, const RadialOperators& ops) {
  params.validate();
  PoiseuilleProfile out;
  out.params = params;
  out.u_bar.resize(ops.n_points);
  out.du_bar.resize(ops.n_points);
  for (int j = 0; j < ops.n_points; ++j) {
    out.u_bar[j] = poiseuille_u(params, ops.nodes[j]);
    out.du_bar[j] = poiseuille_du(params, ops.nodes[j]);
  }
  return out;
}

double profile_flux(const PoiseuilleProfile& profile, const RadialOperators& ops) {
  return 2.0 * std::numbers::pi * ops.integrate_r(profile.u_bar);
}

}  // namespace pipeslip
