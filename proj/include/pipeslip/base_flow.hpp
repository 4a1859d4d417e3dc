#pragma once

#include <Eigen/Dense>

#include "pipeslip/radial.hpp"

namespace pipeslip {

struct FlowParams {
  double phi = 0.0;    // volumetric flux
  double alpha = 0.0;  // Navier slip coefficient

  // throws std::invalid_argument unless phi, alpha are finite and >= 0
  void validate() const;
};

// Poiseuille profile U(r) carrying flux phi under slip alpha (viscosity 1).
double poiseuille_u(const FlowParams& p, double r);
double poiseuille_du(const FlowParams& p, double r);

// (4 phi / pi) * alpha / (4 + alpha) = -U'(1); appears as the wall coupling
// coefficient in the stream-function energy identity.
double wall_shear(const FlowParams& p);

struct PoiseuilleProfile {
  FlowParams params;
  Eigen::VectorXd u_bar;
  Eigen::VectorXd du_bar;
};

PoiseuilleProfile poiseuille_profile(const FlowParams& params, const RadialOperators& ops);

// int_0^1 U 2 pi r dr by quadrature
double profile_flux(const PoiseuilleProfile& profile, const RadialOperators& ops);

}  // namespace pipeslip
