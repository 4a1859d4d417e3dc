#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "pipeslip/polynomial.hpp"
#include "pipeslip/radial.hpp"
#include "pipeslip/stream.hpp"

namespace pipeslip {

// Named radial forcing shapes, independent of xi and of the grid.
//   "default": F^r = r(1 - r^2), F^z = 1 - r^2, F^theta = r(1 - r)
//   "random":  F^r = r p(r^2), F^z = q(r^2), F^theta = r s(r^2) with p, q, s
//              cubic with complex normal coefficients drawn from `seed`
// Each shape is scaled so that int (|F^r|^2 + |F^z|^2) r dr = amplitude^2 and
// int |F^theta|^2 r dr = amplitude^2.
struct ForcingFamily {
  std::string name = "default";
  std::uint64_t seed = 0;
  double amplitude = 1.0;
};

struct ForcingShape {
  RadialPolynomial f_r;
  RadialPolynomial f_z;
  RadialPolynomial f_theta;
};

ForcingShape make_forcing_shape(const ForcingFamily& family);

ModeForcing mode_forcing(const ForcingShape& shape, double xi, const RadialOperators& ops);
Eigen::VectorXcd swirl_forcing(const ForcingShape& shape, const RadialOperators& ops);

}  // namespace pipeslip
