#pragma once

namespace pipeslip {

// Modified Bessel function I_1 for rho >= 0. Throws std::invalid_argument for
// negative or non-finite input. Returns +inf once I_1 overflows a double.
double bessel_i1(double rho);

// exp(-rho) I_1(rho), finite for every rho >= 0.
double bessel_i1_scaled(double rho);

// I_1(a) / I_1(b) evaluated without overflow; b > 0.
double bessel_i1_ratio(double a, double b);

}  // namespace pipeslip
