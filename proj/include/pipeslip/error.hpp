#pragma once

#include <stdexcept>
#include <string>

namespace pipeslip {

// Parameters of a per-mode solve, attached to numerical failures so sweeps can
// report exactly which triple broke.
struct SolveContext {
  double phi = 0.0;
  double xi = 0.0;
  double alpha = 0.0;
  int n_points = 0;
  double condition_estimate = 0.0;
};

std::string describe(const SolveContext& ctx);

class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, const SolveContext& ctx)
      : std::runtime_error(what + " [" + describe(ctx) + "]"), context_(ctx) {}
  const SolveContext& context() const { return context_; }

 private:
  SolveContext context_;
};

// Raised when a grid is too coarse for the requested construction or fit.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pipeslip
