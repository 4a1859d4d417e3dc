#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pipeslip/base_flow.hpp"
#include "pipeslip/forcing.hpp"
#include "pipeslip/regime.hpp"
#include "pipeslip/stream.hpp"
#include "pipeslip/swirl.hpp"

namespace pipeslip {

struct SweepOptions {
  int min_points = 48;
  int max_points = 512;         // cap applied to the beta rule
  int max_gate_points = 1024;   // finest grid the convergence gate may use
  double gate_tol = 1e-7;       // relative psi difference between n and 2n
  double identity_tol = 1e-6;
  int threads = 1;
  void validate() const;
};

// n >= max(min_points, 8 ceil(4 beta^(1/4))), capped at max_points
int beta_rule_points(const FlowParams& params, double xi, const SweepOptions& options);

struct SweepRecord {
  FlowParams params;
  double xi = 0.0;
  int n_points = 0;
  RegimeLabel regime = RegimeLabel::LowFrequency;
  RegimeThresholds thresholds;
  StreamNormReport norms;
  IdentityGaps identity_gaps;
  double forcing_norm = 0.0;
  bool gate_passed = false;
  double gate_difference = 0.0;
};

struct SwirlRecord {
  FlowParams params;
  double xi = 0.0;
  int n_points = 0;
  RegimeLabel regime = RegimeLabel::LowFrequency;
  RegimeThresholds thresholds;
  SwirlNormReport norms;
  IdentityGaps identity_gaps;
  double forcing_norm = 0.0;
  bool gate_passed = false;
  double gate_difference = 0.0;
};

struct Rejection {
  FlowParams params;
  double xi = 0.0;
  std::string reason;
};

template <class Record>
struct SweepResult {
  std::vector<Record> records;
  std::vector<Rejection> rejections;
};

// One gated solve: the beta-rule grid n is compared with 2n on shared nodes
// and doubled until the difference is below gate_tol or 2n would exceed
// max_gate_points. The record carries the finer solve.
std::variant<SweepRecord, Rejection> gated_linear_solve(const FlowParams& params, double xi,
                                                         const ForcingShape& shape,
                                                         const RegimeThresholds& thresholds,
                                                         const SweepOptions& options);
std::variant<SwirlRecord, Rejection> gated_swirl_solve(const FlowParams& params, double xi,
                                                        const ForcingShape& shape,
                                                        const RegimeThresholds& thresholds,
                                                        const SweepOptions& options);

// Triples run in phi-major, alpha, xi order; records and rejections are
// returned sorted by (phi, alpha, xi). Failures are isolated per triple.
SweepResult<SweepRecord> run_linear_sweep(const std::vector<double>& phis,
                                          const std::vector<double>& xis,
                                          const std::vector<double>& alphas,
                                          const ForcingFamily& family,
                                          const RegimeThresholds& thresholds,
                                          const SweepOptions& options = {});
SweepResult<SwirlRecord> run_swirl_sweep(const std::vector<double>& phis,
                                         const std::vector<double>& xis,
                                         const std::vector<double>& alphas,
                                         const ForcingFamily& family,
                                         const RegimeThresholds& thresholds,
                                         const SweepOptions& options = {});

// Named scalar fields of a record: phi, alpha, xi, n_points, forcing_norm and
// every norm of the report (e.g. v_r_l2, dz_v_z_l2, h1, h2 for the stream
// solver; dz_l2, h1 for swirl).
double record_field(const SweepRecord& r, std::string_view name);
double record_field(const SwirlRecord& r, std::string_view name);
std::vector<std::string> record_field_names(bool swirl);

struct SlopeFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  int points = 0;
};

// Least-squares fit of log y = exponent log x + intercept. Needs >= 3 points
// with positive x, y and nonzero spread in x. A constant y reports r^2 = 1.
SlopeFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y);

template <class Record, class Sel>
SlopeFit fit_scaling(std::vector<Record> records, Sel x, Sel y) {
  std::sort(records.begin(), records.end(), [&](const Record& a, const Record& b) { return x(a) < x(b); });
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    xs.push_back(x(r));
    ys.push_back(y(r));
  }
  return fit_scaling(xs, ys);
}

struct BoundReport {
  double sup_constant = 0.0;
  // last normalized value <= 2 x median, the sequence ordered by phi
  bool monotone_flag = false;
  double last_over_median = 0.0;
  std::vector<double> phis;
  std::vector<double> normalized;
  // smallest phi from which the normalized sequence never increases
  double nonincreasing_from_phi = std::numeric_limits<double>::quiet_NaN();
};

BoundReport bound_report_values(std::vector<double> phis, std::vector<double> normalized);

// normalized value = quantity / (normalizer(phi) * forcing_norm)
template <class Record, class Sel, class Norm>
BoundReport bound_report(const std::vector<Record>& records, Sel quantity, Norm normalizer) {
  std::vector<double> phis, vals;
  for (const auto& r : records) {
    phis.push_back(r.params.phi);
    vals.push_back(quantity(r) / (normalizer(r.params.phi) * r.forcing_norm));
  }
  return bound_report_values(std::move(phis), std::move(vals));
}

// normalizer phi^exponent
template <class Record, class Sel>
BoundReport bound_report(const std::vector<Record>& records, Sel quantity, double exponent) {
  return bound_report(records, quantity, [exponent](double phi) { return std::pow(phi, exponent); });
}

}  // namespace pipeslip
