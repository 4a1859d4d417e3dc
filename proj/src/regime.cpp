#include "pipeslip/regime.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pipeslip/error.hpp"

namespace pipeslip {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

// stretched-coordinate extent and resolution of the large-slip construction
constexpr double airy_rho_max = 12.0;
constexpr int airy_points = 64;

}  // namespace

void RegimeThresholds::validate() const {
  if (!(eps1 > 0.0 && eps1 < 1.0)) throw std::invalid_argument("eps1 must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
}

std::string_view to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::LowFrequency: return "LowFrequency";
    case RegimeLabel::HighFrequency: return "HighFrequency";
    case RegimeLabel::MidSmallSlip: return "MidSmallSlip";
    case RegimeLabel::MidLargeSlip: return "MidLargeSlip";
    case RegimeLabel::MidIntermediateSlip: return "MidIntermediateSlip";
  }
  return "unknown";
}

RegimeLabel regime_from_string(std::string_view name) {
  for (auto l : {RegimeLabel::LowFrequency, RegimeLabel::HighFrequency, RegimeLabel::MidSmallSlip,
                 RegimeLabel::MidLargeSlip, RegimeLabel::MidIntermediateSlip}) {
    if (to_string(l) == name) return l;
  }
  throw std::invalid_argument("unknown regime label: " + std::string(name));
}

RegimeLabel classify(const FlowParams& params, double xi, const RegimeThresholds& t) {
  params.validate();
  t.validate();
  if (!std::isfinite(xi)) throw std::invalid_argument("classify: xi must be finite");
  const double ax = std::abs(xi);
  if (ax == 0.0 || ax * t.eps1 * params.phi <= 1.0) return RegimeLabel::LowFrequency;
  if (ax >= t.eps1 * std::sqrt(params.phi)) return RegimeLabel::HighFrequency;
  const double scale = std::cbrt(params.phi * ax);
  const double slip = 4.0 + params.alpha;
  if (slip <= t.delta * scale) return RegimeLabel::MidSmallSlip;
  if (slip >= scale / t.delta) return RegimeLabel::MidLargeSlip;
  return RegimeLabel::MidIntermediateSlip;
}

BetaTheta beta_theta(const FlowParams& params, double xi) {
  params.validate();
  if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("beta_theta: xi must be > 0");
  const double b = 4.0 * params.phi * xi / (std::numbers::pi * (4.0 + params.alpha));
  const double x2 = xi * xi;
  BetaTheta out;
  out.beta = std::hypot(b, x2);
  out.theta = std::atan2(b, x2);
  out.cos_theta = x2 / out.beta;
  out.sin_theta = b / out.beta;
  return out;
}

BoundaryLayerProfile bl_profile_small_slip(const FlowParams& params, double xi,
                                           const RadialOperators& ops) {
  if (xi == 0.0) throw std::invalid_argument("bl_profile_small_slip: xi must be nonzero");
  const auto bt = beta_theta(params, std::abs(xi));
  // half-angle values from the stored cosine and sine
  const double ch = std::sqrt(0.5 * (1.0 + bt.cos_theta));
  const double sh = bt.sin_theta / (2.0 * ch);
  const double sb = std::sqrt(bt.beta);
  BoundaryLayerProfile out;
  out.beta = bt.beta;
  out.theta = bt.theta;
  out.kind = BoundaryLayerKind::SmallSlipExponential;
  out.samples.resize(ops.n_points);
  for (int j = 0; j < ops.n_points; ++j) {
    const double s = 1.0 - ops.nodes[j];
    const cd v = std::exp(-sb * ch * s) * std::exp(-I * (sb * sh * s));
    out.samples[j] = xi > 0 ? v : std::conj(v);
  }
  return out;
}

BoundaryLayerProfile bl_profile_large_slip(const FlowParams& params, double xi,
                                           const RadialOperators& ops) {
  params.validate();
  if (xi == 0.0 || !std::isfinite(xi)) {
    throw std::invalid_argument("bl_profile_large_slip: xi must be finite and nonzero");
  }
  if (!(params.phi > 0.0)) throw std::invalid_argument("bl_profile_large_slip: phi must be > 0");
  const double ax = std::abs(xi);
  const double mb = std::cbrt(4.0 * params.phi * ax / std::numbers::pi);
  const double k = ax * ax / (mb * mb);

  // Chebyshev grid on rho in (0, rho_max] through x = rho / rho_max
  const auto grid = radial_operators(airy_points);
  const int m = airy_points;
  const double h = airy_rho_max;
  const Eigen::MatrixXcd dd = grid->d2.cast<cd>() / (h * h);
  const Eigen::VectorXd rho = grid->nodes * h;

  // phi: phi(0) = 1, phi(rho_max) = 0, equation at nodes 1..m-2
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m);
  a.row(0) = grid->axis_row.cast<cd>();
  rhs[0] = 1.0;
  for (int i = 1; i < m - 1; ++i) {
    a.row(i) = dd.row(i);
    a(i, i) -= I * rho[i] + k;
  }
  a(m - 1, m - 1) = 1.0;
  const Eigen::VectorXcd phi = a.partialPivLu().solve(rhs);

  // psi: equation at nodes 1..m-2 (node 0 dropped), psi = psi' = 0 at rho_max
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(m, m);
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m);
  for (int i = 1; i < m - 1; ++i) {
    b.row(i - 1) = dd.row(i);
    b(i - 1, i) -= k;
    g[i - 1] = phi[i] / (mb * mb);
  }
  b(m - 2, m - 1) = 1.0;
  b.row(m - 1) = grid->d1.row(m - 1).cast<cd>() / h;
  const Eigen::VectorXcd psi = b.partialPivLu().solve(g);
  const cd wall = grid->at_axis(psi);
  if (!std::isfinite(std::abs(wall)) || std::abs(wall) == 0.0) {
    throw ResolutionError("bl_profile_large_slip: degenerate wall value");
  }

  BoundaryLayerProfile out;
  out.beta = mb;
  out.theta = std::numbers::pi / 2;
  out.kind = BoundaryLayerKind::LargeSlipAiry;
  out.samples = Eigen::VectorXcd::Zero(ops.n_points);
  std::vector<int> inside;
  std::vector<double> x;
  for (int j = 0; j < ops.n_points; ++j) {
    const double s = mb * (1.0 - ops.nodes[j]);
    if (s <= h) {
      inside.push_back(j);
      x.push_back(s / h);
    }
  }
  const Eigen::MatrixXd interp =
      grid->interpolation_matrix(Eigen::Map<const Eigen::VectorXd>(x.data(), Eigen::Index(x.size())));
  const Eigen::VectorXcd vals = interp.cast<cd>() * psi / wall;
  for (size_t q = 0; q < inside.size(); ++q) {
    out.samples[inside[q]] = xi > 0 ? vals[Eigen::Index(q)] : std::conj(vals[Eigen::Index(q)]);
  }
  for (int j = 0; j < ops.n_points; ++j) {
    if (mb * (1.0 - ops.nodes[j]) >= 5.0 && std::abs(out.samples[j]) > 0.05) {
      throw ResolutionError("bl_profile_large_slip: profile does not decay away from the wall");
    }
  }
  return out;
}

double cutoff_chi(double r) {
  const double s = std::clamp((r - 0.25) / 0.25, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double log_modulus_slope(const Eigen::VectorXcd& f, const RadialOperators& ops, double lo, double hi) {
  std::vector<double> xs, ys;
  for (int j = 0; j < ops.n_points; ++j) {
    const double s = 1.0 - ops.nodes[j];
    if (s >= lo && s <= hi && std::abs(f[j]) > 0.0) {
      xs.push_back(s);
      ys.push_back(std::log(std::abs(f[j])));
    }
  }
  if (xs.size() < 3) throw ResolutionError("log_modulus_slope: fewer than 3 nodes in the window");
  const double n = double(xs.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

DecayFit bl_decay_fit(const Eigen::VectorXcd& psi, const FlowParams& params, double xi,
                      const RadialOperators& ops) {
  const auto bt = beta_theta(params, std::abs(xi));
  const double sb = std::sqrt(bt.beta);
  const double rate = sb * std::sqrt(0.5 * (1.0 + bt.cos_theta));
  DecayFit out;
  out.predicted_rate = rate;
  if (psi.cwiseAbs().maxCoeff() == 0.0) {
    out.flat_signal = true;
    out.fitted_rate = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  std::vector<int> outer;
  for (int j = 0; j < ops.n_points; ++j) {
    if (rate * (1.0 - ops.nodes[j]) >= 8.0) outer.push_back(j);
  }
  Eigen::VectorXcd detrended = psi;
  if (outer.size() >= 8) {
    Eigen::MatrixXd v(outer.size(), 4);
    Eigen::VectorXcd y(outer.size());
    for (size_t q = 0; q < outer.size(); ++q) {
      const double r = ops.nodes[outer[q]];
      v.row(Eigen::Index(q)) << 1.0, r, r * r, r * r * r;
      y[Eigen::Index(q)] = psi[outer[q]];
    }
    const Eigen::VectorXcd c = v.cast<cd>().colPivHouseholderQr().solve(y);
    for (int j = 0; j < ops.n_points; ++j) {
      const double r = ops.nodes[j];
      detrended[j] -= c[0] + r * (c[1] + r * (c[2] + r * c[3]));
    }
  }
  const double lo = 0.2 / sb, hi = 2.0 / sb;
  int count = 0;
  for (int j = 0; j < ops.n_points; ++j) {
    const double s = 1.0 - ops.nodes[j];
    if (s >= lo && s <= hi) ++count;
  }
  out.window_points = count;
  if (count < 3) throw ResolutionError("bl_decay_fit: window under-resolved");
  out.fitted_rate = -log_modulus_slope(detrended, ops, lo, hi);
  return out;
}

DecayFit bl_decay_fit(const StreamSolution& sol, const FlowParams& params,
                      const RadialOperators& ops) {
  return bl_decay_fit(sol.psi_hat, params, sol.xi, ops);
}

}  // namespace pipeslip
