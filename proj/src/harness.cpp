#include "pipeslip/harness.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include "pipeslip/error.hpp"

namespace pipeslip {

namespace {

using cd = std::complex<double>;

// max |a_j - b_(2j+1)| / max |b| over the nodes shared by grids n and 2n
double nested_difference(const Eigen::VectorXcd& coarse, const Eigen::VectorXcd& fine) {
  double diff = 0.0;
  for (Eigen::Index j = 0; j < coarse.size(); ++j) {
    diff = std::max(diff, std::abs(coarse[j] - fine[2 * j + 1]));
  }
  const double scale = fine.cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

std::string format_reason(const std::string& what, double value, int n) {
  std::ostringstream os;
  os.precision(3);
  os << what << " " << value << " at n=" << n;
  return os.str();
}

// Shared gate loop. `solve(n)` returns the solution samples and an opaque
// payload used to build the record from the finest accepted grid.
template <class Solve>
auto run_gate(int n0, const SweepOptions& opt, Solve&& solve)
    -> std::tuple<bool, double, int, decltype(solve(n0))> {
  int n = n0;
  auto coarse = solve(n);
  while (true) {
    auto fine = solve(2 * n);
    const double diff = nested_difference(coarse.first, fine.first);
    if (diff <= opt.gate_tol || 4 * n > opt.max_gate_points) {
      return {diff <= opt.gate_tol, diff, 2 * n, std::move(fine)};
    }
    n *= 2;
    coarse = std::move(fine);
  }
}

template <class T, class Fn>
std::vector<std::optional<T>> parallel_map(size_t count, int threads, Fn&& fn) {
  std::vector<std::optional<T>> out(count);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < count; i = next++) out[i] = fn(i);
  };
  const int t = std::max(1, std::min<int>(threads, int(count)));
  if (t == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (int k = 0; k < t; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

auto key(const FlowParams& p, double xi) { return std::make_tuple(p.phi, p.alpha, xi); }

template <class Record, class Gate>
SweepResult<Record> sweep(const std::vector<double>& phis, const std::vector<double>& xis,
                          const std::vector<double>& alphas, const ForcingFamily& family,
                          const RegimeThresholds& thresholds, const SweepOptions& options,
                          Gate&& gate) {
  options.validate();
  thresholds.validate();
  const ForcingShape shape = make_forcing_shape(family);
  struct Triple {
    FlowParams params;
    double xi;
  };
  std::vector<Triple> triples;
  for (double phi : phis)
    for (double alpha : alphas)
      for (double xi : xis) triples.push_back({{phi, alpha}, xi});
  using Outcome = std::variant<Record, Rejection>;
  auto outcomes = parallel_map<Outcome>(triples.size(), options.threads, [&](size_t i) -> Outcome {
    const auto& t = triples[i];
    try {
      return gate(t.params, t.xi, shape, thresholds, options);
    } catch (const std::exception& e) {
      return Rejection{t.params, t.xi, e.what()};
    }
  });
  SweepResult<Record> result;
  for (auto& o : outcomes) {
    if (std::holds_alternative<Record>(*o)) {
      result.records.push_back(std::get<Record>(*o));
    } else {
      result.rejections.push_back(std::get<Rejection>(*o));
    }
  }
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const auto& a, const auto& b) { return key(a.params, a.xi) < key(b.params, b.xi); });
  std::stable_sort(result.rejections.begin(), result.rejections.end(),
                   [](const auto& a, const auto& b) { return key(a.params, a.xi) < key(b.params, b.xi); });
  return result;
}

}  // namespace

void SweepOptions::validate() const {
  if (min_points < min_radial_points) throw std::invalid_argument("min_points below the grid minimum");
  if (max_points < min_points) throw std::invalid_argument("max_points must be >= min_points");
  if (max_gate_points < 2 * min_points) {
    throw std::invalid_argument("max_gate_points must be >= 2 * min_points");
  }
  if (!(gate_tol > 0.0) || !(identity_tol > 0.0)) throw std::invalid_argument("tolerances must be > 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

int beta_rule_points(const FlowParams& params, double xi, const SweepOptions& options) {
  params.validate();
  const double ax = std::abs(xi);
  double beta = 0.0;
  if (ax > 0.0) beta = beta_theta(params, ax).beta;
  const int rule = 8 * int(std::ceil(4.0 * std::pow(beta, 0.25)));
  return std::min(std::max(options.min_points, rule), options.max_points);
}

std::variant<SweepRecord, Rejection> gated_linear_solve(const FlowParams& params, double xi,
                                                         const ForcingShape& shape,
                                                         const RegimeThresholds& thresholds,
                                                         const SweepOptions& options) {
  params.validate();
  if (!std::isfinite(xi)) throw std::invalid_argument("xi must be finite");
  const int n0 = beta_rule_points(params, xi, options);
  auto solve = [&](int n) {
    const auto ops = radial_operators(n);
    const auto profile = poiseuille_profile(params, *ops);
    const auto forcing = mode_forcing(shape, xi, *ops);
    auto sol = solve_mode(forcing, profile, *ops);
    const auto gaps = energy_identity_residuals(sol, forcing, profile, *ops);
    const double fnorm = forcing.norm(*ops);
    Eigen::VectorXcd psi = sol.psi_hat;
    return std::make_pair(std::move(psi), std::make_tuple(std::move(sol), gaps, fnorm));
  };
  auto [passed, diff, n, fine] = run_gate(n0, options, solve);
  auto& [sol, gaps, fnorm] = fine.second;
  if (!passed) return Rejection{params, xi, format_reason("convergence gate failed: difference", diff, n)};
  const double worst = std::max(gaps.real_gap, gaps.imag_gap);
  if (!(worst <= options.identity_tol)) {
    return Rejection{params, xi, format_reason("energy identity gap", worst, n)};
  }
  SweepRecord r;
  r.params = params;
  r.xi = xi;
  r.n_points = n;
  r.regime = classify(params, xi, thresholds);
  r.thresholds = thresholds;
  r.norms = sol.norms;
  r.identity_gaps = gaps;
  r.forcing_norm = fnorm;
  r.gate_passed = true;
  r.gate_difference = diff;
  return r;
}

std::variant<SwirlRecord, Rejection> gated_swirl_solve(const FlowParams& params, double xi,
                                                        const ForcingShape& shape,
                                                        const RegimeThresholds& thresholds,
                                                        const SweepOptions& options) {
  params.validate();
  if (!std::isfinite(xi)) throw std::invalid_argument("xi must be finite");
  const int n0 = beta_rule_points(params, xi, options);
  auto solve = [&](int n) {
    const auto ops = radial_operators(n);
    const auto profile = poiseuille_profile(params, *ops);
    const Eigen::VectorXcd f = swirl_forcing(shape, *ops);
    auto sol = solve_swirl_mode(xi, f, profile, *ops, params.alpha);
    const auto gaps = swirl_identity_residuals(sol, f, profile, *ops);
    const double fnorm = std::sqrt(ops->integrate_r(Eigen::VectorXd(f.cwiseAbs2())));
    Eigen::VectorXcd v = sol.v_theta_hat;
    return std::make_pair(std::move(v), std::make_tuple(std::move(sol), gaps, fnorm));
  };
  auto [passed, diff, n, fine] = run_gate(n0, options, solve);
  auto& [sol, gaps, fnorm] = fine.second;
  if (!passed) return Rejection{params, xi, format_reason("convergence gate failed: difference", diff, n)};
  const double worst = std::max(gaps.real_gap, gaps.imag_gap);
  if (!(worst <= options.identity_tol)) {
    return Rejection{params, xi, format_reason("swirl identity gap", worst, n)};
  }
  SwirlRecord r;
  r.params = params;
  r.xi = xi;
  r.n_points = n;
  r.regime = classify(params, xi, thresholds);
  r.thresholds = thresholds;
  r.norms = sol.norms;
  r.identity_gaps = gaps;
  r.forcing_norm = fnorm;
  r.gate_passed = true;
  r.gate_difference = diff;
  return r;
}

SweepResult<SweepRecord> run_linear_sweep(const std::vector<double>& phis,
                                          const std::vector<double>& xis,
                                          const std::vector<double>& alphas,
                                          const ForcingFamily& family,
                                          const RegimeThresholds& thresholds,
                                          const SweepOptions& options) {
  return sweep<SweepRecord>(phis, xis, alphas, family, thresholds, options,
                            [](auto&&... a) { return gated_linear_solve(a...); });
}

SweepResult<SwirlRecord> run_swirl_sweep(const std::vector<double>& phis,
                                         const std::vector<double>& xis,
                                         const std::vector<double>& alphas,
                                         const ForcingFamily& family,
                                         const RegimeThresholds& thresholds,
                                         const SweepOptions& options) {
  return sweep<SwirlRecord>(phis, xis, alphas, family, thresholds, options,
                            [](auto&&... a) { return gated_swirl_solve(a...); });
}

namespace {

template <class R>
std::optional<double> common_field(const R& r, std::string_view name) {
  if (name == "phi") return r.params.phi;
  if (name == "alpha") return r.params.alpha;
  if (name == "xi") return r.xi;
  if (name == "abs_xi") return std::abs(r.xi);
  if (name == "n_points") return double(r.n_points);
  if (name == "forcing_norm") return r.forcing_norm;
  if (name == "real_gap") return r.identity_gaps.real_gap;
  if (name == "imag_gap") return r.identity_gaps.imag_gap;
  if (name == "gate_difference") return r.gate_difference;
  return std::nullopt;
}

const std::vector<std::string> common_names = {"phi",      "alpha",        "xi",       "abs_xi",
                                               "n_points", "forcing_norm", "real_gap", "imag_gap",
                                               "gate_difference"};
const std::vector<std::string> stream_names = {
    "l_psi_sq", "grad_sq",  "psi_sq",        "xi2_grad_sq", "xi4_psi_sq", "alpha_wall", "u_grad_sq",
    "u_psi_sq", "grad_l_psi_sq", "v_r_l2", "v_z_l2", "dz_v_z_l2", "l2", "h1", "h2"};
const std::vector<std::string> swirl_names = {"grad_sq", "xi2_l2_sq", "u_l2_sq", "l2_sq", "dz_l2",
                                              "h1"};

}  // namespace

double record_field(const SweepRecord& r, std::string_view name) {
  if (auto v = common_field(r, name)) return *v;
  const auto& n = r.norms;
  const double values[] = {n.l_psi_sq, n.grad_sq,  n.psi_sq,        n.xi2_grad_sq, n.xi4_psi_sq,
                           n.alpha_wall, n.u_grad_sq, n.u_psi_sq, n.grad_l_psi_sq, n.v_r_l2,
                           n.v_z_l2,   n.dz_v_z_l2, n.l2,           n.h1,           n.h2};
  for (size_t i = 0; i < stream_names.size(); ++i) {
    if (stream_names[i] == name) return values[i];
  }
  throw std::invalid_argument("unknown record field: " + std::string(name));
}

double record_field(const SwirlRecord& r, std::string_view name) {
  if (auto v = common_field(r, name)) return *v;
  const auto& n = r.norms;
  const double values[] = {n.grad_sq, n.xi2_l2_sq, n.u_l2_sq, n.l2_sq, n.dz_l2, n.h1};
  for (size_t i = 0; i < swirl_names.size(); ++i) {
    if (swirl_names[i] == name) return values[i];
  }
  throw std::invalid_argument("unknown swirl record field: " + std::string(name));
}

std::vector<std::string> record_field_names(bool swirl) {
  std::vector<std::string> out = common_names;
  const auto& extra = swirl ? swirl_names : stream_names;
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

SlopeFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_scaling: x and y sizes differ");
  if (x.size() < 3) throw std::invalid_argument("fit_scaling: needs at least 3 points");
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw std::invalid_argument("fit_scaling: x and y must be positive and finite");
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double n = double(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 1e-300)) throw std::invalid_argument("fit_scaling: x has zero variance");
  SlopeFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 1e-28 * std::max(1.0, my * my * n) ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.x_min = *std::min_element(x.begin(), x.end());
  fit.x_max = *std::max_element(x.begin(), x.end());
  fit.points = int(x.size());
  return fit;
}

BoundReport bound_report_values(std::vector<double> phis, std::vector<double> normalized) {
  BoundReport rep;
  if (phis.empty()) return rep;
  std::vector<size_t> order(phis.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return phis[a] < phis[b]; });
  for (size_t i : order) {
    rep.phis.push_back(phis[i]);
    rep.normalized.push_back(normalized[i]);
  }
  rep.sup_constant = *std::max_element(rep.normalized.begin(), rep.normalized.end());
  std::vector<double> sorted = rep.normalized;
  std::sort(sorted.begin(), sorted.end());
  const size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  rep.last_over_median = median > 0.0 ? rep.normalized.back() / median
                                      : (rep.normalized.back() > 0.0 ? INFINITY : 0.0);
  rep.monotone_flag = rep.normalized.back() <= 2.0 * median;
  size_t start = m - 1;
  while (start > 0 && rep.normalized[start - 1] >= rep.normalized[start]) --start;
  rep.nonincreasing_from_phi = rep.phis[start];
  return rep;
}

}  // namespace pipeslip
