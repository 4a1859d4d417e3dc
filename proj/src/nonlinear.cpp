#include "pipeslip/nonlinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "pipeslip/harness.hpp"
#include "pipeslip/stream.hpp"
#include "pipeslip/swirl.hpp"

namespace pipeslip {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};
constexpr int n_test_functions = 8;
constexpr double axis_tolerance = 1e-8;

Eigen::VectorXcd apply_real(const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(m.rows());
  out.real() = m * v.real();
  out.imag() = m * v.imag();
  return out;
}

double max_abs(const AxisymField& v) {
  double m = 0.0;
  for (const auto& c : v.modes) {
    m = std::max({m, c.v_r.cwiseAbs().maxCoeff(), c.v_theta.cwiseAbs().maxCoeff(),
                  c.v_z.cwiseAbs().maxCoeff()});
  }
  return m;
}

double mode_weight(const AxisymField& v, int k) {
  return 2.0 * std::numbers::pi * v.period_length * (k == 0 ? 1.0 : 2.0);
}

void check_grid(const AxisymField& v) {
  if (!v.grid) throw std::invalid_argument("AxisymField: missing radial grid");
  const int n = v.grid->n_points;
  if (static_cast<int>(v.modes.size()) != v.max_wavenumber + 1) {
    throw std::invalid_argument("AxisymField: mode count does not match max_wavenumber");
  }
  for (const auto& c : v.modes) {
    if (c.v_r.size() != n || c.v_theta.size() != n || c.v_z.size() != n) {
      throw std::invalid_argument("AxisymField: samples do not match the radial grid");
    }
  }
}

void realify(ModeComponents& c) {
  c.v_r = c.v_r.real().cast<cd>();
  c.v_theta = c.v_theta.real().cast<cd>();
  c.v_z = c.v_z.real().cast<cd>();
}

struct ComponentParts {
  double l2_sq = 0.0;
  double grad_sq = 0.0;
  double lap_sq = 0.0;
};

// contributions of one component of one mode; `polar` adds the 1/r^2 terms
ComponentParts component_parts(const Eigen::VectorXcd& f, double xi, bool polar,
                               const RadialOperators& ops) {
  const double x2 = xi * xi;
  const Eigen::VectorXcd df = apply_real(ops.d1, f);
  Eigen::VectorXcd lap;
  if (polar) {
    lap = apply_real(ops.l_op, f) - x2 * f;
  } else {
    lap = apply_real(ops.d2, f) + df.cwiseQuotient(ops.nodes.cast<cd>()) - x2 * f;
  }
  ComponentParts p;
  const Eigen::VectorXd mod = f.cwiseAbs2();
  p.l2_sq = ops.integrate_r(mod);
  p.grad_sq = ops.integrate_r(Eigen::VectorXd(df.cwiseAbs2())) + x2 * p.l2_sq;
  if (polar) p.grad_sq += ops.integrate_inv_r(mod);
  p.lap_sq = ops.integrate_r(Eigen::VectorXd(lap.cwiseAbs2()));
  return p;
}

double interp_h54(double h1, double h2) { return std::pow(h1, 0.75) * std::pow(h2, 0.25); }

// real transforms of length M between Fourier coefficients k = 0..K and
// equispaced z samples
class AxialTransform {
 public:
  explicit AxialTransform(int max_wavenumber)
      : k_max_(max_wavenumber), m_(std::max(2, 3 * max_wavenumber + 1 + (3 * max_wavenumber + 1) % 2)) {
    spec_ = fftw_alloc_complex(m_ / 2 + 1);
    phys_ = fftw_alloc_real(m_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    to_phys_ = fftw_plan_dft_c2r_1d(m_, spec_, phys_, FFTW_ESTIMATE);
    to_spec_ = fftw_plan_dft_r2c_1d(m_, phys_, spec_, FFTW_ESTIMATE);
  }
  ~AxialTransform() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(to_phys_);
      fftw_destroy_plan(to_spec_);
    }
    fftw_free(spec_);
    fftw_free(phys_);
  }
  AxialTransform(const AxialTransform&) = delete;
  AxialTransform& operator=(const AxialTransform&) = delete;

  int size() const { return m_; }

  // coeffs[k], k = 0..K -> samples at z_m = m L / M
  void to_physical(const std::vector<cd>& coeffs, std::vector<double>& out) {
    for (int k = 0; k <= m_ / 2; ++k) {
      const cd c = k <= k_max_ ? coeffs[k] : cd{};
      spec_[k][0] = c.real();
      spec_[k][1] = k == 0 ? 0.0 : c.imag();
    }
    fftw_execute(to_phys_);
    out.assign(phys_, phys_ + m_);
  }

  // samples -> coeffs[k], k = 0..K (higher modes dropped)
  void to_spectral(const std::vector<double>& samples, std::vector<cd>& coeffs) {
    std::copy(samples.begin(), samples.end(), phys_);
    fftw_execute(to_spec_);
    coeffs.resize(k_max_ + 1);
    for (int k = 0; k <= k_max_; ++k) {
      coeffs[k] = cd{spec_[k][0], k == 0 ? 0.0 : spec_[k][1]} / static_cast<double>(m_);
    }
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
  int k_max_;
  int m_;
  fftw_complex* spec_ = nullptr;
  double* phys_ = nullptr;
  fftw_plan to_phys_ = nullptr;
  fftw_plan to_spec_ = nullptr;
};

}  // namespace

AxisymField AxisymField::zero(double period_length, int n_modes,
                              std::shared_ptr<const RadialOperators> grid) {
  if (!(std::isfinite(period_length) && period_length > 0.0)) {
    throw std::invalid_argument("AxisymField: period_length must be positive and finite");
  }
  if (n_modes < 1 || n_modes % 2 == 0) {
    throw std::invalid_argument("AxisymField: n_modes must be odd and >= 1, got " + std::to_string(n_modes));
  }
  if (!grid) throw std::invalid_argument("AxisymField: missing radial grid");
  AxisymField f;
  f.period_length = period_length;
  f.max_wavenumber = (n_modes - 1) / 2;
  f.grid = std::move(grid);
  const int n = f.grid->n_points;
  f.modes.assign(f.max_wavenumber + 1, ModeComponents{Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n),
                                                      Eigen::VectorXcd::Zero(n)});
  return f;
}

double AxisymField::xi(int k) const { return 2.0 * std::numbers::pi * k / period_length; }

ModeComponents AxisymField::mode(int k) const {
  if (std::abs(k) > max_wavenumber) {
    throw std::invalid_argument("AxisymField: wavenumber " + std::to_string(k) + " out of range");
  }
  if (k >= 0) return modes[k];
  const auto& c = modes[-k];
  return {c.v_r.conjugate(), c.v_theta.conjugate(), c.v_z.conjugate()};
}

bool AxisymField::same_layout(const AxisymField& o) const {
  return period_length == o.period_length && max_wavenumber == o.max_wavenumber &&
         grid && o.grid && grid->n_points == o.grid->n_points;
}

AxisymField& AxisymField::operator+=(const AxisymField& o) {
  if (!same_layout(o)) throw std::invalid_argument("AxisymField: layouts differ");
  for (std::size_t k = 0; k < modes.size(); ++k) {
    modes[k].v_r += o.modes[k].v_r;
    modes[k].v_theta += o.modes[k].v_theta;
    modes[k].v_z += o.modes[k].v_z;
  }
  return *this;
}

AxisymField& AxisymField::operator-=(const AxisymField& o) {
  if (!same_layout(o)) throw std::invalid_argument("AxisymField: layouts differ");
  for (std::size_t k = 0; k < modes.size(); ++k) {
    modes[k].v_r -= o.modes[k].v_r;
    modes[k].v_theta -= o.modes[k].v_theta;
    modes[k].v_z -= o.modes[k].v_z;
  }
  return *this;
}

AxisymField& AxisymField::operator*=(double a) {
  for (auto& c : modes) {
    c.v_r *= a;
    c.v_theta *= a;
    c.v_z *= a;
  }
  return *this;
}

bool AxisymField::is_zero() const {
  for (const auto& c : modes) {
    if (!c.v_r.isZero(0.0) || !c.v_theta.isZero(0.0) || !c.v_z.isZero(0.0)) return false;
  }
  return true;
}

FieldNorms field_norms(const AxisymField& v) {
  check_grid(v);
  const auto& ops = *v.grid;
  double l2 = 0.0, grad = 0.0, lap = 0.0;
  double r_l2 = 0.0, r_grad = 0.0, r_lap = 0.0;
  double dz_l2 = 0.0, dz_grad = 0.0;
  for (int k = 0; k <= v.max_wavenumber; ++k) {
    const double w = mode_weight(v, k);
    const double xi = v.xi(k);
    const auto& c = v.modes[k];
    const auto pr = component_parts(c.v_r, xi, true, ops);
    const auto pt = component_parts(c.v_theta, xi, true, ops);
    const auto pz = component_parts(c.v_z, xi, false, ops);
    l2 += w * (pr.l2_sq + pt.l2_sq + pz.l2_sq);
    grad += w * (pr.grad_sq + pt.grad_sq + pz.grad_sq);
    lap += w * (pr.lap_sq + pt.lap_sq + pz.lap_sq);
    r_l2 += w * pr.l2_sq;
    r_grad += w * pr.grad_sq;
    r_lap += w * pr.lap_sq;
    dz_l2 += w * xi * xi * pz.l2_sq;
    dz_grad += w * xi * xi * pz.grad_sq;
  }
  FieldNorms n;
  n.l2 = std::sqrt(l2);
  n.h1 = std::sqrt(l2 + grad);
  n.h2 = std::sqrt(l2 + grad + lap);
  n.h54 = interp_h54(n.h1, n.h2);
  n.vr_l2 = std::sqrt(r_l2);
  n.vr_h54 = interp_h54(std::sqrt(r_l2 + r_grad), std::sqrt(r_l2 + r_grad + r_lap));
  n.dz_vz_l2 = std::sqrt(dz_l2);
  n.dz_vz_h14 = std::pow(dz_l2, 0.375) * std::pow(dz_l2 + dz_grad, 0.125);
  return n;
}

double field_l2(const AxisymField& v) { return field_norms(v).l2; }

AxisymForcing make_axisym_forcing(const ForcingShape& shape, double period_length, int n_modes,
                                  const std::vector<int>& wavenumbers, double l2_norm, bool swirl_free,
                                  std::shared_ptr<const RadialOperators> grid) {
  if (!(std::isfinite(l2_norm) && l2_norm >= 0.0)) {
    throw std::invalid_argument("make_axisym_forcing: l2_norm must be finite and >= 0");
  }
  auto f = AxisymField::zero(period_length, n_modes, std::move(grid));
  const auto& ops = *f.grid;
  for (int k : wavenumbers) {
    if (k < 0 || k > f.max_wavenumber) {
      throw std::invalid_argument("make_axisym_forcing: wavenumber " + std::to_string(k) + " out of range");
    }
    auto& c = f.modes[k];
    c.v_r = shape.f_r.sample(ops);
    c.v_z = shape.f_z.sample(ops);
    c.v_theta = swirl_free ? Eigen::VectorXcd::Zero(ops.n_points) : Eigen::VectorXcd(shape.f_theta.sample(ops));
    if (k == 0) realify(c);
  }
  const double n0 = field_l2(f);
  if (l2_norm == 0.0) return f *= 0.0;
  if (n0 == 0.0) throw std::invalid_argument("make_axisym_forcing: shape is zero on the chosen modes");
  return f *= l2_norm / n0;
}

int nonlinear_grid_points(const FlowParams& params, double period_length, int n_modes, int min_points,
                          int max_points) {
  params.validate();
  if (!(period_length > 0.0) || n_modes < 1 || n_modes % 2 == 0) {
    throw std::invalid_argument("nonlinear_grid_points: need period_length > 0 and odd n_modes >= 1");
  }
  SweepOptions opt;
  opt.min_points = min_points;
  opt.max_points = max_points;
  opt.validate();
  int n = min_points;
  for (int k = 0; k <= (n_modes - 1) / 2; ++k) {
    n = std::max(n, beta_rule_points(params, 2.0 * std::numbers::pi * k / period_length, opt));
  }
  return n;
}

AxisymField apply_T(const AxisymForcing& forcing, const PoiseuilleProfile& profile) {
  check_grid(forcing);
  const auto& ops = *forcing.grid;
  if (profile.u_bar.size() != ops.n_points) {
    throw std::invalid_argument("apply_T: profile is not sampled on the forcing grid");
  }
  const double alpha = profile.params.alpha;
  bool has_swirl = false;
  for (const auto& c : forcing.modes) has_swirl = has_swirl || !c.v_theta.isZero(0.0);
  if (has_swirl && !(alpha > 0.0)) {
    throw std::invalid_argument(
        "apply_T: swirl forcing requires alpha > 0; at alpha = 0 the swirl problem has the nonzero "
        "solution v = c r and T is not defined");
  }
  auto v = AxisymField::zero(forcing.period_length, forcing.n_modes(), forcing.grid);
  for (int k = 0; k <= forcing.max_wavenumber; ++k) {
    const double xi = forcing.xi(k);
    const auto& f = forcing.modes[k];
    auto& out = v.modes[k];
    if (!f.v_r.isZero(0.0) || !f.v_z.isZero(0.0)) {
      ModeForcing mf{xi, f.v_r, f.v_z, std::nullopt};
      const auto sol = solve_mode(mf, profile, ops);
      out.v_r = sol.v_r_hat;
      out.v_z = sol.v_z_hat;
    }
    if (!f.v_theta.isZero(0.0)) {
      out.v_theta = solve_swirl_mode(xi, f.v_theta, profile, ops, alpha).v_theta_hat;
    }
    if (k == 0) realify(out);
  }
  return v;
}

AxisymForcing nonlinear_terms(const AxisymField& v) {
  check_grid(v);
  const auto& ops = *v.grid;
  const int n = ops.n_points;
  const int kmax = v.max_wavenumber;
  const double scale = max_abs(v);
  for (const auto& c : v.modes) {
    const double ar = std::abs(ops.at_axis(c.v_r));
    const double at = std::abs(ops.at_axis(c.v_theta));
    if (std::max(ar, at) > axis_tolerance * std::max(scale, 1.0)) {
      throw std::domain_error("nonlinear_terms: v^r or v^theta does not vanish at the axis (|v(0)| = " +
                              std::to_string(std::max(ar, at)) + ")");
    }
  }

  // radial and axial derivatives per mode, arranged as [component][k] columns
  const int nk = kmax + 1;
  std::array<Eigen::MatrixXcd, 9> fields;
  for (auto& m : fields) m.resize(n, nk);
  for (int k = 0; k < nk; ++k) {
    const auto& c = v.modes[k];
    const cd ixi = I * v.xi(k);
    fields[0].col(k) = c.v_r;
    fields[1].col(k) = c.v_theta;
    fields[2].col(k) = c.v_z;
    fields[3].col(k) = apply_real(ops.d1, c.v_r);
    fields[4].col(k) = apply_real(ops.d1, c.v_theta);
    fields[5].col(k) = apply_real(ops.d1, c.v_z);
    fields[6].col(k) = ixi * c.v_r;
    fields[7].col(k) = ixi * c.v_theta;
    fields[8].col(k) = ixi * c.v_z;
  }

  auto out = AxisymField::zero(v.period_length, v.n_modes(), v.grid);
  AxialTransform tr(kmax);
  const int m = tr.size();
  std::array<std::vector<double>, 9> phys;
  std::vector<cd> coeffs(nk);
  std::vector<double> fr(m), ft(m), fz(m);
  for (int j = 0; j < n; ++j) {
    const double r = ops.nodes[j];
    for (int q = 0; q < 9; ++q) {
      for (int k = 0; k < nk; ++k) coeffs[k] = fields[q](j, k);
      tr.to_physical(coeffs, phys[q]);
    }
    const auto& [vr, vt, vz, drvr, drvt, drvz, dzvr, dzvt, dzvz] = phys;
    for (int p = 0; p < m; ++p) {
      fr[p] = -(vr[p] * drvr[p] + vz[p] * dzvr[p]) + vt[p] * vt[p] / r;
      fz[p] = -(vr[p] * drvz[p] + vz[p] * dzvz[p]);
      ft[p] = -(vr[p] * drvt[p] + vz[p] * dzvt[p]) - vr[p] * vt[p] / r;
    }
    tr.to_spectral(fr, coeffs);
    for (int k = 0; k < nk; ++k) out.modes[k].v_r[j] = coeffs[k];
    tr.to_spectral(ft, coeffs);
    for (int k = 0; k < nk; ++k) out.modes[k].v_theta[j] = coeffs[k];
    tr.to_spectral(fz, coeffs);
    for (int k = 0; k < nk; ++k) out.modes[k].v_z[j] = coeffs[k];
  }
  return out;
}

double MomentumResidual::max() const { return std::max({meridional, swirl, boundary}); }

MomentumResidual momentum_residual(const AxisymField& v, const AxisymForcing& forcing,
                                   const PoiseuilleProfile& profile) {
  check_grid(v);
  if (!v.same_layout(forcing)) throw std::invalid_argument("momentum_residual: layouts differ");
  const auto& ops = *v.grid;
  const int n = ops.n_points;
  const int w = ops.wall_index();
  if (profile.u_bar.size() != n) {
    throw std::invalid_argument("momentum_residual: profile is not sampled on the field grid");
  }
  const double alpha = profile.params.alpha;
  const AxisymField g = forcing + nonlinear_terms(v);
  const Eigen::VectorXcd u = profile.u_bar.cast<cd>();
  const Eigen::VectorXcd du = profile.du_bar.cast<cd>();
  const Eigen::VectorXd& r = ops.nodes;

  double mer_res = 0.0, mer_scale = 0.0, sw_res = 0.0, sw_scale = 0.0;
  double bc_value = 0.0, bc_slope = 0.0, slope_scale = 0.0;
  for (int k = 0; k <= v.max_wavenumber; ++k) {
    const double xi = v.xi(k);
    const double x2 = xi * xi;
    const cd ixi = I * xi;
    const auto& c = v.modes[k];
    const auto& gk = g.modes[k];
    const Eigen::VectorXcd dvz = apply_real(ops.d1, c.v_z);
    const Eigen::VectorXcd dvt = apply_real(ops.d1, c.v_theta);

    for (int mm = 1; mm <= n_test_functions; ++mm) {
      const double m = mm;
      // phi = r^m (1 - r), (r phi)' = (m+1) r^m - (m+2) r^(m+1),
      // L phi = (m^2 - 1) r^(m-2) - ((m+1)^2 - 1) r^(m-1)
      Eigen::VectorXd phi(n), rphi_d(n), lphi(n);
      for (int j = 0; j < n; ++j) {
        phi[j] = std::pow(r[j], m) * (1.0 - r[j]);
        rphi_d[j] = (m + 1) * std::pow(r[j], m) - (m + 2) * std::pow(r[j], m + 1);
        lphi[j] = (m * m - 1) * std::pow(r[j], m - 2) - ((m + 1) * (m + 1) - 1) * std::pow(r[j], m - 1);
      }
      const Eigen::VectorXcd p = phi.cast<cd>(), q = rphi_d.cast<cd>(), l = lphi.cast<cd>();
      const cd terms[] = {
          ixi * ops.integrate_plain(Eigen::VectorXcd(u.cwiseProduct(c.v_z).cwiseProduct(q))),
          ixi * ops.integrate_r(Eigen::VectorXcd(du.cwiseProduct(c.v_z).cwiseProduct(p))),
          -x2 * ops.integrate_r(Eigen::VectorXcd(u.cwiseProduct(c.v_r).cwiseProduct(p))),
          ops.integrate_r(Eigen::VectorXcd(dvz.cwiseProduct(l))),
          dvz[w],  // (r phi)'(1) = -1
          2.0 * x2 * ops.integrate_plain(Eigen::VectorXcd(c.v_z.cwiseProduct(q))),
          I * x2 * xi * ops.integrate_r(Eigen::VectorXcd(c.v_r.cwiseProduct(p))),
          -ixi * ops.integrate_r(Eigen::VectorXcd(gk.v_r.cwiseProduct(p))),
          -ops.integrate_plain(Eigen::VectorXcd(gk.v_z.cwiseProduct(q))),
      };
      cd sum{};
      for (const cd& t : terms) {
        sum += t;
        mer_scale = std::max(mer_scale, std::abs(t));
      }
      mer_res = std::max(mer_res, std::abs(sum));

      // swirl: test function r^m
      Eigen::VectorXd s(n), s_d(n);
      for (int j = 0; j < n; ++j) {
        s[j] = std::pow(r[j], m);
        s_d[j] = (m + 1) * std::pow(r[j], m - 1);
      }
      const Eigen::VectorXcd sc = s.cast<cd>(), sdc = s_d.cast<cd>();
      const Eigen::VectorXcd rv_d = c.v_theta + r.cast<cd>().cwiseProduct(dvt);
      const cd sw_terms[] = {
          ixi * ops.integrate_r(Eigen::VectorXcd(u.cwiseProduct(c.v_theta).cwiseProduct(sc))),
          -rv_d[w],
          ops.integrate_plain(Eigen::VectorXcd(rv_d.cwiseProduct(sdc))),
          x2 * ops.integrate_r(Eigen::VectorXcd(c.v_theta.cwiseProduct(sc))),
          -ops.integrate_r(Eigen::VectorXcd(gk.v_theta.cwiseProduct(sc))),
      };
      cd ssum{};
      for (const cd& t : sw_terms) {
        ssum += t;
        sw_scale = std::max(sw_scale, std::abs(t));
      }
      sw_res = std::max(sw_res, std::abs(ssum));
    }

    bc_value = std::max({bc_value, std::abs(c.v_r[w]), std::abs(ops.at_axis(c.v_r)),
                         std::abs(ops.at_axis(c.v_theta))});
    bc_slope = std::max({bc_slope, std::abs(dvz[w] + alpha * c.v_z[w]),
                         std::abs(dvt[w] - (1.0 - alpha) * c.v_theta[w])});
    slope_scale = std::max({slope_scale, dvz.cwiseAbs().maxCoeff(), dvt.cwiseAbs().maxCoeff()});
  }
  const double vmax = max_abs(v);
  slope_scale = std::max(slope_scale, std::max(alpha, std::abs(1.0 - alpha)) * vmax);
  MomentumResidual res;
  res.meridional = mer_scale > 0.0 ? mer_res / mer_scale : 0.0;
  res.swirl = sw_scale > 0.0 ? sw_res / sw_scale : 0.0;
  res.boundary = std::max(vmax > 0.0 ? bc_value / vmax : 0.0, slope_scale > 0.0 ? bc_slope / slope_scale : 0.0);
  return res;
}

double divergence_residual(const AxisymField& v) {
  check_grid(v);
  const auto& ops = *v.grid;
  const Eigen::VectorXcd r = ops.nodes.cast<cd>();
  double res = 0.0;
  for (int k = 0; k <= v.max_wavenumber; ++k) {
    const auto& c = v.modes[k];
    const Eigen::VectorXcd div =
        apply_real(ops.d1, c.v_r) + c.v_r.cwiseQuotient(r) + I * v.xi(k) * c.v_z;
    res = std::max(res, div.cwiseAbs().maxCoeff());
  }
  const double vmax = max_abs(v);
  return vmax > 0.0 ? res / vmax : 0.0;
}

double mode0_flux(const AxisymField& v) {
  check_grid(v);
  const double vmax = max_abs(v);
  const double flux = std::abs(v.grid->integrate_r(v.modes[0].v_z));
  return vmax > 0.0 ? flux / vmax : 0.0;
}

void PicardConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("PicardConfig: max_iters must be >= 1");
  if (!(std::isfinite(tol) && tol > 0.0)) throw std::invalid_argument("PicardConfig: tol must be > 0");
  if (divergence_window < 1) throw std::invalid_argument("PicardConfig: divergence_window must be >= 1");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::Diverged: return "diverged";
  }
  return "unknown";
}

PicardResult picard_iterate(const AxisymForcing& forcing, const FlowParams& params,
                            const PicardConfig& config) {
  params.validate();
  config.validate();
  check_grid(forcing);
  const auto& ops = *forcing.grid;
  const auto profile = poiseuille_profile(params, ops);
  if (config.warm_start && !config.warm_start->same_layout(forcing)) {
    throw std::invalid_argument("picard_iterate: warm start layout differs from the forcing");
  }

  PicardResult result;
  auto& trace = result.trace;
  trace.forcing_norm = field_l2(forcing);
  const double phi = params.phi;
  const double j_scale = std::pow(phi, 1.0 / 16.0) * trace.forcing_norm;
  const double k_scale = std::pow(phi, -0.1) * trace.forcing_norm;

  const AxisymField tf = apply_T(forcing, profile);
  AxisymField v = config.warm_start ? *config.warm_start : tf;
  AxisymField nv;
  bool nv_valid = false;
  int growth = 0;
  double prev_increment = INFINITY;

  for (int it = 1; it <= config.max_iters; ++it) {
    if (!nv_valid) nv = nonlinear_terms(v);
    AxisymField next = tf + apply_T(nv, profile);
    const double increment = field_norms(next - v).h54;
    v = std::move(next);

    bool finite = std::isfinite(increment);
    IterationStep step;
    step.iteration = it;
    step.increment_norm = increment;
    if (finite) {
      const auto norms = field_norms(v);
      nv = nonlinear_terms(v);
      nv_valid = true;
      step.v_h54 = norms.h54;
      step.relative_increment = norms.h54 > 0.0 ? increment / norms.h54 : (increment > 0.0 ? INFINITY : 0.0);
      step.residual_norm = momentum_residual(v, forcing, profile).max();
      step.j_ratio = j_scale > 0.0 ? norms.h54 / j_scale : 0.0;
      step.k_sum = norms.vr_h54 + norms.dz_vz_h14;
      step.k_ratio = k_scale > 0.0 ? step.k_sum / k_scale : 0.0;
      finite = std::isfinite(step.v_h54);
    }
    trace.steps.push_back(step);
    if (!finite) {
      trace.termination = Termination::Diverged;
      result.v = std::move(v);
      return result;
    }
    if (increment <= config.tol * step.v_h54) {
      trace.termination = Termination::Converged;
      result.v = std::move(v);
      return result;
    }
    growth = increment > prev_increment ? growth + 1 : 0;
    prev_increment = increment;
    if (growth >= config.divergence_window) {
      trace.termination = Termination::Diverged;
      result.v = std::move(v);
      return result;
    }
  }
  trace.termination = Termination::MaxIterations;
  result.v = std::move(v);
  return result;
}

}  // namespace pipeslip
