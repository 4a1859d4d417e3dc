#include "cli/commands.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "pipeslip/error.hpp"
#include "pipeslip/inequalities.hpp"
#include "pipeslip/nonlinear.hpp"
#include "pipeslip/stream.hpp"
#include "pipeslip/swirl.hpp"

namespace pipeslip::cli {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// CSV with the resolved configuration in leading comment lines
class CsvWriter {
 public:
  CsvWriter(const json& config, const std::vector<std::string>& columns) {
    out_ << "# schema_version=" << schema_version << "\n# config=" << config.dump() << "\n";
    for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }
  CsvWriter& cell(double x) { return text(fmt(x)); }
  CsvWriter& text(const std::string& s) {
    out_ << (first_ ? "" : ",") << s;
    first_ = false;
    return *this;
  }
  void end_row() {
    out_ << "\n";
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  bool first_ = true;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file " + path.string());
  out << content;
  if (!out) throw ConfigError("failed writing output file " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

json document(std::string_view command, const json& config) {
  return {{"schema_version", schema_version}, {"command", command}, {"config", config}};
}

double finite_or_nan(double x) { return std::isfinite(x) ? x : std::nan(""); }

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class Record>
json record_json(const Record& r, bool swirl) {
  json j;
  for (const auto& name : record_field_names(swirl)) j[name] = number(record_field(r, name));
  j["regime"] = to_string(r.regime);
  j["eps1"] = r.thresholds.eps1;
  j["delta"] = r.thresholds.delta;
  j["gate_passed"] = r.gate_passed;
  return j;
}

json rejection_json(const Rejection& r) {
  return {{"phi", r.params.phi}, {"alpha", r.params.alpha}, {"xi", r.xi}, {"reason", r.reason}};
}

void complex_columns(std::vector<std::string>& cols, const std::string& name) {
  cols.push_back("re_" + name);
  cols.push_back("im_" + name);
}

int finish_identity(double worst, double tol, std::ostream& log) {
  if (worst <= tol) return exit_ok;
  log << "energy identity gap " << fmt(worst) << " exceeds identity_tol " << fmt(tol) << "\n";
  return exit_gate_failure;
}

int cmd_solve_linear(ConfigReader& reader, const CommandOptions& opts, std::ostream& log) {
  const auto c = parse_mode_config(reader, opts.overrides, false);
  const json cfg = to_json(c);
  json doc = document("solve-linear", cfg);
  const auto shape = make_forcing_shape(c.forcing);

  int n = 0;
  json gate = {{"mode", "fixed"}};
  if (c.n_points) {
    n = *c.n_points;
  } else {
    SweepOptions gopt = c.gate;
    gopt.identity_tol = INFINITY;
    const auto res = gated_linear_solve(c.flow, c.xi, shape, c.thresholds, gopt);
    if (const auto* rej = std::get_if<Rejection>(&res)) {
      doc["status"] = "rejected";
      doc["rejection"] = rejection_json(*rej);
      write_json(opts.out_dir / "record.json", doc);
      log << "solve-linear rejected: " << rej->reason << "\n";
      return exit_numerical_failure;
    }
    const auto& rec = std::get<SweepRecord>(res);
    n = rec.n_points;
    gate = {{"mode", "gated"}, {"passed", rec.gate_passed}, {"difference", number(rec.gate_difference)}};
  }
  const auto ops = radial_operators(n);
  const auto profile = poiseuille_profile(c.flow, *ops);
  const auto mf = mode_forcing(shape, c.xi, *ops);
  const auto sol = solve_mode(mf, profile, *ops);
  SweepRecord rec;
  rec.params = c.flow;
  rec.xi = c.xi;
  rec.n_points = n;
  rec.regime = classify(c.flow, c.xi, c.thresholds);
  rec.thresholds = c.thresholds;
  rec.norms = sol.norms;
  rec.identity_gaps = energy_identity_residuals(sol, mf, profile, *ops);
  rec.forcing_norm = mf.norm(*ops);
  rec.gate_passed = gate.contains("passed") && gate["passed"].get<bool>();
  rec.gate_difference = gate.contains("difference") && gate["difference"].is_number()
                            ? gate["difference"].get<double>()
                            : std::nan("");
  const double worst = std::max(rec.identity_gaps.real_gap, rec.identity_gaps.imag_gap);
  const int code = finish_identity(worst, c.gate.identity_tol, log);

  doc["status"] = code == exit_ok ? "ok" : "identity_gate_failed";
  doc["gate"] = gate;
  doc["record"] = record_json(rec, false);
  doc["boundary_residual"] = boundary_residuals(sol, profile, *ops).max();
  write_json(opts.out_dir / "record.json", doc);

  if (c.profiles) {
    std::vector<std::string> cols{"r"};
    for (const char* name : {"psi", "v_r", "v_z", "omega"}) complex_columns(cols, name);
    CsvWriter csv(cfg, cols);
    for (int j = 0; j < n; ++j) {
      csv.cell(ops->nodes[j]);
      for (const auto* v : {&sol.psi_hat, &sol.v_r_hat, &sol.v_z_hat, &sol.omega_hat}) {
        csv.cell((*v)[j].real()).cell((*v)[j].imag());
      }
      csv.end_row();
    }
    write_file(opts.out_dir / "profile.csv", csv.str());
  }
  log << "solve-linear: n=" << n << " regime=" << to_string(rec.regime) << " gap=" << fmt(worst) << "\n";
  return code;
}

int cmd_solve_swirl(ConfigReader& reader, const CommandOptions& opts, std::ostream& log) {
  const auto c = parse_mode_config(reader, opts.overrides, true);
  const json cfg = to_json(c);
  json doc = document("solve-swirl", cfg);
  const auto shape = make_forcing_shape(c.forcing);

  int n = 0;
  json gate = {{"mode", "fixed"}};
  if (c.n_points) {
    n = *c.n_points;
  } else {
    SweepOptions gopt = c.gate;
    gopt.identity_tol = INFINITY;
    const auto res = gated_swirl_solve(c.flow, c.xi, shape, c.thresholds, gopt);
    if (const auto* rej = std::get_if<Rejection>(&res)) {
      doc["status"] = "rejected";
      doc["rejection"] = rejection_json(*rej);
      write_json(opts.out_dir / "record.json", doc);
      log << "solve-swirl rejected: " << rej->reason << "\n";
      return exit_numerical_failure;
    }
    const auto& rec = std::get<SwirlRecord>(res);
    n = rec.n_points;
    gate = {{"mode", "gated"}, {"passed", rec.gate_passed}, {"difference", number(rec.gate_difference)}};
  }
  const auto ops = radial_operators(n);
  const auto profile = poiseuille_profile(c.flow, *ops);
  const Eigen::VectorXcd f = swirl_forcing(shape, *ops);
  const auto sol = solve_swirl_mode(c.xi, f, profile, *ops, c.flow.alpha);
  SwirlRecord rec;
  rec.params = c.flow;
  rec.xi = c.xi;
  rec.n_points = n;
  rec.regime = classify(c.flow, c.xi, c.thresholds);
  rec.thresholds = c.thresholds;
  rec.norms = sol.norms;
  rec.identity_gaps = swirl_identity_residuals(sol, f, profile, *ops);
  rec.forcing_norm = std::sqrt(ops->integrate_r(Eigen::VectorXd(f.cwiseAbs2())));
  rec.gate_passed = gate.contains("passed") && gate["passed"].get<bool>();
  rec.gate_difference = gate.contains("difference") && gate["difference"].is_number()
                            ? gate["difference"].get<double>()
                            : std::nan("");
  const double worst = std::max(rec.identity_gaps.real_gap, rec.identity_gaps.imag_gap);
  const int code = finish_identity(worst, c.gate.identity_tol, log);

  const auto bc = swirl_boundary_residuals(sol, c.flow.alpha, *ops);
  doc["status"] = code == exit_ok ? "ok" : "identity_gate_failed";
  doc["gate"] = gate;
  doc["record"] = record_json(rec, true);
  doc["boundary_trace"] = {sol.boundary_trace.real(), sol.boundary_trace.imag()};
  doc["boundary_residual"] = std::max(bc.axis, bc.robin);
  write_json(opts.out_dir / "record.json", doc);

  if (c.profiles) {
    std::vector<std::string> cols{"r"};
    complex_columns(cols, "v_theta");
    CsvWriter csv(cfg, cols);
    for (int j = 0; j < n; ++j) {
      csv.cell(ops->nodes[j]).cell(sol.v_theta_hat[j].real()).cell(sol.v_theta_hat[j].imag());
      csv.end_row();
    }
    write_file(opts.out_dir / "profile.csv", csv.str());
  }
  log << "solve-swirl: n=" << n << " regime=" << to_string(rec.regime) << " gap=" << fmt(worst) << "\n";
  return code;
}

template <class Record>
void write_sweep(const SweepConfig& c, const SweepResult<Record>& res, const CommandOptions& opts,
                 std::ostream& log) {
  const json cfg = to_json(c);
  const auto names = record_field_names(c.swirl);

  json doc = document("sweep", cfg);
  doc["records"] = json::array();
  doc["rejections"] = json::array();
  for (const auto& r : res.records) doc["records"].push_back(record_json(r, c.swirl));
  for (const auto& r : res.rejections) doc["rejections"].push_back(rejection_json(r));

  std::vector<std::string> cols = names;
  cols.insert(cols.end(), {"regime", "gate_passed"});
  CsvWriter rec_csv(cfg, cols);
  for (const auto& r : res.records) {
    for (const auto& name : names) rec_csv.cell(finite_or_nan(record_field(r, name)));
    rec_csv.text(std::string(to_string(r.regime))).text(r.gate_passed ? "true" : "false");
    rec_csv.end_row();
  }

  // fits and bounds over phi within each (alpha, xi) group
  std::map<std::pair<double, double>, std::vector<Record>> groups;
  for (const auto& r : res.records) groups[{r.params.alpha, r.xi}].push_back(r);
  CsvWriter fit_csv(cfg, {"kind", "quantity", "alpha", "xi", "points", "exponent", "intercept", "r_squared",
                          "normalizer_exponent", "normalizer", "sup_constant", "last_over_median",
                          "bounded", "nonincreasing_from_phi"});
  json fits = json::array();
  const std::string nan = fmt(std::nan(""));
  for (const auto& [key, records] : groups) {
    const auto [alpha, xi] = key;
    for (const auto& q : c.fit_quantities) {
      if (records.size() < 3) continue;
      const auto phi_of = [](const Record& r) { return r.params.phi; };
      const auto val_of = [&q](const Record& r) { return record_field(r, q); };
      SlopeFit fit;
      try {
        fit = fit_scaling(records, std::function<double(const Record&)>(phi_of),
                          std::function<double(const Record&)>(val_of));
      } catch (const std::invalid_argument& e) {
        log << "fit of " << q << " skipped at alpha=" << fmt(alpha) << " xi=" << fmt(xi) << ": " << e.what()
            << "\n";
        continue;
      }
      fit_csv.text("fit").text(q).cell(alpha).cell(xi).cell(fit.points).cell(fit.exponent).cell(fit.intercept);
      fit_csv.cell(fit.r_squared).text(nan).text("").text(nan).text(nan).text("").text(nan);
      fit_csv.end_row();
      fits.push_back({{"kind", "fit"},
                      {"quantity", q},
                      {"alpha", alpha},
                      {"xi", xi},
                      {"points", fit.points},
                      {"exponent", fit.exponent},
                      {"intercept", fit.intercept},
                      {"r_squared", fit.r_squared}});
    }
    for (const auto& b : c.bounds) {
      const auto quantity = [&b](const Record& r) { return record_field(r, b.quantity); };
      const auto normalizer = [&b](double phi) {
        return b.one_plus ? 1.0 + std::pow(phi, b.exponent) : std::pow(phi, b.exponent);
      };
      const auto rep = bound_report(records, quantity, normalizer);
      const std::string form = b.one_plus ? "one_plus_power" : "power";
      fit_csv.text("bound").text(b.quantity).cell(alpha).cell(xi).cell(double(records.size()));
      fit_csv.text(nan).text(nan).text(nan).cell(b.exponent).text(form).cell(rep.sup_constant);
      fit_csv.cell(rep.last_over_median).text(rep.monotone_flag ? "true" : "false");
      fit_csv.cell(rep.nonincreasing_from_phi);
      fit_csv.end_row();
      fits.push_back({{"kind", "bound"},
                      {"quantity", b.quantity},
                      {"alpha", alpha},
                      {"xi", xi},
                      {"points", records.size()},
                      {"normalizer_exponent", b.exponent},
                      {"normalizer", form},
                      {"sup_constant", number(rep.sup_constant)},
                      {"last_over_median", number(rep.last_over_median)},
                      {"bounded", rep.monotone_flag},
                      {"normalized", rep.normalized},
                      {"nonincreasing_from_phi", number(rep.nonincreasing_from_phi)}});
    }
  }
  doc["fits"] = fits;
  write_json(opts.out_dir / "records.json", doc);
  write_file(opts.out_dir / "records.csv", rec_csv.str());
  write_file(opts.out_dir / "fits.csv", fit_csv.str());
  log << "sweep: " << res.records.size() << " records, " << res.rejections.size() << " rejections, "
      << fits.size() << " fit rows\n";
}

int cmd_sweep(ConfigReader& reader, const CommandOptions& opts, std::ostream& log) {
  const auto c = parse_sweep_config(reader, opts.overrides);
  if (c.swirl) {
    write_sweep(c, run_swirl_sweep(c.phis, c.xis, c.alphas, c.forcing, c.thresholds, c.gate), opts, log);
  } else {
    write_sweep(c, run_linear_sweep(c.phis, c.xis, c.alphas, c.forcing, c.thresholds, c.gate), opts, log);
  }
  return exit_ok;
}

int cmd_inequalities(ConfigReader& reader, const CommandOptions& opts, std::ostream& log) {
  const auto c = parse_inequalities_config(reader, opts.overrides);
  const json cfg = to_json(c);
  const auto ops = radial_operators(c.n_points);
  const auto reports = inequality_suite(c.samples, c.run.seed, *ops);
  json doc = document("inequalities", cfg);
  doc["reports"] = json::array();
  CsvWriter csv(cfg, {"inequality", "samples", "violations", "explicit_constant", "max_ratio"});
  int violations = 0;
  for (const auto& r : reports) {
    doc["reports"].push_back({{"inequality", r.name},
                              {"samples", r.samples},
                              {"violations", r.violations},
                              {"explicit_constant", r.explicit_constant},
                              {"max_ratio", number(r.max_ratio)}});
    csv.text(r.name).cell(r.samples).cell(r.violations).text(r.explicit_constant ? "true" : "false");
    csv.cell(r.max_ratio);
    csv.end_row();
    if (r.explicit_constant) violations += r.violations;
  }
  write_json(opts.out_dir / "inequalities.json", doc);
  write_file(opts.out_dir / "inequalities.csv", csv.str());
  log << "inequalities: " << reports.size() << " inequalities, " << violations
      << " violations of explicit constants\n";
  return violations == 0 ? exit_ok : exit_gate_failure;
}

int cmd_regimes(ConfigReader& reader, const CommandOptions& opts, std::ostream& log) {
  const auto c = parse_regimes_config(reader, opts.overrides);
  const json cfg = to_json(c);
  json doc = document("regimes", cfg);
  doc["table"] = json::array();
  CsvWriter csv(cfg, {"phi", "alpha", "xi", "regime", "beta", "theta"});
  for (double phi : c.phis) {
    for (double alpha : c.alphas) {
      for (double xi : c.xis) {
        const FlowParams p{phi, alpha};
        const auto label = classify(p, xi, c.thresholds);
        double beta = std::nan(""), theta = std::nan("");
        if (xi != 0.0) {
          const auto bt = beta_theta(p, std::abs(xi));
          beta = bt.beta;
          theta = bt.theta;
        }
        csv.cell(phi).cell(alpha).cell(xi).text(std::string(to_string(label))).cell(beta).cell(theta);
        csv.end_row();
        doc["table"].push_back({{"phi", phi},
                                {"alpha", alpha},
                                {"xi", xi},
                                {"regime", to_string(label)},
                                {"beta", number(beta)},
                                {"theta", number(theta)}});
      }
    }
  }
  write_json(opts.out_dir / "regimes.json", doc);
  write_file(opts.out_dir / "regimes.csv", csv.str());
  log << "regimes: " << doc["table"].size() << " rows\n";
  return exit_ok;
}

int cmd_solve_nonlinear(ConfigReader& reader, const CommandOptions& opts, std::ostream& log) {
  const auto c = parse_nonlinear_config(reader, opts.overrides);
  const json cfg = to_json(c);
  const int n = c.n_points ? *c.n_points : nonlinear_grid_points(c.flow, c.period_length, c.n_modes);
  const auto grid = radial_operators(n);
  const auto shape = make_forcing_shape({c.forcing.name, c.forcing.seed, 1.0});
  const auto forcing = make_axisym_forcing(shape, c.period_length, c.n_modes, c.wavenumbers, c.forcing_norm,
                                           c.swirl_free, grid);
  const auto profile = poiseuille_profile(c.flow, *grid);
  PicardConfig pc;
  pc.max_iters = c.max_iters;
  pc.tol = c.tol;
  pc.divergence_window = c.divergence_window;
  if (c.warm_start_scale) pc.warm_start = *c.warm_start_scale * apply_T(forcing, profile);
  const auto res = picard_iterate(forcing, c.flow, pc);
  const auto& trace = res.trace;

  json doc = document("solve-nonlinear", cfg);
  doc["n_points"] = n;
  doc["termination"] = to_string(trace.termination);
  doc["iterations"] = trace.steps.size();
  doc["forcing_norm"] = trace.forcing_norm;
  json steps = json::array();
  CsvWriter tcsv(cfg, {"iteration", "increment_norm", "relative_increment", "residual_norm", "v_h54",
                       "j_ratio", "k_sum", "k_ratio"});
  for (const auto& s : trace.steps) {
    steps.push_back({{"iteration", s.iteration},
                     {"increment_norm", number(s.increment_norm)},
                     {"relative_increment", number(s.relative_increment)},
                     {"residual_norm", number(s.residual_norm)},
                     {"v_h54", number(s.v_h54)},
                     {"j_ratio", number(s.j_ratio)},
                     {"k_sum", number(s.k_sum)},
                     {"k_ratio", number(s.k_ratio)}});
    tcsv.cell(s.iteration).cell(s.increment_norm).cell(s.relative_increment).cell(s.residual_norm);
    tcsv.cell(s.v_h54).cell(s.j_ratio).cell(s.k_sum).cell(s.k_ratio);
    tcsv.end_row();
  }
  doc["trace"] = steps;

  int code = exit_ok;
  if (trace.termination == Termination::Converged) {
    const auto mr = momentum_residual(res.v, forcing, profile);
    const auto norms = field_norms(res.v);
    doc["momentum_residual"] = {{"meridional", mr.meridional}, {"swirl", mr.swirl}, {"boundary", mr.boundary}};
    doc["divergence_residual"] = divergence_residual(res.v);
    doc["mode0_flux"] = mode0_flux(res.v);
    doc["norms"] = {{"l2", norms.l2},         {"h1", norms.h1},         {"h2", norms.h2},
                    {"h54", norms.h54},       {"vr_h54", norms.vr_h54}, {"dz_vz_h14", norms.dz_vz_h14}};
    if (!(mr.max() <= 10.0 * c.tol)) {
      log << "momentum residual " << fmt(mr.max()) << " exceeds 10 tol\n";
      code = exit_gate_failure;
    }
  } else {
    code = exit_numerical_failure;
  }
  doc["status"] = code == exit_ok ? "ok" : (code == exit_gate_failure ? "residual_gate_failed" : "not_converged");
  write_json(opts.out_dir / "nonlinear.json", doc);
  write_file(opts.out_dir / "trace.csv", tcsv.str());

  std::vector<std::string> cols{"k", "r"};
  for (const char* name : {"v_r", "v_theta", "v_z"}) complex_columns(cols, name);
  CsvWriter fcsv(cfg, cols);
  for (int k = 0; k <= res.v.max_wavenumber; ++k) {
    const auto& m = res.v.modes[k];
    for (int j = 0; j < n; ++j) {
      fcsv.cell(k).cell(grid->nodes[j]);
      for (const auto* v : {&m.v_r, &m.v_theta, &m.v_z}) fcsv.cell((*v)[j].real()).cell((*v)[j].imag());
      fcsv.end_row();
    }
  }
  write_file(opts.out_dir / "field.csv", fcsv.str());
  log << "solve-nonlinear: " << to_string(trace.termination) << " after " << trace.steps.size()
      << " iterations\n";
  return code;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"solve-linear", "solve-swirl",  "sweep",
                                                 "inequalities", "regimes", "solve-nonlinear"};
  return names;
}

int run_command(std::string_view command, ConfigReader& reader, const CommandOptions& options,
                std::ostream& log) {
  try {
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + options.out_dir.string());
    if (command == "solve-linear") return cmd_solve_linear(reader, options, log);
    if (command == "solve-swirl") return cmd_solve_swirl(reader, options, log);
    if (command == "sweep") return cmd_sweep(reader, options, log);
    if (command == "inequalities") return cmd_inequalities(reader, options, log);
    if (command == "regimes") return cmd_regimes(reader, options, log);
    if (command == "solve-nonlinear") return cmd_solve_nonlinear(reader, options, log);
    throw ConfigError("unknown command '" + std::string(command) + "'");
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << "\n";
    return exit_numerical_failure;
  } catch (const std::invalid_argument& e) {
    log << "invalid input: " << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << "\n";
    return exit_numerical_failure;
  }
}

int run_command_file(std::string_view command, const std::filesystem::path& config_path,
                     const CommandOptions& options, std::ostream& log) {
  try {
    auto reader = ConfigReader::from_file(config_path);
    return run_command(command, reader, options, log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return exit_config_error;
  }
}

}  // namespace pipeslip::cli
