#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pipeslip/radial.hpp"

namespace pipeslip::cli {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string where(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

double parse_double(const std::string& text, const std::string& ctx) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) throw ConfigError(ctx + ": not a number: '" + text + "'");
  if (!std::isfinite(v)) throw ConfigError(ctx + ": value must be finite");
  return v;
}

long long parse_integer(const std::string& text, const std::string& ctx) {
  const std::string t = trim(text);
  long long v = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) throw ConfigError(ctx + ": not an integer: '" + text + "'");
  return v;
}

double as_double(const json& v, const std::string& ctx) {
  if (v.is_number()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(ctx + ": value must be finite");
    return d;
  }
  if (v.is_string()) return parse_double(v.get<std::string>(), ctx);
  throw ConfigError(ctx + ": expected a number");
}

long long as_integer(const json& v, const std::string& ctx) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError(ctx + ": expected an integer");
    return static_cast<long long>(d);
  }
  if (v.is_string()) return parse_integer(v.get<std::string>(), ctx);
  throw ConfigError(ctx + ": expected an integer");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_range(const std::string& text, const std::string& ctx) {
  const std::string t = trim(text);
  const bool lin = t.rfind("linspace(", 0) == 0;
  const bool log = t.rfind("logspace(", 0) == 0;
  if (!lin && !log) return {};
  if (t.back() != ')') throw ConfigError(ctx + ": unterminated range '" + text + "'");
  const auto args = split_list(t.substr(9, t.size() - 10));
  if (args.size() != 3) throw ConfigError(ctx + ": range needs (first, last, count)");
  const double a = parse_double(args[0], ctx);
  const double b = parse_double(args[1], ctx);
  const long long n = parse_integer(args[2], ctx);
  if (n < 1 || n > 100000) throw ConfigError(ctx + ": range count must be in [1, 100000]");
  if (log && !(a > 0.0 && b > 0.0)) throw ConfigError(ctx + ": logspace endpoints must be positive");
  std::vector<double> out;
  for (long long i = 0; i < n; ++i) {
    const double s = n == 1 ? 0.0 : double(i) / double(n - 1);
    if (i == n - 1) {
      out.push_back(b);
    } else if (lin) {
      out.push_back(a + s * (b - a));
    } else {
      out.push_back(std::pow(10.0, std::log10(a) + s * (std::log10(b) - std::log10(a))));
    }
  }
  return out;
}

void wrap(const std::string& ctx, auto&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

RunSection parse_run(ConfigReader& r, const Overrides& o) {
  const int version = r.get_int("run", "schema_version", schema_version);
  if (version != schema_version) {
    throw ConfigError("[run] schema_version: unsupported version " + std::to_string(version));
  }
  RunSection run;
  run.seed = o.seed ? *o.seed : r.get_uint64("run", "seed", 0);
  if (o.seed) r.get_uint64("run", "seed", 0);
  run.threads = o.threads ? *o.threads : r.get_int("run", "threads", 1);
  if (o.threads) r.get_int("run", "threads", 1);
  if (run.threads < 1 || run.threads > 256) throw ConfigError("threads must be in [1, 256]");
  return run;
}

FlowParams parse_flow(ConfigReader& r) {
  FlowParams p{r.get_double("flow", "phi"), r.get_double("flow", "alpha")};
  wrap("[flow]", [&] { p.validate(); });
  return p;
}

ForcingFamily parse_family(ConfigReader& r, const RunSection& run, bool with_amplitude) {
  ForcingFamily f;
  f.name = r.get_string("forcing", "family", "default");
  f.seed = r.get_uint64("forcing", "seed", run.seed);
  if (with_amplitude) f.amplitude = r.get_double("forcing", "amplitude", 1.0);
  if (f.name != "default" && f.name != "random") {
    throw ConfigError("[forcing] family: expected 'default' or 'random', got '" + f.name + "'");
  }
  if (!(f.amplitude > 0.0)) throw ConfigError("[forcing] amplitude must be > 0");
  return f;
}

SweepOptions parse_gate(ConfigReader& r, int threads) {
  SweepOptions g;
  g.min_points = r.get_int("gate", "min_points", g.min_points);
  g.max_points = r.get_int("gate", "max_points", g.max_points);
  g.max_gate_points = r.get_int("gate", "max_gate_points", g.max_gate_points);
  g.gate_tol = r.get_double("gate", "gate_tol", g.gate_tol);
  g.identity_tol = r.get_double("gate", "identity_tol", g.identity_tol);
  g.threads = threads;
  if (g.min_points < min_radial_points || g.max_gate_points > 4096) {
    throw ConfigError("[gate] grid sizes must lie in [" + std::to_string(min_radial_points) + ", 4096]");
  }
  wrap("[gate]", [&] { g.validate(); });
  return g;
}

RegimeThresholds parse_thresholds(ConfigReader& r) {
  RegimeThresholds t;
  t.eps1 = r.get_double("regime", "eps1", t.eps1);
  t.delta = r.get_double("regime", "delta", t.delta);
  wrap("[regime]", [&] { t.validate(); });
  return t;
}

std::optional<int> parse_points(ConfigReader& r, const std::string& section) {
  if (!r.has(section, "n_points")) {
    r.get_int(section, "n_points", 0);
    return std::nullopt;
  }
  const int n = r.get_int(section, "n_points");
  if (n < min_radial_points || n > 4096) {
    throw ConfigError(where(section, "n_points") + ": must lie in [" + std::to_string(min_radial_points) +
                      ", 4096], got " + std::to_string(n));
  }
  return n;
}

std::vector<double> nonempty(std::vector<double> v, const std::string& ctx) {
  if (v.empty()) throw ConfigError(ctx + ": list is empty");
  return v;
}

json run_json(const RunSection& r) {
  return {{"schema_version", schema_version}, {"seed", r.seed}, {"threads", r.threads}};
}

json family_json(const ForcingFamily& f) {
  return {{"family", f.name}, {"seed", f.seed}, {"amplitude", f.amplitude}};
}

json gate_json(const SweepOptions& g) {
  return {{"min_points", g.min_points},       {"max_points", g.max_points},
          {"max_gate_points", g.max_gate_points}, {"gate_tol", g.gate_tol},
          {"identity_tol", g.identity_tol}};
}

json thresholds_json(const RegimeThresholds& t) { return {{"eps1", t.eps1}, {"delta", t.delta}}; }

}  // namespace

ConfigReader ConfigReader::from_ini(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ConfigReader r;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config entry '" + section + "' is outside any section or is an empty section");
    }
    json& s = r.tree_[section];
    s = json::object();
    for (const auto& [key, value] : body) s[key] = value.data();
  }
  return r;
}

ConfigReader ConfigReader::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("JSON config must be an object of sections");
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError("JSON config section '" + section + "' must be an object");
  }
  ConfigReader r;
  r.tree_ = std::move(doc);
  return r;
}

ConfigReader ConfigReader::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return path.extension() == ".json" ? from_json(ss.str()) : from_ini(ss.str());
}

bool ConfigReader::has(const std::string& section, const std::string& key) const {
  const auto s = tree_.find(section);
  return s != tree_.end() && s->contains(key);
}

const nlohmann::json* ConfigReader::find(const std::string& section, const std::string& key) {
  known_.emplace(section, key);
  const auto s = tree_.find(section);
  if (s == tree_.end()) return nullptr;
  const auto k = s->find(key);
  return k == s->end() ? nullptr : &*k;
}

double ConfigReader::get_double(const std::string& section, const std::string& key,
                                std::optional<double> fallback) {
  const auto* v = find(section, key);
  if (!v) {
    if (!fallback) throw ConfigError(where(section, key) + ": required key missing");
    return *fallback;
  }
  return as_double(*v, where(section, key));
}

int ConfigReader::get_int(const std::string& section, const std::string& key, std::optional<int> fallback) {
  const auto* v = find(section, key);
  if (!v) {
    if (!fallback) throw ConfigError(where(section, key) + ": required key missing");
    return *fallback;
  }
  const long long x = as_integer(*v, where(section, key));
  if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(where(section, key) + ": out of range");
  return static_cast<int>(x);
}

std::uint64_t ConfigReader::get_uint64(const std::string& section, const std::string& key,
                                       std::optional<std::uint64_t> fallback) {
  const auto* v = find(section, key);
  if (!v) {
    if (!fallback) throw ConfigError(where(section, key) + ": required key missing");
    return *fallback;
  }
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  const long long x = as_integer(*v, where(section, key));
  if (x < 0) throw ConfigError(where(section, key) + ": must be >= 0");
  return static_cast<std::uint64_t>(x);
}

bool ConfigReader::get_bool(const std::string& section, const std::string& key, std::optional<bool> fallback) {
  const auto* v = find(section, key);
  if (!v) {
    if (!fallback) throw ConfigError(where(section, key) + ": required key missing");
    return *fallback;
  }
  if (v->is_boolean()) return v->get<bool>();
  if (v->is_string()) {
    const std::string t = trim(v->get<std::string>());
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
  }
  throw ConfigError(where(section, key) + ": expected true or false");
}

std::string ConfigReader::get_string(const std::string& section, const std::string& key,
                                     std::optional<std::string> fallback) {
  const auto* v = find(section, key);
  if (!v) {
    if (!fallback) throw ConfigError(where(section, key) + ": required key missing");
    return *fallback;
  }
  if (!v->is_string()) throw ConfigError(where(section, key) + ": expected a string");
  return trim(v->get<std::string>());
}

std::vector<double> ConfigReader::get_doubles(const std::string& section, const std::string& key,
                                              std::optional<std::vector<double>> fallback) {
  const auto* v = find(section, key);
  const std::string ctx = where(section, key);
  if (!v) {
    if (!fallback) throw ConfigError(ctx + ": required key missing");
    return *fallback;
  }
  std::vector<double> out;
  if (v->is_array()) {
    for (const auto& x : *v) out.push_back(as_double(x, ctx));
  } else if (v->is_number()) {
    out.push_back(as_double(*v, ctx));
  } else if (v->is_string()) {
    out = parse_range(v->get<std::string>(), ctx);
    if (out.empty()) {
      for (const auto& item : split_list(v->get<std::string>())) out.push_back(parse_double(item, ctx));
    }
  } else {
    throw ConfigError(ctx + ": expected a list of numbers");
  }
  return out;
}

std::vector<int> ConfigReader::get_ints(const std::string& section, const std::string& key,
                                        std::optional<std::vector<int>> fallback) {
  const auto* v = find(section, key);
  const std::string ctx = where(section, key);
  if (!v) {
    if (!fallback) throw ConfigError(ctx + ": required key missing");
    return *fallback;
  }
  std::vector<int> out;
  auto push = [&](long long x) {
    if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(ctx + ": out of range");
    out.push_back(static_cast<int>(x));
  };
  if (v->is_array()) {
    for (const auto& x : *v) push(as_integer(x, ctx));
  } else if (v->is_number()) {
    push(as_integer(*v, ctx));
  } else if (v->is_string()) {
    for (const auto& item : split_list(v->get<std::string>())) push(parse_integer(item, ctx));
  } else {
    throw ConfigError(ctx + ": expected a list of integers");
  }
  return out;
}

std::vector<std::string> ConfigReader::get_strings(const std::string& section, const std::string& key,
                                                   std::optional<std::vector<std::string>> fallback) {
  const auto* v = find(section, key);
  const std::string ctx = where(section, key);
  if (!v) {
    if (!fallback) throw ConfigError(ctx + ": required key missing");
    return *fallback;
  }
  std::vector<std::string> out;
  if (v->is_array()) {
    for (const auto& x : *v) {
      if (!x.is_string()) throw ConfigError(ctx + ": expected a list of strings");
      out.push_back(trim(x.get<std::string>()));
    }
  } else if (v->is_string()) {
    out = split_list(v->get<std::string>());
  } else {
    throw ConfigError(ctx + ": expected a list of strings");
  }
  return out;
}

void ConfigReader::finish() const {
  for (const auto& [section, body] : tree_.items()) {
    for (const auto& [key, value] : body.items()) {
      if (!known_.count({section, key})) throw ConfigError("unknown config key " + where(section, key));
    }
  }
}

ModeConfig parse_mode_config(ConfigReader& r, const Overrides& o, bool swirl) {
  ModeConfig c;
  c.run = parse_run(r, o);
  c.flow = parse_flow(r);
  if (swirl && !(c.flow.alpha > 0.0)) {
    throw ConfigError("[flow] alpha must be > 0 for the swirl problem (alpha = 0 admits v = c r)");
  }
  c.xi = r.get_double("mode", "xi");
  c.n_points = parse_points(r, "mode");
  c.forcing = parse_family(r, c.run, true);
  c.gate = parse_gate(r, c.run.threads);
  c.thresholds = parse_thresholds(r);
  c.profiles = r.get_bool("output", "profiles", true);
  r.finish();
  return c;
}

SweepConfig parse_sweep_config(ConfigReader& r, const Overrides& o) {
  SweepConfig c;
  c.run = parse_run(r, o);
  c.phis = nonempty(r.get_doubles("sweep", "phi"), "[sweep] phi");
  c.xis = nonempty(r.get_doubles("sweep", "xi"), "[sweep] xi");
  c.alphas = nonempty(r.get_doubles("sweep", "alpha"), "[sweep] alpha");
  c.swirl = r.get_bool("sweep", "swirl", false);
  for (double phi : c.phis) {
    if (phi < 0.0) throw ConfigError("[sweep] phi values must be >= 0");
  }
  for (double a : c.alphas) {
    if (a < 0.0 || (c.swirl && a == 0.0)) {
      throw ConfigError(c.swirl ? "[sweep] alpha values must be > 0 for swirl sweeps"
                                : "[sweep] alpha values must be >= 0");
    }
  }
  c.forcing = parse_family(r, c.run, true);
  c.gate = parse_gate(r, c.run.threads);
  c.thresholds = parse_thresholds(r);
  const auto names = record_field_names(c.swirl);
  auto check_name = [&](const std::string& q, const std::string& ctx) {
    if (std::find(names.begin(), names.end(), q) == names.end()) {
      throw ConfigError(ctx + ": unknown record quantity '" + q + "'");
    }
  };
  c.fit_quantities = r.get_strings("fit", "quantities",
                                   std::vector<std::string>{c.swirl ? "dz_l2" : "v_r_l2"});
  for (const auto& q : c.fit_quantities) check_name(q, "[fit] quantities");
  const auto qs = r.get_strings("bound", "quantities", std::vector<std::string>{});
  const auto es = r.get_doubles("bound", "exponents", std::vector<double>{});
  const auto fs = r.get_strings("bound", "forms", std::vector<std::string>(qs.size(), "power"));
  if (qs.size() != es.size() || qs.size() != fs.size()) {
    throw ConfigError("[bound] quantities, exponents and forms must have equal lengths");
  }
  for (size_t i = 0; i < qs.size(); ++i) {
    check_name(qs[i], "[bound] quantities");
    if (fs[i] != "power" && fs[i] != "one_plus_power") {
      throw ConfigError("[bound] forms: expected 'power' or 'one_plus_power', got '" + fs[i] + "'");
    }
    c.bounds.push_back({qs[i], es[i], fs[i] == "one_plus_power"});
  }
  r.finish();
  return c;
}

InequalitiesConfig parse_inequalities_config(ConfigReader& r, const Overrides& o) {
  InequalitiesConfig c;
  c.run = parse_run(r, o);
  c.samples = r.get_int("inequalities", "samples", c.samples);
  c.n_points = r.get_int("inequalities", "n_points", c.n_points);
  if (c.samples < 1 || c.samples > 10000000) throw ConfigError("[inequalities] samples must be in [1, 1e7]");
  if (c.n_points < 24 || c.n_points > 4096) throw ConfigError("[inequalities] n_points must be in [24, 4096]");
  r.finish();
  return c;
}

RegimesConfig parse_regimes_config(ConfigReader& r, const Overrides& o) {
  RegimesConfig c;
  c.run = parse_run(r, o);
  c.phis = nonempty(r.get_doubles("grid", "phi"), "[grid] phi");
  c.xis = nonempty(r.get_doubles("grid", "xi"), "[grid] xi");
  c.alphas = nonempty(r.get_doubles("grid", "alpha"), "[grid] alpha");
  for (double phi : c.phis) {
    if (!(phi > 0.0)) throw ConfigError("[grid] phi values must be > 0");
  }
  for (double a : c.alphas) {
    if (a < 0.0) throw ConfigError("[grid] alpha values must be >= 0");
  }
  c.thresholds = parse_thresholds(r);
  r.finish();
  return c;
}

NonlinearConfig parse_nonlinear_config(ConfigReader& r, const Overrides& o) {
  NonlinearConfig c;
  c.run = parse_run(r, o);
  c.flow = parse_flow(r);
  c.period_length = r.get_double("domain", "period_length", 8.0 * std::numbers::pi);
  c.n_modes = r.get_int("domain", "n_modes", c.n_modes);
  c.n_points = parse_points(r, "domain");
  if (!(c.period_length > 0.0)) throw ConfigError("[domain] period_length must be > 0");
  if (c.n_modes < 1 || c.n_modes % 2 == 0 || c.n_modes > 1025) {
    throw ConfigError("[domain] n_modes must be odd and in [1, 1025]");
  }
  c.forcing = parse_family(r, c.run, false);
  c.forcing_norm = r.get_double("forcing", "norm", c.forcing_norm);
  c.wavenumbers = r.get_ints("forcing", "wavenumbers", c.wavenumbers);
  c.swirl_free = r.get_bool("forcing", "swirl_free", c.swirl_free);
  if (c.forcing_norm < 0.0) throw ConfigError("[forcing] norm must be >= 0");
  if (c.wavenumbers.empty()) throw ConfigError("[forcing] wavenumbers: list is empty");
  for (int k : c.wavenumbers) {
    if (k < 0 || k > (c.n_modes - 1) / 2) {
      throw ConfigError("[forcing] wavenumbers must lie in [0, (n_modes - 1) / 2]");
    }
  }
  if (!c.swirl_free && c.forcing_norm > 0.0 && !(c.flow.alpha > 0.0)) {
    throw ConfigError("[forcing] swirl forcing needs alpha > 0 (alpha = 0 admits v = c r); set swirl_free");
  }
  c.max_iters = r.get_int("picard", "max_iters", c.max_iters);
  c.tol = r.get_double("picard", "tol", c.tol);
  c.divergence_window = r.get_int("picard", "divergence_window", c.divergence_window);
  if (r.has("picard", "warm_start_scale")) {
    c.warm_start_scale = r.get_double("picard", "warm_start_scale");
  } else {
    r.get_double("picard", "warm_start_scale", 0.0);
  }
  if (c.max_iters < 1 || c.max_iters > 10000) throw ConfigError("[picard] max_iters must be in [1, 10000]");
  if (!(c.tol > 0.0)) throw ConfigError("[picard] tol must be > 0");
  if (c.divergence_window < 1) throw ConfigError("[picard] divergence_window must be >= 1");
  r.finish();
  return c;
}

json to_json(const ModeConfig& c) {
  json j = {{"run", run_json(c.run)},
            {"flow", {{"phi", c.flow.phi}, {"alpha", c.flow.alpha}}},
            {"mode", {{"xi", c.xi}}},
            {"forcing", family_json(c.forcing)},
            {"gate", gate_json(c.gate)},
            {"regime", thresholds_json(c.thresholds)},
            {"output", {{"profiles", c.profiles}}}};
  if (c.n_points) j["mode"]["n_points"] = *c.n_points;
  return j;
}

json to_json(const SweepConfig& c) {
  json bounds = json::array();
  for (const auto& b : c.bounds) {
    bounds.push_back({{"quantity", b.quantity},
                      {"exponent", b.exponent},
                      {"form", b.one_plus ? "one_plus_power" : "power"}});
  }
  return {{"run", run_json(c.run)},
          {"sweep", {{"phi", c.phis}, {"xi", c.xis}, {"alpha", c.alphas}, {"swirl", c.swirl}}},
          {"forcing", family_json(c.forcing)},
          {"gate", gate_json(c.gate)},
          {"regime", thresholds_json(c.thresholds)},
          {"fit", {{"quantities", c.fit_quantities}}},
          {"bound", bounds}};
}

json to_json(const InequalitiesConfig& c) {
  return {{"run", run_json(c.run)}, {"inequalities", {{"samples", c.samples}, {"n_points", c.n_points}}}};
}

json to_json(const RegimesConfig& c) {
  return {{"run", run_json(c.run)},
          {"grid", {{"phi", c.phis}, {"xi", c.xis}, {"alpha", c.alphas}}},
          {"regime", thresholds_json(c.thresholds)}};
}

json to_json(const NonlinearConfig& c) {
  json j = {{"run", run_json(c.run)},
            {"flow", {{"phi", c.flow.phi}, {"alpha", c.flow.alpha}}},
            {"domain", {{"period_length", c.period_length}, {"n_modes", c.n_modes}}},
            {"forcing",
             {{"family", c.forcing.name},
              {"seed", c.forcing.seed},
              {"norm", c.forcing_norm},
              {"wavenumbers", c.wavenumbers},
              {"swirl_free", c.swirl_free}}},
            {"picard",
             {{"max_iters", c.max_iters}, {"tol", c.tol}, {"divergence_window", c.divergence_window}}}};
  if (c.n_points) j["domain"]["n_points"] = *c.n_points;
  if (c.warm_start_scale) j["picard"]["warm_start_scale"] = *c.warm_start_scale;
  return j;
}

}  // namespace pipeslip::cli
