#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pipeslip/base_flow.hpp"
#include "pipeslip/forcing.hpp"
#include "pipeslip/harness.hpp"
#include "pipeslip/regime.hpp"

namespace pipeslip::cli {

constexpr int schema_version = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sectioned key-value configuration. INI values arrive as strings and JSON
// values as native scalars or arrays; both go through the same typed getters.
// Every getter marks its key as known; finish() rejects anything unread.
class ConfigReader {
 public:
  static ConfigReader from_ini(const std::string& text);
  static ConfigReader from_json(const std::string& text);
  // .json selects JSON, anything else INI
  static ConfigReader from_file(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, std::optional<double> fallback = {});
  int get_int(const std::string& section, const std::string& key, std::optional<int> fallback = {});
  std::uint64_t get_uint64(const std::string& section, const std::string& key,
                           std::optional<std::uint64_t> fallback = {});
  bool get_bool(const std::string& section, const std::string& key, std::optional<bool> fallback = {});
  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = {});
  // "a, b, c", "linspace(a, b, n)", "logspace(a, b, n)" or a JSON array
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  std::optional<std::vector<double>> fallback = {});
  std::vector<int> get_ints(const std::string& section, const std::string& key,
                            std::optional<std::vector<int>> fallback = {});
  std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                       std::optional<std::vector<std::string>> fallback = {});

  void finish() const;

 private:
  const nlohmann::json* find(const std::string& section, const std::string& key);
  nlohmann::json tree_ = nlohmann::json::object();
  std::set<std::pair<std::string, std::string>> known_;
};

struct RunSection {
  std::uint64_t seed = 0;
  int threads = 1;
};

// Overrides from the command line.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct ModeConfig {
  RunSection run;
  FlowParams flow;
  double xi = 1.0;
  std::optional<int> n_points;  // fixed grid; otherwise gated
  ForcingFamily forcing;
  SweepOptions gate;
  RegimeThresholds thresholds;
  bool profiles = true;
};

struct BoundSpec {
  std::string quantity;
  double exponent = 0.0;
  bool one_plus = false;  // normalizer 1 + phi^exponent instead of phi^exponent
};

struct SweepConfig {
  RunSection run;
  std::vector<double> phis, xis, alphas;
  bool swirl = false;
  ForcingFamily forcing;
  SweepOptions gate;
  RegimeThresholds thresholds;
  std::vector<std::string> fit_quantities;
  std::vector<BoundSpec> bounds;
};

struct InequalitiesConfig {
  RunSection run;
  int samples = 1000;
  int n_points = 64;
};

struct RegimesConfig {
  RunSection run;
  std::vector<double> phis, xis, alphas;
  RegimeThresholds thresholds;
};

struct NonlinearConfig {
  RunSection run;
  FlowParams flow;
  double period_length = 0.0;
  int n_modes = 17;
  std::optional<int> n_points;
  ForcingFamily forcing;
  double forcing_norm = 1e-3;
  std::vector<int> wavenumbers{1};
  bool swirl_free = false;
  int max_iters = 50;
  double tol = 1e-10;
  int divergence_window = 5;
  std::optional<double> warm_start_scale;
};

ModeConfig parse_mode_config(ConfigReader& reader, const Overrides& overrides, bool swirl);
SweepConfig parse_sweep_config(ConfigReader& reader, const Overrides& overrides);
InequalitiesConfig parse_inequalities_config(ConfigReader& reader, const Overrides& overrides);
RegimesConfig parse_regimes_config(ConfigReader& reader, const Overrides& overrides);
NonlinearConfig parse_nonlinear_config(ConfigReader& reader, const Overrides& overrides);

// Fully resolved configurations, defaults included, tagged with schema_version.
nlohmann::json to_json(const ModeConfig& c);
nlohmann::json to_json(const SweepConfig& c);
nlohmann::json to_json(const InequalitiesConfig& c);
nlohmann::json to_json(const RegimesConfig& c);
nlohmann::json to_json(const NonlinearConfig& c);

}  // namespace pipeslip::cli
