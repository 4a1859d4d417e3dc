#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cli/commands.hpp"

using namespace pipeslip::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pipeslip_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_ini(const std::string& command, const std::string& ini, const fs::path& out, Overrides o = {}) {
  auto reader = ConfigReader::from_ini(ini);
  std::ostringstream log;
  return run_command(command, reader, {out, o}, log);
}

int run_json(const std::string& command, const std::string& text, const fs::path& out) {
  auto reader = ConfigReader::from_json(text);
  std::ostringstream log;
  return run_command(command, reader, {out, {}}, log);
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

int data_rows(const fs::path& csv) {
  std::istringstream in(slurp(csv));
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  return rows;
}

const std::string linear_ini = "[flow]\nphi = 1\nalpha = 1\n[mode]\nxi = 1\n";

}  // namespace

TEST_CASE("config reader: typed values, lists and ranges") {
  auto r = ConfigReader::from_ini(
      "# comment\n[a]\nx = 2.5\nn = 7\nflag = yes\nlist = 1, 2,3\nlog = logspace(1e2, 1e4, 3)\n"
      "lin = linspace(0, 1, 5)\nnames = h2, v_r_l2\n");
  CHECK(r.get_double("a", "x") == 2.5);
  CHECK(r.get_int("a", "n") == 7);
  CHECK(r.get_bool("a", "flag"));
  CHECK(r.get_doubles("a", "list") == std::vector<double>{1, 2, 3});
  CHECK(r.get_doubles("a", "log") == std::vector<double>{100, 1000, 10000});
  const auto lin = r.get_doubles("a", "lin");
  REQUIRE(lin.size() == 5);
  CHECK(lin[2] == 0.5);
  CHECK(r.get_strings("a", "names") == std::vector<std::string>{"h2", "v_r_l2"});
  CHECK(r.get_double("a", "missing", 4.0) == 4.0);
  CHECK_NOTHROW(r.finish());
  CHECK_THROWS_AS(r.get_double("b", "y"), ConfigError);

  auto bad = ConfigReader::from_ini("[a]\nx = 1e\n");
  CHECK_THROWS_AS(bad.get_double("a", "x"), ConfigError);
  auto frac = ConfigReader::from_ini("[a]\nn = 2.5\n");
  CHECK_THROWS_AS(frac.get_int("a", "n"), ConfigError);
  auto unknown = ConfigReader::from_ini("[a]\nx = 1\nz = 2\n");
  unknown.get_double("a", "x");
  CHECK_THROWS_AS(unknown.finish(), ConfigError);
  CHECK_THROWS_AS(ConfigReader::from_ini("x = 1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigReader::from_ini("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(ConfigReader::from_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(ConfigReader::from_json("{\"a\": 1}"), ConfigError);
}

TEST_CASE("solve-linear: minimal config succeeds and embeds the resolved config") {
  const auto out = scratch("linear");
  REQUIRE(run_ini("solve-linear", linear_ini, out) == exit_ok);
  const auto doc = load_json(out / "record.json");
  CHECK(doc["schema_version"] == schema_version);
  CHECK(doc["config"]["gate"]["identity_tol"] == 1e-6);
  CHECK(doc["record"]["real_gap"].get<double>() <= 1e-6);
  CHECK(doc["status"] == "ok");
  const std::string csv = slurp(out / "profile.csv");
  CHECK(csv.rfind("# schema_version=1\n# config={", 0) == 0);
  CHECK(data_rows(out / "profile.csv") == doc["record"]["n_points"].get<int>());
}

TEST_CASE("solve-linear: config errors exit with 2") {
  const auto out = scratch("linear_errors");
  CHECK(run_ini("solve-linear", "[flow]\nphi = 1x\nalpha = 1\n[mode]\nxi = 1\n", out) == exit_config_error);
  CHECK(run_ini("solve-linear", linear_ini + "n_points = 4\n", out) == exit_config_error);
  CHECK(run_ini("solve-linear", linear_ini + "[flow2]\nphi = 1\n", out) == exit_config_error);
  CHECK(run_ini("solve-linear", "[run]\nschema_version = 2\n" + linear_ini, out) == exit_config_error);
  CHECK(run_ini("solve-linear", "[flow]\nphi = -1\nalpha = 1\n[mode]\nxi = 1\n", out) == exit_config_error);
  CHECK(run_ini("solve-swirl", "[flow]\nphi = 1\nalpha = 0\n[mode]\nxi = 1\n", out) == exit_config_error);
  CHECK(run_ini("no-such-command", linear_ini, out) == exit_config_error);
  std::ostringstream log;
  CHECK(run_command_file("solve-linear", out / "missing.ini", {out, {}}, log) == exit_config_error);
}

TEST_CASE("solve-linear: an unreachable identity tolerance exits with 4") {
  const auto out = scratch("linear_gate");
  CHECK(run_ini("solve-linear", linear_ini + "[gate]\nidentity_tol = 1e-300\n", out) == exit_gate_failure);
  CHECK(load_json(out / "record.json")["status"] == "identity_gate_failed");
}

TEST_CASE("JSON and INI configs give identical records") {
  const auto a = scratch("json_a");
  const auto b = scratch("json_b");
  REQUIRE(run_ini("solve-linear", linear_ini + "n_points = 48\n", a) == exit_ok);
  REQUIRE(run_json("solve-linear", R"({"flow": {"phi": 1, "alpha": 1}, "mode": {"xi": 1, "n_points": 48}})", b) ==
          exit_ok);
  CHECK(slurp(a / "record.json") == slurp(b / "record.json"));
}

TEST_CASE("solve-swirl writes its record") {
  const auto out = scratch("swirl");
  REQUIRE(run_ini("solve-swirl", linear_ini, out) == exit_ok);
  const auto doc = load_json(out / "record.json");
  CHECK(doc["record"].contains("dz_l2"));
  CHECK(doc["boundary_residual"].get<double>() <= 1e-10);
}

TEST_CASE("sweep: three phi values give three records and one fit row") {
  const auto out = scratch("sweep");
  REQUIRE(run_ini("sweep", "[sweep]\nphi = 1, 10, 100\nxi = 1\nalpha = 1\n", out) == exit_ok);
  CHECK(load_json(out / "records.json")["records"].size() == 3);
  CHECK(data_rows(out / "records.csv") == 3);
  CHECK(data_rows(out / "fits.csv") == 1);
}

TEST_CASE("sweep: empty lists are config errors") {
  const auto out = scratch("sweep_empty");
  CHECK(run_ini("sweep", "[sweep]\nphi =\nxi = 1\nalpha = 1\n", out) == exit_config_error);
  CHECK(run_ini("sweep", "[sweep]\nphi = 1\nxi = 1\n", out) == exit_config_error);
}

TEST_CASE("sweep: a failing triple is recorded as a rejection") {
  const auto out = scratch("sweep_reject");
  const std::string ini =
      "[sweep]\nphi = 1, 1e8\nxi = 1\nalpha = 1\n"
      "[gate]\nmin_points = 16\nmax_points = 16\nmax_gate_points = 32\n";
  REQUIRE(run_ini("sweep", ini, out) == exit_ok);
  const auto doc = load_json(out / "records.json");
  CHECK(doc["records"].size() == 1);
  REQUIRE(doc["rejections"].size() == 1);
  CHECK(doc["rejections"][0]["phi"] == 1e8);
}

TEST_CASE("regimes: table reproduces the classification examples") {
  const auto out = scratch("regimes");
  REQUIRE(run_ini("regimes", "[grid]\nphi = 1e4\nxi = 1, 1e-4, 50\nalpha = 0\n", out) == exit_ok);
  const auto table = load_json(out / "regimes.json")["table"];
  REQUIRE(table.size() == 3);
  CHECK(table[0]["regime"] == "MidIntermediateSlip");
  CHECK(table[1]["regime"] == "LowFrequency");
  CHECK(table[2]["regime"] == "HighFrequency");
}

TEST_CASE("inequalities: fixed seed gives byte-identical reports") {
  const auto a = scratch("ineq_a");
  const auto b = scratch("ineq_b");
  const std::string ini = "[inequalities]\nsamples = 50\n";
  REQUIRE(run_ini("inequalities", ini, a, {7, std::nullopt}) == exit_ok);
  REQUIRE(run_ini("inequalities", ini, b, {7, std::nullopt}) == exit_ok);
  CHECK(slurp(a / "inequalities.json") == slurp(b / "inequalities.json"));
  CHECK(slurp(a / "inequalities.csv") == slurp(b / "inequalities.csv"));
  CHECK(load_json(a / "inequalities.json")["config"]["run"]["seed"] == 7);
}

TEST_CASE("solve-nonlinear: zero forcing gives a trace of length 1") {
  const auto out = scratch("nonlinear_zero");
  const std::string ini = "[flow]\nphi = 10\nalpha = 1\n[domain]\nperiod_length = 6.283185307179586\n"
                          "n_modes = 17\n[forcing]\nnorm = 0\n";
  REQUIRE(run_ini("solve-nonlinear", ini, out) == exit_ok);
  const auto doc = load_json(out / "nonlinear.json");
  CHECK(doc["trace"].size() == 1);
  CHECK(doc["termination"] == "converged");
  CHECK(data_rows(out / "trace.csv") == 1);
}

TEST_CASE("solve-nonlinear: swirl forcing without slip is a config error") {
  const auto out = scratch("nonlinear_noslip");
  CHECK(run_ini("solve-nonlinear", "[flow]\nphi = 10\nalpha = 0\n", out) == exit_config_error);
  CHECK(run_ini("solve-nonlinear", "[flow]\nphi = 10\nalpha = 0\n[forcing]\nswirl_free = true\nnorm = 1e-4\n"
                "[domain]\nn_modes = 5\n",
                out) == exit_ok);
}

TEST_CASE("determinism: repeated runs give byte-identical artifacts") {
  const std::string sweep_ini = "[run]\nthreads = 4\n[sweep]\nphi = logspace(1, 1e3, 4)\nxi = 0.5, 2\n"
                                "alpha = 0, 1\n[forcing]\nfamily = random\n";
  const std::string nl_ini = "[flow]\nphi = 10\nalpha = 1\n[domain]\nn_modes = 5\n[forcing]\nnorm = 1e-3\n"
                             "family = random\n";
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  REQUIRE(run_ini("sweep", sweep_ini, a) == exit_ok);
  REQUIRE(run_ini("sweep", sweep_ini, b) == exit_ok);
  REQUIRE(run_ini("solve-nonlinear", nl_ini, a, {11, std::nullopt}) == exit_ok);
  REQUIRE(run_ini("solve-nonlinear", nl_ini, b, {11, std::nullopt}) == exit_ok);
  for (const char* f : {"records.json", "records.csv", "fits.csv", "nonlinear.json", "trace.csv", "field.csv"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
}
