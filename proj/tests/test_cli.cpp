#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "zeno/cli.hpp"

using namespace zeno::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "zeno_cli_tests" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

constexpr const char* kEqConfig = R"(# exercised by several cases below
[spectrum]
eta_max_sq_over_omega_a = 0.01
omega0_over_omega_a = 2.0
t_c_over_inv_omega_a = 2.0

[equilibrium]
alpha_min_dimensionless = 0.5
alpha_max_dimensionless = 4.0
n_alpha_count = 8
)";

}  // namespace

TEST_CASE("config parser handles sections, comments, lists, and value kinds") {
  const auto cfg = parse_config(
      "top = 3\n"
      "[a]\n"
      "x = 1.5  # trailing comment\n"
      "names_ok.dotted = -2e-3\n"
      "lst = 1 2, 3.5\n"
      "flag = true\n"
      "w = cool\n"
      "big = inf\n");
  CHECK(cfg.values.at("top").kind == ConfigValue::Kind::number);
  CHECK(cfg.values.at("top").number == 3.0);
  CHECK(cfg.values.at("a.x").number == 1.5);
  CHECK(cfg.values.at("a.x").line == 3);
  CHECK(cfg.values.at("a.names_ok.dotted").number == -2e-3);
  REQUIRE(cfg.values.at("a.lst").kind == ConfigValue::Kind::number_list);
  CHECK(cfg.values.at("a.lst").list == std::vector<double>{1.0, 2.0, 3.5});
  CHECK(cfg.values.at("a.flag").kind == ConfigValue::Kind::boolean);
  CHECK(cfg.values.at("a.flag").flag);
  CHECK(cfg.values.at("a.w").kind == ConfigValue::Kind::word);
  CHECK(cfg.values.at("a.w").text == "cool");
  CHECK(cfg.values.at("a.big").number == std::numeric_limits<double>::infinity());
}

TEST_CASE("config parser rejects malformed input with line numbers") {
  CHECK_THROWS_WITH_AS(parse_config("x = 1\nx = 2\n"),
                       doctest::Contains("line 2: duplicate key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("just words\n"),
                       doctest::Contains("expected key = value"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[open\nx = 1\n"),
                       doctest::Contains("unterminated"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("k = \n"), doctest::Contains("empty value"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("k = two words\n"),
                       doctest::Contains("neither a number list nor a single word"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("bad key = 1\n"), doctest::Contains("bad key"),
                       ConfigError);
  // nan would poison every downstream comparison; the parser stops it early
  CHECK_THROWS_WITH_AS(parse_config("k = nan\n"),
                       doctest::Contains("nan is not a usable value"), ConfigError);
}

TEST_CASE("config hash is FNV-1a over the raw bytes") {
  CHECK(parse_config("").hash == 14695981039346656037ull);
  // independent fold of the same bytes
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : std::string(kEqConfig)) h = (h ^ c) * 1099511628211ull;
  CHECK(parse_config(kEqConfig).hash == h);
  CHECK(parse_config("x = 1\n").hash != parse_config("x = 1 \n").hash);
}

TEST_CASE("schema validation names the offender and its line") {
  auto cfg = parse_config(std::string(kEqConfig) + "oops = 1\n");
  CHECK_THROWS_WITH_AS(run("equilibrium", cfg, {}),
                       doctest::Contains("unknown key 'equilibrium.oops'"), ConfigError);

  auto wrong_kind = parse_config(
      "[spectrum]\n"
      "eta_max_sq_over_omega_a = word\n"
      "omega0_over_omega_a = 2.0\n"
      "t_c_over_inv_omega_a = 2.0\n"
      "[equilibrium]\n"
      "alpha_min_dimensionless = 0.5\n"
      "alpha_max_dimensionless = 4.0\n"
      "n_alpha_count = 8\n");
  CHECK_THROWS_WITH_AS(run("equilibrium", wrong_kind, {}),
                       doctest::Contains("expected a number"), ConfigError);

  auto missing = parse_config("[spectrum]\neta_max_sq_over_omega_a = 0.01\n");
  CHECK_THROWS_WITH_AS(run("equilibrium", missing, {}),
                       doctest::Contains("missing required key"), ConfigError);

  auto nondet = parse_config(std::string(kEqConfig) + "deterministic = false\n");
  CHECK_THROWS_AS(run("equilibrium", nondet, {}), ConfigError);

  CHECK_THROWS_WITH_AS(run("frobnicate", parse_config(""), {}),
                       doctest::Contains("unknown subcommand"), ConfigError);
}

TEST_CASE("figures refuses an explicit config") {
  CHECK_THROWS_WITH_AS(run("figures", parse_config("x = 1\n"), {}),
                       doctest::Contains("do not pass --config"), ConfigError);
}

TEST_CASE("equilibrium run writes a stamped CSV next to an SVG") {
  const fs::path dir = fresh_dir("eq");
  RunOptions opt;
  opt.outdir = dir.string();
  const auto files = run("equilibrium", parse_config(kEqConfig), opt);
  REQUIRE(files.size() == 2);
  CHECK(fs::exists(files[0]));
  CHECK(fs::exists(files[1]));

  const std::string csv = slurp(files[0]);
  CHECK(csv.find("# zenotherm equilibrium") == 0);
  CHECK(csv.find("# config-hash: fnv1a64 ") != std::string::npos);
  CHECK(csv.find("alpha_dimensionless,rho_ee_bare_dimensionless") != std::string::npos);
  // 8 grid points -> 8 data rows after the header
  int data_rows = 0;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#' && line.find("alpha_") != 0) ++data_rows;
  CHECK(data_rows == 8);

  const std::string svg = slurp(files[1]);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("repeat runs of the same config are byte-identical") {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  constexpr const char* rates_cfg =
      "[spectrum]\n"
      "eta_max_sq_over_omega_a = 0.07\n"
      "omega0_over_omega_a = 1.0\n"
      "t_c_over_inv_omega_a = 10.0\n"
      "[temperature]\n"
      "alpha_b_dimensionless = 1.0\n"
      "[evolution]\n"
      "horizon_over_inv_omega_a = 3.0\n";
  RunOptions oa, ob;
  oa.outdir = a.string();
  ob.outdir = b.string();
  const auto fa = run("rates", parse_config(rates_cfg), oa);
  const auto fb = run("rates", parse_config(rates_cfg), ob);
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) CHECK(slurp(fa[i]) == slurp(fb[i]));
}

TEST_CASE("schedule emits a machine-readable summary") {
  const fs::path dir = fresh_dir("sched");
  RunOptions opt;
  opt.outdir = dir.string();
  const auto files = run("schedule", parse_config(
      "[spectrum]\n"
      "eta_max_sq_over_omega_a = 0.07\n"
      "omega0_over_omega_a = 1.0\n"
      "t_c_over_inv_omega_a = 10.0\n"
      "[temperature]\n"
      "alpha_s_dimensionless = 1.0\n"
      "alpha_b_dimensionless = 1.0\n"
      "[objective]\n"
      "direction = heat\n"
      "n_measurements_count = 2\n"
      "dt_min_over_inv_omega_a = 0.05\n"
      "dt_max_over_inv_omega_a = 0.2\n"), opt);
  REQUIRE(files.size() == 3);

  const auto j = nlohmann::json::parse(slurp(files[0]));
  CHECK(j.at("artifact") == "zenotherm schedule");
  CHECK(j.at("engine") == "master_equation");
  CHECK(j.at("direction") == "heat");
  CHECK(j.at("event_times_over_inv_omega_a").size() == 2);
  CHECK(j.at("event_rho_ee").size() == 2);
  const double ref = j.at("reference_rho_ee").get<double>();
  CHECK(j.at("extremal_rho_ee").get<double>() > ref);
  // repeated projective probing in the Zeno window heats monotonically
  CHECK(j.at("event_rho_ee")[1].get<double>() > j.at("event_rho_ee")[0].get<double>());
}

TEST_CASE("engine-specific keys are rejected on the wrong engine") {
  const std::string base =
      "[spectrum]\n"
      "eta_max_sq_over_omega_a = 0.07\n"
      "omega0_over_omega_a = 1.0\n"
      "t_c_over_inv_omega_a = 10.0\n"
      "[objective]\n"
      "direction = heat\n"
      "n_measurements_count = 2\n"
      "dt_min_over_inv_omega_a = 0.05\n"
      "dt_max_over_inv_omega_a = 0.2\n";
  // master-equation engine with a bath.* key
  auto me_bath = parse_config(base +
                              "[temperature]\n"
                              "alpha_s_dimensionless = 1.0\n"
                              "alpha_b_dimensionless = 1.0\n"
                              "[bath]\n"
                              "n_modes_count = 10\n");
  CHECK_THROWS_WITH_AS(run("schedule", me_bath, {}),
                       doctest::Contains("exact engine only"), ConfigError);
  // exact engine with temperature keys
  auto exact_temp = parse_config("engine = exact\n" + base +
                                 "[temperature]\n"
                                 "alpha_b_dimensionless = 1.0\n"
                                 "[bath]\n"
                                 "n_modes_count = 10\n");
  CHECK_THROWS_WITH_AS(run("schedule", exact_temp, {}),
                       doctest::Contains("zero-temperature vacuum"), ConfigError);
}

TEST_CASE("entropy requires a finite bath temperature") {
  auto cfg = parse_config(
      "[spectrum]\n"
      "eta_max_sq_over_omega_a = 0.07\n"
      "omega0_over_omega_a = 1.0\n"
      "t_c_over_inv_omega_a = 10.0\n"
      "[temperature]\n"
      "alpha_s_dimensionless = 1.0\n"
      "alpha_b_dimensionless = inf\n"
      "[evolution]\n"
      "horizon_over_inv_omega_a = 5.0\n");
  CHECK_THROWS_WITH_AS(run("entropy", cfg, {}),
                       doctest::Contains("finite bath temperature"), ConfigError);
}

TEST_CASE("numbers survive the CSV round trip at full precision") {
  const fs::path dir = fresh_dir("precision");
  RunOptions opt;
  opt.outdir = dir.string();
  const auto files = run("equilibrium", parse_config(kEqConfig), opt);
  std::istringstream in(slurp(files[0]));
  bool checked = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#' || line.find("alpha_") == 0) continue;
    const auto comma = line.find(',');
    const double alpha = std::stod(line.substr(0, comma));
    // first grid point of kEqConfig
    CHECK(alpha == 0.5);
    checked = true;
    break;
  }
  CHECK(checked);
}
