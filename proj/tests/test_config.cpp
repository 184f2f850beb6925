#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "darkbright/config.hpp"
#include "darkbright/io.hpp"

using namespace darkbright;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "darkbright_config_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = scratch_dir() / name;
  std::ofstream out(p, std::ios::trunc);
  out << content;
  return p;
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const auto path = write_file("minimal.ini",
                               "[device]\n"
                               "omega1_ghz = 6.5\n"
                               "omega2_ghz = 6.5\n");
  const auto c = load_scenario_config(ScenarioKind::levels, path.string());
  CHECK(c.device.q1.omega_ghz == 6.5);
  CHECK(c.device.q2.omega_ghz == 6.5);
  CHECK(c.device.q1.levels == 4);
  CHECK(c.device.q1.beta_ghz == -0.225);
  CHECK(c.device.k_ratio == 1.78);
  CHECK(c.a_in_rel == 0.02);
  CHECK(c.policy.mode == SecularPolicy::Mode::cutoff);
  CHECK(c.out_dir == "out");
  CHECK(c.temps.t_glob_k == 0.095);
}

TEST_CASE("experiment preset values parse to the documented device") {
  const auto path = write_file("device.ini",
                               "[device]\n"
                               "omega1_ghz = 7.8\n"
                               "omega2_ghz = 7.8\n"
                               "beta1_ghz = -0.225\n"
                               "beta2_ghz = -0.232\n"
                               "levels = 4\n"
                               "g_ghz = 0.010\n"
                               "gamma_glob_mhz = 5.0\n"
                               "gamma_loc1_mhz = 0.05\n"
                               "k_ratio = 1.78\n");
  const auto c = load_scenario_config(ScenarioKind::steady, path.string());
  CHECK(c.device.q1.omega_ghz == 7.8);
  CHECK(c.device.q1.beta_ghz == -0.225);
  CHECK(c.device.q2.beta_ghz == -0.232);
  CHECK(c.device.g_ghz == 0.010);
  CHECK(c.device.gamma_glob_mhz == 5.0);
  CHECK(c.device.gamma_loc1_mhz == 0.05);
  CHECK(c.device.k_ratio == 1.78);
}

TEST_CASE("k_ratio of -1 is rejected with the constraint in the message") {
  const auto path = write_file("bad_k.ini",
                               "[device]\n"
                               "k_ratio = -1\n");
  CHECK_THROWS_WITH(load_scenario_config(ScenarioKind::levels, path.string()),
                    Catch::Matchers::ContainsSubstring("k_ratio > 0"));
}

TEST_CASE("parse errors carry line numbers") {
  const auto no_eq = write_file("no_eq.ini", "[device]\nomega1_ghz 7.8\n");
  CHECK_THROWS_WITH(load_scenario_config(ScenarioKind::levels, no_eq.string()),
                    Catch::Matchers::ContainsSubstring("no_eq.ini:2"));

  const auto orphan = write_file("orphan.ini", "omega1_ghz = 7.8\n");
  CHECK_THROWS_WITH(load_scenario_config(ScenarioKind::levels, orphan.string()),
                    Catch::Matchers::ContainsSubstring("outside of any"));

  const auto header = write_file("header.ini", "[device\nomega1_ghz = 7.8\n");
  CHECK_THROWS_WITH(load_scenario_config(ScenarioKind::levels, header.string()),
                    Catch::Matchers::ContainsSubstring("header.ini:1"));
}

TEST_CASE("unknown settings are rejected by name") {
  const auto path = write_file("typo.ini",
                               "[device]\n"
                               "omega_ghz = 7.8\n");
  CHECK_THROWS_WITH(load_scenario_config(ScenarioKind::levels, path.string()),
                    Catch::Matchers::ContainsSubstring("device.omega_ghz"));
}

TEST_CASE("json mirror produces the same effective config") {
  const std::string ini =
      "[device]\n"
      "omega1_ghz = 7.8\n"
      "omega2_ghz = 7.8\n"
      "beta1_ghz = -0.225\n"
      "beta2_ghz = -0.232\n"
      "[temps]\n"
      "t_min_k = 0.05\n"
      "t_max_k = 2.0\n"
      "points = 12\n"
      "swept = local\n"
      "family = 0.001, 0.03\n";
  const std::string json = R"({
    "device": {"omega1_ghz": 7.8, "omega2_ghz": 7.8,
               "beta1_ghz": -0.225, "beta2_ghz": -0.232},
    "temps": {"t_min_k": 0.05, "t_max_k": 2.0, "points": 12,
              "swept": "local", "family": [0.001, 0.03]}
  })";
  const auto pi = write_file("mirror.ini", ini);
  const auto pj = write_file("mirror.json", json);
  const auto ci = load_scenario_config(ScenarioKind::diagram, pi.string());
  const auto cj = load_scenario_config(ScenarioKind::diagram, pj.string());
  CHECK(config_echo(ci).dump() == config_echo(cj).dump());
  CHECK(ci.swept == SweptBath::local_bath);
  REQUIRE(ci.family.size() == 2);
  CHECK(ci.family[0] == 0.001);
  CHECK(ci.family[1] == 0.03);
}

TEST_CASE("overrides replace config values and validate their shape") {
  const auto path = write_file("base.ini", "[device]\nomega1_ghz = 7.8\n");
  const auto c = load_scenario_config(ScenarioKind::levels, path.string(),
                                      {"device.omega1_ghz=6.0",
                                       "scenario.out_dir=artifacts"});
  CHECK(c.device.q1.omega_ghz == 6.0);
  CHECK(c.out_dir == "artifacts");
  CHECK_THROWS_AS(load_scenario_config(ScenarioKind::levels, path.string(),
                                       {"omega1_ghz=6.0"}),
                  validation_error);
}

TEST_CASE("scenario kind declared in the file must match the subcommand") {
  const auto path = write_file("kind.ini", "[scenario]\nkind = diagram\n");
  CHECK_THROWS_WITH(load_scenario_config(ScenarioKind::levels, path.string()),
                    Catch::Matchers::ContainsSubstring("scenario.kind"));
  CHECK_NOTHROW(load_scenario_config(ScenarioKind::diagram, path.string()));
}

TEST_CASE("grid specs validate and generate increasing values") {
  GridSpec g{1.0, 2.0, 5, false};
  CHECK_NOTHROW(g.validate("sweep"));
  auto v = g.values();
  REQUIRE(v.size() == 5);
  for (size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);

  GridSpec one_point{1.0, 2.0, 1, false};
  CHECK_THROWS_AS(one_point.validate("sweep"), validation_error);
  GridSpec reversed{2.0, 1.0, 5, false};
  CHECK_THROWS_AS(reversed.validate("sweep"), validation_error);
  GridSpec bad_log{0.0, 1.0, 5, true};
  CHECK_THROWS_AS(bad_log.validate("sweep"), validation_error);
}

TEST_CASE("fit scenarios require existing data files") {
  const auto path = write_file("fit.ini", "[fit]\ndata = /nonexistent/points.csv\n");
  CHECK_THROWS_WITH(
      load_scenario_config(ScenarioKind::fit_calibration, path.string()),
      Catch::Matchers::ContainsSubstring("fit.data"));
  const auto none = write_file("fit_none.ini", "[device]\nomega1_ghz = 7.8\n");
  CHECK_THROWS_WITH(
      load_scenario_config(ScenarioKind::fit_local, none.string()),
      Catch::Matchers::ContainsSubstring("fit.data_q1"));
}

TEST_CASE("infer scenario requires both targets") {
  const auto path = write_file("infer.ini", "[infer]\nt_00b = 0.3\n");
  CHECK_THROWS_WITH(load_scenario_config(ScenarioKind::infer, path.string()),
                    Catch::Matchers::ContainsSubstring("infer.t_ddp"));
  const auto ok = write_file("infer_ok.ini",
                             "[infer]\nt_00b = 0.3\nt_ddp = 0.9\n");
  const auto c = load_scenario_config(ScenarioKind::infer, ok.string());
  CHECK(c.target_t00b == 0.3);
  CHECK(c.inverter.a_in > 0.0);
}

TEST_CASE("diagram family defaults to the fixed-bath temperature") {
  const auto path = write_file("diag.ini",
                               "[temps]\nother_k = 0.042\n");
  const auto c = load_scenario_config(ScenarioKind::diagram, path.string());
  REQUIRE(c.family.size() == 1);
  CHECK(c.family[0] == 0.042);
}

TEST_CASE("csv writer round-trips doubles exactly") {
  const fs::path p = scratch_dir() / "round.csv";
  const std::vector<std::vector<double>> rows = {
      {1.0 / 3.0, 1e-17, 0.1},
      {-7.8125e3, 2.2250738585072014e-308, 9.41}};
  write_csv(p, {"a", "b", "c"}, rows);
  const auto table = read_csv(p);
  REQUIRE(table.header.size() == 3);
  CHECK(table.column("b") == 1);
  REQUIRE(table.rows.size() == 2);
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      CHECK(table.rows[r][c] == rows[r][c]);
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
}

TEST_CASE("csv reader rejects malformed cells with line numbers") {
  const auto ragged = write_file("ragged.csv", "a,b\n1.0\n");
  CHECK_THROWS_WITH(read_csv(ragged),
                    Catch::Matchers::ContainsSubstring("ragged.csv") &&
                        Catch::Matchers::ContainsSubstring(":2"));
  const auto text = write_file("text.csv", "a,b\n1.0,fast\n");
  CHECK_THROWS_WITH(read_csv(text),
                    Catch::Matchers::ContainsSubstring("'fast'"));
  const auto missing = scratch_dir() / "missing.csv";
  CHECK_THROWS_AS(read_csv(missing), io_error);
}
