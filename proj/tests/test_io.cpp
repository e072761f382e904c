#include <doctest.h>

#include <fstream>
#include <sstream>

#include "usdlo/io.hpp"

using namespace usdlo;
using io::json;

TEST_CASE("probability formatting uses 12 significant digits") {
  CHECK(io::format_probability(0.0) == "0");
  CHECK(io::format_probability(1.0) == "1");
  CHECK(io::format_probability(0.205158651497294173) == "0.205158651497");
  CHECK(io::format_probability(6.665833389997278e-13) == "6.66583339e-13");
}

TEST_CASE("curve CSV golden header and shape") {
  mc::SweepConfig cfg;
  cfg.n = 4;
  cfg.mu_min = 0.0;
  cfg.mu_max = 1.0;
  cfg.points = 3;
  const auto analytic_only = mc::sweep(cfg);
  std::ostringstream os;
  io::write_curve_csv(os, analytic_only);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "mu,p_optimal,p_simple_analytic,p_feedback_analytic,p_pol_analytic");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 3);

  cfg.trials = 100;
  cfg.seed = 3;
  std::ostringstream os2;
  io::write_curve_csv(os2, mc::sweep(cfg));
  std::string header2;
  std::istringstream in2(os2.str());
  std::getline(in2, header2);
  CHECK(header2 == "mu,p_optimal,p_simple_analytic,p_feedback_analytic,p_pol_analytic,"
                   "p_simple_mc,p_simple_mc_stderr,p_feedback_mc,p_feedback_mc_stderr");

  cfg.n = 3;
  cfg.trials = 0;
  std::ostringstream os3;
  io::write_curve_csv(os3, mc::sweep(cfg));
  std::string header3;
  std::istringstream in3(os3.str());
  std::getline(in3, header3);
  CHECK(header3 == "mu,p_optimal,p_simple_analytic,p_feedback_analytic");
}

TEST_CASE("report envelope keys are stable") {
  const json report = io::make_report("simulate", json{{"mu", 1.0}}, json{{"p_hat", 0.5}});
  CHECK(report["schema_version"] == io::kSchemaVersion);
  CHECK(io::kSchemaVersion == std::string("1.0"));
  for (const char *key : {"schema_version", "command", "timestamp_unix", "config", "results",
                          "checks"})
    CHECK(report.contains(key));
  CHECK(report["checks"].is_array());

  // identical reports except for the timestamp
  json a = io::make_report("x", json::object(), json::object());
  json b = io::make_report("x", json::object(), json::object());
  a.erase("timestamp_unix");
  b.erase("timestamp_unix");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("session stats serialization keys") {
  qkd::SessionStats stats;
  stats.pulses = 10;
  stats.stage_counts = {4, 3, 2, 1};
  stats.kept_b = 1;
  const json j = io::session_stats_to_json(stats);
  for (const char *key :
       {"pulses", "stage_counts", "kept", "discarded", "sifted_total", "coincidence_fraction",
        "qber"})
    CHECK(j.contains(key));
  CHECK(j["kept"].contains("coinciding_bits"));
  CHECK(j["stage_counts"][0] == 4);
}

TEST_CASE("curve table JSON layout") {
  mc::CurveTable t;
  t.metadata = {3, 1000, 0, 42, 1.0, "1.0"};
  t.columns = {"mu", "p_optimal"};
  t.rows = {{0.0, 0.0}, {1.0, 0.5}};
  const json j = io::curve_table_to_json(t);
  CHECK(j["metadata"]["n"] == 3);
  CHECK(j["metadata"]["schema_version"] == "1.0");
  CHECK(j["columns"].size() == 2);
  CHECK(j["rows"][1][1] == 0.5);
}

TEST_CASE("config loading") {
  const char *bare = "/tmp/usdlo_test_bare_cfg.json";
  {
    std::ofstream out(bare);
    out << R"({"mu": 0.5, "trials": 100})";
  }
  const json c1 = io::load_config_file(bare);
  CHECK(c1["mu"] == 0.5);

  const char *full = "/tmp/usdlo_test_full_cfg.json";
  {
    std::ofstream out(full);
    out << io::make_report("simulate", json{{"mu", 0.75}}, json::object()).dump();
  }
  const json c2 = io::load_config_file(full);
  CHECK(c2["mu"] == 0.75);

  CHECK_THROWS_AS(io::load_config_file("/tmp/does_not_exist_usdlo.json"), std::runtime_error);
}
