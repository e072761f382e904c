#include "usdlo/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace usdlo::io {

std::string format_probability(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_curve_csv(std::ostream &os, const mc::CurveTable &table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << "\n";
  for (const auto &row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << format_probability(row[c]);
    os << "\n";
  }
}

json curve_table_to_json(const mc::CurveTable &table) {
  json meta{{"n", table.metadata.n},
            {"copies", table.metadata.copies},
            {"trials", table.metadata.trials},
            {"seed", table.metadata.seed},
            {"eta", table.metadata.eta},
            {"schema_version", table.metadata.schema_version}};
  return json{{"metadata", meta}, {"columns", table.columns}, {"rows", table.rows}};
}

json session_stats_to_json(const qkd::SessionStats &stats) {
  return json{{"pulses", stats.pulses},
              {"stage_counts", stats.stage_counts},
              {"kept", {{"single_photon", stats.kept_a},
                        {"coinciding_bits", stats.kept_b},
                        {"basis_revealed", stats.kept_c},
                        {"full_usd", stats.kept_d}}},
              {"discarded", {{"basis_mismatch", stats.discarded_basis_mismatch},
                             {"unresolved_pair", stats.discarded_unresolved}}},
              {"sifted_total", stats.sifted_total()},
              {"coincidence_fraction", stats.coincidence_fraction()},
              {"qber", stats.error_rate()}};
}

json estimate_to_json(const mc::Estimate &est) {
  return json{{"p_hat", est.p_hat},
              {"stderr", est.stderr_value},
              {"trials", est.trials},
              {"successes", est.successes},
              {"soundness_violations", est.soundness_violations}};
}

json make_report(const std::string &command, json config, json results, json checks) {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
  return json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"timestamp_unix", secs.count()},
              {"config", std::move(config)},
              {"results", std::move(results)},
              {"checks", std::move(checks)}};
}

json load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file: " + path);
  json doc = json::parse(in);
  if (doc.contains("config")) return doc["config"];
  return doc;
}

} // namespace usdlo::io
