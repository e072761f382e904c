#pragma once
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "usdlo/montecarlo.hpp"
#include "usdlo/qkd.hpp"

namespace usdlo::io {

using json = nlohmann::json;

/// Version tag carried by every CSV/JSON artifact; bump on any change to
/// column names or report keys.
inline constexpr const char *kSchemaVersion = "1.0";

/// Fixed-significance decimal rendering used in CSV output (12 significant
/// digits, '.' decimal separator).
std::string format_probability(double value);

/// Curve table as CSV: one header line with the exact column names, then one
/// comma-separated row per μ.
void write_curve_csv(std::ostream &os, const mc::CurveTable &table);

json curve_table_to_json(const mc::CurveTable &table);

json session_stats_to_json(const qkd::SessionStats &stats);

json estimate_to_json(const mc::Estimate &est);

/// Standard report envelope: {schema_version, command, timestamp, config,
/// results, checks}. The timestamp is the only field that varies between
/// identically-configured runs.
json make_report(const std::string &command, json config, json results,
                 json checks = json::array());

/// Read a config block from a JSON file: accepts either a bare config object
/// or a full report (whose "config" member is taken).
json load_config_file(const std::string &path);

} // namespace usdlo::io
