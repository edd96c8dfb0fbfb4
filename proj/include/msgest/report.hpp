#pragma once

// JSON, CSV and SVG encodings of configs and results.

#include "msgest/diagnostics.hpp"
#include "msgest/metrics.hpp"
#include "msgest/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace msgest {

using Json = nlohmann::ordered_json;

Json to_json(const LassoConfig& c);
Json to_json(const GicConfig& c);
Json to_json(const SelectorConfig& c);
Json to_json(const MethodConfig& c);
Json to_json(const SyntheticConfig& c);
Json to_json(const CommLedger& l);
Json to_json(const ConditionReport& r);

/// `column_names` label the selected features when given.
Json to_json(const MethodResult& r, const std::vector<std::string>* column_names = nullptr,
             bool include_timing = true);

/// Deterministic report content; timings go to timing_json.
Json report_json(const BenchmarkReport& r);
Json timing_json(const BenchmarkReport& r);
BenchmarkReport report_from_json(const Json& report, const Json* timing = nullptr);

/// Missing fields keep their defaults; unknown enum values throw ConfigError.
LassoConfig lasso_config_from_json(const Json& j);
GicConfig gic_config_from_json(const Json& j);
SelectorConfig selector_config_from_json(const Json& j);
MethodConfig method_config_from_json(const Json& j);
SyntheticConfig synthetic_config_from_json(const Json& j);

/// Tidy rows: one per grid point x method x replicate.
void write_report_csv(const BenchmarkReport& r, const std::filesystem::path& path);

/// Line chart of a summary metric against n, one series per method.
void write_metric_svg(const BenchmarkReport& r, const std::string& metric, const std::string& title,
                      const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

const char* to_string(GicPenalty p) noexcept;

} // namespace msgest
