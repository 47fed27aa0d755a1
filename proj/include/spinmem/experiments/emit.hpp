#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"
#include "spinmem/experiments/scenario.hpp"

namespace spinmem {

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(std::string_view text);

nlohmann::json to_json(const ScenarioConfig& config);
/// Throws ValidationError("field '<name>': ...") on malformed fields.
ScenarioConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScenarioResult& result);
ScenarioResult result_from_json(const nlohmann::json& j);

/// Header row then one line per data row. Complex columns become
/// <name>_re,<name>_im; a trailing seed column repeats the master seed.
/// Numbers use the shortest text that reads back to the same double.
void write_csv(const ScenarioResult& result, std::ostream& out);

void write_result(const ScenarioResult& result, OutputFormat format,
                  std::ostream& out);

/// Writes to `path`; IoError names the path on failure.
void emit(const ScenarioResult& result, OutputFormat format,
          const std::filesystem::path& path);

ScenarioResult read_result_json(const std::filesystem::path& path);

}  // namespace spinmem
