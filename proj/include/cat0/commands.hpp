#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cat0 {

constexpr int kReportSchemaVersion = 1;

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one subcommand on a request document and returns its report.
/// A request holding "batch": [...] runs each entry and collects the reports
/// under "runs". Throws ParseError / InvalidArgument / ComputationError.
nlohmann::json run_command(const std::string& command, const nlohmann::json& request);

/// One row per run (or per entry of result.rows) with flattened scalar columns.
std::string report_to_csv(const nlohmann::json& report);

}  // namespace cat0
