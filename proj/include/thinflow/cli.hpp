#pragma once

#include <json.hpp>

#include "thinflow/config.hpp"

namespace thinflow {

// Runs one validated config: writes report.json, config.json, CSV tables and
// optional field dumps into c.output and returns the report.
nlohmann::json run_command(const RunConfig& c);

// Command-line entry. Exit codes: 0 success, 1 internal error, 2 invalid
// input, 3 solver failure.
int run_cli(int argc, char** argv);

}  // namespace thinflow
