#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace thz::cli {

// Flat key = value scenario description. Presets expand to fully-specified
// maps; config-file entries and command-line flags override in that order.
using ScenarioConfig = std::map<std::string, std::string>;

ScenarioConfig preset_config(const std::string& name);
ScenarioConfig parse_config_text(const std::string& text);

// Runs one CLI invocation. argv excludes the program name. Returns the
// process exit status: 0 success, 1 domain error, 2 usage error.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace thz::cli
