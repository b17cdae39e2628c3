#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "drcbf/acc.hpp"
#include "drcbf/errors.hpp"

namespace drcbf {

/// Schema violation in a run config; `path()` points at the offending key,
/// e.g. "controller.poles[1]".
class ConfigError : public ValidationError {
public:
    ConfigError(std::string path, const std::string& message)
        : ValidationError(path + ": " + message), path_(std::move(path))
    {
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct RunConfig {
    AccScenario scenario;
    std::string output_dir = "out";
    bool plots = true;
};

/// Parses and validates a run-config document. Every key is optional; absent
/// keys take the benchmark defaults. Unknown keys are rejected.
RunConfig parse_run_config(const nlohmann::json& document);
nlohmann::json load_json_file(const std::string& path);

/// Sets a dotted path ("controller.k_multiplier", "controller.r[0]") in the
/// document, creating intermediate objects. Throws ConfigError when the
/// resulting document no longer parses.
void set_config_value(nlohmann::json& document, std::string_view path, const nlohmann::json& value);

/// "0.5" -> number, "true"/"false" -> bool, anything else -> string.
nlohmann::json parse_scalar(std::string_view text);

/// Inverse of parse_run_config (fully explicit document).
nlohmann::json to_json(const RunConfig& config);

}  // namespace drcbf
