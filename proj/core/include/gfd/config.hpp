#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gfd/model.hpp"

namespace gfd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedConfig {
  RunConfig config;
  /// One line per key, "section.key = value" with "(default)" appended for
  /// values that were not present in the file.
  std::vector<std::string> log;
};

/// Parses the INI-style run configuration. Sections: [model] [growth]
/// [division] [kernel] [environment] [solver] [simulation]. Unknown sections
/// or keys, missing required keys and out-of-range values raise ConfigError.
LoadedConfig parse_config(std::string_view text, std::string source = "<memory>");

/// Reads `path`, or resolves a "builtin:NAME" reference to a shipped model.
LoadedConfig load_config(const std::string& path);

/// Serializes every field with round-trip precision; parse_config of the
/// result reproduces the configuration.
std::string write_config(const RunConfig& config);

/// Canonical hash of a configuration (hash of write_config).
std::string config_hash(const RunConfig& config);

}  // namespace gfd
