// Command-line front end: subcommands, strict config loading, CSV/JSON/SVG
// emission, and the per-run manifest.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace qjh::cli {

using Json = nlohmann::json;

// Invalid settings, malformed config files, unknown keys. Mapped to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict JSON config loader: the file must be a flat object whose keys are a
// subset of `allowed`; anything else is rejected by name. Parse errors keep
// the line/column information from the JSON parser.
Json load_config(const std::filesystem::path& path,
                 const std::vector<std::string>& allowed);

// Full CLI entry point; returns the process exit code (0 success, 2 config
// error, 3 runtime failure). Never throws.
int run(int argc, const char* const* argv);

}  // namespace qjh::cli
