#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "swarmform/optimizer.hpp"

namespace swarmform {

// Bad configuration input. line() is 1-based, 0 when not tied to a file line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& message);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Sets one RunConfig field from its textual value. Keys are listed by
// config_keys(). Throws ConfigError(0, ...) for unknown keys or bad values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

std::vector<std::string> config_keys();

// Flat "key = value" text, '#' starts a comment line. Later keys override
// earlier ones. Starts from RunConfig defaults and validates the result.
RunConfig parse_config(std::string_view text);

// Reads either the key-value format or a JSON document: a bare config object
// or a run manifest whose "config" member holds one.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& doc);

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"workspace": {"xmin":..,"ymin":..,"xmax":..,"ymax":..}, "robots": [[x, y], ...]}
nlohmann::json formation_to_json(const Formation& f);
Formation formation_from_json(const nlohmann::json& doc);  // throws FormatError

void write_formation(const std::filesystem::path& path, const Formation& f);
Formation read_formation(const std::filesystem::path& path);

}  // namespace swarmform
