#pragma once
// Option tables and config resolution shared by the subcommands.
#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fbsync::cli {

enum class ValueType { integer, real, text, boolean };

struct OptionSpec {
  std::string key;   // config-file key; the flag is "--" + key with '_' -> '-'
  ValueType type;
  nlohmann::json default_value;  // null means "unset"
  std::string help;
};

std::string flag_name(const std::string& key);

/// Converts a flag's text to the option's JSON type; ConfigError on failure.
nlohmann::json parse_flag_value(const OptionSpec& spec, const std::string& text);

/// Layers defaults, the config file and explicit flags. The config file may
/// be a flat object or a sidecar ({"command", "config"}); unknown keys and
/// type mismatches raise ConfigError.
nlohmann::json resolve_config(const std::string& command, const std::vector<OptionSpec>& specs,
                              const std::string& config_path,
                              const std::vector<std::pair<std::string, std::string>>& flags);

/// "a..b" or a single value; numbers may carry a "pi" factor ("0.25pi").
std::pair<double, double> parse_real_range(const std::string& text);
std::pair<int, int> parse_int_range(const std::string& text);

class Context {
 public:
  Context(std::string command, nlohmann::json config, std::ostream& out)
      : command_(std::move(command)), config_(std::move(config)), out_(out) {}

  const std::string& command() const noexcept { return command_; }
  const nlohmann::json& config() const noexcept { return config_; }

  bool has(const std::string& key) const;
  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t seed() const;
  std::string text(const std::string& key) const;
  bool flag(const std::string& key) const;

  /// Writes `content` to `--out` with its sidecar, or to the output stream.
  void emit(const std::string& content) const;
  /// Writes one file and its sidecar.
  void emit_file(const std::filesystem::path& path, const std::string& content) const;

 private:
  std::string command_;
  nlohmann::json config_;
  std::ostream& out_;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
  std::function<void(const Context&)> action;
};

/// Every subcommand; common options (seed, config, out) are added by run().
const std::vector<CommandSpec>& commands();

}  // namespace fbsync::cli
