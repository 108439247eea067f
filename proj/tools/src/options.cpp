#include "options.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "fbsync/error.hpp"
#include "fbsync/io.hpp"

namespace fbsync::cli {
namespace {

using nlohmann::json;

long long parse_integer(const std::string& text, const std::string& what) {
  long long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigError(what + ": expected an integer, got '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    return io::parse_double(text);
  } catch (const IoError&) {
    throw ConfigError(what + ": expected a number, got '" + text + "'");
  }
}

// Number with an optional trailing "pi" factor.
double parse_scaled(std::string text, const std::string& what) {
  double scale = 1.0;
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    text.resize(text.size() - 2);
    if (text.empty()) return scale;
    if (text.back() == '*') text.pop_back();
  }
  return scale * parse_real(text, what);
}

json checked_config_value(const OptionSpec& spec, const json& value) {
  const std::string what = "config key '" + spec.key + "'";
  switch (spec.type) {
    case ValueType::integer:
      if (value.is_number_integer()) return value;
      if (value.is_number_float()) {
        const double v = value.get<double>();
        if (std::isfinite(v) && v == std::floor(v)) return static_cast<long long>(v);
      }
      break;
    case ValueType::real:
      if (value.is_number()) return value.get<double>();
      break;
    case ValueType::text:
      if (value.is_string()) return value;
      break;
    case ValueType::boolean:
      if (value.is_boolean()) return value;
      break;
  }
  if (value.is_null()) return value;
  throw ConfigError(what + " has the wrong type");
}

}  // namespace

std::string flag_name(const std::string& key) {
  std::string flag = "--" + key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

nlohmann::json parse_flag_value(const OptionSpec& spec, const std::string& text) {
  const std::string what = flag_name(spec.key);
  switch (spec.type) {
    case ValueType::integer:
      return parse_integer(text, what);
    case ValueType::real:
      return parse_scaled(text, what);
    case ValueType::boolean:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw ConfigError(what + ": expected true or false");
    case ValueType::text:
      break;
  }
  return text;
}

nlohmann::json resolve_config(const std::string& command, const std::vector<OptionSpec>& specs,
                              const std::string& config_path,
                              const std::vector<std::pair<std::string, std::string>>& flags) {
  json resolved = json::object();
  for (const auto& spec : specs) resolved[spec.key] = spec.default_value;

  if (!config_path.empty()) {
    const std::string text = io::read_file(config_path);
    json file = json::parse(text, nullptr, false);
    if (file.is_discarded() || !file.is_object()) {
      throw ConfigError("config file " + config_path + " is not a JSON object");
    }
    if (file.contains("config") && file["config"].is_object()) {
      if (file.contains("command") && file["command"] != command) {
        throw ConfigError("config file " + config_path + " was written by '" +
                          file["command"].dump() + "', not '" + command + "'");
      }
      file = file["config"];
    }
    for (const auto& [key, value] : file.items()) {
      const auto it = std::find_if(specs.begin(), specs.end(),
                                   [&](const OptionSpec& s) { return s.key == key; });
      if (it == specs.end()) throw ConfigError("unknown config key '" + key + "' for " + command);
      resolved[key] = checked_config_value(*it, value);
    }
  }

  for (const auto& [key, text] : flags) {
    const auto it = std::find_if(specs.begin(), specs.end(),
                                 [&](const OptionSpec& s) { return s.key == key; });
    if (it == specs.end()) throw ConfigError("unknown option " + flag_name(key));
    resolved[key] = parse_flag_value(*it, text);
  }
  return resolved;
}

std::pair<double, double> parse_real_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const double v = parse_scaled(text, "range");
    return {v, v};
  }
  return {parse_scaled(text.substr(0, dots), "range start"),
          parse_scaled(text.substr(dots + 2), "range end")};
}

std::pair<int, int> parse_int_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto v = static_cast<int>(parse_integer(text, "range"));
    return {v, v};
  }
  return {static_cast<int>(parse_integer(text.substr(0, dots), "range start")),
          static_cast<int>(parse_integer(text.substr(dots + 2), "range end"))};
}

bool Context::has(const std::string& key) const {
  return config_.contains(key) && !config_.at(key).is_null();
}

double Context::real(const std::string& key) const {
  if (!has(key)) throw ConfigError(flag_name(key) + " is required");
  return config_.at(key).get<double>();
}

int Context::integer(const std::string& key) const {
  if (!has(key)) throw ConfigError(flag_name(key) + " is required");
  const auto v = config_.at(key).get<long long>();
  if (v < -1'000'000'000LL || v > 1'000'000'000LL) throw ConfigError(flag_name(key) + " is out of range");
  return static_cast<int>(v);
}

std::uint64_t Context::seed() const {
  const auto v = config_.at("seed").get<long long>();
  if (v < 0) throw ConfigError("--seed must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::string Context::text(const std::string& key) const {
  if (!has(key)) throw ConfigError(flag_name(key) + " is required");
  return config_.at(key).get<std::string>();
}

bool Context::flag(const std::string& key) const { return has(key) && config_.at(key).get<bool>(); }

void Context::emit(const std::string& content) const {
  const std::string path = has("out") ? text("out") : std::string{};
  if (path.empty() || path == "-") {
    out_ << content;
    return;
  }
  emit_file(path, content);
}

void Context::emit_file(const std::filesystem::path& path, const std::string& content) const {
  io::write_file_atomic(path, content);
  json sidecar = {{"command", command_},
                  {"config", config_},
                  {"output", path.filename().string()},
                  {"fbsync_version", FBSYNC_VERSION}};
  io::write_file_atomic(path.string() + ".config.json", sidecar.dump(2) + "\n");
}

}  // namespace fbsync::cli
