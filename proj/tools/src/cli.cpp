#include "cli.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbsync/error.hpp"
#include "options.hpp"

namespace fbsync::cli {
namespace {

using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return kExitConfig;
    case ErrorKind::io:
      return kExitIo;
    case ErrorKind::numeric_domain:
      return kExitNumeric;
  }
  return kExitConfig;
}

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return "config";
    case ErrorKind::io:
      return "io";
    case ErrorKind::numeric_domain:
      return "numeric_domain";
  }
  return "config";
}

int report(std::ostream& err, int code, const std::string& kind, const std::string& message,
           const std::string& command) {
  json body = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  if (!command.empty()) body["error"]["command"] = command;
  err << body.dump() << '\n';
  return code;
}

std::vector<OptionSpec> with_common(std::vector<OptionSpec> options) {
  options.push_back({"seed", ValueType::integer, 0, "random seed"});
  options.push_back({"out", ValueType::text, nullptr, "output path (stdout if omitted)"});
  return options;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-bin photonics under RF clock delay", "fbsync"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FBSYNC_VERSION);

  struct Bound {
    const CommandSpec* spec;
    CLI::App* app;
    std::vector<OptionSpec> options;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> switches;
    std::map<std::string, CLI::Option*> handles;
    std::string config_path;
  };
  std::vector<std::unique_ptr<Bound>> bound;

  for (const auto& spec : commands()) {
    auto b = std::make_unique<Bound>();
    b->spec = &spec;
    b->options = with_common(spec.options);
    b->app = app.add_subcommand(spec.name, spec.help);
    for (const auto& opt : b->options) {
      std::string help = opt.help;
      if (!opt.default_value.is_null()) help += " [default: " + opt.default_value.dump() + "]";
      if (opt.type == ValueType::boolean) {
        b->handles[opt.key] = b->app->add_flag(flag_name(opt.key), b->switches[opt.key], help);
      } else {
        b->handles[opt.key] = b->app->add_option(flag_name(opt.key), b->values[opt.key], help);
      }
    }
    b->app->add_option("--config", b->config_path, "JSON config file (flags take precedence)");
    bound.push_back(std::move(b));
  }

  std::string command;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << FBSYNC_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report(err, kExitConfig, "config", e.what(), command);
  }

  for (const auto& b : bound) {
    if (!b->app->parsed()) continue;
    command = b->spec->name;
    try {
      std::vector<std::pair<std::string, std::string>> flags;
      for (const auto& opt : b->options) {
        if (b->handles.at(opt.key)->count() == 0) continue;
        if (opt.type == ValueType::boolean) {
          flags.emplace_back(opt.key, b->switches.at(opt.key) ? "true" : "false");
        } else {
          flags.emplace_back(opt.key, b->values.at(opt.key));
        }
      }
      const Context ctx(command, resolve_config(command, b->options, b->config_path, flags), out);
      b->spec->action(ctx);
      return kExitOk;
    } catch (const Error& e) {
      return report(err, exit_code(e.kind()), kind_name(e.kind()), e.what(), command);
    } catch (const json::exception& e) {
      return report(err, kExitConfig, "config", e.what(), command);
    } catch (const std::exception& e) {
      return report(err, kExitNumeric, "internal", e.what(), command);
    }
  }
  return report(err, kExitConfig, "config", "no subcommand given", command);
}

}  // namespace fbsync::cli
