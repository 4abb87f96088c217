#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "commands.hpp"
#include "counterca/core.hpp"

using namespace counterca;
using namespace counterca::cli;

namespace {

struct Options {
  std::string config;
  std::optional<std::string> seed, samples, horizon, fixture;
  std::vector<std::string> sets;
  std::string out = ".";
  bool show = false;
};

void add_common(CLI::App* sub, Options& o, const Command& cmd) {
  sub->add_option("--config", o.config, "flat key = value file");
  sub->add_option("--set", o.sets, "key=value override (repeatable)");
  sub->add_option("--out", o.out, "output directory");
  sub->add_flag("--show-config", o.show, "print the effective configuration and exit");
  sub->add_option("--seed", o.seed, "master seed");
  auto has = [&](const char* k) {
    for (const auto& s : cmd.schema)
      if (s.name == k) return true;
    return false;
  };
  if (has("samples")) sub->add_option("--samples", o.samples, "sample or pair count");
  if (has("horizon")) sub->add_option("--horizon", o.horizon, "steps");
  if (has("fixture")) sub->add_option("--fixture", o.fixture, "fixture file");
  std::string keys = "config keys:\n";
  for (const auto& s : cmd.schema)
    keys += "  " + s.name + " (default '" + s.default_value + "'): " + s.help + "\n";
  sub->footer(keys);
}

RunConfig build_config(const Command& cmd, const Options& o) {
  RunConfig cfg(cmd.schema);
  if (!o.config.empty()) cfg.load_file(o.config);
  for (const auto& s : o.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) cfg.set("seed", *o.seed);
  if (o.samples) cfg.set("samples", *o.samples);
  if (o.horizon) cfg.set("horizon", *o.horizon);
  if (o.fixture) cfg.set("fixture", *o.fixture);
  return cfg;
}

int guarded(const std::function<int()>& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counter cellular automaton experiments"};
  app.set_version_flag("--version", std::string(COUNTERCA_VERSION));
  app.require_subcommand(1);

  std::vector<Options> opts(commands().size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands().size(); ++i) {
    const auto& cmd = commands()[i];
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub, opts[i], cmd);
    subs.push_back(sub);
  }
  std::string manifest_path, rerun_out = ".";
  auto* rerun = app.add_subcommand("rerun", "repeat a run from its manifest");
  rerun->add_option("manifest", manifest_path, "manifest file")->required();
  rerun->add_option("--out", rerun_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  if (rerun->parsed()) {
    return guarded([&] {
      std::ifstream in(manifest_path);
      if (!in) throw ConfigError("cannot open manifest " + manifest_path);
      auto m = nlohmann::json::parse(in);
      const auto* cmd = find_command(m.at("command").get<std::string>());
      if (!cmd) throw ConfigError("manifest names an unknown command");
      RunConfig cfg(cmd->schema);
      for (const auto& [k, v] : m.at("config").items()) cfg.set(k, v.get<std::string>());
      return execute(*cmd, cfg, rerun_out);
    });
  }
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    const auto& cmd = commands()[i];
    return guarded([&] {
      RunConfig cfg = build_config(cmd, opts[i]);
      if (opts[i].show) {
        std::cout << cfg.canonical();
        return 0;
      }
      return execute(cmd, cfg, opts[i].out);
    });
  }
  return kUsage;
}
