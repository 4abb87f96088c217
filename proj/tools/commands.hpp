#pragma once

#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace counterca::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kMissingAsset = 3, kRuntime = 4 };

struct RunContext {
  std::filesystem::path out_dir;
  std::vector<std::string> outputs;
  nlohmann::json summary = nlohmann::json::object();

  // Writes `out_dir/name` and records it as an output.
  void write(const std::string& name, const std::string& content);
};

struct Command {
  std::string name;
  std::string help;
  std::vector<KeySpec> schema;
  std::function<int(const RunConfig&, RunContext&)> run;
};

const std::vector<Command>& commands();
const Command* find_command(const std::string& name);

// Runs a command and writes `<name>.manifest.json` next to its outputs.
int execute(const Command& cmd, const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace counterca::cli
