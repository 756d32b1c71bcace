// Copyright 2026 The normcf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// normcf: collaborative norm synthesis from privacy preferences.
//
//   normcf <command> --config <path> [--out <dir>] [--seed <n>]

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "normcf/commands.h"
#include "normcf/config.h"

int main(int argc, char** argv) {
  CLI::App app{"Predict privacy preferences and synthesize norms", "normcf"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  const char* kCommands[][2] = {
      {"generate", "write a synthetic population"},
      {"predict", "predict every unknown preference"},
      {"synthesize", "decide unknown actions and export norms"},
      {"simulate", "run the epoch loop and write reports"},
      {"inspect", "write similarity and sensitivity tables"},
      {"evaluate", "score norms against a truth matrix"},
  };
  for (const auto& [name, description] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "JSON configuration file")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "overrides population.seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    if (error.get_exit_code() == 0) return app.exit(error);
    std::cerr << "normcf: usage error: " << error.what() << "\n";
    return 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  absl::StatusOr<normcf::Config> config = normcf::LoadConfig(config_path);
  if (!config.ok()) {
    std::cerr << normcf::ErrorLine(config.status()) << "\n";
    return normcf::ExitCode(config.status());
  }
  if (seed.has_value()) config->population.seed = *seed;
  std::filesystem::path out =
      out_dir.empty() ? config->paths.out_dir : std::filesystem::path(out_dir);

  const absl::Status status = normcf::Execute(command, *config, out);
  if (!status.ok()) {
    std::cerr << normcf::ErrorLine(status) << "\n";
  }
  return normcf::ExitCode(status);
}
