#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nlspread/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spreading speeds of nonlocal KPP equations in heterogeneous media"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run the command declared in a configuration file");
  run->add_option("config", config, "Path to the JSON configuration")->required();
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep (command \"sweep\")");
  sweep->add_option("config", config, "Path to the JSON configuration")->required();
  auto* audit = app.add_subcommand("audit", "Audit the kernel and reaction hypotheses of a configuration");
  audit->add_option("config", config, "Path to the JSON configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = run->parsed() ? "run" : sweep->parsed() ? "sweep" : "audit";
  return nlspread::run_experiment(config, command, std::cerr);
}
