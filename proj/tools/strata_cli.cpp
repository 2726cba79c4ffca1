// Command-line front end: validate config files and run experiments.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "strata/driver.hpp"
#include "strata/errors.hpp"
#include "strata/version.hpp"

namespace {

int command_validate(const std::string& config_path) {
  try {
    const strata::LoadedConfig loaded = strata::parse_config(config_path);
    std::cout << "OK " << loaded.checksum << " experiment="
              << strata::experiment_kind_name(loaded.config.experiment) << "\n";
    return 0;
  } catch (const strata::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 2;
  }
}

int command_run(const std::string& config_path, const std::string& out_dir, bool has_seed,
                std::uint64_t seed) {
  strata::LoadedConfig loaded = [&] {
    try {
      return strata::parse_config(config_path);
    } catch (const strata::ConfigError& e) {
      std::cerr << config_path << ": " << e.what() << "\n";
      std::exit(2);
    }
  }();
  if (has_seed) strata::override_seed(loaded, seed);

  strata::RunOptions options;
  options.threads = strata::resolve_threads(0);
  std::string error;
  const int status = strata::run_to_directory(loaded, out_dir, options, &error);
  if (status != 0) {
    std::cerr << "run failed: " << error << "\n";
    return 1;
  }
  std::cout << "wrote " << out_dir << "/result.json (" << loaded.checksum << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stratified sampling with random group membership - simulation harness"};
  app.set_version_flag("--version", strata::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "config file (key = value)")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* seed_option = run->add_option("--seed", seed, "override the config base seed");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("config", config_path, "config file (key = value)")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return command_run(config_path, out_dir, seed_option->count() > 0, seed);
  }
  return command_validate(config_path);
}
