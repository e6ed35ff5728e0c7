#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "radlab/config.hpp"
#include "radlab/error.hpp"
#include "radlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of resolvent bounds on manifolds with escaping ends"};
  std::string command, config_path;
  radlab::RunOptions options;
  app.add_option("command", command,
                 "check | solve | lap | radiation | hoelder | rellich | sommerfeld | riccati | "
                 "energy | all")
      ->required();
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--out", options.out_dir, "output directory (overrides [output] dir)");
  app.add_option("--seed", options.seed, "seed for randomized probe sets")->capture_default_str();
  app.add_option("--jobs", options.jobs, "worker threads")->capture_default_str();
  app.add_flag("--strict", options.strict, "treat inconclusive verdicts as failures");
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "radlab: cannot read " << config_path << "\n";
    return 1;
  }
  std::stringstream text;
  text << in.rdbuf();
  try {
    const radlab::RunConfig config = radlab::parse_config(text.str());
    return radlab::run(config, command, options, std::cout).exit_code;
  } catch (const radlab::ConfigError& e) {
    std::cerr << config_path << ": invalid configuration\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "radlab: " << e.what() << "\n";
    return 1;
  }
}
