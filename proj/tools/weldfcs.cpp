#include <iostream>

#include "CLI11.hpp"
#include "weldfcs/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Conformal welding and full counting statistics for inhomogeneous CFT"};
  std::string command, config;
  weldfcs::cli::RunOptions opt;
  app.add_option("command", command, "weld_torus | weld_cylinder | fcs | moments | ldf | converge | selftest")
      ->required()
      ->check(CLI::IsMember(weldfcs::cli::command_names()));
  app.add_option("--config", config, "JSON run configuration");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cache-dir", opt.cache_dir, "node cache directory (default: $WELDFCS_CACHE)");
  app.add_flag("--json", opt.json_stdout, "print the JSON result instead of the summary");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return weldfcs::cli::run(command, config, opt, std::cout, std::cerr);
}
