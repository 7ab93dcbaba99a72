#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ptrg/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ptrg: integrable PT-symmetric Richardson-Gaudin spin models"};
  std::string config, out;
  int threads = 0;
  bool seedless = false;
  app.add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory (overrides output.directory)");
  app.add_option("--threads", threads, "OpenMP worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--seedless", seedless, "assert that the run uses no randomness");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ptrg::cli::RunRequest req;
  req.config = config;
  if (!out.empty()) req.out = out;
  req.threads = threads;
  req.seedless = seedless;
  return ptrg::cli::run(req, std::cerr).exit_code;
}
