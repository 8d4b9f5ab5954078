#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "statbridge/shell.hpp"

int main(int argc, char** argv) {
  CLI::App app{"statbridge: a host workspace with an embedded guest evaluator"};
  app.require_subcommand(0, 1);

  std::string script_path;
  statbridge::SessionConfig cfg;
  cfg.thread_limit = 0;  // picked at start

  CLI::App* run = app.add_subcommand("run", "replay a script and print the transcript");
  run->add_option("script", script_path, "script file, one command per line")->required();
  run->add_option("--env-root", cfg.env_root, "package environment root directory");
  run->add_option("--registry", cfg.registry_root, "package registry root directory");
  run->add_flag("--timing", cfg.timing, "print r; t=… after each command");

  app.add_option("--env-root", cfg.env_root, "package environment root directory");
  app.add_option("--registry", cfg.registry_root, "package registry root directory");
  app.add_flag("--timing", cfg.timing, "print r; t=… after each command");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    std::ifstream in(script_path);
    if (!in) {
      std::cerr << "error: cannot open script " << script_path << "\n";
      return 1;
    }
    statbridge::Shell shell(std::cout, cfg);
    return shell.run_script(in);
  }

  statbridge::Shell shell(std::cout, cfg);
  shell.run_interactive(std::cin);
  return shell.error_count() == 0 ? 0 : 1;
}
