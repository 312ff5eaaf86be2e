// main.cpp — the zenotherm command line.  Thin shell over zeno::cli: parse
// arguments, load the config, map failures onto stable exit codes.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "zeno/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"zenotherm: measurement-driven qubit thermodynamics toolkit"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::string outdir = ".";
    int threads = 0;
  };
  std::map<std::string, Args> args;
  for (const std::string& name : zeno::cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    Args& a = args[name];
    auto* cfg = sub->add_option("--config", a.config, "key = value config file");
    if (name != "figures") cfg->required();
    sub->add_option("--out", a.outdir, "output directory (created if missing)");
    sub->add_option("--threads", a.threads,
                    "worker threads for sweeps (0 = hardware)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nlohmann::json{{"error", "usage"}, {"message", e.what()}}.dump()
              << "\n";
    return zeno::cli::kExitConfigError;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  const Args& a = args[sub];

  try {
    zeno::cli::RunOptions opt;
    opt.outdir = a.outdir;
    opt.threads = a.threads;
    if (const char* env = std::getenv("ZENOTHERM_THREADS"))
      opt.threads = std::atoi(env);

    zeno::cli::ParsedConfig cfg;
    if (!a.config.empty()) cfg = zeno::cli::load_config(a.config);
    for (const std::string& path : zeno::cli::run(sub, cfg, opt))
      std::cout << path << "\n";
    return zeno::cli::kExitOk;
  } catch (const zeno::cli::ConfigError& e) {
    std::cerr << nlohmann::json{{"error", "config"}, {"message", e.what()}}.dump()
              << "\n";
    return zeno::cli::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "numerical"}, {"message", e.what()}}.dump()
              << "\n";
    return zeno::cli::kExitNumericalError;
  }
}
