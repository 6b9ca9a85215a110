#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>

#include "gpelab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gpelab: multi-well condensate dynamics and reduced-model laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long long seed = -1;
  int threads = 0;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "RNG seed (overrides config)");
  app.add_option("--threads", threads, "worker threads for sweeps and ensembles");

  for (const char* name : {"spectrum", "dnls-fit", "simulate-gpe", "simulate-dnls", "compare",
                           "normal-form", "sweep", "acceptance"})
    app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);
  std::string sub = app.get_subcommands().front()->get_name();

  gpelab::ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      config = gpelab::load_config(config_path);
    } else if (sub != "acceptance") {
      std::fprintf(stderr, "config error: --config is required for %s\n", sub.c_str());
      return 1;
    } else {
      config.canonical = "{}";
      config.digest = gpelab::config_digest(config.canonical);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }

  if (!out_dir.empty()) {
    config.out_dir = out_dir;
  } else if (const char* env = std::getenv("GPELAB_OUT"); env && config.out_dir == "out") {
    config.out_dir = env;
  }
  if (seed >= 0) config.seed = static_cast<unsigned long long>(seed);
  if (threads > 0) config.threads = threads;

  return gpelab::run_subcommand(sub, std::move(config));
}
