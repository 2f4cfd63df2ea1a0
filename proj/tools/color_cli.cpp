#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "color/cli/bench.hpp"
#include "color/cli/config.hpp"
#include "color/cli/evaluate.hpp"
#include "color/cli/mapgen.hpp"
#include "color/cli/train.hpp"
#include "color/errors.hpp"
#include "color/nn/checkpoint.hpp"

namespace fs = std::filesystem;
using namespace color;

int main(int argc, char** argv) {
  CLI::App app{"Sparrow navigation training with the Actor-Sharer-Learner loop"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "train a policy from a config file");
  fs::path train_config;
  std::optional<std::uint64_t> train_seed;
  bool quiet = false;
  train->add_option("--config", train_config, "config file")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", train_seed, "override run.seed");
  train->add_flag("--quiet", quiet, "no progress output");

  auto* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
  fs::path ckpt, maps_dir, eval_config;
  int episodes = 20;
  std::uint64_t eval_seed = 0;
  bool randomize = false;
  eval->add_option("--ckpt", ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--maps", maps_dir, "directory of .map files (or one file)")->required()->check(CLI::ExistingPath);
  eval->add_option("--episodes", episodes, "episodes per map");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--config", eval_config, "take physics and robot settings from this config")
      ->check(CLI::ExistingFile);
  eval->add_flag("--randomize", randomize, "sample physics from the config's training ranges");

  auto* bench = app.add_subcommand("bench", "vectorized simulator throughput");
  fs::path bench_config;
  double duration = 5.0;
  std::vector<int> n_values{1, 16, 64};
  bench->add_option("--config", bench_config, "config file")->required()->check(CLI::ExistingFile);
  bench->add_option("--duration", duration, "wall seconds per N")->required();
  bench->add_option("--n", n_values, "copy counts to measure");

  auto* mapgen = app.add_subcommand("mapgen", "write procedural maps");
  cli::MapGenOptions gen;
  int count = 0;
  fs::path out_dir;
  mapgen->add_option("--count", count, "number of maps")->required();
  mapgen->add_option("--size", gen.size_cm, "side length in cm");
  mapgen->add_option("--density", gen.density, "occupied interior fraction");
  mapgen->add_option("--seed", gen.seed, "generator seed");
  mapgen->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      auto cfg = cli::load_config(train_config);
      if (train_seed) cfg.seed = *train_seed;
      const auto res = cli::run_training(cfg, quiet ? nullptr : &std::cerr);
      std::cout << res.run_dir.string() << '\n';
    } else if (*eval) {
      cli::RunConfig cfg;
      if (!eval_config.empty()) cfg = cli::load_config(eval_config);
      const auto params = nn::load_checkpoint(ckpt);
      std::vector<std::string> names;
      const auto files = cli::expand_map_paths({maps_dir});
      if (files.empty()) throw MapError("no .map files under " + maps_dir.string());
      const auto maps = cli::load_maps(files, &names);
      cli::EvalOptions opts;
      opts.episodes_per_map = episodes;
      opts.seed = eval_seed;
      opts.nominal = cfg.nominal;
      opts.env = cfg.env;
      opts.randomize = randomize;
      opts.ranges = cfg.training_ranges();
      auto out = cli::to_json(cli::evaluate_policy(params, maps, names, opts));
      out["checkpoint"] = ckpt.string();
      out["seed"] = eval_seed;
      out["episodes_per_map"] = episodes;
      std::cout << out.dump(2) << '\n';
    } else if (*bench) {
      const auto cfg = cli::load_config(bench_config);
      std::cout << cli::to_json(cli::run_bench(cfg, duration, n_values)).dump(2) << '\n';
    } else if (*mapgen) {
      for (const auto& p : cli::write_maps(gen, count, out_dir)) std::cout << p.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
