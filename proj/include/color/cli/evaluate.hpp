#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "color/nn/mlp.hpp"
#include "color/sim/sparrow_env.hpp"

namespace color::cli {

struct MapEval {
  std::string name;
  int episodes = 0;
  int arrivals = 0;
  int collisions = 0;
  int timeouts = 0;  // counted as failures
  std::vector<double> returns;

  double arrival_rate() const { return episodes == 0 ? 0.0 : static_cast<double>(arrivals) / episodes; }
  double mean_return() const;
};

struct MapSetEval {
  std::vector<MapEval> maps;
  /// Unweighted mean of the per-map arrival rates.
  double mean_arrival_rate() const;
};

struct EvalOptions {
  int episodes_per_map = 10;
  std::uint64_t seed = 0;
  /// Nominal physics unless set; then each episode samples from these ranges.
  bool randomize = false;
  sim::DiversityRanges ranges{};
  sim::SimParams nominal{};
  sim::EnvConfig env{};
};

/// Greedy rollouts (epsilon = 0), one environment per map stepped in lockstep
/// with a batched forward pass. Deterministic in (params, maps, options).
MapSetEval evaluate_policy(const nn::NetworkParams& params, const std::vector<sim::GridMap>& maps,
                           const std::vector<std::string>& names, const EvalOptions& opts);

struct EvalReport {
  MapSetEval train;
  MapSetEval test;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for fewer than two values
};
MeanStd mean_std(const std::vector<double>& values);

nlohmann::json to_json(const MapSetEval& e);
nlohmann::json to_json(const EvalReport& r);

/// Loads each map file and returns its stem as the name.
std::vector<sim::GridMap> load_maps(const std::vector<std::filesystem::path>& files, std::vector<std::string>* names);

}  // namespace color::cli
