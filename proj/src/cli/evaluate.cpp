#include "color/cli/evaluate.hpp"

#include <cmath>
#include <cstring>
#include <numeric>

#include "color/asl/vem.hpp"
#include "color/errors.hpp"
#include "color/rng.hpp"

namespace color::cli {

double MapEval::mean_return() const {
  if (returns.empty()) return 0.0;
  return std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
}

double MapSetEval::mean_arrival_rate() const {
  if (maps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& m : maps) sum += m.arrival_rate();
  return sum / static_cast<double>(maps.size());
}

MapSetEval evaluate_policy(const nn::NetworkParams& params, const std::vector<sim::GridMap>& maps,
                           const std::vector<std::string>& names, const EvalOptions& opts) {
  if (opts.episodes_per_map < 1) throw ConfigError("evaluation needs at least one episode per map");
  if (params.shape() != nn::q_network_shape()) throw FormatError("checkpoint shape does not match the Q-network");
  const auto ranges = opts.randomize ? opts.ranges : sim::DiversityRanges::fixed(opts.nominal);
  sim::EnvConfig env_cfg = opts.env;
  env_cfg.nominal_v_linear_max_cm_s = opts.nominal.v_linear_max_cm_s;
  env_cfg.nominal_v_angular_max_rad_s = opts.nominal.v_angular_max_rad_s;
  env_cfg.random_obstacles.count = 0;

  const std::size_t n = maps.size();
  std::vector<sim::SparrowEnv> envs;
  std::vector<Rng> rngs;
  std::vector<sim::State> states(n);
  MapSetEval out;
  out.maps.resize(n);
  envs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    envs.emplace_back(maps[i], env_cfg, ranges);
    rngs.emplace_back(derive_seed(opts.seed, i));
    states[i] = envs[i].reset(rngs[i]);
    out.maps[i].name = i < names.size() ? names[i] : "map" + std::to_string(i);
  }

  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);
  std::vector<double> episode_return(n, 0.0);
  nn::Matrix<float> input;
  while (!active.empty()) {
    input.resize(static_cast<Eigen::Index>(active.size()), sim::kStateDim);
    for (std::size_t r = 0; r < active.size(); ++r) {
      std::memcpy(input.row(static_cast<Eigen::Index>(r)).data(), states[active[r]].data(),
                  sim::kStateDim * sizeof(float));
    }
    const nn::Matrix<float> q = nn::forward(params, input);
    std::vector<std::size_t> still;
    for (std::size_t r = 0; r < active.size(); ++r) {
      const std::size_t i = active[r];
      const int a = asl::argmax_row({q.row(static_cast<Eigen::Index>(r)).data(), sim::kNumActions});
      const auto res = envs[i].step(a, rngs[i]);
      episode_return[i] += res.reward;
      states[i] = res.state;
      if (res.done || res.truncated) {
        auto& m = out.maps[i];
        ++m.episodes;
        m.arrivals += res.event == sim::Event::arrival;
        m.collisions += res.event == sim::Event::collision;
        m.timeouts += res.event == sim::Event::timeout;
        m.returns.push_back(episode_return[i]);
        episode_return[i] = 0.0;
        if (m.episodes >= opts.episodes_per_map) continue;
        states[i] = envs[i].reset(rngs[i]);
      }
      still.push_back(i);
    }
    active.swap(still);
  }
  return out;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  if (values.empty()) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return r;
}

nlohmann::json to_json(const MapSetEval& e) {
  nlohmann::json maps = nlohmann::json::array();
  for (const auto& m : e.maps) {
    maps.push_back({{"map", m.name},
                    {"episodes", m.episodes},
                    {"arrivals", m.arrivals},
                    {"collisions", m.collisions},
                    {"timeouts", m.timeouts},
                    {"arrival_rate", m.arrival_rate()},
                    {"mean_return", m.mean_return()},
                    {"returns", m.returns}});
  }
  return {{"mean_arrival_rate", e.mean_arrival_rate()}, {"maps", maps}};
}

nlohmann::json to_json(const EvalReport& r) { return {{"train", to_json(r.train)}, {"test", to_json(r.test)}}; }

std::vector<sim::GridMap> load_maps(const std::vector<std::filesystem::path>& files, std::vector<std::string>* names) {
  std::vector<sim::GridMap> maps;
  for (const auto& f : files) {
    maps.push_back(sim::load_map(f));
    if (names) names->push_back(f.stem().string());
  }
  return maps;
}

}  // namespace color::cli
