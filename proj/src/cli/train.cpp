#include "color/cli/train.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "color/asl/loops.hpp"
#include "color/asl/sharer.hpp"
#include "color/ddqn.hpp"
#include "color/errors.hpp"
#include "color/nn/checkpoint.hpp"
#include "color/vec_env.hpp"

namespace color::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

class MetricsWriter {
 public:
  explicit MetricsWriter(const fs::path& path) : out_(path) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << kMetricsHeader << '\n' << std::flush;
  }

  void row(double wall, const asl::Sharer& sharer, const asl::VemSchedule& vem, int batch) {
    const auto t = sharer.t_step();
    const auto b = sharer.b_step();
    std::string tps;
    if (t > last_t_ && b >= last_b_ && rows_ > 0) {
      tps = fmt(static_cast<double>(batch) * static_cast<double>(b - last_b_) / static_cast<double>(t - last_t_));
    }
    const auto xi = sharer.xi();
    const auto recent = sharer.recent_episodes();
    out_ << fmt(wall) << ',' << t << ',' << b << ',' << tps << ',' << (xi ? fmt(*xi * 1e3) : "") << ','
         << vem.exploiting_size(t) << ',' << sharer.replay().size() << ',' << fmt_opt(recent.arrival_rate) << ','
         << fmt_opt(recent.mean_return) << '\n'
         << std::flush;
    last_t_ = t;
    last_b_ = b;
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::uint64_t last_t_ = 0;
  std::uint64_t last_b_ = 0;
  std::size_t rows_ = 0;
};

EvalOptions eval_options(const RunConfig& cfg, int episodes, std::uint64_t seed) {
  EvalOptions o;
  o.episodes_per_map = episodes;
  o.seed = seed;
  o.nominal = cfg.nominal;
  o.env = cfg.env;
  return o;
}

}  // namespace

fs::path output_root(const RunConfig& cfg) {
  if (const char* env = std::getenv("COLOR_OUT_DIR"); env && *env) return env;
  return cfg.out_dir;
}

std::unique_ptr<VecEnv> make_training_envs(const RunConfig& cfg, const std::vector<sim::GridMap>& maps) {
  if (maps.empty()) throw ConfigError("training needs at least one map");
  std::vector<sim::GridMap> used = maps;
  if (cfg.mode == Mode::grey) used.resize(1);
  std::vector<sim::EnvConfig> env_cfgs;
  for (std::size_t m = 0; m < used.size(); ++m) env_cfgs.push_back(cfg.training_env(m));
  return std::make_unique<VecEnv>(static_cast<std::size_t>(cfg.n_envs), used, env_cfgs,
                                  std::vector<sim::DiversityRanges>{cfg.training_ranges()}, cfg.env_workers);
}

TrainResult run_training(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const auto train_files = expand_map_paths(cfg.train_maps);
  const auto test_files = expand_map_paths(cfg.test_maps);
  if (train_files.empty()) throw ConfigError("run.train_maps lists no map files");
  std::vector<std::string> train_names, test_names;
  auto train_maps = load_maps(train_files, &train_names);
  const auto test_maps = load_maps(test_files, &test_names);
  if (cfg.mode == Mode::grey) {
    // every copy trains on map 0 with identical physics
    train_maps.resize(1);
    train_names.resize(1);
  }

  TrainResult result;
  result.run_dir = output_root(cfg) / cfg.run_name();
  fs::create_directories(result.run_dir);
  {
    std::ofstream out(result.run_dir / "resolved_config.ini");
    write_config(out, cfg);
  }

  const auto env_ptr = make_training_envs(cfg, train_maps);
  VecEnv& envs = *env_ptr;

  Rng init_rng(derive_seed(cfg.seed, 0x1417));
  const auto initial = nn::NetworkParams::he_uniform(nn::q_network_shape(), init_rng);
  asl::Sharer sharer(initial, cfg.buffer_capacity, cfg.tfm());
  DdqnLearner algo(initial, cfg.ddqn());

  asl::ActorConfig actor_cfg;
  actor_cfg.max_steps = cfg.max_steps;
  actor_cfg.seed = derive_seed(cfg.seed, 1);
  asl::LearnerConfig learner_cfg;
  learner_cfg.batch = static_cast<std::size_t>(cfg.batch);
  learner_cfg.learning_start = cfg.learning_start;
  learner_cfg.upload_period = cfg.upload_period;
  learner_cfg.seed = derive_seed(cfg.seed, 2);
  const auto vem = cfg.vem();
  asl::Actor actor(sharer, envs, vem, actor_cfg);
  asl::Learner learner(sharer, algo, learner_cfg);

  MetricsWriter metrics(result.run_dir / "metrics.csv");
  std::ofstream eval_csv(result.run_dir / "eval.csv");
  eval_csv << "wall_time_s,T_step,B_step,model_sequence,train_arrival_rate,train_mean_return\n" << std::flush;

  const auto eval_seed = derive_seed(cfg.seed, 3);
  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  double next_metrics = 0.0;
  std::uint64_t next_eval = cfg.eval_interval_bsteps;

  const auto consider_best = [&](const nn::NetworkParams& params, double rate) {
    if (!result.best_train_rate || rate > *result.best_train_rate) {
      result.best_train_rate = rate;
      nn::save_checkpoint(result.run_dir / "ckpt_best.bin", params);
    }
  };

  const auto monitor = [&] {
    const double now = elapsed();
    if (now >= next_metrics) {
      metrics.row(now, sharer, vem, cfg.batch);
      next_metrics = now + cfg.metrics_interval_s;
    }
    if (cfg.eval_interval_bsteps > 0 && sharer.b_step() >= next_eval) {
      next_eval += cfg.eval_interval_bsteps;
      const auto model = sharer.latest();
      const auto ev = evaluate_policy(model->params, train_maps, train_names,
                                      eval_options(cfg, cfg.eval_episodes, eval_seed));
      eval_csv << fmt(elapsed()) << ',' << sharer.t_step() << ',' << sharer.b_step() << ',' << model->sequence << ','
               << fmt(ev.mean_arrival_rate()) << ',';
      double ret = 0.0;
      for (const auto& m : ev.maps) ret += m.mean_return();
      eval_csv << fmt(ret / static_cast<double>(ev.maps.size())) << '\n' << std::flush;
      nn::save_checkpoint(result.run_dir / "ckpt_latest.bin", model->params);
      consider_best(model->params, ev.mean_arrival_rate());
      if (log) {
        *log << "[" << fmt(elapsed(), 4) << "s] T=" << sharer.t_step() << " B=" << sharer.b_step()
             << " train arrival " << fmt(ev.mean_arrival_rate(), 3) << std::endl;
      }
    }
  };

  asl::run_concurrently(sharer, actor, learner, monitor);
  result.wall_seconds = elapsed();
  metrics.row(result.wall_seconds, sharer, vem, cfg.batch);
  result.t_step = sharer.t_step();
  result.b_step = sharer.b_step();
  result.metrics_rows = metrics.rows();

  const auto& final_params = algo.online();
  nn::save_checkpoint(result.run_dir / "ckpt_latest.bin", final_params);
  if (cfg.final_eval_episodes > 0) {
    const auto opts = eval_options(cfg, cfg.final_eval_episodes, eval_seed);
    EvalReport rep;
    rep.train = evaluate_policy(final_params, train_maps, train_names, opts);
    rep.test = evaluate_policy(final_params, test_maps, test_names, opts);
    result.final_eval = rep;
    consider_best(final_params, rep.train.mean_arrival_rate());
    if (fs::exists(result.run_dir / "ckpt_best.bin")) {
      const auto best = nn::load_checkpoint(result.run_dir / "ckpt_best.bin");
      EvalReport b;
      b.train = evaluate_policy(best, train_maps, train_names, opts);
      b.test = evaluate_policy(best, test_maps, test_names, opts);
      result.best_eval = b;
    }
  } else if (!fs::exists(result.run_dir / "ckpt_best.bin")) {
    nn::save_checkpoint(result.run_dir / "ckpt_best.bin", final_params);
  }

  nlohmann::json report = {{"run", cfg.run_name()},
                           {"mode", to_string(cfg.mode)},
                           {"seed", cfg.seed},
                           {"T_step", result.t_step},
                           {"B_step", result.b_step},
                           {"wall_time_s", result.wall_seconds},
                           {"actor_sleeps", actor.sleeps()},
                           {"learner_sleeps", learner.sleeps()},
                           {"published_models", sharer.published_sequence()}};
  if (result.best_train_rate) report["best_train_arrival_rate"] = *result.best_train_rate;
  if (result.final_eval) report["final"] = to_json(*result.final_eval);
  if (result.best_eval) report["best"] = to_json(*result.best_eval);
  std::ofstream(result.run_dir / "report.json") << report.dump(2) << '\n';
  if (log) {
    *log << "finished " << cfg.run_name() << ": T=" << result.t_step << " B=" << result.b_step << " in "
         << fmt(result.wall_seconds, 4) << "s" << std::endl;
  }
  return result;
}

}  // namespace color::cli
