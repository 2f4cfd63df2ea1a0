#include "color/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "color/errors.hpp"
#include "color/sim/grid_map.hpp"

namespace color::cli {

namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) throw ConfigError("invalid value '" + text + "' for " + key);
  return value;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&, const fs::path&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number(std::string section, std::string key, T RunConfig::*member) {
  const std::string full = section + "." + key;
  return {std::move(section), std::move(key),
          [member, full](RunConfig& c, const std::string& v, const fs::path&) { c.*member = parse_number<T>(full, v); },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
            else return std::to_string(c.*member);
          }};
}

/// Field stored in a nested struct reached through `access`.
template <typename T, typename Access>
Field nested(std::string section, std::string key, Access access) {
  const std::string full = section + "." + key;
  return {std::move(section), std::move(key),
          [access, full](RunConfig& c, const std::string& v, const fs::path&) { access(c) = parse_number<T>(full, v); },
          [access](const RunConfig& c) {
            const T value = access(const_cast<RunConfig&>(c));
            if constexpr (std::is_floating_point_v<T>) return format_double(value);
            else return std::to_string(value);
          }};
}

Field path_list(std::string section, std::string key, std::vector<fs::path> RunConfig::*member) {
  return {std::move(section), std::move(key),
          [member](RunConfig& c, const std::string& v, const fs::path& base) {
            (c.*member).clear();
            for (const auto& item : split_list(v)) {
              fs::path p(item);
              if (p.is_relative() && !base.empty()) p = base / p;
              (c.*member).push_back(p.lexically_normal());
            }
          },
          [member](const RunConfig& c) {
            std::string out;
            for (const auto& p : c.*member) {
              if (!out.empty()) out += ", ";
              out += fs::absolute(p).lexically_normal().string();
            }
            return out;
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"run", "mode",
                 [](RunConfig& c, const std::string& v, const fs::path&) {
                   if (v == "grey") c.mode = Mode::grey;
                   else if (v == "color") c.mode = Mode::color;
                   else if (v == "custom") c.mode = Mode::custom;
                   else throw ConfigError("run.mode must be grey, color or custom");
                 },
                 [](const RunConfig& c) { return to_string(c.mode); }});
    f.push_back(number("run", "seed", &RunConfig::seed));
    f.push_back({"run", "out_dir",
                 [](RunConfig& c, const std::string& v, const fs::path& base) {
                   fs::path p(v);
                   c.out_dir = (p.is_relative() && !base.empty()) ? (base / p).lexically_normal() : p;
                 },
                 [](const RunConfig& c) { return fs::absolute(c.out_dir).lexically_normal().string(); }});
    f.push_back({"run", "name", [](RunConfig& c, const std::string& v, const fs::path&) { c.name = v; },
                 [](const RunConfig& c) { return c.name; }});
    f.push_back(path_list("run", "train_maps", &RunConfig::train_maps));
    f.push_back(path_list("run", "test_maps", &RunConfig::test_maps));

    f.push_back(number("asl", "n_envs", &RunConfig::n_envs));
    f.push_back(number("asl", "max_steps", &RunConfig::max_steps));
    f.push_back(number("asl", "tps", &RunConfig::tps));
    f.push_back(number("asl", "batch", &RunConfig::batch));
    f.push_back(number("asl", "learning_start", &RunConfig::learning_start));
    f.push_back(number("asl", "upload_period", &RunConfig::upload_period));
    f.push_back(number("asl", "buffer_capacity", &RunConfig::buffer_capacity));
    f.push_back(number("asl", "ema_factor", &RunConfig::ema_factor));
    f.push_back(number("asl", "warmup_samples", &RunConfig::warmup_samples));
    f.push_back(number("asl", "max_sleep_s", &RunConfig::max_sleep_s));
    f.push_back(number("asl", "env_workers", &RunConfig::env_workers));

    f.push_back(number("vem", "or_init", &RunConfig::or_init));
    f.push_back(number("vem", "or_final", &RunConfig::or_final));
    f.push_back(number("vem", "decay_steps", &RunConfig::or_decay_steps));
    f.push_back(number("vem", "e_min", &RunConfig::e_min));
    f.push_back(number("vem", "e_max", &RunConfig::e_max));

    f.push_back(number("ddqn", "gamma", &RunConfig::gamma));
    f.push_back(number("ddqn", "lr", &RunConfig::lr));
    f.push_back(number("ddqn", "target_sync", &RunConfig::target_sync));

    f.push_back(nested<double>("sim", "k", [](RunConfig& c) -> double& { return c.nominal.k; }));
    f.push_back(nested<double>("sim", "control_interval_s",
                               [](RunConfig& c) -> double& { return c.nominal.control_interval_s; }));
    f.push_back(nested<int>("sim", "control_delay_steps",
                            [](RunConfig& c) -> int& { return c.nominal.control_delay_steps; }));
    f.push_back(nested<double>("sim", "v_linear_max", [](RunConfig& c) -> double& { return c.nominal.v_linear_max_cm_s; }));
    f.push_back(nested<double>("sim", "v_angular_max",
                               [](RunConfig& c) -> double& { return c.nominal.v_angular_max_rad_s; }));
    f.push_back(nested<double>("sim", "lidar_noise_std",
                               [](RunConfig& c) -> double& { return c.nominal.lidar_noise_std_cm; }));
    f.push_back(number("sim", "diversity", &RunConfig::diversity));
    f.push_back(number("sim", "delay_spread", &RunConfig::delay_spread));
    f.push_back(nested<double>("sim", "robot_radius", [](RunConfig& c) -> double& { return c.env.robot_radius_cm; }));
    f.push_back(nested<double>("sim", "lidar_range", [](RunConfig& c) -> double& { return c.env.lidar.max_range_cm; }));
    f.push_back({"sim", "lidar_fov_deg",
                 [](RunConfig& c, const std::string& v, const fs::path&) {
                   c.env.lidar.fov_rad = parse_number<double>("sim.lidar_fov_deg", v) * M_PI / 180.0;
                 },
                 [](const RunConfig& c) { return format_double(c.env.lidar.fov_rad * 180.0 / M_PI); }});
    f.push_back(nested<int>("sim", "timeout_steps", [](RunConfig& c) -> int& { return c.env.timeout_steps; }));
    f.push_back(nested<double>("sim", "turn_linear_speed", [](RunConfig& c) -> double& { return c.env.turn_linear_cm_s; }));
    f.push_back(nested<double>("sim", "planning_distance",
                               [](RunConfig& c) -> double& { return c.env.planning_distance_cm; }));
    f.push_back(nested<double>("sim", "near_obstacle_cm", [](RunConfig& c) -> double& { return c.env.near_obstacle_cm; }));
    f.push_back(number("sim", "map0_obstacles", &RunConfig::map0_obstacles));
    f.push_back(nested<double>("sim", "obstacle_min_size",
                               [](RunConfig& c) -> double& { return c.env.random_obstacles.min_size_cm; }));
    f.push_back(nested<double>("sim", "obstacle_max_size",
                               [](RunConfig& c) -> double& { return c.env.random_obstacles.max_size_cm; }));

    f.push_back(number("eval", "interval_bsteps", &RunConfig::eval_interval_bsteps));
    f.push_back(number("eval", "episodes", &RunConfig::eval_episodes));
    f.push_back(number("eval", "final_episodes", &RunConfig::final_eval_episodes));
    f.push_back(number("eval", "metrics_interval_s", &RunConfig::metrics_interval_s));
    return f;
  }();
  return table;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::grey:
      return "grey";
    case Mode::color:
      return "color";
    case Mode::custom:
      return "custom";
  }
  return "?";
}

RunConfig parse_config(std::istream& in, const fs::path& base_dir) {
  RunConfig cfg;
  std::map<std::string, const Field*> index;
  for (const auto& f : fields()) index[f.section + "." + f.key] = &f;

  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      const bool known = std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.section == section; });
      if (!known) throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = index.find(section + "." + key);
    if (it == index.end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key " + section + "." + key);
    it->second->set(cfg, value, base_dir);
  }
  if (cfg.or_init == 0) cfg.or_init = cfg.n_envs;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return parse_config(in, fs::absolute(path).parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
}

void RunConfig::validate() const {
  if (n_envs < 1) throw ConfigError("asl.n_envs must be >= 1");
  if (max_steps == 0) throw ConfigError("asl.max_steps must be positive");
  if (batch < 1) throw ConfigError("asl.batch must be >= 1");
  if (buffer_capacity < static_cast<std::size_t>(n_envs)) throw ConfigError("asl.buffer_capacity must hold one batch");
  if (upload_period == 0) throw ConfigError("asl.upload_period must be positive");
  if (env_workers == 0) throw ConfigError("asl.env_workers must be >= 1");
  if (diversity < 0.0 || diversity >= 1.0) throw ConfigError("sim.diversity must lie in [0, 1)");
  if (delay_spread < 0) throw ConfigError("sim.delay_spread must be >= 0");
  if (map0_obstacles < 0) throw ConfigError("sim.map0_obstacles must be >= 0");
  if (eval_episodes < 1) throw ConfigError("eval.episodes must be >= 1");
  if (final_eval_episodes < 0) throw ConfigError("eval.final_episodes must be >= 0");
  if (!(metrics_interval_s > 0.0)) throw ConfigError("eval.metrics_interval_s must be positive");
  tfm().validate();
  vem().validate();
  ddqn().validate();
  training_ranges().validate(env.max_delay_steps);
}

asl::TfmConfig RunConfig::tfm() const {
  asl::TfmConfig t;
  t.n_envs = n_envs;
  t.tps = tps;
  t.batch = batch;
  t.ema_factor = ema_factor;
  t.warmup_samples = warmup_samples;
  t.max_sleep_s = max_sleep_s;
  return t;
}

asl::VemSchedule RunConfig::vem() const {
  asl::VemSchedule v;
  v.n_envs = n_envs;
  v.or_init = or_init > 0 ? or_init : n_envs;
  v.or_final = or_final;
  v.decay_steps = or_decay_steps;
  v.e_min = e_min;
  v.e_max = e_max;
  return v;
}

DdqnConfig RunConfig::ddqn() const {
  DdqnConfig d;
  d.gamma = gamma;
  d.target_sync_period = target_sync;
  d.adam.lr = lr;
  return d;
}

sim::DiversityRanges RunConfig::training_ranges() const {
  if (mode == Mode::grey) return sim::DiversityRanges::fixed(nominal);
  return sim::DiversityRanges::around(nominal, diversity, delay_spread);
}

sim::EnvConfig RunConfig::training_env(std::size_t map_index) const {
  sim::EnvConfig e = env;
  e.nominal_v_linear_max_cm_s = nominal.v_linear_max_cm_s;
  e.nominal_v_angular_max_rad_s = nominal.v_angular_max_rad_s;
  e.random_obstacles.count = map_index == 0 ? map0_obstacles : 0;
  return e;
}

std::string RunConfig::run_name() const {
  return name.empty() ? to_string(mode) + "-seed" + std::to_string(seed) : name;
}

std::vector<fs::path> expand_map_paths(const std::vector<fs::path>& entries) {
  std::vector<fs::path> out;
  for (const auto& e : entries) {
    if (fs::is_directory(e)) {
      const auto files = sim::list_map_files(e);
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace color::cli
