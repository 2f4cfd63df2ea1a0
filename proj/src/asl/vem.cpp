#include "color/asl/vem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "color/errors.hpp"

namespace color::asl {

void VemSchedule::validate() const {
  if (n_envs < 1) throw ConfigError("VEM needs at least one environment copy");
  if (!(1 <= or_final && or_final <= or_init && or_init <= n_envs)) {
    throw ConfigError("VEM requires 1 <= or_final <= or_init <= N");
  }
  if (!(0.0 <= e_min && e_min <= e_max && e_max <= 1.0)) throw ConfigError("VEM requires 0 <= e_min <= e_max <= 1");
}

int VemSchedule::exploring_size(std::uint64_t t) const {
  const double frac = decay_steps == 0 ? 1.0 : std::min(1.0, static_cast<double>(t) / static_cast<double>(decay_steps));
  return static_cast<int>(std::lround(or_init + (or_final - or_init) * frac));
}

double VemSchedule::epsilon(int i, std::uint64_t t) const {
  if (i < 0 || i >= n_envs) throw std::out_of_range("VEM env index out of range");
  const int explore = exploring_size(t);
  const int first = n_envs - explore;
  if (i < first) return e_min;
  if (explore == 1) return e_max;
  return e_min + (e_max - e_min) * static_cast<double>(i - first) / static_cast<double>(explore - 1);
}

std::vector<double> VemSchedule::epsilons(std::uint64_t t) const {
  std::vector<double> eps(static_cast<std::size_t>(n_envs));
  for (int i = 0; i < n_envs; ++i) eps[static_cast<std::size_t>(i)] = epsilon(i, t);
  return eps;
}

int argmax_row(std::span<const float> row) {
  int best = 0;
  for (std::size_t a = 1; a < row.size(); ++a) {
    if (row[a] > row[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
  }
  return best;
}

std::vector<int> select_actions(std::span<const float> q_values, int n_actions, std::span<const double> epsilons,
                                Rng& rng) {
  const std::size_t n = epsilons.size();
  if (q_values.size() != n * static_cast<std::size_t>(n_actions)) {
    throw std::invalid_argument("select_actions: q table and epsilon vector disagree");
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, n_actions - 1);
  std::vector<int> actions(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (coin(rng) < epsilons[i]) {
      actions[i] = random_action(rng);
    } else {
      actions[i] = argmax_row(q_values.subspan(i * static_cast<std::size_t>(n_actions), static_cast<std::size_t>(n_actions)));
    }
  }
  return actions;
}

}  // namespace color::asl
