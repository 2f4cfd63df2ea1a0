#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Deliberately naive: fine-step marching, exhaustive loops.

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <vector>

#include "color/nn/mlp.hpp"
#include "color/sim/grid_map.hpp"

namespace oracle {

/// Marches from `origin` in steps of `step` until an occupied point or `max_range`.
inline double ray_march(const color::sim::GridMap& map, color::sim::Vec2 origin, double angle, double max_range,
                        double step) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (double t = 0.0; t < max_range; t += step) {
    if (map.occupied_at({origin.x + t * c, origin.y + t * s})) return t;
  }
  return max_range;
}

/// Exact first hit: slab intersection of the ray with every occupied cell box,
/// including the out-of-bounds ring that walls the map.
inline double ray_cells_exact(const color::sim::GridMap& map, color::sim::Vec2 o, double angle, double max_range) {
  const double cs = map.cell_size_cm(), dx = std::cos(angle), dy = std::sin(angle);
  double best = max_range;
  auto slab = [](double origin, double dir, double lo, double hi, double& t0, double& t1) {
    if (dir == 0.0) return origin >= lo && origin <= hi;
    double a = (lo - origin) / dir, b = (hi - origin) / dir;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    return t0 <= t1;
  };
  for (int row = -1; row <= map.rows(); ++row) {
    for (int col = -1; col <= map.cols(); ++col) {
      if (!map.occupied(col, row)) continue;
      double t0 = 0.0, t1 = best;
      if (!slab(o.x, dx, col * cs, (col + 1) * cs, t0, t1)) continue;
      if (!slab(o.y, dy, row * cs, (row + 1) * cs, t0, t1)) continue;
      best = std::min(best, t0);
    }
  }
  return best;
}

/// Disc-vs-cell test over every occupied cell.
inline bool disc_hits_cells(const color::sim::GridMap& map, color::sim::Vec2 c, double radius) {
  const double cs = map.cell_size_cm();
  if (c.x - radius < 0.0 || c.y - radius < 0.0 || c.x + radius > map.width_cm() || c.y + radius > map.height_cm()) {
    return true;
  }
  for (int row = 0; row < map.rows(); ++row) {
    for (int col = 0; col < map.cols(); ++col) {
      if (!map.occupied(col, row)) continue;
      const double nx = std::clamp(c.x, col * cs, (col + 1) * cs);
      const double ny = std::clamp(c.y, row * cs, (row + 1) * cs);
      if (std::hypot(nx - c.x, ny - c.y) < radius) return true;
    }
  }
  return false;
}

/// Upper-tail p-value of Pearson's statistic against uniform expected counts.
inline double chi_square_uniform_p(const std::vector<long>& counts) {
  double total = 0.0;
  for (long c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (long c : counts) stat += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Forward pass with explicit loops in double precision.
template <typename Scalar>
std::vector<double> naive_forward(const color::nn::BasicNetworkParams<Scalar>& p, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& layer = p.layers[l];
    std::vector<double> z(static_cast<std::size_t>(layer.weight.cols()));
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
      double acc = layer.bias(j);
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) acc += a[static_cast<std::size_t>(i)] * layer.weight(i, j);
      z[static_cast<std::size_t>(j)] = (l + 1 < p.layers.size()) ? std::max(acc, 0.0) : acc;
    }
    a = std::move(z);
  }
  return a;
}

struct TargetCheck {
  double y_ddqn_low = 0.0;   // smallest admissible double-DQN target
  double y_ddqn_high = 0.0;  // largest admissible double-DQN target
  double y_dqn = 0.0;        // max over the target network
};

/// Brute force over every action. Online values within `tie_tol` of the max
/// are all admissible argmax choices, which absorbs float rounding.
inline TargetCheck brute_force_target(const color::nn::NetworkParams& online, const color::nn::NetworkParams& target,
                                      const std::vector<double>& next_state, double reward, bool done, double gamma,
                                      double tie_tol) {
  TargetCheck c;
  if (done) {
    c.y_ddqn_low = c.y_ddqn_high = c.y_dqn = reward;
    return c;
  }
  const auto qo = naive_forward(online, next_state);
  const auto qt = naive_forward(target, next_state);
  double best = qo[0], dqn = qt[0];
  for (std::size_t a = 1; a < qo.size(); ++a) {
    best = std::max(best, qo[a]);
    dqn = std::max(dqn, qt[a]);
  }
  c.y_ddqn_low = 1e300;
  c.y_ddqn_high = -1e300;
  for (std::size_t a = 0; a < qo.size(); ++a) {
    if (qo[a] < best - tie_tol) continue;
    c.y_ddqn_low = std::min(c.y_ddqn_low, reward + gamma * qt[a]);
    c.y_ddqn_high = std::max(c.y_ddqn_high, reward + gamma * qt[a]);
  }
  c.y_dqn = reward + gamma * dqn;
  return c;
}

}  // namespace oracle
