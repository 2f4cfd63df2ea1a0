#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "color/errors.hpp"

namespace color::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Fully connected layer computing x * weight + bias for row-vector inputs.
template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weight;  // in x out
  RowVector<Scalar> bias;

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
           a.weight == b.weight && a.bias == b.bias;
  }
};

/// Layer sizes, input first: the Q-network is {32, 256, 128, 5}.
using Shape = std::vector<int>;

inline const Shape& q_network_shape() {
  static const Shape shape{32, 256, 128, 5};
  return shape;
}

/// Weights of a ReLU MLP (identity output) plus an update counter.
template <typename Scalar>
struct BasicNetworkParams {
  std::vector<DenseLayer<Scalar>> layers;
  std::uint64_t version = 0;

  static BasicNetworkParams zeros(const Shape& shape) {
    if (shape.size() < 2) throw std::invalid_argument("network needs at least input and output sizes");
    BasicNetworkParams p;
    for (std::size_t l = 0; l + 1 < shape.size(); ++l) {
      if (shape[l] <= 0 || shape[l + 1] <= 0) throw std::invalid_argument("layer sizes must be positive");
      p.layers.push_back({Matrix<Scalar>::Zero(shape[l], shape[l + 1]), RowVector<Scalar>::Zero(shape[l + 1])});
    }
    return p;
  }

  /// He-uniform weights (limit sqrt(6 / fan_in)), zero biases.
  template <typename Gen>
  static BasicNetworkParams he_uniform(const Shape& shape, Gen& gen) {
    auto p = zeros(shape);
    for (auto& layer : p.layers) {
      const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.rows()));
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = static_cast<Scalar>(dist(gen));
    }
    return p;
  }

  Shape shape() const {
    Shape s;
    if (layers.empty()) return s;
    s.push_back(static_cast<int>(layers.front().weight.rows()));
    for (const auto& l : layers) s.push_back(static_cast<int>(l.weight.cols()));
    return s;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  bool all_finite() const {
    for (const auto& l : layers) {
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }

  /// Visits every scalar in a fixed order (layer by layer, weights then bias).
  template <typename Fn>
  void for_each(Fn&& fn) {
    for (auto& l : layers) {
      for (Eigen::Index i = 0; i < l.weight.size(); ++i) fn(l.weight.data()[i]);
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) fn(l.bias.data()[i]);
    }
  }
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& l : layers) {
      for (Eigen::Index i = 0; i < l.weight.size(); ++i) fn(l.weight.data()[i]);
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) fn(l.bias.data()[i]);
    }
  }

  /// FNV-1a over the raw parameter bytes and the version.
  std::uint64_t checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const void* p, std::size_t n) {
      const auto* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < n; ++i) h = (h ^ b[i]) * 0x100000001b3ull;
    };
    for_each([&](const Scalar& v) { mix(&v, sizeof v); });
    mix(&version, sizeof version);
    return h;
  }

  friend bool operator==(const BasicNetworkParams&, const BasicNetworkParams&) = default;
};

using NetworkParams = BasicNetworkParams<float>;

/// Per-layer activations kept for backpropagation; activations[0] is the input.
template <typename Scalar>
struct ForwardCache {
  std::vector<Matrix<Scalar>> activations;
};

template <typename Scalar, typename Derived>
Matrix<Scalar> forward(const BasicNetworkParams<Scalar>& params, const Eigen::MatrixBase<Derived>& input,
                       ForwardCache<Scalar>* cache = nullptr) {
  const std::size_t n_layers = params.layers.size();
  if (cache) cache->activations.resize(n_layers + 1);
  Matrix<Scalar> x = input;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = params.layers[l];
    Matrix<Scalar> z = x * layer.weight;
    z.rowwise() += layer.bias;
    if (l + 1 < n_layers) z = z.cwiseMax(Scalar(0));
    if (cache) cache->activations[l] = std::move(x);
    x = std::move(z);
  }
  if (cache) cache->activations[n_layers] = x;
  return x;
}

/// Huber loss with delta = 1.
template <typename Scalar>
Scalar huber(Scalar residual) {
  const Scalar a = std::abs(residual);
  return a <= Scalar(1) ? Scalar(0.5) * residual * residual : a - Scalar(0.5);
}

template <typename Scalar>
Scalar huber_grad(Scalar residual) {
  return std::clamp(residual, Scalar(-1), Scalar(1));
}

/// Mean Huber loss over (q[i, action_i] - target_i) and its exact gradient.
/// `grads` is resized to the parameter shapes. Only the chosen-action output
/// of each row receives gradient. `q_out`, if given, receives the forward pass.
template <typename Scalar, typename Derived>
Scalar backward(const BasicNetworkParams<Scalar>& params, const Eigen::MatrixBase<Derived>& states,
                std::span<const int> actions, std::span<const Scalar> targets,
                BasicNetworkParams<Scalar>& grads, Matrix<Scalar>* q_out = nullptr) {
  const Eigen::Index batch = states.rows();
  if (static_cast<Eigen::Index>(actions.size()) != batch || static_cast<Eigen::Index>(targets.size()) != batch) {
    throw std::invalid_argument("backward: batch sizes disagree");
  }
  ForwardCache<Scalar> cache;
  const Matrix<Scalar> q = forward(params, states, &cache);
  const Eigen::Index n_out = q.cols();

  Matrix<Scalar> delta = Matrix<Scalar>::Zero(batch, n_out);
  Scalar loss = 0;
  const Scalar inv_b = Scalar(1) / static_cast<Scalar>(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    if (a < 0 || a >= n_out) throw std::invalid_argument("backward: action index out of range");
    const Scalar r = q(i, a) - targets[static_cast<std::size_t>(i)];
    loss += huber(r);
    delta(i, a) = huber_grad(r) * inv_b;
  }
  loss *= inv_b;
  if (q_out) *q_out = q;
  if (!std::isfinite(static_cast<double>(loss))) throw TrainingError("non-finite loss");

  const std::size_t n_layers = params.layers.size();
  if (grads.layers.size() != n_layers) grads = BasicNetworkParams<Scalar>::zeros(params.shape());
  for (std::size_t l = n_layers; l-- > 0;) {
    const auto& a_prev = cache.activations[l];
    grads.layers[l].weight.noalias() = a_prev.transpose() * delta;
    grads.layers[l].bias = delta.colwise().sum();
    if (l == 0) break;
    Matrix<Scalar> next = delta * params.layers[l].weight.transpose();
    // ReLU derivative: activation > 0
    next = next.cwiseProduct((a_prev.array() > Scalar(0)).template cast<Scalar>().matrix());
    delta = std::move(next);
  }
  return loss;
}

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename Scalar>
struct AdamState {
  AdamConfig cfg{};
  BasicNetworkParams<Scalar> m;
  BasicNetworkParams<Scalar> v;
  std::uint64_t step = 0;

  static AdamState for_params(const BasicNetworkParams<Scalar>& p, AdamConfig cfg = {}) {
    AdamState s;
    s.cfg = cfg;
    s.m = BasicNetworkParams<Scalar>::zeros(p.shape());
    s.v = BasicNetworkParams<Scalar>::zeros(p.shape());
    return s;
  }
};

/// Bias-corrected Adam update in place; bumps params.version.
template <typename Scalar>
void adam_step(BasicNetworkParams<Scalar>& params, const BasicNetworkParams<Scalar>& grads, AdamState<Scalar>& st) {
  if (grads.shape() != params.shape() || st.m.shape() != params.shape()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  ++st.step;
  const double t = static_cast<double>(st.step);
  const Scalar b1 = static_cast<Scalar>(st.cfg.beta1), b2 = static_cast<Scalar>(st.cfg.beta2);
  const Scalar step_size = static_cast<Scalar>(st.cfg.lr / (1.0 - std::pow(st.cfg.beta1, t)));
  const Scalar v_corr = static_cast<Scalar>(1.0 / (1.0 - std::pow(st.cfg.beta2, t)));
  const Scalar eps = static_cast<Scalar>(st.cfg.eps);

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
    param.array() -= step_size * m.array() / ((v.array() * v_corr).sqrt() + eps);
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].weight, grads.layers[l].weight, st.m.layers[l].weight, st.v.layers[l].weight);
    update(params.layers[l].bias, grads.layers[l].bias, st.m.layers[l].bias, st.v.layers[l].bias);
  }
  ++params.version;
}

/// target := online, including the version counter.
template <typename Scalar>
void sync_target(const BasicNetworkParams<Scalar>& online, BasicNetworkParams<Scalar>& target) {
  target = online;
}

}  // namespace color::nn
