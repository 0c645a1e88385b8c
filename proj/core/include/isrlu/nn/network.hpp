#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "isrlu/nn/config.hpp"
#include "isrlu/nn/tensor.hpp"

namespace isrlu::nn {

enum class Mode { Train, Eval };

using Rng = std::mt19937_64;

enum class ParamRole { Weight, Bias, Alpha };

struct ParamInfo {
  std::string name;  // e.g. "conv0.weight", "act1.alpha"
  ParamRole role;
  std::size_t layer;  // index into NetworkConfig::layers
  Shape shape;
};

/// Flat list of parameter tensors, indexed like Network::param_info().
template <class T>
struct Parameters {
  std::vector<Tensor<T>> tensors;

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.size();
    return n;
  }
};

template <class T>
using Gradients = Parameters<T>;

/// Whatever a layer keeps from its forward pass for the backward pass.
template <class T>
struct LayerCache {
  Tensor<T> input;
  std::vector<T> aux;                 // im2col matrix, dropout mask or activation slope
  std::vector<std::uint32_t> index;   // max-pool argmax positions
};

template <class T>
struct ForwardCache {
  std::vector<LayerCache<T>> layers;
  Tensor<T> logits;  // (batch, classes)
};

namespace detail {
template <class T>
class Layer;
}

/// Sequential network built from a NetworkConfig. Layers carry no mutable
/// state: parameters, gradients and caches are passed in and out
/// explicitly, so one Network can serve several parameter sets.
template <std::floating_point T>
class Network {
 public:
  explicit Network(NetworkConfig config);
  ~Network();
  Network(Network&&) noexcept;
  Network& operator=(Network&&) noexcept;

  const NetworkConfig& config() const noexcept { return config_; }
  const std::vector<ParamInfo>& param_info() const noexcept { return param_info_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

  /// Parameters of the right shapes, all zero (alphas included).
  Parameters<T> zero_parameters() const;

  /// Weights ~ normal(0, 0.1) truncated at +-0.2 (resampled), biases 0.1,
  /// learnable alphas at their configured value. Deterministic in `seed`.
  Parameters<T> init_weights(std::uint64_t seed) const;

  /// `batch` must be (B, H, W, C) matching the configured input. Train mode
  /// applies dropout with `rng`; eval mode never touches it.
  ForwardCache<T> forward(const Parameters<T>& params, const Tensor<T>& batch, Mode mode, Rng& rng) const;

  /// Gradients of the mean softmax cross-entropy over the batch.
  Gradients<T> backward(const Parameters<T>& params, const ForwardCache<T>& cache,
                        std::span<const std::uint8_t> labels) const;

  /// Alpha in use by every activation layer, in layer order (learnable
  /// ones read from `params`).
  std::vector<double> activation_alphas(const Parameters<T>& params) const;

  /// Index of the first layer whose output (or parameters) contain a
  /// non-finite value, re-running the forward pass layer by layer.
  std::optional<std::size_t> locate_non_finite(const Parameters<T>& params, const Tensor<T>& batch,
                                               Mode mode, Rng rng) const;

  /// "conv0", "act1", ... for the given config layer index.
  std::string layer_name(std::size_t layer) const;

 private:
  void check_params(const Parameters<T>& params) const;

  NetworkConfig config_;
  std::vector<std::unique_ptr<detail::Layer<T>>> layers_;  // excludes the Softmax marker
  std::vector<ParamInfo> param_info_;
  std::size_t num_classes_ = 0;
};

/// Row-wise softmax of (batch, classes) logits.
template <std::floating_point T>
Tensor<T> softmax(const Tensor<T>& logits);

/// Mean per-sample natural-log cross-entropy of softmax(logits).
template <std::floating_point T>
double softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels);

template <std::floating_point T>
std::size_t count_correct(const Tensor<T>& logits, std::span<const std::uint8_t> labels);

/// Scale applied to the mean cross-entropy for the reported column: the
/// per-100-image convention of the reference MNIST experiments.
inline constexpr double kReportedXentScale = 100.0;

struct CrossEntropyMetric {
  double raw_mean = 0.0;
  double scaled = 0.0;  // raw_mean * kReportedXentScale
};

template <std::floating_point T>
CrossEntropyMetric cross_entropy_metric(const Tensor<T>& logits, std::span<const std::uint8_t> labels);

}  // namespace isrlu::nn
