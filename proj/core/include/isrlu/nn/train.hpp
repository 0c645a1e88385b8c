#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "isrlu/nn/mnist.hpp"
#include "isrlu/nn/network.hpp"
#include "isrlu/nn/optimizer.hpp"

namespace isrlu::nn {

/// Learnable alphas never drop below this after an update.
inline constexpr double kMinAlpha = 1e-6;

struct EvalResult {
  double accuracy = 0.0;  // percent
  CrossEntropyMetric xent;
};

/// Copies samples `indices` of `data` into a (B, H, W, C) batch.
template <std::floating_point T>
Tensor<T> gather_batch(const Dataset& data, std::span<const std::size_t> indices);

/// Parameters, optimizer state and dropout stream for one run.
template <std::floating_point T>
class Trainer {
 public:
  Trainer(NetworkConfig network, OptimizerConfig optimizer, std::uint64_t seed);

  /// Forward, backward and one Adam update. Returns the mean batch loss
  /// measured before the update. A non-finite loss throws TrainingError
  /// naming the step and the first offending layer.
  double step(const Tensor<T>& batch, std::span<const std::uint8_t> labels, double lr);

  EvalResult evaluate(const Dataset& data, std::size_t batch_size = 1000) const;

  const Network<T>& network() const noexcept { return network_; }
  const Parameters<T>& params() const noexcept { return params_; }
  Parameters<T>& params() noexcept { return params_; }
  std::uint64_t steps_taken() const noexcept { return adam_.steps_taken(); }

  /// Config layer index and current value of every learnable alpha.
  std::vector<std::pair<std::size_t, double>> learnable_alphas() const;

 private:
  Network<T> network_;
  Parameters<T> params_;
  Adam<T> adam_;
  Rng dropout_rng_;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double test_xent = 0.0;         // raw mean per sample
  double test_xent_scaled = 0.0;  // times kReportedXentScale
  std::vector<double> alphas;     // learnable alphas after the epoch
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  double initial_test_accuracy = 0.0;
  std::vector<std::size_t> alpha_layers;  // config indices of learnable activations
  std::vector<double> final_alphas;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;

  double max_test_accuracy() const;
};

struct TrainOptions {
  NetworkConfig network;
  OptimizerConfig optimizer;
  int epochs = 17;
  std::uint64_t seed = 1;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Runs epochs * floor(N / batch) steps with a per-epoch seeded shuffle,
/// evaluating on `test` after every epoch. Float precision.
TrainReport train(const TrainOptions& options, const Dataset& train_set, const Dataset& test_set,
                  const EpochCallback& on_epoch = {});

/// CSV: epoch,train_loss,test_accuracy,test_xent,alpha_layer_<i>...
std::string report_csv(const TrainReport& report);

}  // namespace isrlu::nn
