#pragma once

#include <concepts>
#include <cstdint>
#include <vector>

#include "isrlu/nn/network.hpp"

namespace isrlu::nn {

struct OptimizerConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double lr_start = 0.003;
  double lr_end = 0.0001;
  int batch_size = 100;

  /// Requires 0 < lr_end <= lr_start, betas in [0, 1), epsilon > 0 and
  /// batch_size >= 1. Throws ContractError.
  void validate() const;
};

/// Geometric interpolation lr_start * (lr_end / lr_start)^(step / total).
/// `total` = 0 yields lr_start.
double learning_rate_at(const OptimizerConfig& config, std::uint64_t step, std::uint64_t total);

template <std::floating_point T>
class Adam {
 public:
  Adam(OptimizerConfig config, const Parameters<T>& like);

  /// One bias-corrected update of `params` in place at learning rate `lr`.
  void step(Parameters<T>& params, const Gradients<T>& grads, double lr);

  std::uint64_t steps_taken() const noexcept { return t_; }

 private:
  OptimizerConfig config_;
  std::vector<std::vector<double>> m_, v_;
  std::uint64_t t_ = 0;
};

}  // namespace isrlu::nn
