#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "isrlu/activation.hpp"

namespace isrlu::nn {

enum class Padding { Same, Valid };

struct ConvConfig {
  int kernel_h = 3;
  int kernel_w = 3;
  int out_channels = 1;
  int stride = 1;
  Padding padding = Padding::Same;
};

struct MaxPoolConfig {
  int size = 2;
  int stride = 2;
};

struct DenseConfig {
  int units = 1;
};

/// Inverted dropout: survivors are scaled by 1/pkeep at train time.
struct DropoutConfig {
  double pkeep = 1.0;
};

struct ActivationConfig {
  ActivationSpec spec;
  /// One scalar alpha per layer, trained with the weights.
  bool learnable_alpha = false;
};

/// Marks the output; the network's forward pass returns the logits that
/// feed it and the loss applies the softmax.
struct SoftmaxConfig {};

using LayerConfig =
    std::variant<ConvConfig, MaxPoolConfig, DenseConfig, DropoutConfig, ActivationConfig, SoftmaxConfig>;

struct NetworkConfig {
  std::size_t input_height = 28;
  std::size_t input_width = 28;
  std::size_t input_channels = 1;
  std::vector<LayerConfig> layers;

  /// Checks field ranges and that exactly one Softmax terminates the stack.
  /// Throws ContractError / DomainError.
  void validate() const;
};

std::string describe(const LayerConfig& layer);
std::string describe(const NetworkConfig& config);

/// 28x28x1 -> Conv 6x6x6 /1 -> act -> Conv 5x5x12 /2 -> act -> Conv 4x4x24 /2
/// -> act -> flatten (7*7*24 = 1176) -> Dense 200 -> act -> Dropout(pkeep)
/// -> Dense 10 -> Softmax. All convolutions use "same" padding.
NetworkConfig build_architecture1(const ActivationSpec& activation, double pkeep,
                                  bool learnable_alpha = false);

/// 28x28x1 -> [Conv 3x3x64 -> act] x2 -> MaxPool 2 -> Dropout(pkeep_conv)
/// -> [Conv 3x3x64 -> act] x2 -> MaxPool 2 -> Dropout(pkeep_conv)
/// -> Dense 512 -> act -> Dropout(pkeep_fc) -> Dense 10 -> Softmax.
NetworkConfig build_architecture2(const ActivationSpec& activation, double pkeep_conv,
                                  double pkeep_fc, bool learnable_alpha = false);

}  // namespace isrlu::nn
