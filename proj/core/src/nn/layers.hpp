#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "isrlu/nn/network.hpp"

namespace isrlu::nn::detail {

/// Per-sample extents flowing between layers. Dense outputs use (1, 1, units).
struct Extent {
  std::size_t h = 1, w = 1, c = 1;
  std::size_t count() const { return h * w * c; }
};

template <class T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual Extent output_extent() const = 0;

  /// Appends this layer's parameter slots; remembers their indices.
  virtual void declare_params(std::vector<ParamInfo>& /*info*/, std::size_t /*layer*/) {}
  virtual void init_params(Parameters<T>& /*params*/, Rng& /*rng*/) const {}

  virtual Tensor<T> forward(const Parameters<T>& params, Tensor<T> input, LayerCache<T>& cache,
                            Mode mode, Rng& rng) const = 0;

  /// Returns the gradient with respect to the layer input; writes parameter
  /// gradients into `grads`.
  virtual Tensor<T> backward(const Parameters<T>& params, const LayerCache<T>& cache,
                             const Tensor<T>& grad_out, Gradients<T>& grads) const = 0;

  virtual std::string kind_name() const = 0;

  /// Alpha actually in use (activation layers only).
  virtual std::optional<double> alpha(const Parameters<T>& /*params*/) const { return std::nullopt; }

  /// The first layer's input is the data batch; its gradient is never used.
  void set_input_grad_needed(bool needed) noexcept { input_grad_needed_ = needed; }
  bool input_grad_needed() const noexcept { return input_grad_needed_; }

 private:
  bool input_grad_needed_ = true;
};

template <class T>
std::unique_ptr<Layer<T>> make_layer(const LayerConfig& config, Extent input);

/// (H - size)/stride + 1 windows, or ceil(H/stride) for "same" padding.
std::size_t conv_output_extent(std::size_t in, int kernel, int stride, Padding padding);
/// Leading pad for "same" padding: half of the total, rounded down.
std::size_t same_pad_before(std::size_t in, std::size_t out, int kernel, int stride);

}  // namespace isrlu::nn::detail
