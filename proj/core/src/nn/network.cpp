#include "isrlu/nn/network.hpp"

#include <algorithm>
#include <cmath>

#include "isrlu/errors.hpp"
#include "layers.hpp"

namespace isrlu::nn {

namespace {

template <class T>
bool all_finite(std::span<const T> values) {
  return std::all_of(values.begin(), values.end(), [](T v) { return std::isfinite(v); });
}

const char* role_suffix(ParamRole role) {
  switch (role) {
    case ParamRole::Weight: return ".weight";
    case ParamRole::Bias: return ".bias";
    case ParamRole::Alpha: return ".alpha";
  }
  return "";
}

void check_labels(std::span<const std::uint8_t> labels, std::size_t batch, std::size_t classes) {
  if (labels.size() != batch)
    throw ContractError("label count " + std::to_string(labels.size()) + " does not match batch " +
                        std::to_string(batch));
  for (std::uint8_t y : labels)
    if (y >= classes) throw ContractError("label " + std::to_string(y) + " out of range");
}

template <class T>
void check_logits(const Tensor<T>& logits) {
  if (logits.rank() != 2 || logits.dim(0) == 0 || logits.dim(1) == 0)
    throw ContractError("logits must be (batch, classes), got " + to_string(logits.shape()));
}

}  // namespace

template <std::floating_point T>
Network<T>::Network(NetworkConfig config) : config_(std::move(config)) {
  config_.validate();
  detail::Extent extent{config_.input_height, config_.input_width, config_.input_channels};
  for (std::size_t i = 0; i + 1 < config_.layers.size(); ++i) {
    auto layer = detail::make_layer<T>(config_.layers[i], extent);
    const std::size_t first_param = param_info_.size();
    layer->declare_params(param_info_, i);
    const std::string name = layer->kind_name() + std::to_string(i);
    for (std::size_t p = first_param; p < param_info_.size(); ++p)
      param_info_[p].name = name + role_suffix(param_info_[p].role);
    extent = layer->output_extent();
    layers_.push_back(std::move(layer));
  }
  if (!layers_.empty()) layers_.front()->set_input_grad_needed(false);
  num_classes_ = extent.count();
}

template <std::floating_point T>
Network<T>::~Network() = default;
template <std::floating_point T>
Network<T>::Network(Network&&) noexcept = default;
template <std::floating_point T>
Network<T>& Network<T>::operator=(Network&&) noexcept = default;

template <std::floating_point T>
std::string Network<T>::layer_name(std::size_t layer) const {
  if (layer >= layers_.size()) return "softmax";
  return layers_[layer]->kind_name() + std::to_string(layer);
}

template <std::floating_point T>
Parameters<T> Network<T>::zero_parameters() const {
  Parameters<T> params;
  params.tensors.reserve(param_info_.size());
  for (const auto& info : param_info_) params.tensors.emplace_back(info.shape);
  return params;
}

template <std::floating_point T>
Parameters<T> Network<T>::init_weights(std::uint64_t seed) const {
  Parameters<T> params = zero_parameters();
  Rng rng(seed);
  for (const auto& layer : layers_) layer->init_params(params, rng);
  return params;
}

template <std::floating_point T>
void Network<T>::check_params(const Parameters<T>& params) const {
  if (params.tensors.size() != param_info_.size())
    throw ContractError("parameter set has " + std::to_string(params.tensors.size()) +
                        " tensors, network expects " + std::to_string(param_info_.size()));
  for (std::size_t i = 0; i < param_info_.size(); ++i)
    if (params.tensors[i].shape() != param_info_[i].shape)
      throw ContractError("parameter " + param_info_[i].name + " has shape " +
                          to_string(params.tensors[i].shape()) + ", expected " +
                          to_string(param_info_[i].shape));
}

template <std::floating_point T>
ForwardCache<T> Network<T>::forward(const Parameters<T>& params, const Tensor<T>& batch, Mode mode,
                                    Rng& rng) const {
  check_params(params);
  const Shape expected{batch.rank() > 0 ? batch.dim(0) : 0, config_.input_height, config_.input_width,
                       config_.input_channels};
  if (batch.shape() != expected || expected[0] == 0)
    throw ContractError("batch shape " + to_string(batch.shape()) + " does not match network input " +
                        to_string(expected));

  ForwardCache<T> cache;
  cache.layers.resize(layers_.size());
  Tensor<T> x = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    x = layers_[i]->forward(params, std::move(x), cache.layers[i], mode, rng);
  x.reshape({expected[0], num_classes_});
  cache.logits = std::move(x);
  return cache;
}

template <std::floating_point T>
Gradients<T> Network<T>::backward(const Parameters<T>& params, const ForwardCache<T>& cache,
                                  std::span<const std::uint8_t> labels) const {
  check_params(params);
  check_logits(cache.logits);
  if (cache.layers.size() != layers_.size()) throw ContractError("forward cache does not match network");
  const std::size_t batch = cache.logits.dim(0);
  check_labels(labels, batch, num_classes_);

  // d(mean cross-entropy)/d logits = (softmax - onehot) / batch
  Tensor<T> grad = softmax(cache.logits);
  const T inv_batch = T(1) / static_cast<T>(batch);
  for (std::size_t b = 0; b < batch; ++b) grad[b * num_classes_ + labels[b]] -= T(1);
  for (auto& g : grad.data()) g *= inv_batch;

  Gradients<T> grads = zero_parameters();
  for (std::size_t i = layers_.size(); i-- > 0;)
    grad = layers_[i]->backward(params, cache.layers[i], grad, grads);
  return grads;
}

template <std::floating_point T>
std::vector<double> Network<T>::activation_alphas(const Parameters<T>& params) const {
  std::vector<double> alphas;
  for (const auto& layer : layers_)
    if (auto a = layer->alpha(params)) alphas.push_back(*a);
  return alphas;
}

template <std::floating_point T>
std::optional<std::size_t> Network<T>::locate_non_finite(const Parameters<T>& params,
                                                         const Tensor<T>& batch, Mode mode,
                                                         Rng rng) const {
  check_params(params);
  for (std::size_t p = 0; p < param_info_.size(); ++p)
    if (!all_finite<T>(params.tensors[p].data())) return param_info_[p].layer;
  Tensor<T> x = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    LayerCache<T> scratch;
    x = layers_[i]->forward(params, std::move(x), scratch, mode, rng);
    if (!all_finite<T>(x.data())) return i;
  }
  return std::nullopt;
}

template <std::floating_point T>
Tensor<T> softmax(const Tensor<T>& logits) {
  check_logits(logits);
  const std::size_t rows = logits.dim(0);
  const std::size_t cols = logits.dim(1);
  Tensor<T> out(logits.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* z = logits.ptr() + r * cols;
    T* p = out.ptr() + r * cols;
    const double top = *std::max_element(z, z + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += std::exp(static_cast<double>(z[c]) - top);
    for (std::size_t c = 0; c < cols; ++c)
      p[c] = static_cast<T>(std::exp(static_cast<double>(z[c]) - top) / total);
  }
  return out;
}

template <std::floating_point T>
double softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels) {
  check_logits(logits);
  const std::size_t rows = logits.dim(0);
  const std::size_t cols = logits.dim(1);
  check_labels(labels, rows, cols);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* z = logits.ptr() + r * cols;
    const double top = *std::max_element(z, z + cols);
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) sum += std::exp(static_cast<double>(z[c]) - top);
    total += top + std::log(sum) - static_cast<double>(z[labels[r]]);
  }
  return total / static_cast<double>(rows);
}

template <std::floating_point T>
std::size_t count_correct(const Tensor<T>& logits, std::span<const std::uint8_t> labels) {
  check_logits(logits);
  const std::size_t rows = logits.dim(0);
  const std::size_t cols = logits.dim(1);
  check_labels(labels, rows, cols);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* z = logits.ptr() + r * cols;
    const auto predicted = static_cast<std::size_t>(std::max_element(z, z + cols) - z);
    correct += predicted == labels[r];
  }
  return correct;
}

template <std::floating_point T>
CrossEntropyMetric cross_entropy_metric(const Tensor<T>& logits, std::span<const std::uint8_t> labels) {
  const double raw = softmax_cross_entropy(logits, labels);
  return {raw, raw * kReportedXentScale};
}

template class Network<float>;
template class Network<double>;

#define ISRLU_INSTANTIATE(T)                                                                   \
  template Tensor<T> softmax<T>(const Tensor<T>&);                                             \
  template double softmax_cross_entropy<T>(const Tensor<T>&, std::span<const std::uint8_t>);   \
  template std::size_t count_correct<T>(const Tensor<T>&, std::span<const std::uint8_t>);      \
  template CrossEntropyMetric cross_entropy_metric<T>(const Tensor<T>&, std::span<const std::uint8_t>);

ISRLU_INSTANTIATE(float)
ISRLU_INSTANTIATE(double)

#undef ISRLU_INSTANTIATE

}  // namespace isrlu::nn
