#include "isrlu/nn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "isrlu/errors.hpp"

namespace isrlu::nn {

namespace {

// Keeps the dropout and shuffle streams apart from weight init.
constexpr std::uint64_t kDropoutStream = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kShuffleStream = 0xD1B54A32D192ED03ull;

void check_dataset(const Dataset& data, const NetworkConfig& config, const char* which) {
  const Shape expected{data.size(), config.input_height, config.input_width, config.input_channels};
  if (data.images.shape() != expected)
    throw ContractError(std::string(which) + " images have shape " + to_string(data.images.shape()) +
                        ", network expects " + to_string(expected));
}

}  // namespace

template <std::floating_point T>
Tensor<T> gather_batch(const Dataset& data, std::span<const std::size_t> indices) {
  if (data.size() == 0) throw ContractError("cannot draw a batch from an empty dataset");
  const std::size_t per = data.images.size() / data.size();
  Shape shape = data.images.shape();
  shape[0] = indices.size();
  Tensor<T> batch(shape);
  T* out = batch.ptr();
  for (std::size_t idx : indices) {
    if (idx >= data.size()) throw ContractError("sample index " + std::to_string(idx) + " out of range");
    const float* src = data.images.ptr() + idx * per;
    out = std::transform(src, src + per, out, [](float v) { return static_cast<T>(v); });
  }
  return batch;
}

template <std::floating_point T>
Trainer<T>::Trainer(NetworkConfig network, OptimizerConfig optimizer, std::uint64_t seed)
    : network_(std::move(network)),
      params_(network_.init_weights(seed)),
      adam_(optimizer, params_),
      dropout_rng_(seed ^ kDropoutStream) {}

template <std::floating_point T>
double Trainer<T>::step(const Tensor<T>& batch, std::span<const std::uint8_t> labels, double lr) {
  const Rng rng_before = dropout_rng_;
  const auto cache = network_.forward(params_, batch, Mode::Train, dropout_rng_);
  const double loss = softmax_cross_entropy(cache.logits, labels);
  if (!std::isfinite(loss)) {
    const auto layer = network_.locate_non_finite(params_, batch, Mode::Train, rng_before);
    throw TrainingError("non-finite loss at step " + std::to_string(adam_.steps_taken() + 1) + " (" +
                        (layer ? "first non-finite output in layer " + network_.layer_name(*layer)
                               : std::string("loss only")) +
                        ")");
  }
  const auto grads = network_.backward(params_, cache, labels);
  adam_.step(params_, grads, lr);
  const auto& info = network_.param_info();
  // smallest T not below kMinAlpha (float(1e-6) rounds down)
  T floor = static_cast<T>(kMinAlpha);
  if (static_cast<double>(floor) < kMinAlpha) floor = std::nextafter(floor, T(1));
  for (std::size_t i = 0; i < info.size(); ++i)
    if (info[i].role == ParamRole::Alpha)
      for (auto& a : params_.tensors[i].data()) a = std::max(a, floor);
  return loss;
}

template <std::floating_point T>
EvalResult Trainer<T>::evaluate(const Dataset& data, std::size_t batch_size) const {
  check_dataset(data, network_.config(), "evaluation");
  if (data.size() == 0) throw ContractError("cannot evaluate on an empty dataset");
  if (batch_size == 0) throw ContractError("evaluation batch size must be >= 1");
  std::size_t correct = 0;
  double xent_sum = 0.0;
  Rng unused;
  std::vector<std::size_t> indices;
  for (std::size_t first = 0; first < data.size(); first += batch_size) {
    const std::size_t count = std::min(batch_size, data.size() - first);
    indices.resize(count);
    std::iota(indices.begin(), indices.end(), first);
    const auto batch = gather_batch<T>(data, indices);
    const std::span<const std::uint8_t> labels(data.labels.data() + first, count);
    const auto cache = network_.forward(params_, batch, Mode::Eval, unused);
    correct += count_correct(cache.logits, labels);
    xent_sum += softmax_cross_entropy(cache.logits, labels) * static_cast<double>(count);
  }
  const double n = static_cast<double>(data.size());
  const double raw = xent_sum / n;
  return {100.0 * static_cast<double>(correct) / n, {raw, raw * kReportedXentScale}};
}

template <std::floating_point T>
std::vector<std::pair<std::size_t, double>> Trainer<T>::learnable_alphas() const {
  std::vector<std::pair<std::size_t, double>> out;
  const auto& info = network_.param_info();
  for (std::size_t i = 0; i < info.size(); ++i)
    if (info[i].role == ParamRole::Alpha)
      out.emplace_back(info[i].layer, static_cast<double>(params_.tensors[i][0]));
  return out;
}

double TrainReport::max_test_accuracy() const {
  double best = initial_test_accuracy;
  for (const auto& e : epochs) best = std::max(best, e.test_accuracy);
  return best;
}

TrainReport train(const TrainOptions& options, const Dataset& train_set, const Dataset& test_set,
                  const EpochCallback& on_epoch) {
  options.network.validate();
  options.optimizer.validate();
  if (options.epochs < 0) throw ContractError("epochs must be >= 0");
  check_dataset(train_set, options.network, "training");
  check_dataset(test_set, options.network, "test");
  const auto batch = static_cast<std::size_t>(options.optimizer.batch_size);
  if (options.epochs > 0 && train_set.size() < batch)
    throw ContractError("training set of " + std::to_string(train_set.size()) +
                        " samples is smaller than one batch of " + std::to_string(batch));

  const auto start = std::chrono::steady_clock::now();
  Trainer<float> trainer(options.network, options.optimizer, options.seed);
  TrainReport report;
  report.seed = options.seed;
  report.initial_test_accuracy = trainer.evaluate(test_set).accuracy;
  for (const auto& [layer, value] : trainer.learnable_alphas()) {
    report.alpha_layers.push_back(layer);
    report.final_alphas.push_back(value);
  }

  const std::size_t steps_per_epoch = train_set.size() / batch;
  const std::uint64_t total_steps = steps_per_epoch * static_cast<std::uint64_t>(options.epochs);
  Rng shuffle_rng(options.seed ^ kShuffleStream);
  std::vector<std::size_t> order(train_set.size());
  std::vector<std::uint8_t> labels(batch);

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      const std::span<const std::size_t> idx(order.data() + s * batch, batch);
      for (std::size_t i = 0; i < batch; ++i) labels[i] = train_set.labels[idx[i]];
      const double lr = learning_rate_at(options.optimizer, trainer.steps_taken(), total_steps);
      loss_sum += trainer.step(gather_batch<float>(train_set, idx), labels, lr);
    }
    const auto eval = trainer.evaluate(test_set);
    EpochStats stats{epoch, loss_sum / static_cast<double>(steps_per_epoch), eval.accuracy, eval.xent.raw_mean,
                     eval.xent.scaled, {}};
    for (const auto& [layer, value] : trainer.learnable_alphas()) stats.alphas.push_back(value);
    report.final_alphas = stats.alphas;
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string report_csv(const TrainReport& report) {
  std::ostringstream os;
  os.precision(9);
  os << "epoch,train_loss,test_accuracy,test_xent";
  for (std::size_t layer : report.alpha_layers) os << ",alpha_layer_" << layer;
  os << "\n";
  for (const auto& e : report.epochs) {
    os << e.epoch << "," << e.train_loss << "," << e.test_accuracy << "," << e.test_xent;
    for (double a : e.alphas) os << "," << a;
    os << "\n";
  }
  return os.str();
}

template Tensor<float> gather_batch<float>(const Dataset&, std::span<const std::size_t>);
template Tensor<double> gather_batch<double>(const Dataset&, std::span<const std::size_t>);
template class Trainer<float>;
template class Trainer<double>;

}  // namespace isrlu::nn
