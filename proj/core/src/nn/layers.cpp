#include "layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "isrlu/errors.hpp"
#include "isrlu/kernels.hpp"

namespace isrlu::nn::detail {

namespace {

template <class T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <class T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;
template <class T>
using RowVectorMap = Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>;
template <class T>
using ConstRowVectorMap = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;

constexpr double kInitStddev = 0.1;
constexpr double kInitBias = 0.1;

template <class T>
void fill_truncated_normal(Tensor<T>& t, Rng& rng) {
  std::normal_distribution<double> normal(0.0, kInitStddev);
  for (auto& w : t.data()) {
    double z;
    do {
      z = normal(rng);
    } while (std::abs(z) > 2.0 * kInitStddev);
    w = static_cast<T>(z);
  }
}

std::size_t batch_of(const Shape& shape) {
  if (shape.empty()) throw ContractError("layer input has no batch dimension");
  return shape[0];
}

template <class T>
Tensor<T> as_images(Tensor<T> t, const Extent& e) {
  const std::size_t b = batch_of(t.shape());
  t.reshape({b, e.h, e.w, e.c});
  return t;
}

// ---------------------------------------------------------------------------

template <class T>
class ConvLayer final : public Layer<T> {
 public:
  ConvLayer(const ConvConfig& config, Extent input) : cfg_(config), in_(input) {
    out_.h = conv_output_extent(in_.h, cfg_.kernel_h, cfg_.stride, cfg_.padding);
    out_.w = conv_output_extent(in_.w, cfg_.kernel_w, cfg_.stride, cfg_.padding);
    out_.c = static_cast<std::size_t>(cfg_.out_channels);
    if (out_.h == 0 || out_.w == 0) throw ContractError("convolution kernel larger than its input");
    if (cfg_.padding == Padding::Same) {
      pad_top_ = same_pad_before(in_.h, out_.h, cfg_.kernel_h, cfg_.stride);
      pad_left_ = same_pad_before(in_.w, out_.w, cfg_.kernel_w, cfg_.stride);
    }
  }

  Extent output_extent() const override { return out_; }
  std::string kind_name() const override { return "conv"; }

  void declare_params(std::vector<ParamInfo>& info, std::size_t layer) override {
    const auto kh = static_cast<std::size_t>(cfg_.kernel_h);
    const auto kw = static_cast<std::size_t>(cfg_.kernel_w);
    w_idx_ = info.size();
    info.push_back({"", ParamRole::Weight, layer, {kh, kw, in_.c, out_.c}});
    b_idx_ = info.size();
    info.push_back({"", ParamRole::Bias, layer, {out_.c}});
  }

  void init_params(Parameters<T>& params, Rng& rng) const override {
    fill_truncated_normal(params.tensors[w_idx_], rng);
    params.tensors[b_idx_].fill(static_cast<T>(kInitBias));
  }

  Tensor<T> forward(const Parameters<T>& params, Tensor<T> input, LayerCache<T>& cache, Mode,
                    Rng&) const override {
    input = as_images(std::move(input), in_);
    const std::size_t batch = input.dim(0);
    const std::size_t rows = batch * out_.h * out_.w;
    const std::size_t k = patch_size();

    cache.aux.assign(rows * k, T(0));
    im2col(input, cache.aux.data());

    Tensor<T> out({batch, out_.h, out_.w, out_.c});
    ConstMatrixMap<T> cols(cache.aux.data(), rows, k);
    ConstMatrixMap<T> weights(params.tensors[w_idx_].ptr(), k, out_.c);
    ConstRowVectorMap<T> bias(params.tensors[b_idx_].ptr(), out_.c);
    MatrixMap<T> result(out.ptr(), rows, out_.c);
    result.noalias() = cols * weights;
    result.rowwise() += bias;
    return out;
  }

  Tensor<T> backward(const Parameters<T>& params, const LayerCache<T>& cache, const Tensor<T>& grad_out,
                     Gradients<T>& grads) const override {
    const std::size_t batch = batch_of(grad_out.shape());
    const std::size_t rows = batch * out_.h * out_.w;
    const std::size_t k = patch_size();

    ConstMatrixMap<T> g(grad_out.ptr(), rows, out_.c);
    ConstMatrixMap<T> cols(cache.aux.data(), rows, k);
    MatrixMap<T> dw(grads.tensors[w_idx_].ptr(), k, out_.c);
    RowVectorMap<T> db(grads.tensors[b_idx_].ptr(), out_.c);
    dw.noalias() = cols.transpose() * g;
    db = g.colwise().sum();

    if (!this->input_grad_needed()) return {};
    ConstMatrixMap<T> weights(params.tensors[w_idx_].ptr(), k, out_.c);
    std::vector<T> dcols(rows * k);
    MatrixMap<T> dcols_map(dcols.data(), rows, k);
    dcols_map.noalias() = g * weights.transpose();

    Tensor<T> grad_in({batch, in_.h, in_.w, in_.c});
    col2im(dcols.data(), grad_in);
    return grad_in;
  }


 private:
  std::size_t patch_size() const {
    return static_cast<std::size_t>(cfg_.kernel_h * cfg_.kernel_w) * in_.c;
  }

  // Visits every (output row, kernel tap) pair that lands inside the input:
  // fn(row offset in the patch matrix, input element offset).
  template <class Fn>
  void for_each_tap(std::size_t batch, Fn&& fn) const {
    const std::size_t k = patch_size();
    const auto stride = static_cast<std::ptrdiff_t>(cfg_.stride);
    const auto h = static_cast<std::ptrdiff_t>(in_.h);
    const auto w = static_cast<std::ptrdiff_t>(in_.w);
    std::size_t row = 0;
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t image = b * in_.h * in_.w * in_.c;
      for (std::size_t oy = 0; oy < out_.h; ++oy) {
        for (std::size_t ox = 0; ox < out_.w; ++ox, ++row) {
          const std::size_t row_base = row * k;
          for (int ky = 0; ky < cfg_.kernel_h; ++ky) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy) * stride + ky -
                                      static_cast<std::ptrdiff_t>(pad_top_);
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < cfg_.kernel_w; ++kx) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox) * stride + kx -
                                        static_cast<std::ptrdiff_t>(pad_left_);
              if (ix < 0 || ix >= w) continue;
              const std::size_t tap = static_cast<std::size_t>(ky * cfg_.kernel_w + kx) * in_.c;
              fn(row_base + tap, image + (static_cast<std::size_t>(iy) * in_.w +
                                          static_cast<std::size_t>(ix)) * in_.c);
            }
          }
        }
      }
    }
  }

  void im2col(const Tensor<T>& input, T* cols) const {
    const T* src = input.ptr();
    const std::size_t c = in_.c;
    for_each_tap(input.dim(0), [&](std::size_t dst, std::size_t from) {
      std::copy_n(src + from, c, cols + dst);
    });
  }

  void col2im(const T* cols, Tensor<T>& grad_in) const {
    T* dst = grad_in.ptr();
    const std::size_t c = in_.c;
    for_each_tap(grad_in.dim(0), [&](std::size_t from, std::size_t to) {
      for (std::size_t i = 0; i < c; ++i) dst[to + i] += cols[from + i];
    });
  }

  ConvConfig cfg_;
  Extent in_, out_;
  std::size_t pad_top_ = 0, pad_left_ = 0;
  std::size_t w_idx_ = 0, b_idx_ = 0;
};

// ---------------------------------------------------------------------------

template <class T>
class MaxPoolLayer final : public Layer<T> {
 public:
  MaxPoolLayer(const MaxPoolConfig& config, Extent input) : cfg_(config), in_(input) {
    if (in_.h < static_cast<std::size_t>(cfg_.size) || in_.w < static_cast<std::size_t>(cfg_.size))
      throw ContractError("max-pool window larger than its input");
    out_.h = conv_output_extent(in_.h, cfg_.size, cfg_.stride, Padding::Valid);
    out_.w = conv_output_extent(in_.w, cfg_.size, cfg_.stride, Padding::Valid);
    out_.c = in_.c;
  }

  Extent output_extent() const override { return out_; }
  std::string kind_name() const override { return "pool"; }

  Tensor<T> forward(const Parameters<T>&, Tensor<T> input, LayerCache<T>& cache, Mode,
                    Rng&) const override {
    input = as_images(std::move(input), in_);
    const std::size_t batch = input.dim(0);
    if (input.size() > std::numeric_limits<std::uint32_t>::max())
      throw ContractError("max-pool input too large for 32-bit argmax indices");
    Tensor<T> out({batch, out_.h, out_.w, out_.c});
    cache.index.resize(out.size());
    const T* src = input.ptr();
    std::size_t o = 0;
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t oy = 0; oy < out_.h; ++oy) {
        for (std::size_t ox = 0; ox < out_.w; ++ox) {
          for (std::size_t ch = 0; ch < out_.c; ++ch, ++o) {
            std::size_t best = 0;
            T best_value = -std::numeric_limits<T>::infinity();
            bool first = true;
            for (int ky = 0; ky < cfg_.size; ++ky) {
              for (int kx = 0; kx < cfg_.size; ++kx) {
                const std::size_t iy = oy * static_cast<std::size_t>(cfg_.stride) + ky;
                const std::size_t ix = ox * static_cast<std::size_t>(cfg_.stride) + kx;
                const std::size_t idx = ((b * in_.h + iy) * in_.w + ix) * in_.c + ch;
                // Strict comparison: ties keep the first index in scan order.
                if (first || src[idx] > best_value) {
                  best = idx;
                  best_value = src[idx];
                  first = false;
                }
              }
            }
            out[o] = best_value;
            cache.index[o] = static_cast<std::uint32_t>(best);
          }
        }
      }
    }
    return out;
  }

  Tensor<T> backward(const Parameters<T>&, const LayerCache<T>& cache, const Tensor<T>& grad_out,
                     Gradients<T>&) const override {
    const std::size_t batch = batch_of(grad_out.shape());
    Tensor<T> grad_in({batch, in_.h, in_.w, in_.c});
    for (std::size_t o = 0; o < grad_out.size(); ++o) grad_in[cache.index[o]] += grad_out[o];
    return grad_in;
  }

 private:
  MaxPoolConfig cfg_;
  Extent in_, out_;
};

// ---------------------------------------------------------------------------

template <class T>
class DenseLayer final : public Layer<T> {
 public:
  DenseLayer(const DenseConfig& config, Extent input)
      : inputs_(input.count()), units_(static_cast<std::size_t>(config.units)) {}

  Extent output_extent() const override { return {1, 1, units_}; }
  std::string kind_name() const override { return "dense"; }

  void declare_params(std::vector<ParamInfo>& info, std::size_t layer) override {
    w_idx_ = info.size();
    info.push_back({"", ParamRole::Weight, layer, {inputs_, units_}});
    b_idx_ = info.size();
    info.push_back({"", ParamRole::Bias, layer, {units_}});
  }

  void init_params(Parameters<T>& params, Rng& rng) const override {
    fill_truncated_normal(params.tensors[w_idx_], rng);
    params.tensors[b_idx_].fill(static_cast<T>(kInitBias));
  }

  Tensor<T> forward(const Parameters<T>& params, Tensor<T> input, LayerCache<T>& cache, Mode,
                    Rng&) const override {
    const std::size_t batch = batch_of(input.shape());
    input.reshape({batch, inputs_});
    Tensor<T> out({batch, units_});
    ConstMatrixMap<T> x(input.ptr(), batch, inputs_);
    ConstMatrixMap<T> weights(params.tensors[w_idx_].ptr(), inputs_, units_);
    ConstRowVectorMap<T> bias(params.tensors[b_idx_].ptr(), units_);
    MatrixMap<T> y(out.ptr(), batch, units_);
    y.noalias() = x * weights;
    y.rowwise() += bias;
    cache.input = std::move(input);
    return out;
  }

  Tensor<T> backward(const Parameters<T>& params, const LayerCache<T>& cache, const Tensor<T>& grad_out,
                     Gradients<T>& grads) const override {
    const std::size_t batch = cache.input.dim(0);
    ConstMatrixMap<T> g(grad_out.ptr(), batch, units_);
    ConstMatrixMap<T> x(cache.input.ptr(), batch, inputs_);
    MatrixMap<T> dw(grads.tensors[w_idx_].ptr(), inputs_, units_);
    RowVectorMap<T> db(grads.tensors[b_idx_].ptr(), units_);
    dw.noalias() = x.transpose() * g;
    db = g.colwise().sum();

    Tensor<T> grad_in({batch, inputs_});
    ConstMatrixMap<T> weights(params.tensors[w_idx_].ptr(), inputs_, units_);
    MatrixMap<T> dx(grad_in.ptr(), batch, inputs_);
    dx.noalias() = g * weights.transpose();
    return grad_in;
  }

 private:
  std::size_t inputs_, units_;
  std::size_t w_idx_ = 0, b_idx_ = 0;
};

// ---------------------------------------------------------------------------

template <class T>
class DropoutLayer final : public Layer<T> {
 public:
  DropoutLayer(const DropoutConfig& config, Extent input) : pkeep_(config.pkeep), extent_(input) {}

  Extent output_extent() const override { return extent_; }
  std::string kind_name() const override { return "dropout"; }

  Tensor<T> forward(const Parameters<T>&, Tensor<T> input, LayerCache<T>& cache, Mode mode,
                    Rng& rng) const override {
    cache.aux.clear();
    if (mode == Mode::Eval || pkeep_ >= 1.0) return input;
    std::bernoulli_distribution keep(pkeep_);
    const T scale = static_cast<T>(1.0 / pkeep_);
    cache.aux.resize(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
      cache.aux[i] = keep(rng) ? scale : T(0);
      input[i] *= cache.aux[i];
    }
    return input;
  }

  Tensor<T> backward(const Parameters<T>&, const LayerCache<T>& cache, const Tensor<T>& grad_out,
                     Gradients<T>&) const override {
    Tensor<T> grad_in = grad_out;
    if (!cache.aux.empty())
      for (std::size_t i = 0; i < grad_in.size(); ++i) grad_in[i] *= cache.aux[i];
    return grad_in;
  }

 private:
  double pkeep_;
  Extent extent_;
};

// ---------------------------------------------------------------------------

template <class T>
class ActivationLayer final : public Layer<T> {
 public:
  ActivationLayer(const ActivationConfig& config, Extent input) : cfg_(config), extent_(input) {}

  Extent output_extent() const override { return extent_; }
  std::string kind_name() const override { return "act"; }

  void declare_params(std::vector<ParamInfo>& info, std::size_t layer) override {
    if (!cfg_.learnable_alpha) return;
    alpha_idx_ = info.size();
    info.push_back({"", ParamRole::Alpha, layer, {1}});
  }

  void init_params(Parameters<T>& params, Rng&) const override {
    if (cfg_.learnable_alpha) params.tensors[alpha_idx_][0] = static_cast<T>(cfg_.spec.alpha);
  }

  std::optional<double> alpha(const Parameters<T>& params) const override {
    return cfg_.learnable_alpha ? static_cast<double>(params.tensors[alpha_idx_][0]) : cfg_.spec.alpha;
  }

  Tensor<T> forward(const Parameters<T>& params, Tensor<T> input, LayerCache<T>& cache, Mode,
                    Rng&) const override {
    const ActivationSpec spec = current_spec(params);
    if (cfg_.learnable_alpha) cache.input = input;
    cache.aux.resize(input.size());
    kernels::apply_forward_with_slope<T>(spec, input.data(), input.data(), cache.aux);
    return input;
  }

  Tensor<T> backward(const Parameters<T>& params, const LayerCache<T>& cache, const Tensor<T>& grad_out,
                     Gradients<T>& grads) const override {
    Tensor<T> grad_in = grad_out;
    for (std::size_t i = 0; i < grad_in.size(); ++i) grad_in[i] *= cache.aux[i];
    if (cfg_.learnable_alpha) {
      const double g = kernels::alpha_gradient<T>(current_spec(params), cache.input.data(), grad_out.data());
      grads.tensors[alpha_idx_][0] = static_cast<T>(g);
    }
    return grad_in;
  }

 private:
  ActivationSpec current_spec(const Parameters<T>& params) const {
    ActivationSpec spec = cfg_.spec;
    if (cfg_.learnable_alpha) spec.alpha = static_cast<double>(params.tensors[alpha_idx_][0]);
    return spec;
  }

  ActivationConfig cfg_;
  Extent extent_;
  std::size_t alpha_idx_ = 0;
};

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

std::size_t conv_output_extent(std::size_t in, int kernel, int stride, Padding padding) {
  const auto s = static_cast<std::size_t>(stride);
  if (padding == Padding::Same) return (in + s - 1) / s;
  const auto k = static_cast<std::size_t>(kernel);
  return in < k ? 0 : (in - k) / s + 1;
}

std::size_t same_pad_before(std::size_t in, std::size_t out, int kernel, int stride) {
  const auto needed = static_cast<std::ptrdiff_t>((out - 1) * static_cast<std::size_t>(stride)) + kernel -
                      static_cast<std::ptrdiff_t>(in);
  return needed > 0 ? static_cast<std::size_t>(needed / 2) : 0;
}

template <class T>
std::unique_ptr<Layer<T>> make_layer(const LayerConfig& config, Extent input) {
  return std::visit(
      Overloaded{
          [&](const ConvConfig& c) -> std::unique_ptr<Layer<T>> {
            return std::make_unique<ConvLayer<T>>(c, input);
          },
          [&](const MaxPoolConfig& c) -> std::unique_ptr<Layer<T>> {
            return std::make_unique<MaxPoolLayer<T>>(c, input);
          },
          [&](const DenseConfig& c) -> std::unique_ptr<Layer<T>> {
            return std::make_unique<DenseLayer<T>>(c, input);
          },
          [&](const DropoutConfig& c) -> std::unique_ptr<Layer<T>> {
            return std::make_unique<DropoutLayer<T>>(c, input);
          },
          [&](const ActivationConfig& c) -> std::unique_ptr<Layer<T>> {
            return std::make_unique<ActivationLayer<T>>(c, input);
          },
          [&](const SoftmaxConfig&) -> std::unique_ptr<Layer<T>> {
            throw ContractError("Softmax is handled by the loss, not as a layer");
          },
      },
      config);
}

template std::unique_ptr<Layer<float>> make_layer<float>(const LayerConfig&, Extent);
template std::unique_ptr<Layer<double>> make_layer<double>(const LayerConfig&, Extent);

}  // namespace isrlu::nn::detail
