#include "isrlu/nn/config.hpp"

#include <cmath>
#include <sstream>

#include "isrlu/errors.hpp"

namespace isrlu::nn {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void check_positive(int value, const char* what) {
  if (value < 1) throw ContractError(std::string(what) + " must be >= 1, got " + std::to_string(value));
}

}  // namespace

void NetworkConfig::validate() const {
  if (input_height < 1 || input_width < 1 || input_channels < 1)
    throw ContractError("network input extents must be >= 1");
  if (layers.empty() || !std::holds_alternative<SoftmaxConfig>(layers.back()))
    throw ContractError("network must end with a Softmax layer");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    std::visit(Overloaded{
                   [](const ConvConfig& c) {
                     check_positive(c.kernel_h, "conv kernel_h");
                     check_positive(c.kernel_w, "conv kernel_w");
                     check_positive(c.out_channels, "conv out_channels");
                     check_positive(c.stride, "conv stride");
                   },
                   [](const MaxPoolConfig& c) {
                     check_positive(c.size, "max-pool size");
                     check_positive(c.stride, "max-pool stride");
                   },
                   [](const DenseConfig& c) { check_positive(c.units, "dense units"); },
                   [](const DropoutConfig& c) {
                     if (!(c.pkeep > 0.0 && c.pkeep <= 1.0))
                       throw ContractError("dropout pkeep must lie in (0, 1], got " +
                                           std::to_string(c.pkeep));
                   },
                   [](const ActivationConfig& c) {
                     c.spec.validate();
                     if (c.learnable_alpha && !uses_alpha(c.spec.kind))
                       throw ContractError("learnable alpha requires isrlu, isru or elu");
                   },
                   [&](const SoftmaxConfig&) {
                     if (i + 1 != layers.size()) throw ContractError("Softmax must be the last layer");
                   },
               },
               layers[i]);
  }
}

std::string describe(const LayerConfig& layer) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ConvConfig& c) {
                   os << "Conv " << c.kernel_h << "x" << c.kernel_w << "x" << c.out_channels << " /"
                      << c.stride << (c.padding == Padding::Same ? " same" : " valid");
                 },
                 [&](const MaxPoolConfig& c) { os << "MaxPool " << c.size << " /" << c.stride; },
                 [&](const DenseConfig& c) { os << "Dense " << c.units; },
                 [&](const DropoutConfig& c) { os << "Dropout pkeep=" << c.pkeep; },
                 [&](const ActivationConfig& c) {
                   os << isrlu::describe(c.spec) << (c.learnable_alpha ? " learnable" : "");
                 },
                 [&](const SoftmaxConfig&) { os << "Softmax"; },
             },
             layer);
  return os.str();
}

std::string describe(const NetworkConfig& config) {
  std::ostringstream os;
  os << config.input_height << "x" << config.input_width << "x" << config.input_channels;
  for (const auto& layer : config.layers) os << " -> " << describe(layer);
  return os.str();
}

NetworkConfig build_architecture1(const ActivationSpec& activation, double pkeep, bool learnable_alpha) {
  const ActivationConfig act{activation, learnable_alpha};
  NetworkConfig config;
  config.layers = {
      ConvConfig{6, 6, 6, 1, Padding::Same},  act,
      ConvConfig{5, 5, 12, 2, Padding::Same}, act,
      ConvConfig{4, 4, 24, 2, Padding::Same}, act,
      DenseConfig{200},                       act,
      DropoutConfig{pkeep},                   DenseConfig{10},
      SoftmaxConfig{},
  };
  config.validate();
  return config;
}

NetworkConfig build_architecture2(const ActivationSpec& activation, double pkeep_conv, double pkeep_fc,
                                  bool learnable_alpha) {
  const ActivationConfig act{activation, learnable_alpha};
  const ConvConfig conv{3, 3, 64, 1, Padding::Same};
  NetworkConfig config;
  config.layers = {
      conv, act, conv, act, MaxPoolConfig{2, 2}, DropoutConfig{pkeep_conv},
      conv, act, conv, act, MaxPoolConfig{2, 2}, DropoutConfig{pkeep_conv},
      DenseConfig{512}, act, DropoutConfig{pkeep_fc}, DenseConfig{10},
      SoftmaxConfig{},
  };
  config.validate();
  return config;
}

}  // namespace isrlu::nn
