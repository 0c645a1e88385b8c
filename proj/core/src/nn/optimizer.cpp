#include "isrlu/nn/optimizer.hpp"

#include <cmath>
#include <string>

#include "isrlu/errors.hpp"

namespace isrlu::nn {

void OptimizerConfig::validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ContractError("Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ContractError("Adam epsilon must be > 0");
  if (!(lr_end > 0.0 && lr_end <= lr_start) || !std::isfinite(lr_start))
    throw ContractError("learning rates must satisfy 0 < lr_end <= lr_start, got " + std::to_string(lr_start) +
                        " -> " + std::to_string(lr_end));
  if (batch_size < 1) throw ContractError("batch size must be >= 1, got " + std::to_string(batch_size));
}

double learning_rate_at(const OptimizerConfig& config, std::uint64_t step, std::uint64_t total) {
  if (total == 0) return config.lr_start;
  const double t = static_cast<double>(step) / static_cast<double>(total);
  return config.lr_start * std::pow(config.lr_end / config.lr_start, t);
}

template <std::floating_point T>
Adam<T>::Adam(OptimizerConfig config, const Parameters<T>& like) : config_(config) {
  config_.validate();
  for (const auto& t : like.tensors) {
    m_.emplace_back(t.size(), 0.0);
    v_.emplace_back(t.size(), 0.0);
  }
}

template <std::floating_point T>
void Adam<T>::step(Parameters<T>& params, const Gradients<T>& grads, double lr) {
  if (params.tensors.size() != m_.size() || grads.tensors.size() != m_.size())
    throw ContractError("Adam: parameter layout changed between steps");
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double step_size = lr / correction1;
  for (std::size_t i = 0; i < m_.size(); ++i) {
    auto p = params.tensors[i].data();
    auto g = grads.tensors[i].data();
    if (p.size() != m_[i].size() || g.size() != m_[i].size())
      throw ContractError("Adam: tensor size changed between steps");
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double gj = g[j];
      m[j] = b1 * m[j] + (1.0 - b1) * gj;
      v[j] = b2 * v[j] + (1.0 - b2) * gj * gj;
      const double denom = std::sqrt(v[j] / correction2) + config_.epsilon;
      p[j] = static_cast<T>(p[j] - step_size * m[j] / denom);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace isrlu::nn
