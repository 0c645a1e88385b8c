#include "isrlu/activation.hpp"

#include <cmath>
#include <sstream>

#include "activation_impl.hpp"
#include "isrlu/errors.hpp"

namespace isrlu {

namespace {

template <class T>
void check_x(T x) {
  if (!std::isfinite(x)) throw DomainError("activation input must be finite");
}

template <class T>
void check_alpha(T alpha) {
  if (!std::isfinite(alpha) || !(alpha > T(0)))
    throw DomainError("alpha must be finite and > 0, got " + std::to_string(alpha));
}

template <class T>
void check(T x, T alpha) {
  check_x(x);
  check_alpha(alpha);
}

}  // namespace

void ActivationSpec::validate() const {
  check_alpha(alpha);
  if (tier.is_approx() && (tier.refinement_steps < 0 || tier.refinement_steps > 2))
    throw ContractError("approximation tier needs 0..2 refinement steps, got " +
                        std::to_string(tier.refinement_steps));
}

bool uses_alpha(ActivationKind kind) noexcept {
  return kind == ActivationKind::Isrlu || kind == ActivationKind::Isru ||
         kind == ActivationKind::Elu;
}

bool has_rsqrt(ActivationKind kind) noexcept {
  return kind == ActivationKind::Isrlu || kind == ActivationKind::Isru ||
         kind == ActivationKind::IsruSigmoid;
}

std::string_view to_string(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::Isrlu: return "isrlu";
    case ActivationKind::Isru: return "isru";
    case ActivationKind::Elu: return "elu";
    case ActivationKind::Relu: return "relu";
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::IsruSigmoid: return "isru-sigmoid";
  }
  return "?";
}

std::optional<ActivationKind> parse_activation_kind(std::string_view name) noexcept {
  for (ActivationKind k : kAllActivationKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::string describe(const ActivationSpec& spec) {
  std::ostringstream os;
  os << to_string(spec.kind);
  if (uses_alpha(spec.kind)) os << "(a=" << spec.alpha << ")";
  if (spec.tier.is_approx() && has_rsqrt(spec.kind))
    os << "[approx/" << spec.tier.refinement_steps << "]";
  return os.str();
}

template <std::floating_point T>
T isrlu(T x, T alpha) {
  check(x, alpha);
  return detail::isrlu_value(x, alpha);
}

template <std::floating_point T>
T isrlu_prime(T x, T alpha) {
  check(x, alpha);
  return detail::isrlu_slope(x, alpha);
}

template <std::floating_point T>
T isrlu_dalpha(T x, T alpha) {
  check(x, alpha);
  return detail::isrlu_alpha_slope(x, alpha);
}

template <std::floating_point T>
T isru(T x, T alpha) {
  check(x, alpha);
  return detail::isru_value(x, alpha);
}

template <std::floating_point T>
T isru_prime(T x, T alpha) {
  check(x, alpha);
  return detail::isru_slope(x, alpha);
}

template <std::floating_point T>
T isru_dalpha(T x, T alpha) {
  check(x, alpha);
  return detail::isru_alpha_slope(x, alpha);
}

template <std::floating_point T>
T elu(T x, T alpha) {
  check(x, alpha);
  return detail::elu_value(x, alpha);
}

template <std::floating_point T>
T elu_prime(T x, T alpha) {
  check(x, alpha);
  return detail::elu_slope(x, alpha);
}

template <std::floating_point T>
T elu_dalpha(T x, T alpha) {
  check(x, alpha);
  return detail::elu_alpha_slope(x, alpha);
}

template <std::floating_point T>
T relu(T x) {
  check_x(x);
  return detail::relu_value(x);
}

template <std::floating_point T>
T relu_prime(T x) {
  check_x(x);
  return detail::relu_slope(x);
}

template <std::floating_point T>
T tanh_act(T x) {
  check_x(x);
  return detail::tanh_value(x);
}

template <std::floating_point T>
T tanh_act_prime(T x) {
  check_x(x);
  return detail::tanh_slope(x);
}

template <std::floating_point T>
T isru_sigmoid(T x) {
  check_x(x);
  return detail::isru_sigmoid_value(x);
}

template <std::floating_point T>
T isru_sigmoid_prime(T x) {
  check_x(x);
  return detail::isru_sigmoid_slope(x);
}

template <std::floating_point T>
T forward(ActivationKind kind, T x, T alpha) {
  check(x, alpha);
  switch (kind) {
    case ActivationKind::Isrlu: return detail::isrlu_value(x, alpha);
    case ActivationKind::Isru: return detail::isru_value(x, alpha);
    case ActivationKind::Elu: return detail::elu_value(x, alpha);
    case ActivationKind::Relu: return detail::relu_value(x);
    case ActivationKind::Tanh: return detail::tanh_value(x);
    case ActivationKind::IsruSigmoid: return detail::isru_sigmoid_value(x);
  }
  throw ContractError("unknown activation kind");
}

template <std::floating_point T>
T derivative(ActivationKind kind, T x, T alpha) {
  check(x, alpha);
  switch (kind) {
    case ActivationKind::Isrlu: return detail::isrlu_slope(x, alpha);
    case ActivationKind::Isru: return detail::isru_slope(x, alpha);
    case ActivationKind::Elu: return detail::elu_slope(x, alpha);
    case ActivationKind::Relu: return detail::relu_slope(x);
    case ActivationKind::Tanh: return detail::tanh_slope(x);
    case ActivationKind::IsruSigmoid: return detail::isru_sigmoid_slope(x);
  }
  throw ContractError("unknown activation kind");
}

template <std::floating_point T>
T alpha_derivative(ActivationKind kind, T x, T alpha) {
  check(x, alpha);
  switch (kind) {
    case ActivationKind::Isrlu: return detail::isrlu_alpha_slope(x, alpha);
    case ActivationKind::Isru: return detail::isru_alpha_slope(x, alpha);
    case ActivationKind::Elu: return detail::elu_alpha_slope(x, alpha);
    default: return T(0);
  }
}

std::optional<double> saturation_limit(ActivationKind kind, double alpha) {
  check_alpha(alpha);
  switch (kind) {
    case ActivationKind::Isrlu: return -1.0 / std::sqrt(alpha);
    case ActivationKind::Isru: return 1.0 / std::sqrt(alpha);
    case ActivationKind::Elu: return -alpha;
    case ActivationKind::Relu: return 0.0;
    case ActivationKind::Tanh: return 1.0;
    case ActivationKind::IsruSigmoid: return std::nullopt;
  }
  return std::nullopt;
}

#define ISRLU_INSTANTIATE(T)                                      \
  template T isrlu<T>(T, T);                                      \
  template T isrlu_prime<T>(T, T);                                \
  template T isrlu_dalpha<T>(T, T);                               \
  template T isru<T>(T, T);                                       \
  template T isru_prime<T>(T, T);                                 \
  template T isru_dalpha<T>(T, T);                                \
  template T elu<T>(T, T);                                        \
  template T elu_prime<T>(T, T);                                  \
  template T elu_dalpha<T>(T, T);                                 \
  template T relu<T>(T);                                          \
  template T relu_prime<T>(T);                                    \
  template T tanh_act<T>(T);                                      \
  template T tanh_act_prime<T>(T);                                \
  template T isru_sigmoid<T>(T);                                  \
  template T isru_sigmoid_prime<T>(T);                            \
  template T forward<T>(ActivationKind, T, T);                    \
  template T derivative<T>(ActivationKind, T, T);                 \
  template T alpha_derivative<T>(ActivationKind, T, T);

ISRLU_INSTANTIATE(float)
ISRLU_INSTANTIATE(double)

#undef ISRLU_INSTANTIATE

}  // namespace isrlu
