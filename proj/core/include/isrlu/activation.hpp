#pragma once

#include <array>
#include <concepts>
#include <optional>
#include <string>
#include <string_view>

namespace isrlu {

enum class ActivationKind { Isrlu, Isru, Elu, Relu, Tanh, IsruSigmoid };

inline constexpr std::array<ActivationKind, 6> kAllActivationKinds = {
    ActivationKind::Isrlu, ActivationKind::Isru, ActivationKind::Elu,
    ActivationKind::Relu,  ActivationKind::Tanh, ActivationKind::IsruSigmoid};

/// Evaluation tier. `Approx` replaces 1/sqrt(1 + alpha*x^2) with the fast
/// bit-level estimate plus `refinement_steps` Newton steps (0..2). Kinds that
/// contain no inverse square root (ELU, ReLU, tanh) evaluate exactly in
/// either tier.
struct Tier {
  enum class Mode { Exact, Approx };

  Mode mode = Mode::Exact;
  int refinement_steps = 0;

  static constexpr Tier exact() noexcept { return {}; }
  static constexpr Tier approx(int steps) noexcept { return {Mode::Approx, steps}; }

  constexpr bool is_approx() const noexcept { return mode == Mode::Approx; }

  friend constexpr bool operator==(const Tier&, const Tier&) = default;
};

struct ActivationSpec {
  ActivationKind kind = ActivationKind::Isrlu;
  double alpha = 1.0;
  Tier tier = Tier::exact();

  /// Throws DomainError for alpha <= 0 (or non-finite) and ContractError for
  /// an approximation tier outside 0..2 refinement steps.
  void validate() const;

  friend bool operator==(const ActivationSpec&, const ActivationSpec&) = default;
};

/// True for the kinds whose value depends on alpha (ISRLU, ISRU, ELU).
bool uses_alpha(ActivationKind kind) noexcept;

/// True for the kinds built on an inverse square root (ISRLU, ISRU, ISRU-sigmoid).
bool has_rsqrt(ActivationKind kind) noexcept;

/// Lower-case identifier: "isrlu", "isru", "elu", "relu", "tanh", "isru-sigmoid".
std::string_view to_string(ActivationKind kind) noexcept;
std::optional<ActivationKind> parse_activation_kind(std::string_view name) noexcept;

/// Short human-readable label, e.g. "ISRLU (a=3, approx/1)".
std::string describe(const ActivationSpec& spec);

// Scalar definitions. All functions reject non-finite x and alpha <= 0 with
// DomainError. The double instantiation is the reference; the float
// instantiation is bit-identical to what the batched kernels compute.

/// x for x >= 0, x / sqrt(1 + alpha*x^2) for x < 0.
template <std::floating_point T> T isrlu(T x, T alpha);
/// 1 for x >= 0, (1 + alpha*x^2)^(-3/2) for x < 0.
template <std::floating_point T> T isrlu_prime(T x, T alpha);
/// d isrlu / d alpha: -x^3 / (2 (1 + alpha*x^2)^(3/2)) for x < 0, else 0.
template <std::floating_point T> T isrlu_dalpha(T x, T alpha);

/// x / sqrt(1 + alpha*x^2) on the whole line.
template <std::floating_point T> T isru(T x, T alpha);
template <std::floating_point T> T isru_prime(T x, T alpha);
template <std::floating_point T> T isru_dalpha(T x, T alpha);

/// x for x >= 0, alpha * (exp(x) - 1) for x < 0.
template <std::floating_point T> T elu(T x, T alpha);
template <std::floating_point T> T elu_prime(T x, T alpha);
template <std::floating_point T> T elu_dalpha(T x, T alpha);

template <std::floating_point T> T relu(T x);
/// Subgradient convention: relu_prime(0) == 0.
template <std::floating_point T> T relu_prime(T x);

template <std::floating_point T> T tanh_act(T x);
template <std::floating_point T> T tanh_act_prime(T x);

/// 0.5 + 0.5 * isru(x/2, 1): value 1/2 and slope 1/4 at the origin, like the
/// logistic sigmoid.
template <std::floating_point T> T isru_sigmoid(T x);
template <std::floating_point T> T isru_sigmoid_prime(T x);

/// Kind-dispatched forward value. `alpha` is validated even for kinds that
/// ignore it.
template <std::floating_point T> T forward(ActivationKind kind, T x, T alpha);
/// Kind-dispatched first derivative in x.
template <std::floating_point T> T derivative(ActivationKind kind, T x, T alpha);
/// Kind-dispatched partial derivative in alpha (0 for kinds without alpha).
template <std::floating_point T> T alpha_derivative(ActivationKind kind, T x, T alpha);

/// Asymptotic value the activation saturates to: ISRLU -1/sqrt(alpha),
/// ISRU +1/sqrt(alpha) (magnitude; the function is odd), ELU -alpha,
/// ReLU 0, tanh 1 (magnitude). ISRU-sigmoid has two distinct asymptotes
/// (0 and 1) and reports none.
std::optional<double> saturation_limit(ActivationKind kind, double alpha);

}  // namespace isrlu
