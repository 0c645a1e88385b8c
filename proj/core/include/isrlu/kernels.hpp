#pragma once

#include <concepts>
#include <cstddef>
#include <span>

#include "isrlu/activation.hpp"

namespace isrlu::kernels {

/// Kernels walk their buffers in chunks of this many elements. Every kernel
/// is element-wise, so callers may split buffers across threads on any
/// boundary; chunk boundaries are the natural split.
inline constexpr std::size_t kChunkSize = 4096;

// Batched activation kernels over contiguous buffers. The float
// instantiation is the production path and matches the scalar float
// functions in activation.hpp / fast_rsqrt.hpp element for element. The
// double instantiation exists for gradient checking; its approximation
// tier evaluates in float and widens the result.
//
// Lengths must match (ContractError otherwise). Input and output may be the
// same buffer; partially overlapping buffers are rejected.

template <std::floating_point T>
void apply_forward(const ActivationSpec& spec, std::span<const T> input, std::span<T> output);

/// output_grad[i] = upstream_grad[i] * f'(input[i]).
template <std::floating_point T>
void apply_backward(const ActivationSpec& spec, std::span<const T> input,
                    std::span<const T> upstream_grad, std::span<T> output_grad);

/// Forward pass that also stores f'(input[i]) in `slope`, sharing the single
/// inverse square root evaluation between value (x*r) and slope (r^3).
template <std::floating_point T>
void apply_forward_with_slope(const ActivationSpec& spec, std::span<const T> input,
                              std::span<T> output, std::span<T> slope);

/// sum_i upstream_grad[i] * df/dalpha(input[i]), accumulated in double.
/// Zero for kinds without alpha. Uses the exact alpha-derivative in either tier.
template <std::floating_point T>
double alpha_gradient(const ActivationSpec& spec, std::span<const T> input,
                      std::span<const T> upstream_grad);

}  // namespace isrlu::kernels
