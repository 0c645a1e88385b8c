#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

#include "isrlu/fast_rsqrt.hpp"

namespace isrlu::detail {

inline float rsqrt_seed_bits(float v, std::uint32_t magic) noexcept {
  return std::bit_cast<float>(magic - (std::bit_cast<std::uint32_t>(v) >> 1));
}

inline float rsqrt_estimate(float v, const ApproxPolicy& p) noexcept {
  const float y = rsqrt_seed_bits(v, p.magic);
  return (p.seed_scale * y) * (p.seed_offset - v * y * y);
}

// y + (y/2)(1 - v*y^2). The product v*y is split into p + lo exactly so the
// residual keeps its significant bits when v*y^2 is close to 1; forming v*y
// first also keeps every intermediate normal (y^2 underflows for v near
// FLT_MAX).
inline float newton_step(float v, float y) noexcept {
  const float p = v * y;
  const float p_lo = std::fma(v, y, -p);
  const float residual = std::fma(-p, y, 1.0f) - p_lo * y;
  return std::fma(0.5f * y, residual, y);
}

template <int Steps>
inline float rsqrt_fast(float v, const ApproxPolicy& p) noexcept {
  float y = rsqrt_estimate(v, p);
  for (int i = 0; i < Steps; ++i) y = newton_step(v, y);
  return y;
}

inline float rsqrt_fast(float v, const ApproxPolicy& p) noexcept {
  switch (p.nr_steps) {
    case 0: return rsqrt_fast<0>(v, p);
    case 1: return rsqrt_fast<1>(v, p);
    default: return rsqrt_fast<2>(v, p);
  }
}

// Activation forms. 1 + alpha*x^2 >= 1, so the rsqrt precondition holds
// for every finite x; an overflowed square gives r = 0 via the guard.

template <int Steps>
inline float inv_norm_fast(float x, float alpha, const ApproxPolicy& p) noexcept {
  const float v = 1.0f + alpha * x * x;
  const float r = rsqrt_fast<Steps>(v, p);
  return std::isinf(v) ? 0.0f : r;
}

template <int Steps>
inline float isru_fast(float x, float alpha, const ApproxPolicy& p) noexcept {
  const float v = 1.0f + alpha * x * x;
  const float limit = std::copysign(1.0f / std::sqrt(alpha), x);
  const float f = x * rsqrt_fast<Steps>(v, p);
  return std::isinf(v) ? limit : f;
}

template <int Steps>
inline float isrlu_fast(float x, float alpha, const ApproxPolicy& p) noexcept {
  const float neg = isru_fast<Steps>(x, alpha, p);
  return x >= 0.0f ? x : neg;
}

template <int Steps>
inline float isru_slope_fast(float x, float alpha, const ApproxPolicy& p) noexcept {
  const float r = inv_norm_fast<Steps>(x, alpha, p);
  return r * r * r;
}

template <int Steps>
inline float isrlu_slope_fast(float x, float alpha, const ApproxPolicy& p) noexcept {
  const float neg = isru_slope_fast<Steps>(x, alpha, p);
  return x >= 0.0f ? 1.0f : neg;
}

// Same cancellation-free split as the exact form: with r = 1/s,
// 0.5/(s*(s-u)) = 0.5*r^2/(1 - u*r).
template <int Steps>
inline float isru_sigmoid_fast(float x, const ApproxPolicy& p) noexcept {
  const float u = 0.5f * x;
  const float v = 1.0f + u * u;
  const float r = rsqrt_fast<Steps>(v, p);
  const float lower = 0.5f * r * r / (1.0f - u * r);
  const float upper = 0.5f + 0.5f * u * r;
  const float limit = u < 0.0f ? 0.0f : 1.0f;
  return std::isinf(v) ? limit : (u < -0.5f ? lower : upper);
}

template <int Steps>
inline float isru_sigmoid_slope_fast(float x, const ApproxPolicy& p) noexcept {
  return 0.25f * isru_slope_fast<Steps>(0.5f * x, 1.0f, p);
}

}  // namespace isrlu::detail
