#pragma once

#include <cstddef>
#include <cstdint>

namespace isrlu {

/// Seed constants for the bit-level inverse square root estimate.
inline constexpr std::uint32_t kTunedMagic = 0x5F1FFFF9;   // paired with tuned correction
inline constexpr std::uint32_t kLomontMagic = 0x5F375A86;  // Lomont's refined constant
inline constexpr std::uint32_t kQuakeMagic = 0x5F3759DF;   // the Quake III constant

/// Configuration of the fast 1/sqrt(v) evaluation.
///
/// The initial estimate is the bit-level seed
///     y0 = bits(magic - (bits(v) >> 1))
/// followed by one multiplicative correction
///     y = seed_scale * y0 * (seed_offset - v * y0^2).
/// With seed_scale = 0.5, seed_offset = 3 this is the classic routine's
/// Newton step; the tuned defaults minimise the worst-case relative error of
/// the estimate for kTunedMagic (about 6.5e-4, 10.6 bits).
///
/// `nr_steps` further Newton-Raphson steps y <- y * (1.5 - 0.5 * v * y^2)
/// follow, evaluated as y + (y/2) * (1 - v*y^2) with a fused residual so that
/// two steps round correctly. Each step roughly doubles the accurate bits.
struct ApproxPolicy {
  std::uint32_t magic = kTunedMagic;
  float seed_scale = 0.703952253f;
  float seed_offset = 2.38924456f;
  int nr_steps = 0;

  static ApproxPolicy tuned(int nr_steps = 0) noexcept;
  /// Classic seed correction (0.5 * y * (3 - v*y^2)) with the given constant.
  static ApproxPolicy classic(std::uint32_t magic = kLomontMagic, int nr_steps = 0) noexcept;

  /// Throws ContractError unless nr_steps is in 0..2 and the correction
  /// coefficients are finite and positive.
  void validate() const;

  friend bool operator==(const ApproxPolicy&, const ApproxPolicy&) = default;
};

/// Raw bit-level estimate only (no correction). Exposed for inspection.
float rsqrt_seed(float v, std::uint32_t magic) noexcept;

/// Fast approximation of v^(-1/2). Requires v > 0, finite and normal;
/// throws DomainError otherwise. Result is positive and finite.
float rsqrt_approx(float v, const ApproxPolicy& policy);

/// ISRLU with the inverse square root replaced by rsqrt_approx. The
/// non-negative branch is returned exactly.
float isrlu_approx(float x, float alpha, const ApproxPolicy& policy);
/// Derivative of the approximate ISRLU: r^3 with r = rsqrt_approx(1 + alpha*x^2).
float isrlu_approx_prime(float x, float alpha, const ApproxPolicy& policy);

float isru_approx(float x, float alpha, const ApproxPolicy& policy);
float isru_approx_prime(float x, float alpha, const ApproxPolicy& policy);

float isru_sigmoid_approx(float x, const ApproxPolicy& policy);
float isru_sigmoid_approx_prime(float x, const ApproxPolicy& policy);

struct ErrorReport {
  double max_rel_error = 0.0;
  double accurate_bits = 0.0;  // -log2(max_rel_error)
  std::size_t samples = 0;
  double lo = 0.0;
  double hi = 0.0;
  float worst_input = 0.0f;  // input attaining max_rel_error
};

/// Scans `samples` log-uniformly spaced points of [lo, hi] (rounded to
/// float) and compares rsqrt_approx against a double-precision reference.
/// Requires 0 < lo < hi (both within the normal float range) and
/// samples >= 1000; throws DomainError otherwise.
ErrorReport measure_error(const ApproxPolicy& policy, double lo, double hi, std::size_t samples);

}  // namespace isrlu
