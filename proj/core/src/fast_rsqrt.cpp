#include "isrlu/fast_rsqrt.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "fast_rsqrt_impl.hpp"
#include "isrlu/errors.hpp"

namespace isrlu {

namespace {

void check_rsqrt_arg(float v) {
  if (!(v > 0.0f) || !std::isnormal(v))
    throw DomainError("rsqrt_approx needs a positive, finite, normal argument, got " +
                      std::to_string(v));
}

void check_activation_args(float x, float alpha) {
  if (!std::isfinite(x)) throw DomainError("activation input must be finite");
  if (!std::isfinite(alpha) || !(alpha > 0.0f)) throw DomainError("alpha must be finite and > 0");
}

}  // namespace

ApproxPolicy ApproxPolicy::tuned(int nr_steps) noexcept {
  ApproxPolicy p;
  p.nr_steps = nr_steps;
  return p;
}

ApproxPolicy ApproxPolicy::classic(std::uint32_t magic, int nr_steps) noexcept {
  return ApproxPolicy{magic, 0.5f, 3.0f, nr_steps};
}

void ApproxPolicy::validate() const {
  if (nr_steps < 0 || nr_steps > 2)
    throw ContractError("nr_steps must be 0, 1 or 2, got " + std::to_string(nr_steps));
  if (!std::isfinite(seed_scale) || !(seed_scale > 0.0f) || !std::isfinite(seed_offset) ||
      !(seed_offset > 0.0f))
    throw ContractError("seed correction coefficients must be finite and positive");
}

float rsqrt_seed(float v, std::uint32_t magic) noexcept { return detail::rsqrt_seed_bits(v, magic); }

float rsqrt_approx(float v, const ApproxPolicy& policy) {
  policy.validate();
  check_rsqrt_arg(v);
  return detail::rsqrt_fast(v, policy);
}

namespace {

// Calls fn with the step count as a compile-time constant.
template <class Fn>
float with_steps(const ApproxPolicy& policy, Fn&& fn) {
  switch (policy.nr_steps) {
    case 0: return fn(std::integral_constant<int, 0>{});
    case 1: return fn(std::integral_constant<int, 1>{});
    default: return fn(std::integral_constant<int, 2>{});
  }
}

}  // namespace

float isrlu_approx(float x, float alpha, const ApproxPolicy& policy) {
  policy.validate();
  check_activation_args(x, alpha);
  return with_steps(policy, [&](auto k) { return detail::isrlu_fast<k()>(x, alpha, policy); });
}

float isrlu_approx_prime(float x, float alpha, const ApproxPolicy& policy) {
  policy.validate();
  check_activation_args(x, alpha);
  return with_steps(policy, [&](auto k) { return detail::isrlu_slope_fast<k()>(x, alpha, policy); });
}

float isru_approx(float x, float alpha, const ApproxPolicy& policy) {
  policy.validate();
  check_activation_args(x, alpha);
  return with_steps(policy, [&](auto k) { return detail::isru_fast<k()>(x, alpha, policy); });
}

float isru_approx_prime(float x, float alpha, const ApproxPolicy& policy) {
  policy.validate();
  check_activation_args(x, alpha);
  return with_steps(policy, [&](auto k) { return detail::isru_slope_fast<k()>(x, alpha, policy); });
}

float isru_sigmoid_approx(float x, const ApproxPolicy& policy) {
  policy.validate();
  check_activation_args(x, 1.0f);
  return with_steps(policy, [&](auto k) { return detail::isru_sigmoid_fast<k()>(x, policy); });
}

float isru_sigmoid_approx_prime(float x, const ApproxPolicy& policy) {
  policy.validate();
  check_activation_args(x, 1.0f);
  return with_steps(policy, [&](auto k) { return detail::isru_sigmoid_slope_fast<k()>(x, policy); });
}

ErrorReport measure_error(const ApproxPolicy& policy, double lo, double hi, std::size_t samples) {
  policy.validate();
  constexpr double kMinNormal = std::numeric_limits<float>::min();
  constexpr double kMax = std::numeric_limits<float>::max();
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || lo < kMinNormal || hi > kMax)
    throw DomainError("measure_error needs 0 < lo < hi within the normal float range");
  if (samples < 1000) throw DomainError("measure_error needs at least 1000 samples");

  ErrorReport report;
  report.samples = samples;
  report.lo = lo;
  report.hi = hi;

  const double log_lo = std::log(lo);
  const double log_span = std::log(hi) - log_lo;
  const double denom = static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto v = static_cast<float>(std::exp(log_lo + log_span * (static_cast<double>(i) / denom)));
    if (!std::isnormal(v)) continue;
    const double exact = 1.0 / std::sqrt(static_cast<double>(v));
    const double approx = detail::rsqrt_fast(v, policy);
    const double rel = std::abs(approx - exact) / exact;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_input = v;
    }
  }
  report.accurate_bits = report.max_rel_error > 0.0 ? -std::log2(report.max_rel_error)
                                                    : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace isrlu
