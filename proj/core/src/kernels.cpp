#include "isrlu/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>

#include "activation_impl.hpp"
#include "fast_rsqrt_impl.hpp"
#include "isrlu/errors.hpp"
#include "isrlu/fast_rsqrt.hpp"

namespace isrlu::kernels {

namespace {

// Element operations: value(x), slope(x) and a fused pair().

template <class T>
struct IsrluExact {
  T a;
  T value(T x) const { return detail::isrlu_value(x, a); }
  T slope(T x) const { return detail::isrlu_slope(x, a); }
};

template <class T>
struct IsruExact {
  T a;
  T value(T x) const { return detail::isru_value(x, a); }
  T slope(T x) const { return detail::isru_slope(x, a); }
};

template <class T>
struct EluOp {
  T a;
  T value(T x) const { return detail::elu_value(x, a); }
  T slope(T x) const { return detail::elu_slope(x, a); }
};

template <class T>
struct ReluOp {
  T value(T x) const { return detail::relu_value(x); }
  T slope(T x) const { return detail::relu_slope(x); }
};

template <class T>
struct TanhOp {
  T value(T x) const { return detail::tanh_value(x); }
  T slope(T x) const { return detail::tanh_slope(x); }
};

template <class T>
struct IsruSigmoidExact {
  T value(T x) const { return detail::isru_sigmoid_value(x); }
  T slope(T x) const { return detail::isru_sigmoid_slope(x); }
};

template <int K>
struct IsruApprox {
  float a;
  ApproxPolicy p;
  float value(float x) const { return detail::isru_fast<K>(x, a, p); }
  float slope(float x) const { return detail::isru_slope_fast<K>(x, a, p); }
  // One rsqrt for both outputs; same operation sequence as value()/slope().
  void pair(float x, float& f, float& s) const {
    const float v = 1.0f + a * x * x;
    const bool overflow = std::isinf(v);
    const float r = overflow ? 0.0f : detail::rsqrt_fast<K>(v, p);
    f = overflow ? std::copysign(1.0f / std::sqrt(a), x) : x * r;
    s = r * r * r;
  }
};

template <int K>
struct IsrluApprox {
  IsruApprox<K> neg;
  float value(float x) const { return x >= 0.0f ? x : neg.value(x); }
  float slope(float x) const { return x >= 0.0f ? 1.0f : neg.slope(x); }
  void pair(float x, float& f, float& s) const {
    float nf, ns;
    neg.pair(x, nf, ns);
    f = x >= 0.0f ? x : nf;
    s = x >= 0.0f ? 1.0f : ns;
  }
};

template <int K>
struct IsruSigmoidApprox {
  ApproxPolicy p;
  float value(float x) const { return detail::isru_sigmoid_fast<K>(x, p); }
  float slope(float x) const { return detail::isru_sigmoid_slope_fast<K>(x, p); }
};

// Runs a float op on double data.
template <class FloatOp>
struct Widened {
  FloatOp op;
  double value(double x) const { return op.value(static_cast<float>(x)); }
  double slope(double x) const { return op.slope(static_cast<float>(x)); }
};

template <class Op, class T>
void pair_of(const Op& op, T x, T& f, T& s) {
  if constexpr (requires { op.pair(x, f, s); }) {
    op.pair(x, f, s);
  } else {
    f = op.value(x);
    s = op.slope(x);
  }
}

template <class T, class FloatOp>
auto adapt(FloatOp op) {
  if constexpr (std::is_same_v<T, float>) {
    return op;
  } else {
    return Widened<FloatOp>{op};
  }
}

template <class T, int K, class Fn>
void visit_approx(const ActivationSpec& spec, Fn&& fn) {
  const auto a = static_cast<float>(spec.alpha);
  const ApproxPolicy p = ApproxPolicy::tuned(K);
  switch (spec.kind) {
    case ActivationKind::Isrlu: fn(adapt<T>(IsrluApprox<K>{{a, p}})); return;
    case ActivationKind::Isru: fn(adapt<T>(IsruApprox<K>{a, p})); return;
    case ActivationKind::IsruSigmoid: fn(adapt<T>(IsruSigmoidApprox<K>{p})); return;
    default: break;
  }
  throw ContractError("no approximate form for this activation");
}

// Resolves an ActivationSpec to a concrete element op and hands it to fn.
template <class T, class Fn>
void visit_op(const ActivationSpec& spec, Fn&& fn) {
  spec.validate();
  if (spec.tier.is_approx() && has_rsqrt(spec.kind)) {
    switch (spec.tier.refinement_steps) {
      case 0: visit_approx<T, 0>(spec, fn); return;
      case 1: visit_approx<T, 1>(spec, fn); return;
      default: visit_approx<T, 2>(spec, fn); return;
    }
  }
  const auto a = static_cast<T>(spec.alpha);
  switch (spec.kind) {
    case ActivationKind::Isrlu: fn(IsrluExact<T>{a}); return;
    case ActivationKind::Isru: fn(IsruExact<T>{a}); return;
    case ActivationKind::Elu: fn(EluOp<T>{a}); return;
    case ActivationKind::Relu: fn(ReluOp<T>{}); return;
    case ActivationKind::Tanh: fn(TanhOp<T>{}); return;
    case ActivationKind::IsruSigmoid: fn(IsruSigmoidExact<T>{}); return;
  }
}

template <class T>
bool partially_overlap(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || b.empty() || a.data() == b.data()) return false;
  const std::less<const T*> lt;
  return lt(a.data(), b.data() + b.size()) && lt(b.data(), a.data() + a.size());
}

template <class T>
void check_pair(std::span<const T> in, std::span<const T> out, const char* what) {
  if (in.size() != out.size())
    throw ContractError(std::string(what) + ": length mismatch (" + std::to_string(in.size()) +
                        " vs " + std::to_string(out.size()) + ")");
  if (partially_overlap(in, out))
    throw ContractError(std::string(what) + ": buffers partially overlap");
}

template <class Body>
void for_each_chunk(std::size_t n, Body&& body) {
  for (std::size_t begin = 0; begin < n; begin += kChunkSize)
    body(begin, std::min(n, begin + kChunkSize));
}

}  // namespace

template <std::floating_point T>
void apply_forward(const ActivationSpec& spec, std::span<const T> input, std::span<T> output) {
  check_pair<T>(input, output, "apply_forward");
  visit_op<T>(spec, [&](const auto op) {
    const T* src = input.data();
    T* dst = output.data();
    for_each_chunk(input.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) dst[i] = op.value(src[i]);
    });
  });
}

template <std::floating_point T>
void apply_backward(const ActivationSpec& spec, std::span<const T> input,
                    std::span<const T> upstream_grad, std::span<T> output_grad) {
  check_pair<T>(input, upstream_grad, "apply_backward");
  check_pair<T>(input, output_grad, "apply_backward");
  check_pair<T>(upstream_grad, output_grad, "apply_backward");
  visit_op<T>(spec, [&](const auto op) {
    const T* src = input.data();
    const T* up = upstream_grad.data();
    T* dst = output_grad.data();
    for_each_chunk(input.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) dst[i] = up[i] * op.slope(src[i]);
    });
  });
}

template <std::floating_point T>
void apply_forward_with_slope(const ActivationSpec& spec, std::span<const T> input,
                              std::span<T> output, std::span<T> slope) {
  check_pair<T>(input, output, "apply_forward_with_slope");
  check_pair<T>(input, slope, "apply_forward_with_slope");
  if (!slope.empty() && slope.data() == output.data())
    throw ContractError("apply_forward_with_slope: output and slope must be distinct");
  visit_op<T>(spec, [&](const auto op) {
    const T* src = input.data();
    T* dst = output.data();
    T* der = slope.data();
    for_each_chunk(input.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        T f, s;
        pair_of(op, src[i], f, s);
        dst[i] = f;
        der[i] = s;
      }
    });
  });
}

template <std::floating_point T>
double alpha_gradient(const ActivationSpec& spec, std::span<const T> input,
                      std::span<const T> upstream_grad) {
  check_pair<T>(input, upstream_grad, "alpha_gradient");
  spec.validate();
  const double a = spec.alpha;
  double total = 0.0;
  auto accumulate = [&](auto dalpha) {
    for (std::size_t i = 0; i < input.size(); ++i)
      total += static_cast<double>(upstream_grad[i]) * dalpha(static_cast<double>(input[i]));
  };
  switch (spec.kind) {
    case ActivationKind::Isrlu:
      accumulate([a](double x) { return detail::isrlu_alpha_slope(x, a); });
      break;
    case ActivationKind::Isru:
      accumulate([a](double x) { return detail::isru_alpha_slope(x, a); });
      break;
    case ActivationKind::Elu:
      accumulate([a](double x) { return detail::elu_alpha_slope(x, a); });
      break;
    default: break;
  }
  return total;
}

template void apply_forward<float>(const ActivationSpec&, std::span<const float>, std::span<float>);
template void apply_forward<double>(const ActivationSpec&, std::span<const double>, std::span<double>);
template void apply_backward<float>(const ActivationSpec&, std::span<const float>,
                                    std::span<const float>, std::span<float>);
template void apply_backward<double>(const ActivationSpec&, std::span<const double>,
                                     std::span<const double>, std::span<double>);
template void apply_forward_with_slope<float>(const ActivationSpec&, std::span<const float>,
                                              std::span<float>, std::span<float>);
template void apply_forward_with_slope<double>(const ActivationSpec&, std::span<const double>,
                                               std::span<double>, std::span<double>);
template double alpha_gradient<float>(const ActivationSpec&, std::span<const float>,
                                      std::span<const float>);
template double alpha_gradient<double>(const ActivationSpec&, std::span<const double>,
                                       std::span<const double>);

}  // namespace isrlu::kernels
