#pragma once

// Unchecked element formulas shared by the scalar API and the batched
// kernels, so both paths round identically. Preconditions (finite x,
// alpha > 0) are the caller's responsibility.

#include <cmath>

namespace isrlu::detail {

// alpha*x^2 overflows for huge |x|; the guards return the analytic limit.

// Both sides of each select are computed unconditionally so that element
// loops if-convert and vectorize.

template <class T>
inline T isru_value(T x, T alpha) {
  const T v = T(1) + alpha * x * x;
  const T limit = std::copysign(T(1) / std::sqrt(alpha), x);
  const T f = x / std::sqrt(v);
  return std::isinf(v) ? limit : f;
}

template <class T>
inline T isru_slope(T x, T alpha) {
  const T v = T(1) + alpha * x * x;
  return T(1) / (v * std::sqrt(v));
}

template <class T>
inline T isru_alpha_slope(T x, T alpha) {
  const T f = isru_value(x, alpha);
  return T(-0.5) * f * f * f;
}

template <class T>
inline T isrlu_value(T x, T alpha) {
  const T neg = isru_value(x, alpha);
  return x >= T(0) ? x : neg;
}

template <class T>
inline T isrlu_slope(T x, T alpha) {
  const T neg = isru_slope(x, alpha);
  return x >= T(0) ? T(1) : neg;
}

template <class T>
inline T isrlu_alpha_slope(T x, T alpha) {
  const T neg = isru_alpha_slope(x, alpha);
  return x >= T(0) ? T(0) : neg;
}

template <class T>
inline T elu_value(T x, T alpha) {
  return x >= T(0) ? x : alpha * std::expm1(x);
}

template <class T>
inline T elu_slope(T x, T alpha) {
  return x >= T(0) ? T(1) : alpha * std::exp(x);
}

template <class T>
inline T elu_alpha_slope(T x, T /*alpha*/) {
  return x >= T(0) ? T(0) : std::expm1(x);
}

template <class T>
inline T relu_value(T x) {
  return x > T(0) ? x : T(0);
}

template <class T>
inline T relu_slope(T x) {
  return x > T(0) ? T(1) : T(0);
}

template <class T>
inline T tanh_value(T x) {
  return std::tanh(x);
}

template <class T>
inline T tanh_slope(T x) {
  // 1/cosh^2 without overflowing cosh
  const T e = std::exp(T(-2) * std::fabs(x));
  const T d = T(1) + e;
  return T(4) * e / (d * d);
}

// 0.5 + 0.5*u/s with u = x/2, s = sqrt(1 + u^2). Below u = -1/2 the sum
// starts to cancel, so there it is rewritten as 0.5 / (s*(s - u)) (using
// s^2 - u^2 = 1).
template <class T>
inline T isru_sigmoid_value(T x) {
  const T u = T(0.5) * x;
  const T s = std::sqrt(T(1) + u * u);
  const T lower = T(0.5) / (s * (s - u));
  const T upper = T(0.5) + T(0.5) * u / s;
  const T limit = u < T(0) ? T(0) : T(1);
  return std::isinf(s) ? limit : (u < T(-0.5) ? lower : upper);
}

template <class T>
inline T isru_sigmoid_slope(T x) {
  return T(0.25) * isru_slope(T(0.5) * x, T(1));
}

}  // namespace isrlu::detail
