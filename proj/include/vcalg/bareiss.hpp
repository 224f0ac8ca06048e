#pragma once

#include <concepts>
#include <utility>
#include <vector>

#include "vcalg/errors.hpp"
#include "vcalg/rational.hpp"

namespace vcalg {

inline bool is_zero(const Rational& x) { return x == 0; }
inline Rational exact_divide(const Rational& a, const Rational& b) {
  if (b == 0) throw UndefinedInputError("division by zero");
  return a / b;
}

/// Commutative ring elements supporting exact division by a known divisor.
template <class T>
concept ExactRing = requires(const T& a, const T& b) {
  { a * b } -> std::convertible_to<T>;
  { a - b } -> std::convertible_to<T>;
  { -a } -> std::convertible_to<T>;
  { exact_divide(a, b) } -> std::convertible_to<T>;
  { is_zero(a) } -> std::convertible_to<bool>;
};

template <class T>
using Matrix = std::vector<std::vector<T>>;

/// Determinant by Bareiss fraction-free elimination. Every intermediate
/// division is exact in the underlying integral domain.
template <ExactRing T>
T bareiss_determinant(Matrix<T> a) {
  const std::size_t n = a.size();
  if (n == 0) throw UndefinedInputError("determinant of an empty matrix");
  for (const auto& row : a) {
    if (row.size() != n) throw ContractViolation("determinant of a non-square matrix");
  }
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (is_zero(a[k][k])) {
      std::size_t pivot = k + 1;
      while (pivot < n && is_zero(a[pivot][k])) ++pivot;
      if (pivot == n) return T(a[k][k] - a[k][k]);
      std::swap(a[k], a[pivot]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        T v = a[k][k] * a[i][j] - a[i][k] * a[k][j];
        a[i][j] = k == 0 ? std::move(v) : T(exact_divide(v, a[k - 1][k - 1]));
      }
    }
  }
  T det = a[n - 1][n - 1];
  return negate ? T(-det) : det;
}

}  // namespace vcalg
