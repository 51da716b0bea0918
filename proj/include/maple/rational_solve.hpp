#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "maple/integer_matrix.hpp"

namespace maple {

using RationalMatrix = std::vector<std::vector<Rational>>;

// Solves the square system M x = rhs over Q by Gauss-Jordan elimination.
// Returns nullopt if M is singular.
inline std::optional<std::vector<Rational>> solve_square(RationalMatrix m,
                                                         std::vector<Rational> rhs) {
  const std::size_t n = m.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    const Rational inv = 1 / m[col][col];
    for (std::size_t j = col; j < n; ++j) m[col][j] *= inv;
    rhs[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t j = col; j < n; ++j) m[r][j] -= f * m[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
  return rhs;
}

// Inverse over Q, nullopt if singular.
inline std::optional<RationalMatrix> inverse(RationalMatrix m) {
  const std::size_t n = m.size();
  RationalMatrix inv(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    const Rational s = 1 / m[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      m[col][j] *= s;
      inv[col][j] *= s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// B^T B
inline RationalMatrix gram_matrix(const IntegerMatrix& b) {
  const std::size_t d = b.cols();
  RationalMatrix gram(d, std::vector<Rational>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      Integer s = 0;
      for (std::size_t k = 0; k < b.rows(); ++k) s += b(k, i) * b(k, j);
      gram[i][j] = s;
      gram[j][i] = s;
    }
  return gram;
}

// Exact rank over Q.
inline std::size_t rank(const IntegerMatrix& a) {
  RationalMatrix m(a.rows(), std::vector<Rational>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = a(i, j);
  std::size_t r = 0;
  for (std::size_t col = 0; col < a.cols() && r < a.rows(); ++col) {
    std::size_t piv = r;
    while (piv < a.rows() && m[piv][col] == 0) ++piv;
    if (piv == a.rows()) continue;
    std::swap(m[piv], m[r]);
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      if (m[i][col] == 0) continue;
      const Rational f = m[i][col] / m[r][col];
      for (std::size_t j = col; j < a.cols(); ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return r;
}

// Least-squares coordinates (B^T B)^{-1} B^T g over Q. nullopt if the columns
// of B are dependent.
inline std::optional<std::vector<Rational>> least_squares_exact(
    const IntegerMatrix& b, std::span<const Rational> g) {
  require_length(g.size(), b.rows(), "least-squares right-hand side");
  const std::size_t d = b.cols();
  RationalMatrix gram = gram_matrix(b);
  std::vector<Rational> rhs(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < b.rows(); ++k) rhs[i] += Rational(b(k, i)) * g[k];
  }
  return solve_square(std::move(gram), std::move(rhs));
}

}  // namespace maple
