#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "maple/hnf.hpp"
#include "maple/integer_matrix.hpp"
#include "maple/rational_solve.hpp"

namespace maple {

// f(x) = 1/2 x^T Q x + c^T x + c0, Q symmetric.
struct QuadraticObjective {
  RationalMatrix Q;
  std::vector<Rational> c;
  Rational c0 = 0;

  // Double copies used by the hot augmentation loop.
  std::vector<double> q_dense;
  std::vector<double> c_dense;
  double c0_dense = 0.0;

  std::size_t dim() const { return c.size(); }

  void symmetrize() {
    const std::size_t n = Q.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Rational avg = (Q[i][j] + Q[j][i]) / 2;
        Q[i][j] = avg;
        Q[j][i] = avg;
      }
    refresh_cache();
  }

  void refresh_cache() {
    const std::size_t n = Q.size();
    q_dense.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q_dense[i * n + j] = Q[i][j].get_d();
    c_dense.clear();
    for (const auto& v : c) c_dense.push_back(v.get_d());
    c0_dense = c0.get_d();
  }

  double q(std::size_t i, std::size_t j) const { return q_dense[i * c.size() + j]; }
};

// Univariate polynomial, coefficients in ascending degree.
struct Polynomial {
  std::vector<Rational> coeffs;

  Rational operator()(const Rational& t) const {
    Rational acc = 0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * t + coeffs[k];
    return acc;
  }

  double operator()(double t) const {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * t + coeffs[k].get_d();
    return acc;
  }
};

// f(x) = sum_j f_j(x_j)
struct SeparableObjective {
  std::vector<Polynomial> terms;

  std::size_t dim() const { return terms.size(); }
};

using Objective = std::variant<QuadraticObjective, SeparableObjective>;

inline std::size_t objective_dim(const Objective& obj) {
  return std::visit([](const auto& o) { return o.dim(); }, obj);
}

// Exact evaluation at an integer point.
inline Rational eval_objective_exact(const Objective& obj,
                                     std::span<const std::int64_t> x) {
  require_length(x.size(), objective_dim(obj), "eval_objective point");
  if (const auto* q = std::get_if<QuadraticObjective>(&obj)) {
    const std::size_t n = x.size();
    Rational acc = q->c0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      const Rational xi(to_integer(x[i]));
      Rational row = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (x[j] != 0 && q->Q[i][j] != 0) row += q->Q[i][j] * to_integer(x[j]);
      acc += xi * (row / 2 + q->c[i]);
    }
    return acc;
  }
  const auto& s = std::get<SeparableObjective>(obj);
  Rational acc = 0;
  for (std::size_t j = 0; j < x.size(); ++j)
    acc += s.terms[j](Rational(to_integer(x[j])));
  return acc;
}

inline double eval_objective(const Objective& obj, std::span<const std::int64_t> x) {
  return eval_objective_exact(obj, x).get_d();
}

inline double eval_objective(const Objective& obj, std::span<const double> x) {
  require_length(x.size(), objective_dim(obj), "eval_objective point");
  if (const auto* q = std::get_if<QuadraticObjective>(&obj)) {
    const std::size_t n = x.size();
    double acc = q->c0_dense;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += q->q(i, j) * x[j];
      acc += x[i] * (0.5 * row + q->c_dense[i]);
    }
    return acc;
  }
  const auto& s = std::get<SeparableObjective>(obj);
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) acc += s.terms[j](x[j]);
  return acc;
}

// Integer linear-equality program min f(x) s.t. Ax = b, l <= x <= u.
struct Problem {
  std::string name;
  IntegerMatrix A;
  IntVector b;
  IntVector l;
  IntVector u;
  Objective objective;

  std::size_t n() const { return A.cols(); }
  std::size_t m() const { return A.rows(); }

  bool is_feasible(std::span<const std::int64_t> x) const {
    if (x.size() != n()) return false;
    for (std::size_t i = 0; i < n(); ++i)
      if (x[i] < l[i] || x[i] > u[i]) return false;
    return multiply(SmallMatrix::from(A), x) == b;
  }
};

// Number of integer points checked per coordinate by the convexity guard.
inline constexpr std::int64_t kConvexityProbeLimit = 64;

// Checks every Problem invariant; throws DimensionError, BoundsError,
// RankError or SchemaError.
inline void validate(Problem& p) {
  const std::size_t n = p.A.cols();
  const std::size_t m = p.A.rows();
  if (n == 0 || m == 0) fail(ErrorKind::DimensionError, "A must be at least 1x1");
  if (p.b.size() != m)
    fail(ErrorKind::DimensionError, "b has length " + std::to_string(p.b.size()) +
                                        ", expected " + std::to_string(m));
  if (p.l.size() != n || p.u.size() != n)
    fail(ErrorKind::DimensionError, "bounds must have length " + std::to_string(n));
  if (objective_dim(p.objective) != n)
    fail(ErrorKind::DimensionError, "objective dimension does not match n");
  for (std::size_t i = 0; i < n; ++i)
    if (p.l[i] > p.u[i])
      fail(ErrorKind::BoundsError, "l[" + std::to_string(i) + "] = " +
                                       std::to_string(p.l[i]) + " exceeds u[" +
                                       std::to_string(i) + "] = " + std::to_string(p.u[i]));
  if (rank(p.A) != m)
    fail(ErrorKind::RankError, "A does not have full row rank " + std::to_string(m));

  if (auto* q = std::get_if<QuadraticObjective>(&p.objective)) {
    if (q->Q.size() != n)
      fail(ErrorKind::DimensionError, "Q must be " + std::to_string(n) + "x" + std::to_string(n));
    for (const auto& row : q->Q)
      if (row.size() != n)
        fail(ErrorKind::DimensionError, "Q must be " + std::to_string(n) + "x" + std::to_string(n));
    q->symmetrize();
  } else {
    // Heuristic guard: midpoint convexity on integer triples near each bound.
    const auto& s = std::get<SeparableObjective>(p.objective);
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t lo = p.l[j];
      const std::int64_t hi = std::min(p.u[j], lo + kConvexityProbeLimit);
      for (std::int64_t t = lo + 1; t < hi; ++t) {
        const Rational a = s.terms[j](Rational(to_integer(t - 1)));
        const Rational mid = s.terms[j](Rational(to_integer(t)));
        const Rational c = s.terms[j](Rational(to_integer(t + 1)));
        if (a + c < 2 * mid)
          fail(ErrorKind::SchemaError,
               "separable term " + std::to_string(j) + " is not convex at " + std::to_string(t));
      }
    }
  }
}

}  // namespace maple
