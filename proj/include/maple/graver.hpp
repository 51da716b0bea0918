#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "maple/integer_matrix.hpp"
#include "maple/rational_solve.hpp"

namespace maple {

// Lexicographically ordered set of directions.
using DirectionSet = std::set<IntVector>;

// Integer box lo <= x <= hi.
struct Box {
  IntVector lo;
  IntVector hi;

  std::size_t size() const { return lo.size(); }

  bool contains(std::span<const std::int64_t> x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  // [l - u, u - l]
  static Box difference_box(std::span<const std::int64_t> l,
                            std::span<const std::int64_t> u) {
    require_length(u.size(), l.size(), "bounds");
    Box m{IntVector(l.size()), IntVector(l.size())};
    for (std::size_t i = 0; i < l.size(); ++i) {
      m.lo[i] = l[i] - u[i];
      m.hi[i] = u[i] - l[i];
    }
    return m;
  }
};

// x ⊑ y: same orthant and |x_i| <= |y_i| for every i.
inline bool conforms(std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
  require_length(y.size(), x.size(), "conforms");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    if ((x[i] > 0) != (y[i] > 0) || y[i] == 0) return false;
    if (x[i] > 0 ? x[i] > y[i] : x[i] < y[i]) return false;
  }
  return true;
}

inline IntVector negated(std::span<const std::int64_t> g) {
  IntVector out(g.begin(), g.end());
  for (auto& v : out) v = -v;
  return out;
}

inline bool is_zero(std::span<const std::int64_t> g) {
  return std::all_of(g.begin(), g.end(), [](std::int64_t v) { return v == 0; });
}

inline std::int64_t l1_norm(std::span<const std::int64_t> g) {
  std::int64_t s = 0;
  for (auto v : g) s += v < 0 ? -v : v;
  return s;
}

struct EnumerationLimits {
  std::size_t max_dim = 14;
  std::uint64_t node_budget = 200'000'000;
};

// Visits every x in [lo, hi] with A x = rhs by depth-first search over the
// coordinates, pruning a branch as soon as some row's residual falls outside
// the range still reachable by the unassigned coordinates.
// Throws TooLarge when n exceeds the dimension cap or the search visits more
// nodes than the budget allows.
inline void for_each_solution(const SmallMatrix& a, std::span<const std::int64_t> rhs,
                              const Box& box,
                              const std::function<void(const IntVector&)>& visit,
                              const EnumerationLimits& limits = {}) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  require_length(rhs.size(), m, "right-hand side");
  require_length(box.size(), n, "enumeration box");
  if (n > limits.max_dim)
    fail(ErrorKind::TooLarge, "enumeration dimension " + std::to_string(n) +
                                  " exceeds cap " + std::to_string(limits.max_dim));
  for (std::size_t j = 0; j < n; ++j)
    if (box.lo[j] > box.hi[j]) return;

  // reach_lo[k][i], reach_hi[k][i]: range of sum_{j >= k} a_ij x_j over the box.
  std::vector<std::vector<std::int64_t>> reach_lo(n + 1, std::vector<std::int64_t>(m));
  std::vector<std::vector<std::int64_t>> reach_hi(n + 1, std::vector<std::int64_t>(m));
  for (std::size_t k = n; k-- > 0;)
    for (std::size_t i = 0; i < m; ++i) {
      const std::int64_t p = a(i, k) * box.lo[k];
      const std::int64_t q = a(i, k) * box.hi[k];
      reach_lo[k][i] = reach_lo[k + 1][i] + std::min(p, q);
      reach_hi[k][i] = reach_hi[k + 1][i] + std::max(p, q);
    }

  IntVector x(n);
  IntVector residual(rhs.begin(), rhs.end());
  std::uint64_t nodes = 0;

  std::function<void(std::size_t)> descend = [&](std::size_t k) {
    if (++nodes > limits.node_budget)
      fail(ErrorKind::TooLarge, "enumeration exceeded node budget of " +
                                    std::to_string(limits.node_budget));
    for (std::size_t i = 0; i < m; ++i)
      if (residual[i] < reach_lo[k][i] || residual[i] > reach_hi[k][i]) return;
    if (k == n) {
      visit(x);
      return;
    }
    for (std::int64_t v = box.lo[k]; v <= box.hi[k]; ++v) {
      x[k] = v;
      for (std::size_t i = 0; i < m; ++i) residual[i] -= a(i, k) * v;
      descend(k + 1);
      for (std::size_t i = 0; i < m; ++i) residual[i] += a(i, k) * v;
    }
    x[k] = 0;
  };
  descend(0);
}

// { g in Z^n : A g = 0, lo <= g <= hi, g != 0 }
inline DirectionSet enumerate_kernel_in_box(const IntegerMatrix& a, const Box& box,
                                            const EnumerationLimits& limits = {}) {
  const SmallMatrix sa = SmallMatrix::from(a);
  const IntVector zero(a.rows(), 0);
  DirectionSet out;
  for_each_solution(
      sa, zero, box,
      [&](const IntVector& g) {
        if (!is_zero(g)) out.insert(g);
      },
      limits);
  return out;
}

// The ⊑-minimal elements of a set of nonzero vectors.
inline DirectionSet conformal_minimal(const DirectionSet& points) {
  std::vector<const IntVector*> by_norm;
  by_norm.reserve(points.size());
  for (const auto& p : points) by_norm.push_back(&p);
  std::stable_sort(by_norm.begin(), by_norm.end(), [](const auto* a, const auto* b) {
    return l1_norm(*a) < l1_norm(*b);
  });
  // Anything strictly below g has smaller l1 norm, and every non-minimal
  // element dominates some minimal one, so checking kept elements suffices.
  std::vector<const IntVector*> kept;
  for (const auto* g : by_norm) {
    bool minimal = true;
    for (const auto* h : kept)
      if (conforms(*h, *g)) {
        minimal = false;
        break;
      }
    if (minimal) kept.push_back(g);
  }
  DirectionSet out;
  for (const auto* g : kept) out.insert(*g);
  return out;
}

// Graver basis elements of A lying in the box, by exhaustive enumeration.
inline DirectionSet graver_oracle(const IntegerMatrix& a, const Box& box,
                                  const EnumerationLimits& limits = {}) {
  return conformal_minimal(enumerate_kernel_in_box(a, box, limits));
}

// z -> B z
inline IntVector to_ambient(const SmallMatrix& b, std::span<const std::int64_t> z) {
  require_length(z.size(), b.cols, "to_ambient coordinates");
  return multiply(b, z);
}

inline IntVector to_ambient(const IntegerMatrix& b, std::span<const std::int64_t> z) {
  return to_ambient(SmallMatrix::from(b), z);
}

// Exact pseudoinverse coordinates (B^T B)^{-1} B^T g.
inline std::vector<Rational> to_coords_exact(const IntegerMatrix& b,
                                             std::span<const std::int64_t> g) {
  require_length(g.size(), b.rows(), "to_coords vector");
  std::vector<Rational> rg;
  rg.reserve(g.size());
  for (auto v : g) rg.emplace_back(to_integer(v));
  auto z = least_squares_exact(b, rg);
  if (!z) fail(ErrorKind::DependentColumns, "to_coords: basis columns are dependent");
  return *z;
}

// Integer coordinates of a lattice member, or nullopt when g is not in L(B).
inline std::optional<IntVector> lattice_coords(const IntegerMatrix& b,
                                               std::span<const std::int64_t> g) {
  const auto z = to_coords_exact(b, g);
  IntVector out;
  out.reserve(z.size());
  for (const auto& q : z) {
    if (q.get_den() != 1) return std::nullopt;
    out.push_back(to_int64(q.get_num()));
  }
  if (to_ambient(b, out) != IntVector(g.begin(), g.end())) return std::nullopt;
  return out;
}

// Floating-point g -> z map for the heuristic paths. The pseudoinverse is
// computed exactly once and rounded to double.
class CoordinateMap {
 public:
  explicit CoordinateMap(const IntegerMatrix& b) : n_(b.rows()), d_(b.cols()) {
    auto gram_inv = inverse(gram_matrix(b));
    if (!gram_inv) fail(ErrorKind::DependentColumns, "to_coords: basis columns are dependent");
    pinv_.assign(d_ * n_, 0.0);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t k = 0; k < n_; ++k) {
        Rational s = 0;
        for (std::size_t j = 0; j < d_; ++j)
          if (b(k, j) != 0) s += (*gram_inv)[i][j] * b(k, j);
        pinv_[i * n_ + k] = s.get_d();
      }
  }

  std::size_t ambient_dim() const { return n_; }
  std::size_t coord_dim() const { return d_; }

  RealVector operator()(std::span<const double> g) const {
    require_length(g.size(), n_, "to_coords vector");
    RealVector z(d_, 0.0);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t k = 0; k < n_; ++k) z[i] += pinv_[i * n_ + k] * g[k];
    return z;
  }

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> pinv_;
};

inline RealVector to_coords(const IntegerMatrix& b, std::span<const double> g) {
  return CoordinateMap(b)(g);
}

}  // namespace maple
