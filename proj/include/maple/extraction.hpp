#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "maple/graver.hpp"
#include "maple/hnf.hpp"
#include "maple/integer_matrix.hpp"
#include "maple/lll.hpp"
#include "maple/parallel.hpp"

namespace maple {

struct ExtractionConfig {
  std::size_t num_starts = 1000;
  std::size_t epochs = 300;
  double lambda1 = 0.85;
  double lambda2 = 1.0;
  double step_size = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_div = 1e-8;
  std::uint64_t seed = 0;
  std::size_t max_pool_size = 1'000'000;
  std::size_t threads = 0;  // 0: default_threads()

  void validate() const {
    if (num_starts < 1) fail(ErrorKind::SchemaError, "num_starts must be >= 1");
    if (epochs < 1) fail(ErrorKind::SchemaError, "epochs must be >= 1");
    if (lambda1 < 0 || lambda2 < 0) fail(ErrorKind::SchemaError, "lambda1, lambda2 must be >= 0");
    if (!(step_size > 0)) fail(ErrorKind::SchemaError, "step_size must be > 0");
  }
};

// Deduplicated, negation-closed set of kernel directions inside the box M.
struct DirectionPool {
  std::size_t n = 0;
  std::size_t m = 0;
  Box box;
  DirectionSet directions;

  std::size_t size() const { return directions.size(); }

  // Inserts g and -g. Returns false for zero or out-of-box vectors.
  bool insert(const IntVector& g) {
    if (is_zero(g) || !box.contains(g)) return false;
    directions.insert(g);
    directions.insert(negated(g));
    return true;
  }

  static DirectionPool from_set(std::size_t n, std::size_t m, Box box,
                                const DirectionSet& set) {
    DirectionPool p{n, m, std::move(box), {}};
    for (const auto& g : set) p.insert(g);
    return p;
  }
};

// Adaptive-moment first-order optimizer with bias correction.
class Adam {
 public:
  Adam(std::size_t dim, double step, double beta1, double beta2, double eps = 1e-8)
      : m_(dim, 0.0), v_(dim, 0.0), step_(step), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::span<double> x, std::span<const double> grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < x.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double mhat = m_[i] / c1;
      const double vhat = v_[i] / c2;
      x[i] -= step_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  double step_;
  double beta1_;
  double beta2_;
  double eps_;
  std::size_t t_ = 0;
};

namespace detail {

inline double fractional_penalty(double z) {
  const double f = z - std::floor(z);
  return f * (1.0 - f);
}

// d/dz of (z - floor z)(ceil z - z); zero at integers.
inline double fractional_penalty_grad(double z) {
  const double fl = std::floor(z);
  if (fl == z) return 0.0;
  return (fl + 1.0) + fl - 2.0 * z;
}

inline double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

inline RealVector basis_times(const SmallMatrix& b, std::span<const double> z) {
  RealVector out(b.rows, 0.0);
  for (std::size_t i = 0; i < b.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j)
      out[i] += static_cast<double>(b(i, j)) * z[j];
  return out;
}

// Lowest index attaining max |z_i|.
inline std::size_t argmax_abs(std::span<const double> z) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < z.size(); ++i)
    if (std::abs(z[i]) > std::abs(z[k])) k = i;
  return k;
}

inline double inf_norm(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace detail

// |Bz|_1 + lambda1 * sum frac(z_i)(1 - frac(z_i))
//        + lambda2 * max(1 / max(|z|_inf, eps_div) - 1, 0)
inline double extraction_loss(std::span<const double> z, const SmallMatrix& b,
                              double lambda1, double lambda2, double epsilon_div = 1e-8) {
  require_length(z.size(), b.cols, "extraction_loss coordinates");
  double l1 = 0.0;
  for (double v : detail::basis_times(b, z)) l1 += std::abs(v);
  double frac = 0.0;
  for (double v : z) frac += detail::fractional_penalty(v);
  const double norm = std::max(detail::inf_norm(z), epsilon_div);
  return l1 + lambda1 * frac + lambda2 * std::max(1.0 / norm - 1.0, 0.0);
}

inline double extraction_loss(std::span<const double> z, const IntegerMatrix& b,
                              double lambda1, double lambda2, double epsilon_div = 1e-8) {
  return extraction_loss(z, SmallMatrix::from(b), lambda1, lambda2, epsilon_div);
}

// A subgradient of extraction_loss. sign(0) = 0, the fractional penalty has
// derivative 0 at integers, and the norm term acts on the lowest-index
// coordinate of largest magnitude.
inline RealVector extraction_loss_grad(std::span<const double> z, const SmallMatrix& b,
                                       double lambda1, double lambda2,
                                       double epsilon_div = 1e-8) {
  require_length(z.size(), b.cols, "extraction_loss_grad coordinates");
  const RealVector bz = detail::basis_times(b, z);
  RealVector grad(z.size(), 0.0);
  for (std::size_t i = 0; i < b.rows; ++i) {
    const double s = detail::sign(bz[i]);
    if (s == 0.0) continue;
    for (std::size_t j = 0; j < b.cols; ++j) grad[j] += s * static_cast<double>(b(i, j));
  }
  for (std::size_t j = 0; j < z.size(); ++j)
    grad[j] += lambda1 * detail::fractional_penalty_grad(z[j]);
  if (!z.empty() && detail::inf_norm(z) < 1.0) {
    const std::size_t k = detail::argmax_abs(z);
    grad[k] -= lambda2 * detail::sign(z[k]) / std::max(z[k] * z[k], epsilon_div);
  }
  return grad;
}

inline RealVector extraction_loss_grad(std::span<const double> z, const IntegerMatrix& b,
                                       double lambda1, double lambda2,
                                       double epsilon_div = 1e-8) {
  return extraction_loss_grad(z, SmallMatrix::from(b), lambda1, lambda2, epsilon_div);
}

// Independent random stream for start `index`; the same stream regardless of
// which worker runs the start.
inline std::mt19937_64 start_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline double uniform_between(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline void check_bounds(std::span<const std::int64_t> l, std::span<const std::int64_t> u) {
  require_length(u.size(), l.size(), "bounds");
  for (std::size_t i = 0; i < l.size(); ++i)
    if (l[i] > u[i])
      fail(ErrorKind::BadBounds, "l[" + std::to_string(i) + "] exceeds u[" + std::to_string(i) + "]");
}

// Start i: g ~ Uniform(l - u, u - l) coordinatewise, mapped to z by the
// pseudoinverse of B.
inline RealVector sample_start(std::span<const std::int64_t> l, std::span<const std::int64_t> u,
                               const CoordinateMap& coords, std::uint64_t seed,
                               std::uint64_t index) {
  auto rng = start_stream(seed, index);
  RealVector g(l.size());
  for (std::size_t j = 0; j < l.size(); ++j) {
    const double half = static_cast<double>(u[j] - l[j]);
    g[j] = uniform_between(rng, -half, half);
  }
  return coords(g);
}

inline std::vector<RealVector> sample_starts(std::span<const std::int64_t> l,
                                             std::span<const std::int64_t> u,
                                             const IntegerMatrix& b, std::size_t count,
                                             std::uint64_t seed) {
  check_bounds(l, u);
  require_length(l.size(), b.rows(), "bounds vs basis rows");
  std::vector<RealVector> out;
  if (count == 0) return out;
  const CoordinateMap coords(b);
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_start(l, u, coords, seed, i));
  return out;
}

// Runs cfg.epochs optimizer steps on extraction_loss from z0, calling
// harvest(z) after every step.
inline RealVector optimize_start(RealVector z, const SmallMatrix& b, const ExtractionConfig& cfg,
                                 const std::function<void(std::span<const double>)>& harvest) {
  require_length(z.size(), b.cols, "optimize_start coordinates");
  Adam adam(z.size(), cfg.step_size, cfg.beta1, cfg.beta2);
  for (std::size_t t = 0; t < cfg.epochs; ++t) {
    const RealVector grad =
        extraction_loss_grad(z, b, cfg.lambda1, cfg.lambda2, cfg.epsilon_div);
    adam.step(z, grad);
    if (harvest) harvest(z);
  }
  return z;
}

// Nearest integer, halves away from zero. nullopt when out of int64 range.
inline std::optional<IntVector> round_coords(std::span<const double> z) {
  IntVector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = std::round(z[i]);
    if (!std::isfinite(r) || std::abs(r) > 1e15) return std::nullopt;
    out[i] = static_cast<std::int64_t>(r);
  }
  return out;
}

// Reduced kernel basis used by extraction: LLL of the trailing HNF columns.
inline IntegerMatrix reduced_kernel_basis(const IntegerMatrix& a) {
  return lll_reduce(kernel_lattice_basis(a));
}

// Multi-start extraction over a precomputed reduced kernel basis.
inline DirectionPool extract_directions(const IntegerMatrix& basis, std::size_t m,
                                        std::span<const std::int64_t> l,
                                        std::span<const std::int64_t> u,
                                        const ExtractionConfig& cfg) {
  cfg.validate();
  check_bounds(l, u);
  require_length(l.size(), basis.rows(), "bounds vs basis rows");
  const std::size_t n = basis.rows();
  const SmallMatrix b = SmallMatrix::from(basis);
  const CoordinateMap coords(basis);
  const Box box = Box::difference_box(l, u);

  const std::size_t threads =
      std::min(cfg.threads == 0 ? default_threads() : cfg.threads, cfg.num_starts);
  // Each chunk keeps its harvest in first-seen order; concatenating chunks in
  // start order reproduces the sequential order for any chunking.
  std::vector<std::vector<IntVector>> chunk_harvest(std::max<std::size_t>(threads, 1));
  parallel_chunks(cfg.num_starts, threads,
                  [&](std::size_t worker, std::size_t begin, std::size_t end) {
                    std::set<IntVector> seen;
                    auto& out = chunk_harvest[worker];
                    for (std::size_t i = begin; i < end; ++i) {
                      RealVector z0 = sample_start(l, u, coords, cfg.seed, i);
                      optimize_start(std::move(z0), b, cfg, [&](std::span<const double> z) {
                        const auto zr = round_coords(z);
                        if (!zr) return;
                        IntVector g;
                        try {
                          g = multiply(b, *zr);
                        } catch (const Error&) {
                          return;
                        }
                        if (is_zero(g) || !box.contains(g)) return;
                        if (seen.insert(g).second) out.push_back(std::move(g));
                      });
                    }
                  });

  DirectionPool pool{n, m, box, {}};
  for (const auto& chunk : chunk_harvest)
    for (const auto& g : chunk) {
      if (pool.directions.count(g)) continue;
      if (pool.size() + 2 > cfg.max_pool_size) return pool;
      pool.insert(g);
    }
  return pool;
}

inline DirectionPool extract_directions(const IntegerMatrix& a, std::span<const std::int64_t> l,
                                        std::span<const std::int64_t> u,
                                        const ExtractionConfig& cfg) {
  require_length(l.size(), a.cols(), "bounds vs columns of A");
  return extract_directions(reduced_kernel_basis(a), a.rows(), l, u, cfg);
}

}  // namespace maple
