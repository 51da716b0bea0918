#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "maple/extraction.hpp"
#include "maple/graver.hpp"
#include "maple/parallel.hpp"
#include "maple/problem.hpp"

namespace maple {

struct SolveConfig {
  std::size_t num_feasible_starts = 100;
  double lambda3 = 0.1;
  std::size_t feasibility_epochs = 500;
  double feasibility_step_size = 0.05;
  std::uint64_t step_cap = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: default_threads()
  bool record_traces = false;
  ExtractionConfig extraction;

  void validate() const {
    if (num_feasible_starts < 1)
      fail(ErrorKind::SchemaError, "num_feasible_starts must be >= 1");
    if (lambda3 < 0) fail(ErrorKind::SchemaError, "lambda3 must be >= 0");
    if (!(feasibility_step_size > 0))
      fail(ErrorKind::SchemaError, "feasibility_step_size must be > 0");
    extraction.validate();
  }
};

struct Solution {
  IntVector x;
  double objective = 0.0;

  friend bool operator==(const Solution&, const Solution&) = default;
};

enum class SolveStatus { Ok, NoFeasibleFound };

struct SolveReport {
  SolveStatus status = SolveStatus::Ok;
  std::optional<Solution> best;
  std::vector<Solution> all_finals;
  std::vector<std::size_t> trajectory_lengths;
  std::size_t pool_size = 0;
  std::map<std::string, double> timings_ms;
  // Objective value after every augmentation step, per start. Filled only
  // when SolveConfig::record_traces is set; not serialized.
  std::vector<std::vector<double>> traces;

  friend bool operator==(const SolveReport&, const SolveReport&) = default;
};

// ||Ax - b||^2 + lambda3 * sum frac(x_i)(1 - frac(x_i)) and its gradient.
inline std::pair<double, RealVector> feasibility_loss_and_grad(std::span<const double> x,
                                                               const SmallMatrix& a,
                                                               std::span<const std::int64_t> b,
                                                               double lambda3) {
  require_length(x.size(), a.cols, "feasibility_loss point");
  require_length(b.size(), a.rows, "feasibility_loss right-hand side");
  double value = 0.0;
  RealVector grad(x.size(), 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double r = -static_cast<double>(b[i]);
    for (std::size_t j = 0; j < a.cols; ++j) r += static_cast<double>(a(i, j)) * x[j];
    value += r * r;
    if (r == 0.0) continue;
    for (std::size_t j = 0; j < a.cols; ++j) grad[j] += 2.0 * r * static_cast<double>(a(i, j));
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    value += lambda3 * detail::fractional_penalty(x[j]);
    grad[j] += lambda3 * detail::fractional_penalty_grad(x[j]);
  }
  return {value, std::move(grad)};
}

// Multi-start descent on the feasibility loss inside [l, u]; final points are
// rounded and kept only if they satisfy Ax = b and the bounds exactly.
inline std::vector<IntVector> find_feasible_set(const Problem& p, const SolveConfig& cfg) {
  const SmallMatrix a = SmallMatrix::from(p.A);
  const std::size_t n = p.n();
  const std::size_t k = cfg.num_feasible_starts;
  std::vector<std::optional<IntVector>> finals(k);
  // Separate stream family from extraction starts.
  const std::uint64_t stream_seed = cfg.seed ^ 0x9e3779b97f4a7c15ULL;
  parallel_for(k, cfg.threads, [&](std::size_t s) {
    auto rng = start_stream(stream_seed, s);
    RealVector x(n);
    for (std::size_t j = 0; j < n; ++j)
      x[j] = uniform_between(rng, static_cast<double>(p.l[j]), static_cast<double>(p.u[j]));
    Adam adam(n, cfg.feasibility_step_size, cfg.extraction.beta1, cfg.extraction.beta2);
    for (std::size_t t = 0; t < cfg.feasibility_epochs; ++t) {
      const auto grad = feasibility_loss_and_grad(x, a, p.b, cfg.lambda3).second;
      adam.step(x, grad);
      for (std::size_t j = 0; j < n; ++j)
        x[j] = std::clamp(x[j], static_cast<double>(p.l[j]), static_cast<double>(p.u[j]));
    }
    auto xr = round_coords(x);
    if (xr && p.is_feasible(*xr)) finals[s] = std::move(*xr);
  });
  std::set<IntVector> unique;
  for (auto& f : finals)
    if (f) unique.insert(std::move(*f));
  return {unique.begin(), unique.end()};
}

// Largest lambda >= 0 keeping l <= x + lambda g <= u.
inline std::int64_t max_step_length(std::span<const std::int64_t> x,
                                    std::span<const std::int64_t> g,
                                    std::span<const std::int64_t> l,
                                    std::span<const std::int64_t> u) {
  require_length(g.size(), x.size(), "max_step_length direction");
  require_length(l.size(), x.size(), "max_step_length lower bound");
  require_length(u.size(), x.size(), "max_step_length upper bound");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  bool any = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (g[i] > 0) {
      best = std::min(best, (u[i] - x[i]) / g[i]);
      any = true;
    } else if (g[i] < 0) {
      best = std::min(best, (x[i] - l[i]) / (-g[i]));
      any = true;
    }
  }
  if (!any) fail(ErrorKind::ZeroDirection, "max_step_length: zero direction");
  return std::max<std::int64_t>(best, 0);
}

struct Step {
  std::int64_t lambda = 0;
  double value = 0.0;  // f(x + lambda g)
};

namespace detail {

// Improvement must beat floating-point noise relative to the objective scale.
inline double improvement_tolerance(double fx) { return 1e-9 * std::max(1.0, std::abs(fx)); }

// Sparse view of a pool member plus its curvature g^T Q g.
struct PreparedDirection {
  IntVector g;
  std::vector<std::size_t> support;
  double curvature = 0.0;
};

inline PreparedDirection prepare(const IntVector& g, const Objective& obj) {
  PreparedDirection pd{g, {}, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] != 0) pd.support.push_back(i);
  if (const auto* q = std::get_if<QuadraticObjective>(&obj)) {
    for (auto i : pd.support)
      for (auto j : pd.support)
        pd.curvature += static_cast<double>(g[i]) * q->q(i, j) * static_cast<double>(g[j]);
  }
  return pd;
}

inline std::int64_t max_step_sparse(const IntVector& x, const PreparedDirection& pd,
                                    const Problem& p) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  const IntVector& g = pd.g;
  for (auto i : pd.support) {
    const std::int64_t s = g[i] > 0 ? (p.u[i] - x[i]) / g[i] : (x[i] - p.l[i]) / (-g[i]);
    best = std::min(best, s);
  }
  return std::max<std::int64_t>(best, 0);
}

// Augmentation state: current point, objective and, for quadratics, Qx + c.
struct AugmentState {
  IntVector x;
  double value = 0.0;
  RealVector gradient;

  AugmentState(const Problem& p, IntVector start) : x(std::move(start)) {
    value = eval_objective(p.objective, std::span<const std::int64_t>(x));
    if (const auto* q = std::get_if<QuadraticObjective>(&p.objective)) {
      const std::size_t n = x.size();
      gradient.assign(q->c_dense.begin(), q->c_dense.end());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (x[j] != 0) gradient[i] += q->q(i, j) * static_cast<double>(x[j]);
    }
  }

  void apply(const Problem& p, const IntVector& g, std::int64_t lambda, double new_value) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += lambda * g[i];
    if (const auto* q = std::get_if<QuadraticObjective>(&p.objective)) {
      const std::size_t n = x.size();
      for (std::size_t j = 0; j < n; ++j) {
        if (g[j] == 0) continue;
        const double step = static_cast<double>(lambda * g[j]);
        for (std::size_t i = 0; i < n; ++i) gradient[i] += q->q(i, j) * step;
      }
    }
    value = new_value;
  }
};

// Best improving integer step along one direction, or nullopt.
inline std::optional<Step> best_step(const Problem& p, const AugmentState& st,
                                     const PreparedDirection& pd, std::uint64_t step_cap) {
  const std::int64_t lmax = max_step_sparse(st.x, pd, p);
  if (lmax < 1) return std::nullopt;
  const IntVector& g = pd.g;
  const double threshold = st.value - improvement_tolerance(st.value);

  std::optional<Step> best;
  auto consider = [&](std::int64_t lambda, double value) {
    if (value >= threshold) return;
    if (!best || value < best->value || (value == best->value && lambda < best->lambda))
      best = Step{lambda, value};
  };

  if (std::holds_alternative<QuadraticObjective>(p.objective)) {
    // f(x + lambda g) = f(x) + lambda * slope + lambda^2 * curvature / 2
    double slope = 0.0;
    for (auto i : pd.support) slope += static_cast<double>(g[i]) * st.gradient[i];
    const double curv = pd.curvature;
    std::vector<std::int64_t> candidates{1, lmax};
    if (curv > 0) {
      const double star = -slope / curv;
      if (star > 1 && star < static_cast<double>(lmax)) {
        candidates.push_back(static_cast<std::int64_t>(std::floor(star)));
        candidates.push_back(static_cast<std::int64_t>(std::ceil(star)));
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (auto lambda : candidates) {
      const double lam = static_cast<double>(lambda);
      consider(lambda, st.value + lam * slope + 0.5 * lam * lam * curv);
    }
    return best;
  }

  const auto& sep = std::get<SeparableObjective>(p.objective);
  double base = 0.0;
  for (auto i : pd.support) base += sep.terms[i](static_cast<double>(st.x[i]));
  const std::int64_t limit =
      std::min<std::int64_t>(lmax, static_cast<std::int64_t>(std::min<std::uint64_t>(
                                       step_cap, std::numeric_limits<std::int64_t>::max())));
  for (std::int64_t lambda = 1; lambda <= limit; ++lambda) {
    double moved = 0.0;
    for (auto i : pd.support)
      moved += sep.terms[i](static_cast<double>(st.x[i] + lambda * g[i]));
    consider(lambda, st.value + (moved - base));
  }
  return best;
}

}  // namespace detail

inline void require_feasible(const Problem& p, std::span<const std::int64_t> x) {
  if (!p.is_feasible(x)) fail(ErrorKind::InfeasibleStart, "start point violates Ax = b or bounds");
}

// Best improving step length along g from feasible x, or nullopt.
inline std::optional<Step> best_step(const Problem& p, std::span<const std::int64_t> x,
                                     const IntVector& g, std::uint64_t step_cap = 1'000'000) {
  require_length(x.size(), p.n(), "best_step point");
  require_length(g.size(), p.n(), "best_step direction");
  if (is_zero(g)) fail(ErrorKind::ZeroDirection, "best_step: zero direction");
  const detail::AugmentState st(p, IntVector(x.begin(), x.end()));
  return detail::best_step(p, st, detail::prepare(g, p.objective), step_cap);
}

using AugmentObserver = std::function<void(const Solution&)>;

// Pool members with per-direction data shared across augmentations.
class PreparedPool {
 public:
  PreparedPool(const Problem& p, const DirectionSet& directions) {
    entries_.reserve(directions.size());
    for (const auto& g : directions) entries_.push_back(detail::prepare(g, p.objective));
  }

  const std::vector<detail::PreparedDirection>& entries() const { return entries_; }

 private:
  std::vector<detail::PreparedDirection> entries_;
};

// Graver-best augmentation: repeatedly take the step (g, lambda) with the
// lowest resulting objective over the whole pool until nothing improves.
// Ties go to the lexicographically smaller g, then the smaller lambda.
inline Solution graver_best_augment(const Problem& p, const IntVector& x0,
                                    const PreparedPool& pool, std::uint64_t step_cap,
                                    std::size_t* steps_taken = nullptr,
                                    const AugmentObserver& observer = {}) {
  require_length(x0.size(), p.n(), "augmentation start");
  require_feasible(p, x0);
  detail::AugmentState st(p, x0);
  std::size_t steps = 0;
  if (observer) observer(Solution{st.x, st.value});
  for (;;) {
    const detail::PreparedDirection* chosen = nullptr;
    std::optional<Step> best;
    for (const auto& pd : pool.entries()) {
      const auto step = detail::best_step(p, st, pd, step_cap);
      if (step && (!best || step->value < best->value)) {
        best = step;
        chosen = &pd;
      }
    }
    if (!best) break;
    st.apply(p, chosen->g, best->lambda, best->value);
    ++steps;
    if (observer) observer(Solution{st.x, st.value});
  }
  if (steps_taken) *steps_taken = steps;
  return Solution{st.x, eval_objective(p.objective, std::span<const std::int64_t>(st.x))};
}

inline Solution graver_best_augment(const Problem& p, const IntVector& x0,
                                    const DirectionPool& pool,
                                    std::uint64_t step_cap = 1'000'000) {
  return graver_best_augment(p, x0, PreparedPool(p, pool.directions), step_cap);
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace detail

// Extraction (unless a pool is supplied), feasible-point generation, and one
// augmentation per feasible start; reports the best final point.
inline SolveReport maple_solve(const Problem& p, const SolveConfig& cfg,
                               const DirectionPool* reuse_pool = nullptr) {
  cfg.validate();
  SolveReport report;
  using clock = std::chrono::steady_clock;

  DirectionPool pool;
  auto t0 = clock::now();
  if (reuse_pool) {
    if (reuse_pool->n != p.n() || reuse_pool->m != p.m())
      fail(ErrorKind::DimensionError, "pool dimensions do not match the instance");
    pool = *reuse_pool;
    report.timings_ms["extraction"] = 0.0;
  } else {
    ExtractionConfig ecfg = cfg.extraction;
    if (ecfg.threads == 0) ecfg.threads = cfg.threads;
    pool = extract_directions(p.A, p.l, p.u, ecfg);
    report.timings_ms["extraction"] = detail::elapsed_ms(t0);
  }
  report.pool_size = pool.size();

  t0 = clock::now();
  const auto starts = find_feasible_set(p, cfg);
  report.timings_ms["feasibility"] = detail::elapsed_ms(t0);

  t0 = clock::now();
  if (starts.empty()) {
    report.status = SolveStatus::NoFeasibleFound;
    report.timings_ms["augmentation"] = 0.0;
    return report;
  }
  const PreparedPool prepared(p, pool.directions);
  report.all_finals.resize(starts.size());
  report.trajectory_lengths.resize(starts.size());
  if (cfg.record_traces) report.traces.resize(starts.size());
  parallel_for(starts.size(), cfg.threads, [&](std::size_t i) {
    AugmentObserver obs;
    if (cfg.record_traces)
      obs = [&, i](const Solution& s) { report.traces[i].push_back(s.objective); };
    report.all_finals[i] =
        graver_best_augment(p, starts[i], prepared, cfg.step_cap, &report.trajectory_lengths[i], obs);
  });
  report.timings_ms["augmentation"] = detail::elapsed_ms(t0);

  // Finals are reported sorted by x; lengths and traces follow the same order.
  std::vector<std::size_t> order(starts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.all_finals[a].x < report.all_finals[b].x;
  });
  auto permute = [&](auto& v) {
    if (v.empty()) return;
    std::remove_reference_t<decltype(v)> sorted;
    sorted.reserve(v.size());
    for (auto i : order) sorted.push_back(std::move(v[i]));
    v = std::move(sorted);
  };
  permute(report.all_finals);
  permute(report.trajectory_lengths);
  permute(report.traces);

  const Solution* best = &report.all_finals.front();
  for (const auto& s : report.all_finals)
    if (s.objective < best->objective || (s.objective == best->objective && s.x < best->x))
      best = &s;
  report.best = *best;
  return report;
}

// Exact optimum of the problem by exhaustive enumeration of S; nullopt when S
// is empty. Ties go to the lexicographically smallest x.
inline std::optional<Solution> brute_force_optimum(const Problem& p,
                                                   const EnumerationLimits& limits = {}) {
  std::optional<Solution> best;
  std::optional<Rational> best_value;
  const SmallMatrix a = SmallMatrix::from(p.A);
  for_each_solution(
      a, p.b, Box{p.l, p.u},
      [&](const IntVector& x) {
        const Rational v = eval_objective_exact(p.objective, std::span<const std::int64_t>(x));
        if (!best_value || v < *best_value) {
          best_value = v;
          best = Solution{x, v.get_d()};
        }
      },
      limits);
  return best;
}

}  // namespace maple
