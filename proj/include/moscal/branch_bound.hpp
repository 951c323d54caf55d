#pragma once

// LP-based branch-and-bound for MILPs over the simplex core. Best-bound node
// selection (FIFO on ties), most-fractional branching (lowest index on ties),
// no cuts or presolve. Two warm-start channels: a basis for the root
// relaxation and a candidate solution injected as the initial incumbent.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "simplex.hpp"

namespace moscal {

struct MipOptions {
  std::optional<std::vector<double>> warm_solution;
  std::optional<WarmBasis> warm_basis;
  std::size_t node_limit = 1000000;
  double time_limit = 3600.0;  // seconds
  bool collect_pool = false;
};

enum class MipStatus { Optimal, Infeasible, LimitReached, Unbounded };

inline const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return "Optimal";
    case MipStatus::Infeasible: return "Infeasible";
    case MipStatus::LimitReached: return "LimitReached";
    case MipStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

struct MipOutcome {
  MipStatus status = MipStatus::Infeasible;
  std::optional<Solution> solution;
  double objective_value = kInf;
  std::size_t nodes = 0;
  std::size_t root_iterations = 0;
  std::size_t total_lp_iterations = 0;
  bool incumbent_injected = false;
  std::vector<Solution> pool;  // improving incumbents in discovery order
  std::optional<Basis> root_basis;
  /// Best open bound at each processed node, and the incumbent value after it.
  std::vector<double> bound_trace;
  std::vector<double> incumbent_trace;
};

enum class InjectionKind { Accepted, RejectedInfeasible, RejectedNonIntegral };

struct InjectionResult {
  InjectionKind kind = InjectionKind::RejectedInfeasible;
  double value = kInf;

  bool accepted() const { return kind == InjectionKind::Accepted; }
};

inline InjectionResult try_inject_incumbent(const Problem& problem, std::span<const double> objective,
                                            std::span<const double> candidate) {
  if (candidate.size() != problem.num_vars || objective.size() != problem.num_vars)
    throw DimensionError("candidate and objective must have num_vars entries");
  if (!satisfies_constraints(problem, candidate)) return {InjectionKind::RejectedInfeasible, kInf};
  if (!is_integral(problem, candidate)) return {InjectionKind::RejectedNonIntegral, kInf};
  return {InjectionKind::Accepted, dot(objective, candidate)};
}

namespace detail {

struct BoundChange {
  std::size_t var;
  double lower;
  double upper;
};

struct BbNode {
  double bound;
  std::size_t seq;
  std::vector<BoundChange> changes;
  Basis basis;
};

struct BbNodeOrder {
  bool operator()(const BbNode& a, const BbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

inline double prune_slack(double incumbent) {
  return std::isfinite(incumbent) ? 1e-9 * std::max(1.0, std::abs(incumbent)) : 0.0;
}

}  // namespace detail

inline MipOutcome solve_mip(const Problem& problem, std::span<const double> objective,
                            const MipOptions& options = {}) {
  if (objective.size() != problem.num_vars)
    throw DimensionError("objective row has " + std::to_string(objective.size()) +
                         " coefficients, expected " + std::to_string(problem.num_vars));
  if (options.node_limit == 0 || !(options.time_limit > 0.0))
    throw ValidationError("MIP limits must be positive");

  const auto started = std::chrono::steady_clock::now();
  MipOutcome out;
  double incumbent = kInf;

  if (options.warm_solution) {
    const auto inj = try_inject_incumbent(problem, objective, *options.warm_solution);
    if (inj.accepted()) {
      incumbent = inj.value;
      out.incumbent_injected = true;
      out.solution = make_solution(problem, *options.warm_solution);
      if (options.collect_pool) out.pool.push_back(*out.solution);
    }
  }

  LpView lp = make_lp_view(problem, objective);
  const std::vector<double> root_lower = lp.col_lower;
  const std::vector<double> root_upper = lp.col_upper;

  std::priority_queue<detail::BbNode, std::vector<detail::BbNode>, detail::BbNodeOrder> open;
  std::size_t seq = 0;
  bool limit_hit = false;
  bool root = true;
  open.push({-kInf, seq++, {}, {}});

  while (!open.empty()) {
    if (out.nodes >= options.node_limit ||
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() >
            options.time_limit) {
      limit_hit = true;
      break;
    }
    detail::BbNode node = open.top();
    open.pop();
    if (node.bound >= incumbent - detail::prune_slack(incumbent)) break;  // best-first: all remaining are worse

    lp.col_lower = root_lower;
    lp.col_upper = root_upper;
    for (const auto& c : node.changes) {
      lp.col_lower[c.var] = c.lower;
      lp.col_upper[c.var] = c.upper;
    }

    std::optional<WarmBasis> start;
    if (root) start = options.warm_basis;
    else start = WarmBasis{std::move(node.basis), ChangeKind::RhsOnly};
    LpOutcome rel = solve_lp(lp, start, Algorithm::Auto);

    ++out.nodes;
    out.total_lp_iterations += rel.iterations();
    out.bound_trace.push_back(node.bound);
    if (root) {
      out.root_iterations = rel.iterations();
      out.root_basis = rel.basis;
      root = false;
      if (rel.status == LpStatus::Unbounded) {
        out.status = MipStatus::Unbounded;
        out.incumbent_trace.push_back(incumbent);
        return out;
      }
    }
    if (rel.status == LpStatus::IterationLimit) {
      limit_hit = true;
      out.incumbent_trace.push_back(incumbent);
      break;
    }
    if (rel.status != LpStatus::Optimal ||
        rel.objective_value >= incumbent - detail::prune_slack(incumbent)) {
      out.incumbent_trace.push_back(incumbent);
      continue;
    }

    std::size_t branch_var = problem.num_vars;
    double best_frac = kIntegralityTol;
    for (std::size_t j = 0; j < problem.num_vars; ++j) {
      if (!problem.is_integer(j)) continue;
      const double f = rel.point[j] - std::floor(rel.point[j]);
      const double frac = std::min(f, 1.0 - f);
      if (frac > best_frac) {
        best_frac = frac;
        branch_var = j;
      }
    }

    if (branch_var == problem.num_vars) {
      std::vector<double> point = rel.point;
      for (std::size_t j = 0; j < problem.num_vars; ++j)
        if (problem.is_integer(j)) point[j] = std::round(point[j]);
      const double value = dot(objective, point);
      if (value < incumbent - detail::prune_slack(incumbent)) {
        incumbent = value;
        out.solution = make_solution(problem, std::move(point));
        if (options.collect_pool) out.pool.push_back(*out.solution);
      }
      out.incumbent_trace.push_back(incumbent);
      continue;
    }

    const double v = rel.point[branch_var];
    auto down = node.changes;
    down.push_back({branch_var, lp.col_lower[branch_var], std::floor(v)});
    auto up = std::move(node.changes);
    up.push_back({branch_var, std::ceil(v), lp.col_upper[branch_var]});
    open.push({rel.objective_value, seq++, std::move(down), rel.basis});
    open.push({rel.objective_value, seq++, std::move(up), std::move(rel.basis)});
    out.incumbent_trace.push_back(incumbent);
  }

  out.objective_value = incumbent;
  if (limit_hit) out.status = MipStatus::LimitReached;
  else out.status = out.solution ? MipStatus::Optimal : MipStatus::Infeasible;
  if (!out.solution) out.objective_value = kInf;
  return out;
}

}  // namespace moscal
