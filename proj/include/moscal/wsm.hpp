#pragma once

// Weighted-sum method: weight sampling, orderings, scalarization and the
// warm-started solve loop.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "branch_bound.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "pareto.hpp"
#include "random.hpp"
#include "report.hpp"

namespace moscal {

using Weight = std::vector<double>;

enum class WeightOrdering { Random, Lexicographic, Angle };
enum class WsmWarm { None, Previous };

inline const char* to_string(WeightOrdering o) {
  switch (o) {
    case WeightOrdering::Random: return "random";
    case WeightOrdering::Lexicographic: return "lex";
    case WeightOrdering::Angle: return "angle";
  }
  return "?";
}

inline std::optional<WeightOrdering> parse_ordering(const std::string& s) {
  if (s == "random") return WeightOrdering::Random;
  if (s == "lex" || s == "lexicographic") return WeightOrdering::Lexicographic;
  if (s == "angle") return WeightOrdering::Angle;
  return std::nullopt;
}

struct WsmConfig {
  std::size_t num_samples = 100;
  WeightOrdering ordering = WeightOrdering::Random;
  WsmWarm warm_start = WsmWarm::None;
  std::uint64_t seed = 1;
  MipOptions mip;  // limits only; warm fields are set per subproblem

  void validate() const {
    if (num_samples < 1) throw ValidationError("num_samples must be at least 1");
  }
};

inline constexpr double kMinWeight = 1e-9;

/// Uniform on the open simplex: p standard exponentials, normalized. Vectors
/// with a component below kMinWeight are drawn again.
inline std::vector<Weight> sample_weights(std::size_t p, std::size_t n, std::uint64_t seed) {
  if (p < 2) throw ValidationError("weights need at least 2 components");
  if (n < 1) throw ValidationError("at least one weight must be sampled");
  SplitMix64 rng(seed);
  std::vector<Weight> out;
  out.reserve(n);
  while (out.size() < n) {
    Weight w(p);
    double sum = 0.0;
    for (auto& v : w) {
      v = -std::log(rng.uniform_open01());
      sum += v;
    }
    for (auto& v : w) v /= sum;
    if (std::all_of(w.begin(), w.end(), [](double v) { return v >= kMinWeight; })) out.push_back(std::move(w));
  }
  return out;
}

/// Angle between w and the all-ones direction.
inline double angle_to_diagonal(const Weight& w) {
  double sum = 0.0, sq = 0.0;
  for (double v : w) {
    sum += v;
    sq += v * v;
  }
  const double c = sum / (std::sqrt(sq) * std::sqrt(static_cast<double>(w.size())));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

inline std::vector<std::size_t> order_weights(const std::vector<Weight>& weights, WeightOrdering strategy,
                                              std::uint64_t seed) {
  if (weights.empty()) throw ValidationError("cannot order an empty weight list");
  std::vector<std::size_t> idx(weights.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  switch (strategy) {
    case WeightOrdering::Random: {
      SplitMix64 rng(seed);
      for (std::size_t i = idx.size() - 1; i > 0; --i)
        std::swap(idx[i], idx[static_cast<std::size_t>(rng.next() % (i + 1))]);
      break;
    }
    case WeightOrdering::Lexicographic:
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::size_t a, std::size_t b) { return weights[a] < weights[b]; });
      break;
    case WeightOrdering::Angle: {
      std::vector<double> angle(weights.size());
      for (std::size_t i = 0; i < weights.size(); ++i) angle[i] = angle_to_diagonal(weights[i]);
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (angle[a] != angle[b]) return angle[a] < angle[b];
        return weights[a] < weights[b];
      });
      break;
    }
  }
  return idx;
}

inline std::vector<double> scalarized_objective(const Problem& problem, const Weight& w) {
  if (w.size() != problem.objective_count())
    throw DimensionError("weight has " + std::to_string(w.size()) + " components, expected " +
                         std::to_string(problem.objective_count()));
  std::vector<double> row(problem.num_vars, 0.0);
  for (std::size_t k = 0; k < w.size(); ++k)
    for (std::size_t j = 0; j < problem.num_vars; ++j) row[j] += w[k] * problem.objectives[k][j];
  return row;
}

inline CellStatus cell_status(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return CellStatus::Optimal;
    case MipStatus::Infeasible: return CellStatus::Infeasible;
    default: return CellStatus::Limit;
  }
}

inline RunReport run_wsm(const Problem& problem, const WsmConfig& config) {
  config.validate();
  const auto weights = sample_weights(problem.objective_count(), config.num_samples, config.seed);
  const auto order =
      order_weights(weights, config.ordering, Fnv1a().add(config.seed).add("weight-order").digest());

  RunReport report;
  report.config.instance = problem.name;
  report.config.method = "wsm";
  report.config.ordering = to_string(config.ordering);
  report.config.warm = config.warm_start == WsmWarm::Previous ? "previous" : "none";
  report.config.samples = config.num_samples;
  report.config.seed = config.seed;
  report.expected_subproblems = weights.size();

  std::vector<ArchiveEntry> optima;
  std::optional<std::vector<double>> prev_point;
  std::optional<Basis> prev_basis;

  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t s = order[pos];
    SubproblemRecord rec;
    rec.index = pos;
    rec.key = std::to_string(s + 1);
    rec.params = weights[s];

    MipOptions opt = config.mip;
    opt.warm_solution.reset();
    opt.warm_basis.reset();
    if (config.warm_start == WsmWarm::Previous) {
      if (prev_point) opt.warm_solution = prev_point;
      if (prev_basis) opt.warm_basis = WarmBasis{*prev_basis, ChangeKind::ObjectiveOnly};
      rec.candidate = prev_point.has_value();
    }
    rec.warm = warm_kind(opt.warm_solution.has_value(), opt.warm_basis.has_value());

    const auto started = std::chrono::steady_clock::now();
    MipOutcome out;
    try {
      out = solve_mip(problem, scalarized_objective(problem, weights[s]), opt);
    } catch (const NumericalFailure&) {
      out.status = MipStatus::LimitReached;
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    rec.status = cell_status(out.status);
    rec.injected = out.incumbent_injected;
    rec.lp_iters = out.total_lp_iterations;
    rec.nodes = out.nodes;
    if (out.root_basis) prev_basis = out.root_basis;
    if (out.status == MipStatus::Optimal) {
      rec.value = out.objective_value;
      rec.image = out.solution->objectives;
      optima.push_back({out.solution->objectives, *out.solution});
      prev_point = out.solution->point;
    }
    report.records.push_back(std::move(rec));
  }
  report.archive = filter_nondominated(std::move(optima));
  report.finalize();
  report.validate();
  return report;
}

}  // namespace moscal
