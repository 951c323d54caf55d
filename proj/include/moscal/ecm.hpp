#pragma once

// Augmented epsilon-constraint method: f_1 is retained, f_2..f_p are bounded
// by grid levels, and rho * (f_2 + ... + f_p) is added to the objective so
// every subproblem optimum is efficient.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <map>
#include <string>
#include <vector>

#include "branch_bound.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "pareto.hpp"
#include "report.hpp"
#include "wsm.hpp"

namespace moscal {

struct IdealNadirEstimate {
  ObjectiveVector ideal;
  ObjectiveVector nadir_estimate;
  std::vector<ObjectiveVector> table;  // row k: image of the f_k minimizer
};

/// Row k minimizes f_k, then the sum of the other objectives with f_k held at
/// its minimum, so each row is the image of an efficient point.
inline IdealNadirEstimate payoff_table(const Problem& problem, const MipOptions& limits = {}) {
  const std::size_t p = problem.objective_count();
  IdealNadirEstimate est;
  for (std::size_t k = 0; k < p; ++k) {
    const auto first = solve_mip(problem, problem.objectives[k], limits);
    if (first.status == MipStatus::Infeasible) throw InfeasibleModel("feasible set is empty");
    if (first.status != MipStatus::Optimal)
      throw LimitExceeded("payoff table solve for objective " + std::to_string(k + 1) + " did not finish");

    Problem fixed = problem;
    LinearConstraint hold;
    for (std::size_t j = 0; j < problem.num_vars; ++j) {
      if (problem.objectives[k][j] == 0.0) continue;
      hold.index.push_back(j);
      hold.value.push_back(problem.objectives[k][j]);
    }
    hold.sense = Sense::LessEqual;
    hold.rhs = first.objective_value + 1e-9 * std::max(1.0, std::abs(first.objective_value));
    fixed.constraints.push_back(std::move(hold));
    std::vector<double> rest(problem.num_vars, 0.0);
    for (std::size_t i = 0; i < p; ++i)
      if (i != k)
        for (std::size_t j = 0; j < problem.num_vars; ++j) rest[j] += problem.objectives[i][j];
    MipOptions second_opt = limits;
    second_opt.warm_solution = first.solution->point;
    const auto second = solve_mip(fixed, rest, second_opt);
    const auto& x = second.status == MipStatus::Optimal ? second.solution->point : first.solution->point;
    est.table.push_back(evaluate_objectives(problem, x));
    est.table.back()[k] = first.objective_value;
  }
  est.ideal.resize(p);
  est.nadir_estimate.assign(p, -kInf);
  for (std::size_t k = 0; k < p; ++k) {
    est.ideal[k] = est.table[k][k];
    for (std::size_t r = 0; r < p; ++r) est.nadir_estimate[k] = std::max(est.nadir_estimate[k], est.table[r][k]);
  }
  return est;
}

/// Levels for f_2..f_p; levels[d] belongs to objective d + 2 and ascends.
struct EpsilonGrid {
  std::vector<std::vector<double>> levels;
  std::size_t m = 0;  // levels per objective for equidistant grids, 0 otherwise

  std::size_t dimension() const { return levels.size(); }
  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d;
    for (const auto& l : levels) d.push_back(l.size());
    return d;
  }
  std::size_t size() const {
    std::size_t s = 1;
    for (const auto& l : levels) s *= l.size();
    return s;
  }
  std::vector<double> epsilon(const std::vector<std::size_t>& cell) const {
    std::vector<double> e(cell.size());
    for (std::size_t d = 0; d < cell.size(); ++d) e[d] = levels[d][cell[d]];
    return e;
  }
};

/// ideal + j (nadir - ideal) / m for j = 1..m; a single level sits at the nadir.
inline EpsilonGrid build_epsilon_grid(const IdealNadirEstimate& est, std::size_t m) {
  if (m < 1) throw ValidationError("grid needs at least one level");
  EpsilonGrid g;
  g.m = m;
  for (std::size_t k = 1; k < est.ideal.size(); ++k) {
    std::vector<double> lv(m);
    const double lo = est.ideal[k], hi = est.nadir_estimate[k];
    for (std::size_t j = 1; j <= m; ++j)
      lv[j - 1] = j == m ? hi : lo + static_cast<double>(j) * (hi - lo) / static_cast<double>(m);
    g.levels.push_back(std::move(lv));
  }
  return g;
}

/// Every integer level from ceil(lower_k) to floor(upper_k), for k >= 2.
inline EpsilonGrid integer_range_grid(const ObjectiveVector& lower, const ObjectiveVector& upper) {
  if (lower.size() != upper.size()) throw DimensionError("range bounds differ in length");
  EpsilonGrid g;
  for (std::size_t k = 1; k < lower.size(); ++k) {
    std::vector<double> lv;
    for (double v = std::ceil(lower[k]); v <= std::floor(upper[k]); v += 1.0) lv.push_back(v);
    if (lv.empty()) throw ValidationError("empty integer range for objective " + std::to_string(k + 1));
    g.levels.push_back(std::move(lv));
  }
  return g;
}

struct OrderSignature {
  std::vector<bool> ascending;  // entry d for objective d + 2

  std::string label() const {
    std::string s = "o";
    for (bool a : ascending) s += a ? '+' : '-';
    return s;
  }
  bool operator==(const OrderSignature&) const = default;

  static OrderSignature all_ascending(std::size_t dims) { return {std::vector<bool>(dims, true)}; }

  static OrderSignature parse(const std::string& text) {
    if (text.size() < 2 || text[0] != 'o') throw ValidationError("signature must look like o+-: " + text);
    OrderSignature s;
    for (std::size_t i = 1; i < text.size(); ++i) {
      if (text[i] == '+') s.ascending.push_back(true);
      else if (text[i] == '-') s.ascending.push_back(false);
      else throw ValidationError("signature must look like o+-: " + text);
    }
    return s;
  }
};

using Cell = std::vector<std::size_t>;

/// Nested traversal, first constrained objective varying fastest.
inline std::vector<Cell> traversal_order(const std::vector<std::size_t>& dims, const OrderSignature& sig) {
  if (sig.ascending.size() != dims.size())
    throw DimensionError("signature " + sig.label() + " does not match a " + std::to_string(dims.size()) +
                         "-dimensional grid");
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<Cell> out;
  out.reserve(total);
  Cell counter(dims.size(), 0);
  for (std::size_t t = 0; t < total; ++t) {
    Cell c(dims.size());
    for (std::size_t d = 0; d < dims.size(); ++d)
      c[d] = sig.ascending[d] ? counter[d] : dims[d] - 1 - counter[d];
    out.push_back(std::move(c));
    for (std::size_t d = 0; d < dims.size(); ++d) {
      if (++counter[d] < dims[d]) break;
      counter[d] = 0;
    }
  }
  return out;
}

inline std::vector<Cell> traversal_order(const EpsilonGrid& grid, const OrderSignature& sig) {
  return traversal_order(grid.dims(), sig);
}

struct Subproblem {
  std::vector<double> objective;
  std::vector<LinearConstraint> epsilon_rows;
};

inline Subproblem build_subproblem(const Problem& problem, const std::vector<double>& eps, double rho) {
  const std::size_t p = problem.objective_count();
  if (eps.size() != p - 1)
    throw DimensionError("epsilon vector has " + std::to_string(eps.size()) + " entries, expected " +
                         std::to_string(p - 1));
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  Subproblem sub;
  sub.objective = problem.objectives[0];
  for (std::size_t k = 1; k < p; ++k) {
    LinearConstraint row;
    for (std::size_t j = 0; j < problem.num_vars; ++j) {
      const double c = problem.objectives[k][j];
      sub.objective[j] += rho * c;
      if (c == 0.0) continue;
      row.index.push_back(j);
      row.value.push_back(c);
    }
    row.sense = Sense::LessEqual;
    row.rhs = eps[k - 1];
    row.epsilon_of = k;
    sub.epsilon_rows.push_back(std::move(row));
  }
  return sub;
}

/// Integer objectives: 1 / (2 (1 + sum of constrained ranges)), so the
/// augmentation can never outweigh one unit of f_1 and the subproblem still
/// minimizes f_1 first. Otherwise a fixed small value.
inline double default_rho(const Problem& problem, const ObjectiveVector& ideal, const EpsilonGrid& grid) {
  if (!has_integer_objectives(problem)) return std::clamp(1e-4, 1e-8, 1e-3);
  double range = 0.0;
  for (std::size_t d = 0; d < grid.dimension(); ++d)
    range += std::max(0.0, grid.levels[d].back() - ideal[d + 1]);
  return 1.0 / (2.0 * (1.0 + range));
}

enum class WarmPolicy { None, Weak, Strong };

inline const char* to_string(WarmPolicy w) {
  switch (w) {
    case WarmPolicy::None: return "none";
    case WarmPolicy::Weak: return "weak";
    case WarmPolicy::Strong: return "strong";
  }
  return "?";
}

inline std::optional<WarmPolicy> parse_warm_policy(const std::string& s) {
  if (s == "none") return WarmPolicy::None;
  if (s == "weak") return WarmPolicy::Weak;
  if (s == "strong") return WarmPolicy::Strong;
  return std::nullopt;
}

/// Optima of earlier subproblems in discovery order, without repeated points.
class SolutionPool {
 public:
  void add(const Solution& s) {
    auto [it, fresh] = seen_.emplace(s.point, entries_.size());
    if (fresh) entries_.push_back(s);
    latest_ = it->second;
  }
  const std::vector<Solution>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  /// The entry added (or re-added) last.
  const Solution& most_recent() const { return entries_.at(latest_); }

 private:
  std::vector<Solution> entries_;
  std::map<std::vector<double>, std::size_t> seen_;
  std::size_t latest_ = 0;
};

inline bool fits_epsilon(const Solution& s, const std::vector<double>& eps) {
  for (std::size_t d = 0; d < eps.size(); ++d)
    if (s.objectives[d + 1] > eps[d] + kFeasibilityTol) return false;
  return true;
}

inline std::optional<Solution> select_warm_start(const SolutionPool& pool, const std::vector<double>& eps,
                                                 WarmPolicy policy, const std::vector<double>& current_objective) {
  if (policy == WarmPolicy::None || pool.empty()) return std::nullopt;
  if (policy == WarmPolicy::Weak) {
    const auto& last = pool.most_recent();
    if (fits_epsilon(last, eps)) return last;
    return std::nullopt;
  }
  const Solution* best = nullptr;
  double best_value = kInf;
  for (const auto& s : pool.entries()) {
    if (!fits_epsilon(s, eps)) continue;
    const double v = dot(current_objective, s.point);
    if (v < best_value) {
      best_value = v;
      best = &s;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

inline bool componentwise_le(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t d = 0; d < a.size(); ++d)
    if (a[d] > b[d]) return false;
  return true;
}

/// Antichain of maximal epsilon vectors known to be infeasible.
struct InfeasibilityStore {
  std::vector<std::vector<double>> maximal_infeasible;
};

inline bool propagate_infeasibility(const InfeasibilityStore& store, const std::vector<double>& eps) {
  for (const auto& v : store.maximal_infeasible)
    if (componentwise_le(eps, v)) return true;
  return false;
}

inline void record_infeasible(InfeasibilityStore& store, const std::vector<double>& eps) {
  if (propagate_infeasibility(store, eps)) return;
  std::erase_if(store.maximal_infeasible, [&](const std::vector<double>& v) { return componentwise_le(v, eps); });
  store.maximal_infeasible.push_back(eps);
}

struct EcmConfig {
  std::size_t m = 10;
  std::optional<OrderSignature> signature;  // all ascending when absent
  WarmPolicy warm = WarmPolicy::None;
  bool propagate = false;
  std::optional<double> rho;
  std::uint64_t seed = 1;
  std::optional<EpsilonGrid> grid;                // replaces the equidistant grid
  std::optional<IdealNadirEstimate> estimate;     // reuses a computed payoff table
  MipOptions mip;                                 // limits only

  void validate() const {
    if (m < 1 && !grid) throw ValidationError("grid needs at least one level");
    if (rho && !(*rho > 0.0)) throw ValidationError("rho must be positive");
  }
};

struct EcmReport : RunReport {
  IdealNadirEstimate estimate;
  EpsilonGrid grid;
  OrderSignature signature;
  std::vector<Cell> cells;  // per record, level indices
};

inline std::string cell_key(const Cell& c) {
  std::string s;
  for (std::size_t d = 0; d < c.size(); ++d) s += (d ? ":" : "") + std::to_string(c[d] + 1);
  return s;
}

/// Problem with the epsilon rows appended; the rows are the last p - 1.
inline Problem with_rows(const Problem& problem, const std::vector<LinearConstraint>& rows) {
  Problem out = problem;
  out.constraints.insert(out.constraints.end(), rows.begin(), rows.end());
  return out;
}

namespace detail {

inline std::vector<double> as_point(const Cell& c) { return {c.begin(), c.end()}; }

}  // namespace detail

inline EcmReport run_ecm(const Problem& problem, const EcmConfig& config) {
  config.validate();
  const std::size_t p = problem.objective_count();
  EcmReport report;
  report.estimate = config.estimate ? *config.estimate : payoff_table(problem, config.mip);
  report.grid = config.grid ? *config.grid : build_epsilon_grid(report.estimate, config.m);
  if (report.grid.dimension() != p - 1) throw DimensionError("grid dimension does not match p - 1");
  report.signature = config.signature ? *config.signature : OrderSignature::all_ascending(p - 1);
  const double rho = config.rho ? *config.rho : default_rho(problem, report.estimate.ideal, report.grid);

  report.config.instance = problem.name;
  report.config.method = "ecm";
  report.config.ordering = report.signature.label();
  report.config.warm = to_string(config.warm);
  report.config.propagate = config.propagate;
  report.config.grid = config.grid ? 0 : config.m;
  report.config.rho = rho;
  report.config.seed = config.seed;
  report.grid_dims = report.grid.dims();

  const auto order = traversal_order(report.grid, report.signature);
  report.expected_subproblems = order.size();

  auto sub = build_subproblem(problem, report.grid.epsilon(order.front()), rho);
  Problem model = with_rows(problem, sub.epsilon_rows);
  const std::size_t first_eps_row = problem.constraints.size();

  SolutionPool pool;
  InfeasibilityStore store;
  std::vector<std::vector<double>> minimal_feasible;  // antichain of solved feasible cells
  std::optional<Cell> previous_cell;
  bool previous_feasible = false;
  std::optional<Basis> previous_basis;
  std::vector<ArchiveEntry> optima;

  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const Cell& cell = order[pos];
    const auto eps = report.grid.epsilon(cell);
    const auto at = detail::as_point(cell);
    SubproblemRecord rec;
    rec.index = pos;
    rec.key = cell_key(cell);
    rec.params = eps;

    // Cells are compared by level index; levels ascend, so index order implies
    // epsilon order and the checks stay sound on degenerate grids.
    rec.detected = propagate_infeasibility(store, at);
    if (rec.detected && config.propagate) {
      rec.status = CellStatus::SkippedByPropagation;
      report.records.push_back(std::move(rec));
      report.cells.push_back(cell);
      previous_cell = cell;
      previous_feasible = false;
      continue;
    }

    bool guaranteed = false;
    if (config.warm == WarmPolicy::Weak)
      guaranteed = previous_cell && previous_feasible && componentwise_le(detail::as_point(*previous_cell), at);
    else if (config.warm == WarmPolicy::Strong)
      guaranteed = std::any_of(minimal_feasible.begin(), minimal_feasible.end(),
                               [&](const std::vector<double>& f) { return componentwise_le(f, at); });
    rec.candidate = guaranteed;

    for (std::size_t d = 0; d < eps.size(); ++d) model.constraints[first_eps_row + d].rhs = eps[d];
    MipOptions opt = config.mip;
    opt.warm_solution.reset();
    opt.warm_basis.reset();
    opt.collect_pool = false;
    if (config.warm != WarmPolicy::None) {
      if (auto cand = select_warm_start(pool, eps, config.warm, sub.objective)) opt.warm_solution = cand->point;
      if (previous_basis) opt.warm_basis = WarmBasis{*previous_basis, ChangeKind::RhsOnly};
    }
    rec.warm = warm_kind(opt.warm_solution.has_value(), opt.warm_basis.has_value());

    const auto started = std::chrono::steady_clock::now();
    MipOutcome out;
    try {
      out = solve_mip(model, sub.objective, opt);
    } catch (const NumericalFailure&) {
      out.status = MipStatus::LimitReached;
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    rec.status = cell_status(out.status);
    rec.injected = out.incumbent_injected;
    rec.lp_iters = out.total_lp_iterations;
    rec.nodes = out.nodes;
    if (out.root_basis) previous_basis = out.root_basis;

    previous_cell = cell;
    previous_feasible = out.status == MipStatus::Optimal;
    if (out.status == MipStatus::Optimal) {
      Solution s = make_solution(problem, out.solution->point);
      rec.value = out.objective_value;
      rec.image = s.objectives;
      pool.add(s);
      optima.push_back({s.objectives, s});
      if (!std::any_of(minimal_feasible.begin(), minimal_feasible.end(),
                       [&](const std::vector<double>& f) { return componentwise_le(f, at); })) {
        std::erase_if(minimal_feasible, [&](const std::vector<double>& f) { return componentwise_le(at, f); });
        minimal_feasible.push_back(at);
      }
    } else if (out.status == MipStatus::Infeasible) {
      record_infeasible(store, at);
    }
    report.records.push_back(std::move(rec));
    report.cells.push_back(cell);
  }
  report.archive = filter_nondominated(std::move(optima));
  report.finalize();
  report.validate();
  return report;
}

}  // namespace moscal
