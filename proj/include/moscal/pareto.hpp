#pragma once

// Dominance, nondominated archives, supportedness and the brute-force
// enumeration oracle. Minimization throughout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "simplex.hpp"

namespace moscal {

inline constexpr double kArchiveTol = 1e-9;
inline constexpr double kSupportDelta = 1e-6;
inline constexpr std::uint64_t kOracleGuard = std::uint64_t{1} << 20;

inline bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("objective vectors differ in length");
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strict = true;
  }
  return strict;
}

/// dominates() with a tolerance band: a must be no worse than b + tol
/// everywhere and better than b - tol somewhere.
inline bool dominates_within(std::span<const double> a, std::span<const double> b, double tol) {
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k] + tol) return false;
    if (a[k] < b[k] - tol) strict = true;
  }
  return strict;
}

inline bool same_point(std::span<const double> a, std::span<const double> b, double tol) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) > tol) return false;
  return true;
}

inline bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct ArchiveEntry {
  ObjectiveVector objectives;
  Solution solution;
};

/// Mutually nondominated entries, deduplicated by objective vector and kept in
/// lexicographic order of the objective vectors.
class Archive {
 public:
  explicit Archive(double tolerance = kArchiveTol) : tol_(tolerance) {}

  /// Adds the entry unless an existing one dominates or duplicates it;
  /// existing entries it dominates are dropped. Returns whether it was added.
  bool insert(ArchiveEntry entry) {
    for (const auto& e : entries_)
      if (same_point(e.objectives, entry.objectives, tol_) ||
          dominates_within(e.objectives, entry.objectives, tol_))
        return false;
    std::erase_if(entries_, [&](const ArchiveEntry& e) {
      return dominates_within(entry.objectives, e.objectives, tol_);
    });
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry,
                                [](const ArchiveEntry& a, const ArchiveEntry& b) {
                                  return lex_less(a.objectives, b.objectives);
                                });
    entries_.insert(pos, std::move(entry));
    return true;
  }

  const std::vector<ArchiveEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double tolerance() const { return tol_; }

  std::vector<ObjectiveVector> objective_vectors() const {
    std::vector<ObjectiveVector> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.objectives);
    return out;
  }

  bool contains(std::span<const double> y) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const ArchiveEntry& e) { return same_point(e.objectives, y, tol_); });
  }

  /// Same objective vectors within tolerance, in the same (lexicographic) order.
  bool same_front(const Archive& other) const {
    if (size() != other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (!same_point(entries_[i].objectives, other.entries_[i].objectives, std::max(tol_, other.tol_)))
        return false;
    return true;
  }

 private:
  double tol_;
  std::vector<ArchiveEntry> entries_;
};

inline Archive filter_nondominated(std::vector<ArchiveEntry> points, double tolerance = kArchiveTol) {
  // Sorting first makes the surviving representative of each duplicate
  // group, and hence the result, independent of input order up to ties.
  std::stable_sort(points.begin(), points.end(), [](const ArchiveEntry& a, const ArchiveEntry& b) {
    return lex_less(a.objectives, b.objectives);
  });
  Archive archive(tolerance);
  for (auto& p : points) archive.insert(std::move(p));
  return archive;
}

/// True iff some weight vector w with w_k >= delta and sum 1 makes y a
/// minimizer of w.z over `front`. Decided by a small feasibility LP in w.
inline bool is_supported(std::span<const double> y, std::span<const ObjectiveVector> front,
                         double delta = kSupportDelta) {
  const std::size_t p = y.size();
  Problem lp_model;
  lp_model.num_vars = p;
  lp_model.var_types.assign(p, VarType::Continuous);
  lp_model.lower.assign(p, delta);
  lp_model.upper.assign(p, 1.0);
  LinearConstraint simplex_row;
  for (std::size_t k = 0; k < p; ++k) {
    simplex_row.index.push_back(k);
    simplex_row.value.push_back(1.0);
  }
  simplex_row.sense = Sense::Equal;
  simplex_row.rhs = 1.0;
  lp_model.constraints.push_back(simplex_row);
  for (const auto& z : front) {
    if (z.size() != p) throw DimensionError("front member has wrong dimension");
    if (same_point(z, y, kArchiveTol)) continue;
    LinearConstraint row;
    for (std::size_t k = 0; k < p; ++k) {
      const double diff = y[k] - z[k];
      if (diff == 0.0) continue;
      row.index.push_back(k);
      row.value.push_back(diff);
    }
    if (row.index.empty()) continue;
    row.sense = Sense::LessEqual;
    row.rhs = kArchiveTol;
    lp_model.constraints.push_back(std::move(row));
  }
  const std::vector<double> zero(p, 0.0);
  return solve_lp(make_lp_view(lp_model, zero)).status == LpStatus::Optimal;
}

namespace detail {

/// Depth-first enumeration of integer assignments with row-activity pruning.
class Enumerator {
 public:
  explicit Enumerator(const Problem& p) : p_(p) {
    std::uint64_t count = 1;
    for (std::size_t j = 0; j < p.num_vars; ++j) {
      if (!p.is_integer(j)) {
        continuous_.push_back(j);
        continue;
      }
      if (!std::isfinite(p.lower[j]) || !std::isfinite(p.upper[j]))
        throw TooLarge("oracle needs finite bounds on integer variable " + std::to_string(j));
      const double lo = std::ceil(p.lower[j] - kIntegralityTol);
      const double hi = std::floor(p.upper[j] + kIntegralityTol);
      const double size = std::max(0.0, hi - lo + 1.0);
      if (size > static_cast<double>(kOracleGuard) ||
          static_cast<double>(count) * size > static_cast<double>(kOracleGuard))
        throw TooLarge("oracle enumeration exceeds 2^20 assignments");
      count *= static_cast<std::uint64_t>(size);
      integers_.push_back(j);
      lo_.push_back(lo);
      hi_.push_back(hi);
    }
    for (std::size_t j : continuous_)
      for (const auto& row : p.objectives)
        if (row[j] != 0.0)
          throw TooLarge("oracle cannot enumerate objectives depending on continuous variables");

    const std::size_t m = p.constraints.size();
    const std::size_t d = integers_.size();
    coef_.assign(m, std::vector<double>(p.num_vars, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = p.constraints[i];
      for (std::size_t t = 0; t < row.index.size(); ++t) coef_[i][row.index[t]] = row.value[t];
    }
    // Activity range still reachable from integer positions >= t plus every
    // continuous column.
    suffix_min_.assign(m, std::vector<double>(d + 1, 0.0));
    suffix_max_.assign(m, std::vector<double>(d + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      double cmin = 0.0, cmax = 0.0;
      for (std::size_t j : continuous_) {
        const double a = coef_[i][j];
        if (a == 0.0) continue;
        cmin += a > 0 ? a * p.lower[j] : a * p.upper[j];
        cmax += a > 0 ? a * p.upper[j] : a * p.lower[j];
      }
      suffix_min_[i][d] = cmin;
      suffix_max_[i][d] = cmax;
      for (std::size_t t = d; t-- > 0;) {
        const double a = coef_[i][integers_[t]];
        suffix_min_[i][t] = suffix_min_[i][t + 1] + std::min(a * lo_[t], a * hi_[t]);
        suffix_max_[i][t] = suffix_max_[i][t + 1] + std::max(a * lo_[t], a * hi_[t]);
      }
    }
    activity_.assign(m, 0.0);
    point_.assign(p.num_vars, 0.0);
  }

  template <typename Visit>
  void run(Visit&& visit) {
    descend(0, visit);
  }

 private:
  bool can_satisfy(std::size_t t) const {
    for (std::size_t i = 0; i < p_.constraints.size(); ++i) {
      const auto& row = p_.constraints[i];
      const double lo = activity_[i] + suffix_min_[i][t];
      const double hi = activity_[i] + suffix_max_[i][t];
      if (row.sense != Sense::GreaterEqual && lo > row.rhs + kFeasibilityTol) return false;
      if (row.sense != Sense::LessEqual && hi < row.rhs - kFeasibilityTol) return false;
    }
    return true;
  }

  template <typename Visit>
  void descend(std::size_t t, Visit& visit) {
    if (!can_satisfy(t)) return;
    if (t == integers_.size()) {
      complete(visit);
      return;
    }
    const std::size_t j = integers_[t];
    for (double v = lo_[t]; v <= hi_[t]; v += 1.0) {
      point_[j] = v;
      for (std::size_t i = 0; i < activity_.size(); ++i) activity_[i] += coef_[i][j] * v;
      descend(t + 1, visit);
      for (std::size_t i = 0; i < activity_.size(); ++i) activity_[i] -= coef_[i][j] * v;
    }
    point_[j] = 0.0;
  }

  template <typename Visit>
  void complete(Visit& visit) {
    if (continuous_.empty()) {
      visit(point_);
      return;
    }
    // Fix the integer part and ask the LP for any continuous completion.
    Problem fixed = p_;
    for (std::size_t j : integers_) fixed.lower[j] = fixed.upper[j] = point_[j];
    const std::vector<double> zero(p_.num_vars, 0.0);
    const auto out = solve_lp(make_lp_view(fixed, zero));
    if (out.status != LpStatus::Optimal) return;
    auto full = out.point;
    for (std::size_t j : integers_) full[j] = point_[j];
    visit(full);
  }

  const Problem& p_;
  std::vector<std::size_t> integers_, continuous_;
  std::vector<double> lo_, hi_;
  std::vector<std::vector<double>> coef_, suffix_min_, suffix_max_;
  std::vector<double> activity_, point_;
};

}  // namespace detail

/// Exact nondominated set of f(X) by enumerating every integer assignment.
/// Continuous variables are allowed only with zero objective coefficients;
/// each integer assignment is then completed by an LP feasibility solve.
inline Archive brute_force_oracle(const Problem& problem) {
  detail::Enumerator en(problem);
  Archive archive;
  en.run([&](const std::vector<double>& x) {
    if (!satisfies_constraints(problem, x)) return;
    auto sol = make_solution(problem, x);
    auto obj = sol.objectives;
    archive.insert({std::move(obj), std::move(sol)});
  });
  return archive;
}

/// Every feasible image point (with duplicates), in enumeration order.
inline std::vector<ObjectiveVector> enumerate_images(const Problem& problem) {
  detail::Enumerator en(problem);
  std::vector<ObjectiveVector> out;
  en.run([&](const std::vector<double>& x) {
    if (satisfies_constraints(problem, x)) out.push_back(evaluate_objectives(problem, x));
  });
  return out;
}

inline std::string format_number(double v) {
  if (v == std::round(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Columns f1..fp then x1..xn, rows in lexicographic objective order.
inline void write_archive_csv(std::ostream& out, const Archive& archive, std::size_t p,
                              std::size_t num_vars) {
  for (std::size_t k = 0; k < p; ++k) out << (k ? "," : "") << 'f' << (k + 1);
  for (std::size_t j = 0; j < num_vars; ++j) out << ",x" << (j + 1);
  out << '\n';
  for (const auto& e : archive.entries()) {
    for (std::size_t k = 0; k < p; ++k) out << (k ? "," : "") << format_number(e.objectives[k]);
    for (std::size_t j = 0; j < num_vars; ++j)
      out << ',' << (j < e.solution.point.size() ? format_number(e.solution.point[j]) : "");
    out << '\n';
  }
}

}  // namespace moscal
