#pragma once

// Bounded-variable revised simplex (primal and dual) over a dense LU
// factorization of the basis with product-form updates.
//
// Every row i of the LP carries a logical column r_i = a_i x with bounds taken
// from the row sense, so the working system is  [A | -I] (x, r) = 0  with
// bounds on all n + m columns. Right-hand-side changes and branching both
// become bound changes, which keeps an old basis dual feasible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace moscal {

namespace lp_tol {
inline constexpr double kPrimalFeasibility = 1e-7;
inline constexpr double kOptimality = 1e-9;
inline constexpr double kPivot = 1e-10;
inline constexpr double kZeroSnap = 1e-11;
inline constexpr double kRefactorResidual = 1e-8;
}  // namespace lp_tol

/// A linear program with a single active objective row.
struct LpView {
  std::size_t num_cols = 0;
  std::size_t num_rows = 0;
  std::vector<double> matrix;  // column-major, num_rows x num_cols
  std::vector<double> cost;
  std::vector<double> col_lower, col_upper;
  std::vector<double> row_lower, row_upper;

  std::span<const double> column(std::size_t j) const {
    return {matrix.data() + j * num_rows, num_rows};
  }

  double& at(std::size_t row, std::size_t col) { return matrix[col * num_rows + row]; }
  double at(std::size_t row, std::size_t col) const { return matrix[col * num_rows + row]; }

  void add_row(const LinearConstraint& row) {
    const std::size_t m = num_rows + 1;
    std::vector<double> grown(m * num_cols, 0.0);
    for (std::size_t j = 0; j < num_cols; ++j)
      std::copy_n(matrix.begin() + static_cast<std::ptrdiff_t>(j * num_rows), num_rows,
                  grown.begin() + static_cast<std::ptrdiff_t>(j * m));
    for (std::size_t t = 0; t < row.index.size(); ++t) grown[row.index[t] * m + num_rows] = row.value[t];
    matrix = std::move(grown);
    num_rows = m;
    row_lower.push_back(row.sense == Sense::LessEqual ? -kInf : row.rhs);
    row_upper.push_back(row.sense == Sense::GreaterEqual ? kInf : row.rhs);
  }
};

inline LpView make_lp_view(const Problem& problem, std::span<const double> objective,
                           std::span<const LinearConstraint> extra_rows = {}) {
  if (objective.size() != problem.num_vars)
    throw DimensionError("objective row has " + std::to_string(objective.size()) +
                         " coefficients, expected " + std::to_string(problem.num_vars));
  LpView lp;
  lp.num_cols = problem.num_vars;
  lp.num_rows = problem.constraints.size() + extra_rows.size();
  lp.matrix.assign(lp.num_rows * lp.num_cols, 0.0);
  lp.cost.assign(objective.begin(), objective.end());
  lp.col_lower = problem.lower;
  lp.col_upper = problem.upper;
  std::size_t i = 0;
  auto put = [&](const LinearConstraint& row) {
    for (std::size_t t = 0; t < row.index.size(); ++t) lp.at(i, row.index[t]) = row.value[t];
    lp.row_lower.push_back(row.sense == Sense::LessEqual ? -kInf : row.rhs);
    lp.row_upper.push_back(row.sense == Sense::GreaterEqual ? kInf : row.rhs);
    ++i;
  };
  for (const auto& row : problem.constraints) put(row);
  for (const auto& row : extra_rows) put(row);
  return lp;
}

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, Free };

/// Simplex basis over the n structural and m logical columns.
struct Basis {
  std::vector<std::size_t> basic;  // column index per row position
  std::vector<VarStatus> status;   // per column, Basic for members of `basic`

  bool empty() const { return basic.empty() && status.empty(); }
  friend bool operator==(const Basis&, const Basis&) = default;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
enum class Algorithm { Primal, Dual, Auto };
enum class ChangeKind { ObjectiveOnly, RhsOnly, Other };
enum class WarmStartKind { StartPrimal, StartDual, ColdStart };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> point;  // structural values
  double objective_value = 0.0;
  Basis basis;
  std::size_t iterations_primal = 0;
  std::size_t iterations_dual = 0;
  Algorithm algorithm_used = Algorithm::Primal;

  std::size_t iterations() const { return iterations_primal + iterations_dual; }
};

struct WarmBasis {
  Basis basis;
  ChangeKind change = ChangeKind::Other;
};

struct LpOptions {
  std::size_t iteration_limit = 100000;
  std::size_t refactor_interval = 50;
  std::size_t degenerate_before_bland = 1000;
};

/// What the previous optimal basis is still good for after `change`.
inline WarmStartKind classify_warm_basis(const Basis& /*old_basis*/, ChangeKind change) {
  switch (change) {
    case ChangeKind::ObjectiveOnly: return WarmStartKind::StartPrimal;
    case ChangeKind::RhsOnly: return WarmStartKind::StartDual;
    case ChangeKind::Other: return WarmStartKind::ColdStart;
  }
  return WarmStartKind::ColdStart;
}

/// Diff of two consecutive LPs. Bound changes count as right-hand-side changes.
inline ChangeKind classify_change(const LpView& before, const LpView& after) {
  if (before.num_cols != after.num_cols || before.num_rows != after.num_rows ||
      before.matrix != after.matrix)
    return ChangeKind::Other;
  const bool cost_changed = before.cost != after.cost;
  const bool rhs_changed = before.row_lower != after.row_lower ||
                           before.row_upper != after.row_upper ||
                           before.col_lower != after.col_lower ||
                           before.col_upper != after.col_upper;
  if (cost_changed && rhs_changed) return ChangeKind::Other;
  if (rhs_changed) return ChangeKind::RhsOnly;
  return ChangeKind::ObjectiveOnly;
}

namespace detail {

class BasisFactor {
 public:
  void reset(std::size_t m) {
    m_ = m;
    lu_.assign(m * m, 0.0);
    perm_.resize(m);
    etas_.clear();
    eta_rows_.clear();
  }

  /// Factorizes the m x m matrix given row-major in `dense`. Returns the
  /// position of the first column without an acceptable pivot, or m.
  std::size_t factor(std::vector<double> dense) {
    lu_ = std::move(dense);
    etas_.clear();
    eta_rows_.clear();
    for (std::size_t i = 0; i < m_; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < m_; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu_[k * m_ + k]);
      for (std::size_t i = k + 1; i < m_; ++i) {
        const double v = std::abs(lu_[i * m_ + k]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < lp_tol::kZeroSnap) return k;
      if (piv != k) {
        std::swap_ranges(lu_.begin() + static_cast<std::ptrdiff_t>(k * m_),
                         lu_.begin() + static_cast<std::ptrdiff_t>((k + 1) * m_),
                         lu_.begin() + static_cast<std::ptrdiff_t>(piv * m_));
        std::swap(perm_[k], perm_[piv]);
      }
      const double pivot = lu_[k * m_ + k];
      for (std::size_t i = k + 1; i < m_; ++i) {
        double& l = lu_[i * m_ + k];
        if (l == 0.0) continue;
        l /= pivot;
        for (std::size_t c = k + 1; c < m_; ++c) lu_[i * m_ + c] -= l * lu_[k * m_ + c];
      }
    }
    return m_;
  }

  /// Original row index sitting at elimination position `pos`.
  std::size_t row_at(std::size_t pos) const { return perm_[pos]; }

  /// Solves B v = b in place.
  void ftran(std::vector<double>& v) const {
    std::vector<double> z(m_);
    for (std::size_t i = 0; i < m_; ++i) z[i] = v[perm_[i]];
    for (std::size_t i = 0; i < m_; ++i) {
      double s = z[i];
      for (std::size_t c = 0; c < i; ++c) s -= lu_[i * m_ + c] * z[c];
      z[i] = s;
    }
    for (std::size_t i = m_; i-- > 0;) {
      double s = z[i];
      for (std::size_t c = i + 1; c < m_; ++c) s -= lu_[i * m_ + c] * z[c];
      z[i] = s / lu_[i * m_ + i];
    }
    for (std::size_t e = 0; e < etas_.size(); ++e) {
      const auto& eta = etas_[e];
      const std::size_t r = eta_rows_[e];
      const double vr = z[r];
      if (vr == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) z[i] += eta[i] * vr;
      z[r] = eta[r] * vr;
    }
    v = std::move(z);
  }

  /// Solves B^T y = w in place.
  void btran(std::vector<double>& w) const {
    for (std::size_t e = etas_.size(); e-- > 0;) {
      const auto& eta = etas_[e];
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += eta[i] * w[i];
      w[eta_rows_[e]] = s;
    }
    // U^T s = w
    for (std::size_t i = 0; i < m_; ++i) {
      double s = w[i];
      for (std::size_t c = 0; c < i; ++c) s -= lu_[c * m_ + i] * w[c];
      w[i] = s / lu_[i * m_ + i];
    }
    // L^T t = s
    for (std::size_t i = m_; i-- > 0;) {
      double s = w[i];
      for (std::size_t c = i + 1; c < m_; ++c) s -= lu_[c * m_ + i] * w[c];
      w[i] = s;
    }
    std::vector<double> y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[perm_[i]] = w[i];
    w = std::move(y);
  }

  /// Records the replacement of basis position r given alpha = B^{-1} a_q.
  void update(std::size_t r, const std::vector<double>& alpha) {
    std::vector<double> eta(m_);
    const double ar = alpha[r];
    for (std::size_t i = 0; i < m_; ++i) eta[i] = -alpha[i] / ar;
    eta[r] = 1.0 / ar;
    etas_.push_back(std::move(eta));
    eta_rows_.push_back(r);
  }

  std::size_t update_count() const { return etas_.size(); }

 private:
  std::size_t m_ = 0;
  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
  std::vector<std::vector<double>> etas_;
  std::vector<std::size_t> eta_rows_;
};

class SimplexSolver {
 public:
  SimplexSolver(const LpView& lp, const LpOptions& options)
      : lp_(lp), opt_(options), n_(lp.num_cols), m_(lp.num_rows), total_(n_ + m_) {
    lower_.resize(total_);
    upper_.resize(total_);
    cost_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lower_[j] = lp.col_lower[j];
      upper_[j] = lp.col_upper[j];
      cost_[j] = lp.cost[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      lower_[n_ + i] = lp.row_lower[i];
      upper_[n_ + i] = lp.row_upper[i];
    }
    x_.assign(total_, 0.0);
    factor_.reset(m_);
  }

  LpOutcome solve(const std::optional<WarmBasis>& start, Algorithm algorithm) {
    Algorithm chosen = Algorithm::Primal;
    if (start) {
      load_basis(start->basis);
      if (algorithm == Algorithm::Auto) {
        switch (classify_warm_basis(start->basis, start->change)) {
          case WarmStartKind::StartPrimal: chosen = Algorithm::Primal; break;
          case WarmStartKind::StartDual: chosen = Algorithm::Dual; break;
          case WarmStartKind::ColdStart:
            slack_basis();
            chosen = Algorithm::Primal;
            break;
        }
      } else {
        chosen = algorithm;
      }
    } else {
      slack_basis();
      chosen = algorithm == Algorithm::Dual ? Algorithm::Dual : Algorithm::Primal;
    }
    refactor();

    LpOutcome out;
    out.algorithm_used = chosen;
    LpStatus status;
    if (chosen == Algorithm::Dual && make_dual_feasible()) {
      status = run_dual();
      if (status == LpStatus::Optimal && !dual_feasible()) status = run_primal();
    } else {
      out.algorithm_used = Algorithm::Primal;
      status = run_primal();
    }
    out.status = status;
    out.iterations_primal = iters_primal_;
    out.iterations_dual = iters_dual_;
    out.basis.basic = basic_;
    out.basis.status = status_;
    out.point.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) out.point[j] = snap(j, x_[j]);
    out.objective_value = 0.0;
    for (std::size_t j = 0; j < n_; ++j) out.objective_value += cost_[j] * out.point[j];
    return out;
  }

 private:
  // -- column access ---------------------------------------------------------

  double column_dot(std::size_t j, const std::vector<double>& y) const {
    if (j >= n_) return -y[j - n_];
    const auto col = lp_.column(j);
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i) s += col[i] * y[i];
    return s;
  }

  void add_column(std::size_t j, double scale, std::vector<double>& into) const {
    if (scale == 0.0) return;
    if (j >= n_) {
      into[j - n_] -= scale;
      return;
    }
    const auto col = lp_.column(j);
    for (std::size_t i = 0; i < m_; ++i) into[i] += scale * col[i];
  }

  std::vector<double> ftran_column(std::size_t j) const {
    std::vector<double> v(m_, 0.0);
    add_column(j, 1.0, v);
    factor_.ftran(v);
    return v;
  }

  double snap(std::size_t j, double v) const {
    if (std::abs(v - lower_[j]) <= lp_tol::kZeroSnap) return lower_[j];
    if (std::abs(v - upper_[j]) <= lp_tol::kZeroSnap) return upper_[j];
    if (std::abs(v) <= lp_tol::kZeroSnap) return 0.0;
    return v;
  }

  // -- basis setup -----------------------------------------------------------

  VarStatus resting_status(std::size_t j) const {
    if (std::isfinite(lower_[j])) return VarStatus::AtLower;
    if (std::isfinite(upper_[j])) return VarStatus::AtUpper;
    return VarStatus::Free;
  }

  void slack_basis() {
    basic_.resize(m_);
    status_.assign(total_, VarStatus::AtLower);
    for (std::size_t j = 0; j < n_; ++j) status_[j] = resting_status(j);
    for (std::size_t i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      status_[n_ + i] = VarStatus::Basic;
    }
  }

  void load_basis(const Basis& b) {
    if (b.basic.size() != m_ || b.status.size() != total_)
      throw DimensionError("start basis does not match the LP dimensions");
    std::vector<bool> seen(total_, false);
    for (std::size_t j : b.basic) {
      if (j >= total_ || seen[j] || b.status[j] != VarStatus::Basic)
        throw DimensionError("start basis has an inconsistent basic set");
      seen[j] = true;
    }
    basic_ = b.basic;
    status_ = b.status;
    for (std::size_t j = 0; j < total_; ++j) {
      if (seen[j]) continue;
      if (status_[j] == VarStatus::Basic)
        throw DimensionError("start basis marks a non-member column as basic");
      // Statuses pointing at an infinite bound are re-seated.
      if ((status_[j] == VarStatus::AtLower && !std::isfinite(lower_[j])) ||
          (status_[j] == VarStatus::AtUpper && !std::isfinite(upper_[j])) ||
          (status_[j] == VarStatus::Free && (std::isfinite(lower_[j]) || std::isfinite(upper_[j]))))
        status_[j] = resting_status(j);
    }
  }

  /// Factorizes the current basis, swapping in logicals for dependent columns.
  void refactor() {
    for (std::size_t attempt = 0; attempt <= m_; ++attempt) {
      std::vector<double> dense(m_ * m_, 0.0);
      for (std::size_t k = 0; k < m_; ++k) {
        const std::size_t j = basic_[k];
        if (j >= n_) {
          dense[(j - n_) * m_ + k] = -1.0;
        } else {
          const auto col = lp_.column(j);
          for (std::size_t i = 0; i < m_; ++i) dense[i * m_ + k] = col[i];
        }
      }
      const std::size_t bad = factor_.factor(std::move(dense));
      if (bad == m_) {
        compute_primal();
        return;
      }
      // Rows not yet pivoted occupy positions bad..m-1; one of their logicals
      // is necessarily nonbasic.
      std::vector<std::size_t> free_rows;
      for (std::size_t pos = bad; pos < m_; ++pos) free_rows.push_back(factor_.row_at(pos));
      std::sort(free_rows.begin(), free_rows.end());
      bool repaired = false;
      for (std::size_t row : free_rows) {
        const std::size_t logical = n_ + row;
        if (status_[logical] == VarStatus::Basic) continue;
        const std::size_t leaving = basic_[bad];
        status_[leaving] = resting_status(leaving);
        basic_[bad] = logical;
        status_[logical] = VarStatus::Basic;
        repaired = true;
        break;
      }
      if (!repaired) break;
    }
    throw NumericalFailure("basis remained singular after repair");
  }

  void compute_primal() {
    std::vector<double> rhs(m_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      switch (status_[j]) {
        case VarStatus::Basic: continue;
        case VarStatus::AtLower: x_[j] = lower_[j]; break;
        case VarStatus::AtUpper: x_[j] = upper_[j]; break;
        case VarStatus::Free: x_[j] = 0.0; break;
      }
      add_column(j, -x_[j], rhs);
    }
    std::vector<double> xb = rhs;
    factor_.ftran(xb);
    for (std::size_t k = 0; k < m_; ++k) x_[basic_[k]] = xb[k];

    // Residual of B x_B = rhs; a drifting eta file triggers a fresh factorization.
    if (factor_.update_count() > 0) {
      std::vector<double> check(m_, 0.0);
      for (std::size_t k = 0; k < m_; ++k) add_column(basic_[k], xb[k], check);
      double err = 0.0;
      for (std::size_t i = 0; i < m_; ++i) err = std::max(err, std::abs(check[i] - rhs[i]));
      if (err > lp_tol::kRefactorResidual) refactor();
    }
  }

  /// Reduced costs for `costs` (length n + m); basic entries are zero.
  std::vector<double> reduced_costs(const std::vector<double>& costs) const {
    std::vector<double> y(m_);
    for (std::size_t k = 0; k < m_; ++k) y[k] = costs[basic_[k]];
    factor_.btran(y);
    std::vector<double> d(total_, 0.0);
    for (std::size_t j = 0; j < total_; ++j)
      if (status_[j] != VarStatus::Basic) d[j] = costs[j] - column_dot(j, y);
    return d;
  }

  bool fixed(std::size_t j) const { return lower_[j] == upper_[j]; }

  double infeasibility(std::size_t j) const {
    if (x_[j] < lower_[j] - lp_tol::kPrimalFeasibility) return lower_[j] - x_[j];
    if (x_[j] > upper_[j] + lp_tol::kPrimalFeasibility) return x_[j] - upper_[j];
    return 0.0;
  }

  void pivot(std::size_t r, std::size_t entering, const std::vector<double>& alpha,
             VarStatus leaving_status) {
    const std::size_t leaving = basic_[r];
    status_[leaving] = leaving_status;
    basic_[r] = entering;
    status_[entering] = VarStatus::Basic;
    if (factor_.update_count() + 1 >= opt_.refactor_interval) {
      refactor();
    } else {
      factor_.update(r, alpha);
      compute_primal();
    }
  }

  void track_degeneracy(bool degenerate) {
    if (degenerate) {
      if (++degenerate_run_ >= opt_.degenerate_before_bland) bland_ = true;
    } else {
      degenerate_run_ = 0;
      bland_ = false;
    }
  }

  bool out_of_iterations() const { return iters_primal_ + iters_dual_ >= opt_.iteration_limit; }

  // -- primal simplex --------------------------------------------------------

  /// Composite phase 1 (minimize the sum of bound violations of basic
  /// columns) followed by phase 2 on the true cost.
  LpStatus run_primal() {
    while (true) {
      if (out_of_iterations()) return LpStatus::IterationLimit;

      bool phase1 = false;
      std::vector<double> costs(total_, 0.0);
      for (std::size_t k = 0; k < m_; ++k) {
        const std::size_t j = basic_[k];
        if (x_[j] < lower_[j] - lp_tol::kPrimalFeasibility) {
          costs[j] = -1.0;
          phase1 = true;
        } else if (x_[j] > upper_[j] + lp_tol::kPrimalFeasibility) {
          costs[j] = 1.0;
          phase1 = true;
        }
      }
      if (!phase1) costs = cost_;
      const auto d = reduced_costs(costs);

      // Pricing: Dantzig, or lowest eligible index under Bland.
      std::size_t entering = total_;
      double best = 0.0;
      int direction = 0;
      for (std::size_t j = 0; j < total_; ++j) {
        if (status_[j] == VarStatus::Basic || fixed(j)) continue;
        int dir = 0;
        if (status_[j] == VarStatus::AtLower && d[j] < -lp_tol::kOptimality) dir = 1;
        else if (status_[j] == VarStatus::AtUpper && d[j] > lp_tol::kOptimality) dir = -1;
        else if (status_[j] == VarStatus::Free && std::abs(d[j]) > lp_tol::kOptimality)
          dir = d[j] > 0 ? -1 : 1;
        if (dir == 0) continue;
        if (bland_) {
          entering = j;
          direction = dir;
          break;
        }
        if (std::abs(d[j]) > best) {
          best = std::abs(d[j]);
          entering = j;
          direction = dir;
        }
      }
      if (entering == total_) return phase1 ? LpStatus::Infeasible : LpStatus::Optimal;

      const auto alpha = ftran_column(entering);
      double theta = std::isfinite(lower_[entering]) && std::isfinite(upper_[entering])
                         ? upper_[entering] - lower_[entering]
                         : kInf;
      std::size_t leave_pos = m_;  // m_ means a bound flip of the entering column
      VarStatus leave_status = VarStatus::AtLower;
      double leave_alpha = 0.0;
      for (std::size_t k = 0; k < m_; ++k) {
        if (std::abs(alpha[k]) <= lp_tol::kPivot) continue;
        const std::size_t j = basic_[k];
        const double delta = -direction * alpha[k];
        const double xv = x_[j];
        double ratio = kInf;
        VarStatus st = VarStatus::AtLower;
        if (phase1 && xv < lower_[j] - lp_tol::kPrimalFeasibility) {
          if (delta > 0) ratio = (lower_[j] - xv) / delta;
        } else if (phase1 && xv > upper_[j] + lp_tol::kPrimalFeasibility) {
          if (delta < 0) {
            ratio = (xv - upper_[j]) / -delta;
            st = VarStatus::AtUpper;
          }
        } else if (delta < 0) {
          if (std::isfinite(lower_[j])) ratio = (xv - lower_[j]) / -delta;
        } else {
          if (std::isfinite(upper_[j])) {
            ratio = (upper_[j] - xv) / delta;
            st = VarStatus::AtUpper;
          }
        }
        if (!std::isfinite(ratio)) continue;
        ratio = std::max(ratio, 0.0);
        bool take = ratio < theta - 1e-12;
        if (!take && ratio <= theta + 1e-12 && leave_pos != m_)
          take = bland_ ? j < basic_[leave_pos] : std::abs(alpha[k]) > std::abs(leave_alpha);
        if (take) {
          theta = ratio;
          leave_pos = k;
          leave_status = st;
          leave_alpha = alpha[k];
        }
      }

      if (!std::isfinite(theta)) {
        if (phase1) throw NumericalFailure("phase 1 found an unblocked improving ray");
        return LpStatus::Unbounded;
      }
      ++iters_primal_;
      track_degeneracy(theta <= 1e-12);

      if (leave_pos == m_) {
        status_[entering] =
            status_[entering] == VarStatus::AtLower ? VarStatus::AtUpper : VarStatus::AtLower;
        compute_primal();
        continue;
      }
      x_[entering] += direction * theta;
      pivot(leave_pos, entering, alpha, leave_status);
    }
  }

  // -- dual simplex ----------------------------------------------------------

  /// Flips boxed columns whose reduced cost has the wrong sign. Fails when a
  /// violation sits on a column with an infinite opposite bound.
  bool make_dual_feasible() {
    const auto d = reduced_costs(cost_);
    bool flipped = false;
    for (std::size_t j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::Basic || fixed(j)) continue;
      if (status_[j] == VarStatus::AtLower && d[j] < -lp_tol::kOptimality) {
        if (!std::isfinite(upper_[j])) return false;
        status_[j] = VarStatus::AtUpper;
        flipped = true;
      } else if (status_[j] == VarStatus::AtUpper && d[j] > lp_tol::kOptimality) {
        if (!std::isfinite(lower_[j])) return false;
        status_[j] = VarStatus::AtLower;
        flipped = true;
      } else if (status_[j] == VarStatus::Free && std::abs(d[j]) > lp_tol::kOptimality) {
        return false;
      }
    }
    if (flipped) compute_primal();
    return true;
  }

  bool dual_feasible() const {
    const auto d = reduced_costs(cost_);
    for (std::size_t j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::Basic || fixed(j)) continue;
      if (status_[j] == VarStatus::AtLower && d[j] < -lp_tol::kOptimality) return false;
      if (status_[j] == VarStatus::AtUpper && d[j] > lp_tol::kOptimality) return false;
      if (status_[j] == VarStatus::Free && std::abs(d[j]) > lp_tol::kOptimality) return false;
    }
    return true;
  }

  LpStatus run_dual() {
    while (true) {
      if (out_of_iterations()) return LpStatus::IterationLimit;

      // Leaving row: largest bound violation, or lowest column index under Bland.
      std::size_t r = m_;
      double worst = 0.0;
      for (std::size_t k = 0; k < m_; ++k) {
        const double inf = infeasibility(basic_[k]);
        if (inf <= 0.0) continue;
        if (bland_) {
          if (r == m_ || basic_[k] < basic_[r]) r = k;
        } else if (inf > worst) {
          worst = inf;
          r = k;
        }
      }
      if (r == m_) return LpStatus::Optimal;

      const std::size_t leaving = basic_[r];
      const bool to_lower = x_[leaving] < lower_[leaving];
      const double s = to_lower ? 1.0 : -1.0;
      const double target = to_lower ? lower_[leaving] : upper_[leaving];

      std::vector<double> rho(m_, 0.0);
      rho[r] = 1.0;
      factor_.btran(rho);
      const auto d = reduced_costs(cost_);

      std::size_t entering = total_;
      double best_ratio = kInf;
      double best_alpha = 0.0;
      for (std::size_t j = 0; j < total_; ++j) {
        if (status_[j] == VarStatus::Basic || fixed(j)) continue;
        const double a = s * column_dot(j, rho);
        if (std::abs(a) <= lp_tol::kPivot) continue;
        double ratio;
        if (status_[j] == VarStatus::AtLower) {
          if (a >= 0) continue;
          ratio = std::max(d[j], 0.0) / -a;
        } else if (status_[j] == VarStatus::AtUpper) {
          if (a <= 0) continue;
          ratio = std::max(-d[j], 0.0) / a;
        } else {
          ratio = std::abs(d[j]) / std::abs(a);
        }
        bool take = false;
        if (ratio < best_ratio - 1e-12) take = true;
        else if (ratio <= best_ratio + 1e-12)
          take = bland_ ? false : std::abs(a) > std::abs(best_alpha);
        if (take) {
          best_ratio = ratio;
          entering = j;
          best_alpha = a;
        }
      }
      if (entering == total_) return LpStatus::Infeasible;

      const auto alpha = ftran_column(entering);
      if (std::abs(alpha[r]) <= lp_tol::kPivot) {
        // Row and column disagree: the eta file has drifted.
        if (factor_.update_count() == 0)
          throw NumericalFailure("dual simplex pivot vanished after refactorization");
        refactor();
        continue;
      }
      const double theta = (x_[leaving] - target) / alpha[r];
      ++iters_dual_;
      track_degeneracy(best_ratio <= 1e-12);
      x_[entering] += theta;
      // An entering column pushed past its own opposite bound becomes an
      // infeasible basic column and is picked up by a later row selection.
      pivot(r, entering, alpha, to_lower ? VarStatus::AtLower : VarStatus::AtUpper);
    }
  }

  const LpView& lp_;
  LpOptions opt_;
  std::size_t n_, m_, total_;
  std::vector<double> lower_, upper_, cost_, x_;
  std::vector<std::size_t> basic_;
  std::vector<VarStatus> status_;
  BasisFactor factor_;
  std::size_t iters_primal_ = 0;
  std::size_t iters_dual_ = 0;
  std::size_t degenerate_run_ = 0;
  bool bland_ = false;
};

}  // namespace detail

/// Solves `lp`. With a start basis and Algorithm::Auto the algorithm follows
/// classify_warm_basis; a start that is not dual feasible for the dual
/// simplex falls back to the composite primal.
inline LpOutcome solve_lp(const LpView& lp, const std::optional<WarmBasis>& start = std::nullopt,
                          Algorithm algorithm = Algorithm::Auto, const LpOptions& options = {}) {
  detail::SimplexSolver solver(lp, options);
  return solver.solve(start, algorithm);
}

}  // namespace moscal
