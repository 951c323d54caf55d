#include <gtest/gtest.h>

#include "moscal/simplex.hpp"
#include "oracles.hpp"

using namespace moscal;

namespace {

LpView view_of(const oracle::DenseLp& d) {
  const auto p = oracle::as_problem(d);
  return make_lp_view(p, d.cost);
}

LpView single_var(double lo, double hi, std::vector<LinearConstraint> rows, double c) {
  Problem p;
  p.num_vars = 1;
  p.var_types = {VarType::Continuous};
  p.lower = {lo};
  p.upper = {hi};
  p.constraints = std::move(rows);
  p.objectives = {{c}, {c}};
  return make_lp_view(p, std::vector<double>{c});
}

// Column values implied by a basis, computed with a separate dense solve.
std::vector<double> basis_point(const LpView& lp, const Basis& b) {
  const std::size_t n = lp.num_cols, m = lp.num_rows;
  auto lower = [&](std::size_t j) { return j < n ? lp.col_lower[j] : lp.row_lower[j - n]; };
  auto upper = [&](std::size_t j) { return j < n ? lp.col_upper[j] : lp.row_upper[j - n]; };
  auto entry = [&](std::size_t i, std::size_t j) {
    return j < n ? lp.at(i, j) : (j - n == i ? -1.0 : 0.0);
  };
  std::vector<double> x(n + m, 0.0), rhs(m, 0.0);
  for (std::size_t j = 0; j < n + m; ++j) {
    if (b.status[j] == VarStatus::AtLower) x[j] = lower(j);
    else if (b.status[j] == VarStatus::AtUpper) x[j] = upper(j);
    else continue;
    for (std::size_t i = 0; i < m; ++i) rhs[i] -= entry(i, j) * x[j];
  }
  std::vector<std::vector<double>> B(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) B[i][k] = entry(i, b.basic[k]);
  auto xb = oracle::solve_square(B, rhs);
  EXPECT_TRUE(xb.has_value());
  for (std::size_t k = 0; k < m; ++k) x[b.basic[k]] = (*xb)[k];
  return x;
}

bool basis_primal_feasible(const LpView& lp, const Basis& b) {
  const auto x = basis_point(lp, b);
  const std::size_t n = lp.num_cols;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double lo = j < n ? lp.col_lower[j] : lp.row_lower[j - n];
    const double hi = j < n ? lp.col_upper[j] : lp.row_upper[j - n];
    if (x[j] < lo - 1e-7 || x[j] > hi + 1e-7) return false;
  }
  return true;
}

bool basis_dual_feasible(const LpView& lp, const Basis& b) {
  const std::size_t n = lp.num_cols, m = lp.num_rows;
  auto entry = [&](std::size_t i, std::size_t j) {
    return j < n ? lp.at(i, j) : (j - n == i ? -1.0 : 0.0);
  };
  auto cost = [&](std::size_t j) { return j < n ? lp.cost[j] : 0.0; };
  std::vector<std::vector<double>> BT(m, std::vector<double>(m));
  std::vector<double> cb(m);
  for (std::size_t k = 0; k < m; ++k) {
    cb[k] = cost(b.basic[k]);
    for (std::size_t i = 0; i < m; ++i) BT[k][i] = entry(i, b.basic[k]);
  }
  auto y = oracle::solve_square(BT, cb);
  if (!y) return false;
  for (std::size_t j = 0; j < n + m; ++j) {
    if (b.status[j] == VarStatus::Basic) continue;
    double d = cost(j);
    for (std::size_t i = 0; i < m; ++i) d -= (*y)[i] * entry(i, j);
    const double lo = j < n ? lp.col_lower[j] : lp.row_lower[j - n];
    const double hi = j < n ? lp.col_upper[j] : lp.row_upper[j - n];
    if (lo == hi) continue;
    if (b.status[j] == VarStatus::AtLower && d < -1e-9) return false;
    if (b.status[j] == VarStatus::AtUpper && d > 1e-9) return false;
    if (b.status[j] == VarStatus::Free && std::abs(d) > 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST(Simplex, SingleActiveBound) {
  LinearConstraint ge{{0}, {1.0}, Sense::GreaterEqual, 3.0, std::nullopt};
  const auto out = solve_lp(single_var(0, 10, {ge}, 1.0));
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.point[0], 3.0, 1e-12);
  EXPECT_NEAR(out.objective_value, 3.0, 1e-12);
  EXPECT_GE(out.iterations(), 1u);
}

TEST(Simplex, EmptyFeasibleSet) {
  LinearConstraint ge{{0}, {1.0}, Sense::GreaterEqual, 1.0, std::nullopt};
  LinearConstraint le{{0}, {1.0}, Sense::LessEqual, 0.0, std::nullopt};
  EXPECT_EQ(solve_lp(single_var(-kInf, kInf, {ge, le}, 1.0)).status, LpStatus::Infeasible);
  EXPECT_EQ(solve_lp(single_var(-kInf, kInf, {ge, le}, 1.0), std::nullopt, Algorithm::Dual).status,
            LpStatus::Infeasible);
}

TEST(Simplex, UnboundedRay) {
  EXPECT_EQ(solve_lp(single_var(0, kInf, {}, -1.0)).status, LpStatus::Unbounded);
}

TEST(Simplex, FreeVariable) {
  LinearConstraint ge{{0}, {2.0}, Sense::GreaterEqual, -7.0, std::nullopt};
  const auto out = solve_lp(single_var(-kInf, kInf, {ge}, 1.0));
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.point[0], -3.5, 1e-12);
}

TEST(Simplex, MatchesVertexEnumeration) {
  SplitMix64 rng(2024);
  int optimal = 0;
  for (int t = 0; t < 200; ++t) {
    const auto d = oracle::random_lp(rng);
    const auto expected = oracle::vertex_enumeration(d);
    const auto lp = view_of(d);
    for (auto alg : {Algorithm::Primal, Algorithm::Dual}) {
      const auto out = solve_lp(lp, std::nullopt, alg);
      if (!expected) {
        EXPECT_EQ(out.status, LpStatus::Infeasible) << "case " << t;
      } else {
        ASSERT_EQ(out.status, LpStatus::Optimal) << "case " << t;
        EXPECT_NEAR(out.objective_value, *expected, 1e-7) << "case " << t;
        ++optimal;
      }
    }
  }
  EXPECT_GT(optimal, 100);
}

TEST(Simplex, ClassifyWarmBasis) {
  const Basis b;
  EXPECT_EQ(classify_warm_basis(b, ChangeKind::ObjectiveOnly), WarmStartKind::StartPrimal);
  EXPECT_EQ(classify_warm_basis(b, ChangeKind::RhsOnly), WarmStartKind::StartDual);
  EXPECT_EQ(classify_warm_basis(b, ChangeKind::Other), WarmStartKind::ColdStart);
}

TEST(Simplex, ClassifyChange) {
  SplitMix64 rng(5);
  const auto base = view_of(oracle::random_lp(rng));
  auto cost = base;
  cost.cost[0] += 1.0;
  auto rhs = base;
  rhs.col_upper[0] += 1.0;
  auto both = cost;
  both.col_upper[0] += 1.0;
  EXPECT_EQ(classify_change(base, cost), ChangeKind::ObjectiveOnly);
  EXPECT_EQ(classify_change(base, rhs), ChangeKind::RhsOnly);
  EXPECT_EQ(classify_change(base, both), ChangeKind::Other);
}

// A basis optimal before an objective change stays primal feasible; before a
// bound change it stays dual feasible. Warm solves agree with cold solves.
TEST(Simplex, WarmStartsAgreeWithColdSolves) {
  SplitMix64 rng(77);
  int primal_checked = 0, dual_checked = 0;
  for (int t = 0; t < 150; ++t) {
    const auto d = oracle::random_lp(rng);
    const auto lp = view_of(d);
    const auto first = solve_lp(lp);
    if (first.status != LpStatus::Optimal) continue;

    auto recost = lp;
    for (auto& c : recost.cost) c = static_cast<double>(rng.uniform_int(-9, 9));
    ASSERT_TRUE(basis_primal_feasible(recost, first.basis));
    ++primal_checked;
    const auto warm_p = solve_lp(recost, WarmBasis{first.basis, ChangeKind::ObjectiveOnly});
    const auto cold_p = solve_lp(recost);
    ASSERT_EQ(warm_p.status, cold_p.status);
    EXPECT_EQ(warm_p.algorithm_used, Algorithm::Primal);
    if (cold_p.status == LpStatus::Optimal) {
      EXPECT_NEAR(warm_p.objective_value, cold_p.objective_value, 1e-7);
    }

    auto rebound = lp;
    for (std::size_t i = 0; i < rebound.num_rows; ++i) {
      const double shift = static_cast<double>(rng.uniform_int(-3, 3));
      if (std::isfinite(rebound.row_lower[i])) rebound.row_lower[i] += shift;
      if (std::isfinite(rebound.row_upper[i])) rebound.row_upper[i] += shift;
    }
    ASSERT_TRUE(basis_dual_feasible(rebound, first.basis));
    ++dual_checked;
    const auto warm_d = solve_lp(rebound, WarmBasis{first.basis, ChangeKind::RhsOnly});
    const auto cold_d = solve_lp(rebound);
    ASSERT_EQ(warm_d.status, cold_d.status) << "case " << t;
    if (cold_d.status == LpStatus::Optimal) {
      EXPECT_NEAR(warm_d.objective_value, cold_d.objective_value, 1e-7);
    }
  }
  EXPECT_GT(primal_checked, 50);
  EXPECT_GT(dual_checked, 50);
}

TEST(Simplex, OptimalBasisReoptimizesWithoutPivots) {
  SplitMix64 rng(9);
  for (int t = 0; t < 40; ++t) {
    const auto lp = view_of(oracle::random_lp(rng));
    const auto first = solve_lp(lp);
    if (first.status != LpStatus::Optimal) continue;
    const auto again = solve_lp(lp, WarmBasis{first.basis, ChangeKind::RhsOnly});
    EXPECT_EQ(again.iterations(), 0u);
    EXPECT_NEAR(again.objective_value, first.objective_value, 1e-9);
  }
}

// Beale's example cycles under the textbook Dantzig rule.
TEST(Simplex, DegenerateLpTerminatesWithBlandFallback) {
  Problem p;
  p.num_vars = 4;
  p.var_types.assign(4, VarType::Continuous);
  p.lower.assign(4, 0.0);
  p.upper.assign(4, kInf);
  p.constraints = {
      {{0, 1, 2, 3}, {0.25, -8.0, -1.0, 9.0}, Sense::LessEqual, 0.0, std::nullopt},
      {{0, 1, 2, 3}, {0.5, -12.0, -0.5, 3.0}, Sense::LessEqual, 0.0, std::nullopt},
      {{2}, {1.0}, Sense::LessEqual, 1.0, std::nullopt},
  };
  const std::vector<double> c{-0.75, 20.0, -0.5, 6.0};
  p.objectives = {c, c};
  const auto lp = make_lp_view(p, c);
  for (std::size_t trigger : {std::size_t{1}, std::size_t{1000}}) {
    LpOptions opt;
    opt.degenerate_before_bland = trigger;
    const auto out = solve_lp(lp, std::nullopt, Algorithm::Primal, opt);
    ASSERT_EQ(out.status, LpStatus::Optimal);
    EXPECT_NEAR(out.objective_value, -1.25, 1e-9);
  }
}

TEST(Simplex, DeterministicIterationCounts) {
  SplitMix64 rng(31);
  const auto lp = view_of(oracle::random_lp(rng));
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  EXPECT_EQ(a.iterations_primal, b.iterations_primal);
  EXPECT_EQ(a.iterations_dual, b.iterations_dual);
  EXPECT_EQ(a.basis, b.basis);
}

TEST(Simplex, RejectsMismatchedBasis) {
  SplitMix64 rng(3);
  const auto lp = view_of(oracle::random_lp(rng));
  Basis bad;
  bad.basic = {0};
  bad.status = {VarStatus::Basic};
  EXPECT_THROW(solve_lp(lp, WarmBasis{bad, ChangeKind::RhsOnly}), DimensionError);
}

TEST(Simplex, SingularStartBasisIsRepaired) {
  // Two identical rows make any basis holding both structurals singular.
  Problem p;
  p.num_vars = 2;
  p.var_types.assign(2, VarType::Continuous);
  p.lower = {0, 0};
  p.upper = {5, 5};
  p.constraints = {{{0, 1}, {1.0, 1.0}, Sense::LessEqual, 4.0, std::nullopt},
                   {{0, 1}, {1.0, 1.0}, Sense::LessEqual, 4.0, std::nullopt}};
  const std::vector<double> c{-1.0, -2.0};
  p.objectives = {c, c};
  const auto lp = make_lp_view(p, c);
  Basis b;
  b.basic = {0, 1};
  b.status = {VarStatus::Basic, VarStatus::Basic, VarStatus::AtUpper, VarStatus::AtUpper};
  const auto out = solve_lp(lp, WarmBasis{b, ChangeKind::ObjectiveOnly});
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.objective_value, -8.0, 1e-9);
}
