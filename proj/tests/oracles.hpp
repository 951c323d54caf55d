#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the simplex or branch-and-bound code.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "moscal/model.hpp"
#include "moscal/random.hpp"

namespace oracle {

/// Solves the square system M z = rhs by Gaussian elimination with partial
/// pivoting. Returns nullopt for (near-)singular systems.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> m,
                                                      std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
    if (std::abs(m[piv][k]) < 1e-12) return std::nullopt;
    std::swap(m[k], m[piv]);
    std::swap(rhs[k], rhs[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m[i][k] / m[k][k];
      for (std::size_t c = k; c < n; ++c) m[i][c] -= f * m[k][c];
      rhs[i] -= f * rhs[k];
    }
  }
  std::vector<double> z(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= m[i][c] * z[c];
    z[i] = s / m[i][i];
  }
  return z;
}

/// Dense LP in the form  min c x  s.t.  rows (a, sense, b), lo <= x <= hi,
/// all bounds finite.
struct DenseLp {
  std::vector<double> cost;
  std::vector<std::vector<double>> rows;
  std::vector<moscal::Sense> senses;
  std::vector<double> rhs;
  std::vector<double> lo, hi;
};

/// Minimum over all vertices of a bounded polyhedron: every choice of n
/// linearly independent tight constraints (rows or bounds) is intersected and
/// the feasible intersections are scanned.
inline std::optional<double> vertex_enumeration(const DenseLp& lp, double tol = 1e-9) {
  const std::size_t n = lp.cost.size();
  std::vector<std::vector<double>> hyper;
  std::vector<double> level;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    hyper.push_back(lp.rows[i]);
    level.push_back(lp.rhs[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    hyper.push_back(e);
    level.push_back(lp.lo[j]);
    hyper.push_back(e);
    level.push_back(lp.hi[j]);
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] < lp.lo[j] - tol || x[j] > lp.hi[j] + tol) return false;
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
      double a = 0.0;
      for (std::size_t j = 0; j < n; ++j) a += lp.rows[i][j] * x[j];
      if (lp.senses[i] == moscal::Sense::LessEqual && a > lp.rhs[i] + tol) return false;
      if (lp.senses[i] == moscal::Sense::GreaterEqual && a < lp.rhs[i] - tol) return false;
      if (lp.senses[i] == moscal::Sense::Equal && std::abs(a - lp.rhs[i]) > tol) return false;
    }
    return true;
  };
  std::optional<double> best;
  const std::size_t h = hyper.size();
  std::vector<std::size_t> pick(n);
  // Lexicographic n-subsets of the hyperplanes.
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<double>> m;
    std::vector<double> r;
    for (std::size_t i : pick) {
      m.push_back(hyper[i]);
      r.push_back(level[i]);
    }
    if (auto x = solve_square(m, r); x && feasible(*x)) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += lp.cost[j] * (*x)[j];
      if (!best || v < *best) best = v;
    }
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == h - n + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t t = i; t < n; ++t) pick[t] = pick[t - 1] + 1;
  }
  return best;
}

/// Exhaustive minimum of `objective` over all 0/1 assignments of a pure
/// binary problem.
inline std::optional<double> binary_enumeration(const moscal::Problem& p,
                                                const std::vector<double>& objective) {
  const std::size_t n = p.num_vars;
  std::optional<double> best;
  std::vector<double> x(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<double>((mask >> j) & 1U);
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j)
      ok = x[j] >= p.lower[j] && x[j] <= p.upper[j];
    for (const auto& row : p.constraints) {
      if (!ok) break;
      double a = 0.0;
      for (std::size_t t = 0; t < row.index.size(); ++t) a += row.value[t] * x[row.index[t]];
      if (row.sense == moscal::Sense::LessEqual) ok = a <= row.rhs + 1e-9;
      else if (row.sense == moscal::Sense::GreaterEqual) ok = a >= row.rhs - 1e-9;
      else ok = std::abs(a - row.rhs) <= 1e-9;
    }
    if (!ok) continue;
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += objective[j] * x[j];
    if (!best || v < *best) best = v;
  }
  return best;
}

/// Random bounded LP with 2..4 variables and a few rows, integer data.
inline DenseLp random_lp(moscal::SplitMix64& rng) {
  DenseLp lp;
  const auto n = static_cast<std::size_t>(rng.uniform_int(2, 4));
  const auto m = static_cast<std::size_t>(rng.uniform_int(1, 5));
  for (std::size_t j = 0; j < n; ++j) {
    lp.cost.push_back(static_cast<double>(rng.uniform_int(-9, 9)));
    const double lo = static_cast<double>(rng.uniform_int(-5, 2));
    lp.lo.push_back(lo);
    lp.hi.push_back(lo + static_cast<double>(rng.uniform_int(0, 8)));
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> a(n);
    for (auto& v : a) v = static_cast<double>(rng.uniform_int(-6, 6));
    lp.rows.push_back(a);
    const auto s = rng.uniform_int(0, 5);
    lp.senses.push_back(s < 3 ? moscal::Sense::LessEqual
                              : (s < 5 ? moscal::Sense::GreaterEqual : moscal::Sense::Equal));
    lp.rhs.push_back(static_cast<double>(rng.uniform_int(-10, 10)));
  }
  return lp;
}

inline moscal::Problem as_problem(const DenseLp& lp) {
  moscal::Problem p;
  p.name = "lp";
  p.num_vars = lp.cost.size();
  p.var_types.assign(p.num_vars, moscal::VarType::Continuous);
  p.lower = lp.lo;
  p.upper = lp.hi;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    moscal::LinearConstraint row;
    for (std::size_t j = 0; j < p.num_vars; ++j)
      if (lp.rows[i][j] != 0.0) {
        row.index.push_back(j);
        row.value.push_back(lp.rows[i][j]);
      }
    row.sense = lp.senses[i];
    row.rhs = lp.rhs[i];
    p.constraints.push_back(row);
  }
  p.objectives = {lp.cost, lp.cost};
  return p;
}

/// Binary problem with 3-12 variables, 1-4 random integer rows and one
/// random objective row (the second row is zero).
inline moscal::Problem random_binary_mip(moscal::SplitMix64& rng) {
  using namespace moscal;
  Problem p;
  p.name = "bin";
  p.num_vars = static_cast<std::size_t>(rng.uniform_int(3, 12));
  p.var_types.assign(p.num_vars, VarType::Binary);
  p.lower.assign(p.num_vars, 0.0);
  p.upper.assign(p.num_vars, 1.0);
  p.objectives.assign(2, std::vector<double>(p.num_vars, 0.0));
  const auto rows = rng.uniform_int(1, 4);
  for (std::int64_t r = 0; r < rows; ++r) {
    LinearConstraint row;
    double pos = 0;
    for (std::size_t j = 0; j < p.num_vars; ++j) {
      const auto a = rng.uniform_int(-4, 9);
      if (a == 0) continue;
      row.index.push_back(j);
      row.value.push_back(static_cast<double>(a));
      if (a > 0) pos += static_cast<double>(a);
    }
    const auto s = rng.uniform_int(0, 9);
    row.sense = s < 7 ? Sense::LessEqual : (s < 9 ? Sense::GreaterEqual : Sense::Equal);
    row.rhs = std::floor(pos * static_cast<double>(rng.uniform_int(20, 70)) / 100.0);
    p.constraints.push_back(std::move(row));
  }
  for (auto& c : p.objectives[0]) c = static_cast<double>(rng.uniform_int(-20, 20));
  return p;
}

}  // namespace oracle
