#pragma once

// Seeded generators for knapsack (KP), assignment (AP) and travelling
// salesman (TSP) benchmark instances. Every coefficient is drawn from
// SplitMix64 in the order documented per generator, so the output depends on
// the GenSpec alone.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "random.hpp"

namespace moscal {

enum class Family { KP, AP, TSP };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::KP: return "KP";
    case Family::AP: return "AP";
    case Family::TSP: return "TSP";
  }
  return "?";
}

inline std::optional<Family> parse_family(const std::string& s) {
  if (s == "KP") return Family::KP;
  if (s == "AP") return Family::AP;
  if (s == "TSP") return Family::TSP;
  return std::nullopt;
}

struct GenSpec {
  Family family = Family::KP;
  std::size_t size = 10;
  std::size_t objectives = 3;
  std::uint64_t seed = 1;

  void validate() const {
    if (size < 2) throw ValidationError("instance size must be at least 2");
    if (objectives < 2) throw ValidationError("at least 2 objectives are required");
  }
};

/// `{family}_{size:03}_{p}obj_{seed}.json`
inline std::string instance_filename(const GenSpec& spec) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_%03zu_%zuobj_%llu.json", to_string(spec.family), spec.size,
                spec.objectives, static_cast<unsigned long long>(spec.seed));
  return buf;
}

namespace detail {

inline std::string family_name(const char* family, std::size_t size) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s %03zu", family, size);
  return buf;
}

}  // namespace detail

/// Draw order: item weights, then profit rows objective by objective.
/// Profits are stored negated. Capacity is ceil(sum w / 2) unless overridden.
inline Problem gen_knapsack(const GenSpec& spec, std::optional<double> capacity = std::nullopt) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const std::size_t n = spec.size;
  Problem p;
  p.name = detail::family_name("KP", n);
  p.num_vars = n;
  p.var_types.assign(n, VarType::Binary);
  p.lower.assign(n, 0.0);
  p.upper.assign(n, 1.0);

  LinearConstraint cap;
  std::int64_t total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto w = rng.uniform_int(1, 100);
    total += w;
    cap.index.push_back(j);
    cap.value.push_back(static_cast<double>(w));
  }
  cap.sense = Sense::LessEqual;
  cap.rhs = capacity ? *capacity : static_cast<double>((total + 1) / 2);
  p.constraints.push_back(std::move(cap));

  for (std::size_t k = 0; k < spec.objectives; ++k) {
    std::vector<double> row(n);
    for (auto& c : row) c = -static_cast<double>(rng.uniform_int(1, 100));
    p.objectives.push_back(std::move(row));
  }
  return p;
}

/// Variable x_{ij} (agent i does task j) has index i * size + j. Draw order:
/// cost matrices objective by objective, row-major.
inline Problem gen_assignment(const GenSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const std::size_t n = spec.size;
  Problem p;
  p.name = detail::family_name("AP", n);
  p.num_vars = n * n;
  p.var_types.assign(n * n, VarType::Binary);
  p.lower.assign(n * n, 0.0);
  p.upper.assign(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    LinearConstraint row;
    for (std::size_t j = 0; j < n; ++j) {
      row.index.push_back(i * n + j);
      row.value.push_back(1.0);
    }
    row.sense = Sense::Equal;
    row.rhs = 1.0;
    p.constraints.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < n; ++j) {
    LinearConstraint col;
    for (std::size_t i = 0; i < n; ++i) {
      col.index.push_back(i * n + j);
      col.value.push_back(1.0);
    }
    col.sense = Sense::Equal;
    col.rhs = 1.0;
    p.constraints.push_back(std::move(col));
  }
  for (std::size_t k = 0; k < spec.objectives; ++k) {
    std::vector<double> row(n * n);
    for (auto& c : row) c = static_cast<double>(rng.uniform_int(1, 100));
    p.objectives.push_back(std::move(row));
  }
  return p;
}

inline constexpr std::size_t kMaxTspCities = 12;

/// Index of the directed arc i -> j (i != j) among the size*(size-1) arcs.
inline std::size_t tsp_arc_index(std::size_t n, std::size_t i, std::size_t j) {
  return i * (n - 1) + (j < i ? j : j - 1);
}

/// Arcs first (ordered by tail, then head), then MTZ order variables u_1..u_{n-1}
/// in [1, n-1]. Draw order: for each objective, d_ij for i < j row-major.
inline Problem gen_tsp(const GenSpec& spec) {
  spec.validate();
  if (spec.size > kMaxTspCities)
    throw TooLarge("TSP generator is limited to " + std::to_string(kMaxTspCities) + " cities");
  SplitMix64 rng(spec.seed);
  const std::size_t n = spec.size;
  const std::size_t arcs = n * (n - 1);
  Problem p;
  p.name = detail::family_name("TSP", n);
  p.num_vars = arcs + (n - 1);
  p.var_types.assign(arcs, VarType::Binary);
  p.var_types.resize(p.num_vars, VarType::Continuous);
  p.lower.assign(arcs, 0.0);
  p.upper.assign(arcs, 1.0);
  p.lower.resize(p.num_vars, 1.0);
  p.upper.resize(p.num_vars, static_cast<double>(n - 1));
  auto u = [&](std::size_t city) { return arcs + city - 1; };

  for (std::size_t i = 0; i < n; ++i) {
    LinearConstraint out;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) {
        out.index.push_back(tsp_arc_index(n, i, j));
        out.value.push_back(1.0);
      }
    out.sense = Sense::Equal;
    out.rhs = 1.0;
    p.constraints.push_back(std::move(out));
  }
  for (std::size_t j = 0; j < n; ++j) {
    LinearConstraint in;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) {
        in.index.push_back(tsp_arc_index(n, i, j));
        in.value.push_back(1.0);
      }
    in.sense = Sense::Equal;
    in.rhs = 1.0;
    p.constraints.push_back(std::move(in));
  }
  // u_i - u_j + (n-1) x_ij <= n - 2 for cities i != j other than the depot.
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j) {
      if (i == j) continue;
      LinearConstraint mtz;
      mtz.index = {tsp_arc_index(n, i, j), u(i), u(j)};
      mtz.value = {static_cast<double>(n - 1), 1.0, -1.0};
      mtz.sense = Sense::LessEqual;
      mtz.rhs = static_cast<double>(n) - 2.0;
      p.constraints.push_back(std::move(mtz));
    }

  for (std::size_t k = 0; k < spec.objectives; ++k) {
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto d = static_cast<double>(rng.uniform_int(1, 100));
        dist[i * n + j] = d;
        dist[j * n + i] = d;
      }
    std::vector<double> row(p.num_vars, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) row[tsp_arc_index(n, i, j)] = dist[i * n + j];
    p.objectives.push_back(std::move(row));
  }
  return p;
}

inline Problem generate(const GenSpec& spec) {
  switch (spec.family) {
    case Family::KP: return gen_knapsack(spec);
    case Family::AP: return gen_assignment(spec);
    case Family::TSP: return gen_tsp(spec);
  }
  throw ValidationError("unknown family");
}

}  // namespace moscal
