#pragma once

// Solver-free analysis of grid traversal orders: for a known feasibility mask,
// count the cells that get a guaranteed primal-feasible warm start and the
// infeasible cells that propagation can skip.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ecm.hpp"
#include "errors.hpp"
#include "pareto.hpp"

namespace moscal {

enum class WsMode { Weak, Strong };

inline const char* to_string(WsMode m) { return m == WsMode::Weak ? "weak" : "strong"; }

class FeasibilityMask {
 public:
  /// Cell (c_0, ..., c_{d-1}) is stored at c_0 + dims_0 * (c_1 + dims_1 * ...).
  FeasibilityMask(std::vector<std::size_t> dims, std::vector<bool> feasible)
      : dims_(std::move(dims)), feasible_(std::move(feasible)) {
    std::size_t total = 1;
    for (auto d : dims_) {
      if (d == 0) throw ValidationError("mask dimensions must be positive");
      total *= d;
    }
    if (feasible_.size() != total)
      throw DimensionError("mask has " + std::to_string(feasible_.size()) + " cells, expected " +
                           std::to_string(total));
    // Infeasible cells must be closed under stepping down in any coordinate.
    Cell c(dims_.size(), 0);
    for (std::size_t i = 0; i < total; ++i) {
      if (!feasible_[i]) {
        for (std::size_t d = 0; d < c.size(); ++d) {
          if (c[d] == 0) continue;
          --c[d];
          const bool below = feasible_[index(c)];
          ++c[d];
          if (below) throw ValidationError("infeasible cells are not downward closed at " + cell_key(c));
        }
      }
      for (std::size_t d = 0; d < c.size(); ++d) {
        if (++c[d] < dims_[d]) break;
        c[d] = 0;
      }
    }
  }

  static FeasibilityMask uniform(std::vector<std::size_t> dims, bool feasible) {
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    return FeasibilityMask(std::move(dims), std::vector<bool>(total, feasible));
  }

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t size() const { return feasible_.size(); }
  bool feasible(const Cell& c) const { return feasible_[index(c)]; }
  std::size_t feasible_count() const {
    std::size_t n = 0;
    for (bool f : feasible_) n += f;
    return n;
  }

  std::size_t index(const Cell& c) const {
    std::size_t i = 0;
    for (std::size_t d = dims_.size(); d-- > 0;) i = i * dims_[d] + c[d];
    return i;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<bool> feasible_;
};

struct TradeoffCount {
  std::size_t warm_starts = 0;
  std::size_t detections = 0;

  bool operator==(const TradeoffCount&) const = default;
};

/// All 2^(p-1) signatures, '+' ordered before '-' position by position.
inline std::vector<OrderSignature> enumerate_signatures(std::size_t p) {
  if (p < 2) throw ValidationError("at least 2 objectives are required");
  const std::size_t d = p - 1;
  std::vector<OrderSignature> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << d); ++bits) {
    OrderSignature s;
    for (std::size_t i = 0; i < d; ++i) s.ascending.push_back(((bits >> (d - 1 - i)) & 1u) == 0);
    out.push_back(std::move(s));
  }
  return out;
}

/// Detected: an earlier, undetected infeasible cell is componentwise >= it.
/// Warm start (feasible cells only): weak needs the immediate predecessor to
/// be feasible, undetected and <= the cell; strong needs any earlier feasible
/// undetected cell <= it.
inline TradeoffCount analyze_order(const FeasibilityMask& mask, const OrderSignature& sig, WsMode mode) {
  if (sig.ascending.size() != mask.dims().size())
    throw DimensionError("signature " + sig.label() + " does not match the mask");
  TradeoffCount out;
  InfeasibilityStore store;
  std::vector<std::vector<double>> minimal_feasible;
  std::optional<std::vector<double>> previous;  // last cell if it was solved feasible
  for (const auto& cell : traversal_order(mask.dims(), sig)) {
    const std::vector<double> at(cell.begin(), cell.end());
    if (propagate_infeasibility(store, at)) {
      ++out.detections;
      previous.reset();
      continue;
    }
    if (!mask.feasible(cell)) {
      record_infeasible(store, at);
      previous.reset();
      continue;
    }
    bool covered = false;
    for (const auto& f : minimal_feasible)
      if (componentwise_le(f, at)) covered = true;
    const bool warm = mode == WsMode::Weak ? previous && componentwise_le(*previous, at) : covered;
    out.warm_starts += warm;
    if (!covered) minimal_feasible.push_back(at);
    previous = at;
  }
  return out;
}

struct FrontierRow {
  OrderSignature signature;
  TradeoffCount count;
  bool nondominated = false;
};

/// analyze_order for every signature, flagging the signatures whose
/// (warm_starts, detections) pair is not beaten in both counts.
inline std::vector<FrontierRow> tradeoff_frontier(const FeasibilityMask& mask, WsMode mode) {
  std::vector<FrontierRow> rows;
  for (auto& sig : enumerate_signatures(mask.dims().size() + 1))
    rows.push_back({sig, analyze_order(mask, sig, mode), false});
  auto neg = [](const TradeoffCount& c) {
    return std::vector<double>{-static_cast<double>(c.warm_starts), -static_cast<double>(c.detections)};
  };
  for (auto& r : rows) {
    r.nondominated = true;
    for (const auto& other : rows)
      if (dominates(neg(other.count), neg(r.count))) r.nondominated = false;
  }
  return rows;
}

inline void write_tradeoff_csv(std::ostream& out, const std::vector<FrontierRow>& rows, WsMode mode,
                               bool header = true) {
  if (header) out << "signature,ws_mode,warm_starts,detections,nondominated\n";
  for (const auto& r : rows)
    out << r.signature.label() << ',' << to_string(mode) << ',' << r.count.warm_starts << ','
        << r.count.detections << ',' << (r.nondominated ? 1 : 0) << '\n';
}

/// Feasibility of every grid cell as observed by a finished run: solved
/// optimal cells are feasible, solved infeasible and skipped cells are not.
inline FeasibilityMask mask_from_report(const EcmReport& report) {
  const auto dims = report.grid.dims();
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<bool> feasible(total, false);
  std::vector<bool> seen(total, false);
  FeasibilityMask shape = FeasibilityMask::uniform(dims, true);
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto idx = shape.index(report.cells[i]);
    if (report.records[i].status == CellStatus::Limit)
      throw ValidationError("cell " + report.records[i].key + " hit a limit; its feasibility is unknown");
    feasible[idx] = report.records[i].status == CellStatus::Optimal;
    seen[idx] = true;
  }
  for (bool s : seen)
    if (!s) throw ValidationError("report does not cover every grid cell");
  return FeasibilityMask(dims, std::move(feasible));
}

}  // namespace moscal
