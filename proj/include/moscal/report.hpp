#pragma once

// Per-run records shared by the WSM and epsilon-constraint engines, plus the
// report CSV rows.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "pareto.hpp"

namespace moscal {

enum class CellStatus { Optimal, Infeasible, SkippedByPropagation, Limit };
enum class WarmKind { None, Solution, Basis, Both };

inline const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Optimal: return "Optimal";
    case CellStatus::Infeasible: return "Infeasible";
    case CellStatus::SkippedByPropagation: return "SkippedByPropagation";
    case CellStatus::Limit: return "Limit";
  }
  return "?";
}

inline const char* to_string(WarmKind k) {
  switch (k) {
    case WarmKind::None: return "none";
    case WarmKind::Solution: return "solution";
    case WarmKind::Basis: return "basis";
    case WarmKind::Both: return "both";
  }
  return "?";
}

inline WarmKind warm_kind(bool solution, bool basis) {
  if (solution && basis) return WarmKind::Both;
  if (solution) return WarmKind::Solution;
  if (basis) return WarmKind::Basis;
  return WarmKind::None;
}

struct SubproblemRecord {
  std::size_t index = 0;          // position in solve order
  std::string key;                // sample number (WSM) or 1-based level tuple "i:j" (ECM)
  std::vector<double> params;     // weight or epsilon vector
  CellStatus status = CellStatus::Infeasible;
  WarmKind warm = WarmKind::None;
  bool candidate = false;         // structurally guaranteed warm-start source exists
  bool detected = false;          // flagged infeasible by the store before solving
  bool injected = false;          // a warm solution was accepted as incumbent
  std::size_t lp_iters = 0;
  std::size_t nodes = 0;
  double wall_ms = 0.0;
  double value = kInf;            // scalarized optimum
  ObjectiveVector image;          // f(x*) when Optimal
};

struct RunConfig {
  std::string instance;
  std::string method;    // "wsm" or "ecm"
  std::string ordering;  // weight ordering or order signature label
  std::string warm;      // "none", "previous", "weak", "strong"
  bool propagate = false;
  std::size_t samples = 0;
  std::size_t grid = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
};

struct RunTotals {
  std::size_t solves = 0;
  std::size_t skips = 0;
  std::size_t injections = 0;
  std::size_t warm_starts = 0;  // cells with a guaranteed warm-start candidate
  std::size_t detections = 0;   // cells the infeasibility store flagged
  std::size_t lp_iters = 0;
  std::size_t nodes = 0;
  double wall_ms = 0.0;

  bool operator==(const RunTotals&) const = default;
};

inline RunTotals sum_records(const std::vector<SubproblemRecord>& records) {
  RunTotals t;
  for (const auto& r : records) {
    if (r.status == CellStatus::SkippedByPropagation) ++t.skips;
    else ++t.solves;
    t.injections += r.injected;
    t.warm_starts += r.candidate;
    t.detections += r.detected;
    t.lp_iters += r.lp_iters;
    t.nodes += r.nodes;
    t.wall_ms += r.wall_ms;
  }
  return t;
}

struct RunReport {
  RunConfig config;
  std::vector<SubproblemRecord> records;
  Archive archive;
  RunTotals totals;
  std::size_t expected_subproblems = 0;
  std::vector<std::size_t> grid_dims;  // ECM only: level count per constrained objective

  void finalize() { totals = sum_records(records); }

  /// Totals equal the record sums and there is one record per subproblem.
  void validate() const {
    if (records.size() != expected_subproblems)
      throw ValidationError("report has " + std::to_string(records.size()) + " records, expected " +
                            std::to_string(expected_subproblems));
    const auto sums = sum_records(records);
    RunTotals a = totals, b = sums;
    a.wall_ms = b.wall_ms = 0.0;
    if (!(a == b) || std::abs(totals.wall_ms - sums.wall_ms) > 1e-6 * std::max(1.0, sums.wall_ms))
      throw ValidationError("report totals do not match its records");
  }
};

inline constexpr const char* kReportHeader =
    "instance,method,ordering_or_signature,warm,propagate,subproblem,status,warm_kind,injected,"
    "lp_iters,nodes,wall_ms";

inline std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write_report_rows(std::ostream& out, const RunReport& report) {
  report.validate();
  const auto& c = report.config;
  for (const auto& r : report.records) {
    out << csv_field(c.instance) << ',' << c.method << ',' << c.ordering << ',' << c.warm << ','
        << (c.propagate ? "on" : "off") << ',' << r.key << ',' << to_string(r.status) << ','
        << to_string(r.warm) << ',' << (r.injected ? 1 : 0) << ',' << r.lp_iters << ',' << r.nodes
        << ',' << format_ms(r.wall_ms) << '\n';
  }
}

}  // namespace moscal
