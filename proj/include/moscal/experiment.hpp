#pragma once

// Experiment matrices over instances and method options, relative summaries,
// tidy plot data, and oracle-backed verification of finished runs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "branch_bound.hpp"
#include "ecm.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "ordergrid.hpp"
#include "pareto.hpp"
#include "random.hpp"
#include "report.hpp"
#include "wsm.hpp"

namespace moscal {

struct ExperimentMatrix {
  std::vector<Problem> instances;
  bool wsm = true;
  bool ecm = true;
  std::vector<WeightOrdering> orderings{WeightOrdering::Random, WeightOrdering::Lexicographic,
                                        WeightOrdering::Angle};
  std::vector<WsmWarm> wsm_warm{WsmWarm::None, WsmWarm::Previous};
  std::vector<OrderSignature> signatures;  // empty: every signature for the instance
  std::vector<WarmPolicy> ecm_warm{WarmPolicy::None, WarmPolicy::Weak, WarmPolicy::Strong};
  std::vector<bool> propagate{false, true};
  std::size_t samples = 100;
  std::size_t grid = 10;
  std::optional<double> rho;
  std::size_t repetitions = 1;
  std::uint64_t master_seed = 1;
  MipOptions mip;

  void validate() const {
    if (instances.empty()) throw ValidationError("experiment has no instances");
    if (samples < 1 || grid < 1 || repetitions < 1) throw ValidationError("samples, grid and repetitions must be positive");
    if (rho && !(*rho > 0.0)) throw ValidationError("rho must be positive");
  }
};

/// Stable per-cell seed from the master seed and the cell's identity.
inline std::uint64_t cell_seed(std::uint64_t master, const std::string& instance, const std::string& method,
                               const std::string& options = "") {
  return Fnv1a().add(master).add(instance).add("|").add(method).add("|").add(options).digest();
}

struct RunEntry {
  std::string method;   // "wsm" or "ecm"
  std::string variant;  // summary label
  std::string baseline; // label of the warm-off, propagation-off run it is compared to
  RunReport report;
  std::optional<EcmReport> ecm;
  double wall_ms = 0.0;  // summed over repetitions
};

struct SummaryRow {
  std::string instance, method, variant;
  double rel_runtime = 1.0;
  double rel_iters = 1.0;
  std::size_t warm_starts = 0;
  std::size_t detections = 0;
};

struct ExperimentResult {
  std::vector<RunEntry> runs;
  std::vector<SummaryRow> summary;
  /// Per instance: trade-off frontier on the mask of the cold ascending ECM run.
  std::vector<std::pair<std::string, std::vector<FrontierRow>>> tradeoff_weak, tradeoff_strong;
};

inline std::string ecm_variant(const std::string& signature, WarmPolicy warm, bool propagate) {
  return signature + "/" + to_string(warm) + "/" + (propagate ? "on" : "off");
}

inline std::string wsm_variant(WeightOrdering o, WsmWarm warm) {
  return std::string(to_string(o)) + "/" + (warm == WsmWarm::Previous ? "previous" : "none");
}

/// value / baseline, with 0 / 0 read as 1 so the baseline row is exactly 1.
inline double ratio(double value, double baseline) {
  if (baseline == 0.0) return value == 0.0 ? 1.0 : kInf;
  return value / baseline;
}

inline ExperimentResult run_experiment(const ExperimentMatrix& matrix) {
  matrix.validate();
  ExperimentResult result;
  for (const auto& problem : matrix.instances) {
    const std::size_t p = problem.objective_count();
    if (matrix.wsm) {
      // The weight seed leaves out ordering and warm start so that every
      // variant solves the same weights.
      const auto seed = cell_seed(matrix.master_seed, problem.name, "wsm", std::to_string(matrix.samples));
      for (auto ordering : matrix.orderings)
        for (auto warm : matrix.wsm_warm) {
          WsmConfig cfg;
          cfg.num_samples = matrix.samples;
          cfg.ordering = ordering;
          cfg.warm_start = warm;
          cfg.seed = seed;
          cfg.mip = matrix.mip;
          RunEntry e;
          e.method = "wsm";
          e.variant = wsm_variant(ordering, warm);
          e.baseline = wsm_variant(ordering, WsmWarm::None);
          for (std::size_t r = 0; r < matrix.repetitions; ++r) {
            auto rep = run_wsm(problem, cfg);
            e.wall_ms += rep.totals.wall_ms;
            if (r == 0) e.report = std::move(rep);
          }
          result.runs.push_back(std::move(e));
        }
    }
    if (matrix.ecm) {
      const auto estimate = payoff_table(problem, matrix.mip);
      auto sigs = matrix.signatures.empty() ? enumerate_signatures(p) : matrix.signatures;
      for (const auto& sig : sigs)
        if (sig.ascending.size() != p - 1)
          throw ValidationError("signature " + sig.label() + " does not fit " + problem.name);
      const auto seed = cell_seed(matrix.master_seed, problem.name, "ecm", std::to_string(matrix.grid));
      std::optional<EcmReport> mask_source;
      for (const auto& sig : sigs)
        for (auto warm : matrix.ecm_warm)
          for (bool prop : matrix.propagate) {
            EcmConfig cfg;
            cfg.m = matrix.grid;
            cfg.signature = sig;
            cfg.warm = warm;
            cfg.propagate = prop;
            cfg.rho = matrix.rho;
            cfg.seed = seed;
            cfg.estimate = estimate;
            cfg.mip = matrix.mip;
            RunEntry e;
            e.method = "ecm";
            e.variant = ecm_variant(sig.label(), warm, prop);
            e.baseline = ecm_variant(sig.label(), WarmPolicy::None, false);
            for (std::size_t r = 0; r < matrix.repetitions; ++r) {
              auto rep = run_ecm(problem, cfg);
              e.wall_ms += rep.totals.wall_ms;
              if (r == 0) e.ecm = std::move(rep);
            }
            e.report = *e.ecm;
            if (!prop && !mask_source) mask_source = e.ecm;
            result.runs.push_back(std::move(e));
          }
      if (!mask_source) {
        EcmConfig cfg;
        cfg.m = matrix.grid;
        cfg.rho = matrix.rho;
        cfg.estimate = estimate;
        cfg.mip = matrix.mip;
        mask_source = run_ecm(problem, cfg);
      }
      const auto mask = mask_from_report(*mask_source);
      result.tradeoff_weak.emplace_back(problem.name, tradeoff_frontier(mask, WsMode::Weak));
      result.tradeoff_strong.emplace_back(problem.name, tradeoff_frontier(mask, WsMode::Strong));
    }
  }

  std::map<std::tuple<std::string, std::string, std::string>, const RunEntry*> index;
  for (const auto& e : result.runs) index[{e.report.config.instance, e.method, e.variant}] = &e;
  for (const auto& e : result.runs) {
    SummaryRow row;
    row.instance = e.report.config.instance;
    row.method = e.method;
    row.variant = e.variant;
    row.warm_starts = e.report.totals.warm_starts;
    row.detections = e.report.totals.detections;
    auto it = index.find({row.instance, e.method, e.baseline});
    if (it != index.end()) {
      row.rel_runtime = ratio(e.wall_ms, it->second->wall_ms);
      row.rel_iters = ratio(static_cast<double>(e.report.totals.lp_iters),
                            static_cast<double>(it->second->report.totals.lp_iters));
    } else {
      row.rel_runtime = row.rel_iters = std::nan("");
    }
    result.summary.push_back(row);
  }
  return result;
}

inline constexpr const char* kSummaryHeader = "instance,method,variant,rel_runtime,rel_iters,warm_starts,detections";
inline constexpr const char* kPlotHeader = "instance,method,variant,metric,value";

inline std::string format_ratio(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows)
    out << csv_field(r.instance) << ',' << r.method << ',' << r.variant << ',' << format_ratio(r.rel_runtime) << ','
        << format_ratio(r.rel_iters) << ',' << r.warm_starts << ',' << r.detections << '\n';
}

/// One observation per row.
inline void write_plot_data(std::ostream& out, const ExperimentResult& result) {
  out << kPlotHeader << '\n';
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& e = result.runs[i];
    const auto& s = result.summary[i];
    const auto& t = e.report.totals;
    const std::string lead = csv_field(s.instance) + ',' + s.method + ',' + s.variant + ',';
    out << lead << "rel_runtime," << format_ratio(s.rel_runtime) << '\n';
    out << lead << "rel_iters," << format_ratio(s.rel_iters) << '\n';
    out << lead << "wall_ms," << format_ms(e.wall_ms) << '\n';
    out << lead << "lp_iters," << t.lp_iters << '\n';
    out << lead << "nodes," << t.nodes << '\n';
    out << lead << "warm_starts," << t.warm_starts << '\n';
    out << lead << "injections," << t.injections << '\n';
    out << lead << "detections," << t.detections << '\n';
    out << lead << "skips," << t.skips << '\n';
    out << lead << "archive_size," << e.report.archive.size() << '\n';
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

/// report.csv, summary.csv, plot_data.csv, tradeoff.csv and one archive CSV
/// per run under `dir`.
inline void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result,
                             const std::vector<Problem>& instances) {
  std::filesystem::create_directories(dir / "archives");
  std::ostringstream report;
  report << kReportHeader << '\n';
  for (const auto& e : result.runs) write_report_rows(report, e.report);
  write_text(dir / "report.csv", report.str());

  std::ostringstream summary;
  write_summary_csv(summary, result.summary);
  write_text(dir / "summary.csv", summary.str());

  std::ostringstream plot;
  write_plot_data(plot, result);
  write_text(dir / "plot_data.csv", plot.str());

  std::ostringstream trade;
  trade << "instance,signature,ws_mode,warm_starts,detections,nondominated\n";
  for (const auto* set : {&result.tradeoff_weak, &result.tradeoff_strong})
    for (const auto& [name, rows] : *set) {
      std::ostringstream part;
      write_tradeoff_csv(part, rows, set == &result.tradeoff_weak ? WsMode::Weak : WsMode::Strong, false);
      std::istringstream lines(part.str());
      for (std::string line; std::getline(lines, line);) trade << csv_field(name) << ',' << line << '\n';
    }
  write_text(dir / "tradeoff.csv", trade.str());

  std::map<std::string, const Problem*> by_name;
  for (const auto& p : instances) by_name[p.name] = &p;
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& e = result.runs[i];
    const Problem& p = *by_name.at(e.report.config.instance);
    std::string name = p.name + "_" + e.method + "_" + e.variant + ".csv";
    for (auto& c : name)
      if (c == ' ' || c == '/') c = '_';
      else if (c == '+') c = 'p';
      else if (c == '-') c = 'm';
    std::ostringstream a;
    write_archive_csv(a, e.report.archive, p.objective_count(), p.num_vars);
    write_text(dir / "archives" / name, a.str());
  }
}

// ---------------------------------------------------------------------------
// Verification

struct Verdict {
  std::vector<std::string> violations;
  bool pass() const { return violations.empty(); }
};

namespace detail {

inline bool covers_integer_range(const EpsilonGrid& grid, const std::vector<ObjectiveVector>& front) {
  if (front.empty()) return true;
  for (std::size_t d = 0; d < grid.dimension(); ++d) {
    double lo = kInf, hi = -kInf;
    for (const auto& y : front) {
      lo = std::min(lo, y[d + 1]);
      hi = std::max(hi, y[d + 1]);
    }
    const auto& lv = grid.levels[d];
    for (double v = std::ceil(lo); v <= hi; v += 1.0)
      if (!std::binary_search(lv.begin(), lv.end(), v)) return false;
  }
  return true;
}

inline bool on_front(const std::vector<ObjectiveVector>& front, const ObjectiveVector& y) {
  return std::any_of(front.begin(), front.end(), [&](const ObjectiveVector& z) { return same_point(z, y, kArchiveTol); });
}

}  // namespace detail

inline Verdict verify_wsm(const Problem& problem, const RunReport& report) {
  Verdict v;
  try {
    report.validate();
  } catch (const ValidationError& e) {
    v.violations.push_back(e.what());
  }
  const auto front = brute_force_oracle(problem).objective_vectors();
  for (const auto& e : report.archive.entries()) {
    if (!detail::on_front(front, e.objectives)) v.violations.push_back("archive point is not efficient");
    else if (!is_supported(e.objectives, front)) v.violations.push_back("archive point is not supported");
  }
  for (const auto& r : report.records) {
    if (r.status != CellStatus::Optimal) {
      v.violations.push_back("weight " + r.key + " was not solved to optimality");
      continue;
    }
    double best = kInf;
    for (const auto& y : front) best = std::min(best, dot(r.params, y));
    if (std::abs(dot(r.params, r.image) - best) > 1e-9)
      v.violations.push_back("weight " + r.key + " returned a point that is not its weighted-sum minimizer");
    const auto cold = solve_mip(problem, scalarized_objective(problem, r.params));
    if (cold.status != MipStatus::Optimal || std::abs(cold.objective_value - r.value) > 1e-6)
      v.violations.push_back("weight " + r.key + " differs from its cold re-solve");
  }
  return v;
}

/// Skipped cells are re-solved cold and must be infeasible; solved cells must
/// match a cold re-solve; points must be efficient, and with a grid covering
/// every integer level of the front the archive must equal the front.
inline Verdict verify_ecm(const Problem& problem, const EcmReport& report) {
  Verdict v;
  try {
    report.validate();
  } catch (const ValidationError& e) {
    v.violations.push_back(e.what());
  }
  const auto oracle = brute_force_oracle(problem);
  const auto front = oracle.objective_vectors();
  for (const auto& r : report.records)
    if (r.status == CellStatus::Optimal && !detail::on_front(front, r.image))
      v.violations.push_back("cell " + r.key + " returned a dominated point");
  if (detail::covers_integer_range(report.grid, front) && !report.archive.same_front(oracle))
    v.violations.push_back("archive differs from the exact nondominated set");

  const auto sub = build_subproblem(problem, report.grid.epsilon(report.cells.front()), report.config.rho);
  Problem model = with_rows(problem, sub.epsilon_rows);
  const std::size_t first = problem.constraints.size();
  for (const auto& r : report.records) {
    for (std::size_t d = 0; d < r.params.size(); ++d) model.constraints[first + d].rhs = r.params[d];
    const auto cold = solve_mip(model, sub.objective);
    if (r.status == CellStatus::SkippedByPropagation) {
      if (cold.status != MipStatus::Infeasible) v.violations.push_back("false skip at cell " + r.key);
    } else if (r.status == CellStatus::Infeasible) {
      if (cold.status != MipStatus::Infeasible) v.violations.push_back("cell " + r.key + " is feasible when solved cold");
    } else if (r.status == CellStatus::Optimal) {
      if (cold.status != MipStatus::Optimal || std::abs(cold.objective_value - r.value) > 1e-6)
        v.violations.push_back("cell " + r.key + " differs from its cold re-solve");
    }
  }
  return v;
}

}  // namespace moscal
