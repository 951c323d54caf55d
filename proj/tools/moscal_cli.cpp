// moscal: generate instances, run WSM / epsilon-constraint experiments,
// analyze traversal orders and verify results against the enumeration oracle.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moscal/experiment.hpp"
#include "moscal/instances.hpp"

namespace fs = std::filesystem;
using namespace moscal;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitVerification = 3;

struct Flags {
  std::vector<std::string> instances;
  std::string method;
  std::size_t samples = 100;
  std::string ordering;
  std::size_t grid = 10;
  std::string signature;
  std::string warm;
  std::string propagate;
  std::optional<double> rho;
  std::uint64_t seed = 1;
  std::string out = ".";
  bool verify = false;
  std::string family = "KP";
  std::size_t size = 10;
  std::size_t objectives = 3;
};

void add_run_flags(CLI::App* cmd, Flags& f, bool many_instances) {
  if (many_instances)
    cmd->add_option("--instance", f.instances, "Instance JSON file (repeatable)")->required();
  else
    cmd->add_option("--instance", f.instances, "Instance JSON file")->required()->expected(1);
  cmd->add_option("--method", f.method, "wsm or ecm")->check(CLI::IsMember({"wsm", "ecm"}));
  cmd->add_option("--samples", f.samples, "Number of weight samples (WSM)")->check(CLI::PositiveNumber);
  cmd->add_option("--ordering", f.ordering, "Weight ordering")->check(CLI::IsMember({"random", "lex", "angle"}));
  cmd->add_option("--grid", f.grid, "Epsilon levels per constrained objective")->check(CLI::PositiveNumber);
  cmd->add_option("--signature", f.signature, "Traversal signature, e.g. o+-");
  cmd->add_option("--warm", f.warm, "Warm start: none, weak or strong (WSM: weak/strong/previous pass the previous solution)")
      ->check(CLI::IsMember({"none", "weak", "strong", "previous"}));
  cmd->add_option("--propagate", f.propagate, "Infeasibility propagation")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--rho", f.rho, "Augmentation weight (default: derived from the objective ranges)");
  cmd->add_option("--seed", f.seed, "Seed (master seed for report)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--verify", f.verify, "Check the results against the enumeration oracle");
}

WsmWarm wsm_warm(const std::string& w) { return w.empty() || w == "none" ? WsmWarm::None : WsmWarm::Previous; }

WarmPolicy ecm_warm(const std::string& w) {
  if (w == "previous") throw ValidationError("--warm previous applies to wsm only");
  return w.empty() ? WarmPolicy::None : *parse_warm_policy(w);
}

void print_totals(const RunReport& r) {
  const auto& t = r.totals;
  std::cout << r.config.instance << ' ' << r.config.method << ' ' << r.config.ordering << " warm=" << r.config.warm
            << " propagate=" << (r.config.propagate ? "on" : "off") << ": " << r.records.size() << " subproblems, "
            << t.solves << " solved, " << t.skips << " skipped, " << t.injections << " injections, " << t.warm_starts
            << " guaranteed warm starts, " << t.detections << " detections, " << t.lp_iters << " LP iterations, "
            << t.nodes << " nodes, " << format_ms(t.wall_ms) << " ms, archive " << r.archive.size() << " points\n";
}

int report_verdict(const Verdict& v, const std::string& what) {
  if (v.pass()) {
    std::cout << "verify " << what << ": PASS\n";
    return 0;
  }
  std::cout << "verify " << what << ": FAIL\n";
  for (const auto& s : v.violations) std::cout << "  " << s << '\n';
  return kExitVerification;
}

int cmd_generate(const Flags& f) {
  const auto family = parse_family(f.family);
  if (!family) throw ValidationError("unknown family " + f.family);
  const GenSpec spec{*family, f.size, f.objectives, f.seed};
  const auto p = generate(spec);
  fs::create_directories(f.out);
  const auto path = fs::path(f.out) / instance_filename(spec);
  save_instance(p, path.string());
  std::cout << path.string() << '\n';
  return 0;
}

int cmd_solve(const Flags& f, bool always_verify) {
  const auto problem = load_instance(f.instances.at(0));
  const std::string method = f.method.empty() ? "ecm" : f.method;
  fs::create_directories(f.out);
  std::ostringstream rows;
  rows << kReportHeader << '\n';
  std::ostringstream archive;
  std::optional<Verdict> verdict;
  const bool check = f.verify || always_verify;

  if (method == "wsm") {
    WsmConfig cfg;
    cfg.num_samples = f.samples;
    cfg.ordering = f.ordering.empty() ? WeightOrdering::Random : *parse_ordering(f.ordering);
    cfg.warm_start = wsm_warm(f.warm);
    cfg.seed = f.seed;
    const auto rep = run_wsm(problem, cfg);
    write_report_rows(rows, rep);
    write_archive_csv(archive, rep.archive, problem.objective_count(), problem.num_vars);
    print_totals(rep);
    if (check) verdict = verify_wsm(problem, rep);
  } else {
    EcmConfig cfg;
    cfg.m = f.grid;
    if (!f.signature.empty()) cfg.signature = OrderSignature::parse(f.signature);
    cfg.warm = ecm_warm(f.warm);
    cfg.propagate = f.propagate == "on";
    cfg.rho = f.rho;
    cfg.seed = f.seed;
    const auto rep = run_ecm(problem, cfg);
    write_report_rows(rows, rep);
    write_archive_csv(archive, rep.archive, problem.objective_count(), problem.num_vars);
    print_totals(rep);
    if (check) verdict = verify_ecm(problem, rep);
  }
  write_text(fs::path(f.out) / "report.csv", rows.str());
  write_text(fs::path(f.out) / "archive.csv", archive.str());
  return verdict ? report_verdict(*verdict, problem.name) : 0;
}

int cmd_analyze(const Flags& f) {
  const auto problem = load_instance(f.instances.at(0));
  EcmConfig cfg;
  cfg.m = f.grid;
  cfg.rho = f.rho;
  const auto rep = run_ecm(problem, cfg);
  const auto mask = mask_from_report(rep);
  std::vector<WsMode> modes;
  if (f.warm.empty() || f.warm == "weak") modes.push_back(WsMode::Weak);
  if (f.warm.empty() || f.warm == "strong") modes.push_back(WsMode::Strong);
  if (modes.empty()) throw ValidationError("analyze-order takes --warm weak or strong");

  std::ostringstream csv;
  csv << "signature,ws_mode,warm_starts,detections,nondominated\n";
  for (auto mode : modes) {
    auto rows = tradeoff_frontier(mask, mode);
    if (!f.signature.empty()) {
      const auto sig = OrderSignature::parse(f.signature);
      std::erase_if(rows, [&](const FrontierRow& r) { return !(r.signature == sig); });
      if (rows.empty()) throw ValidationError("signature " + f.signature + " does not fit the instance");
    }
    write_tradeoff_csv(csv, rows, mode, false);
  }
  std::cout << mask.feasible_count() << " of " << mask.size() << " cells feasible\n" << csv.str();
  fs::create_directories(f.out);
  write_text(fs::path(f.out) / "tradeoff.csv", csv.str());
  return 0;
}

int cmd_report(const Flags& f) {
  ExperimentMatrix m;
  for (const auto& path : f.instances) m.instances.push_back(load_instance(path));
  m.samples = f.samples;
  m.grid = f.grid;
  m.rho = f.rho;
  m.master_seed = f.seed;
  if (f.method == "wsm") m.ecm = false;
  if (f.method == "ecm") m.wsm = false;
  if (!f.ordering.empty()) m.orderings = {*parse_ordering(f.ordering)};
  if (!f.signature.empty()) m.signatures = {OrderSignature::parse(f.signature)};
  if (!f.warm.empty()) {
    m.wsm_warm = {wsm_warm(f.warm)};
    if (f.warm != "previous") m.ecm_warm = {*parse_warm_policy(f.warm)};
    else m.ecm = false;
  }
  if (!f.propagate.empty()) m.propagate = {f.propagate == "on"};

  const auto result = run_experiment(m);
  write_experiment(f.out, result, m.instances);
  for (const auto& e : result.runs) print_totals(e.report);
  std::cout << "wrote " << result.runs.size() << " runs to " << f.out << '\n';
  if (!f.verify) return 0;

  int code = 0;
  for (const auto& e : result.runs) {
    const Problem* p = nullptr;
    for (const auto& q : m.instances)
      if (q.name == e.report.config.instance) p = &q;
    const auto v = e.ecm ? verify_ecm(*p, *e.ecm) : verify_wsm(*p, e.report);
    if (report_verdict(v, e.report.config.instance + " " + e.method + " " + e.variant) != 0) code = kExitVerification;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective integer programming with warm-started scalarizations"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("generate", "Write a seeded KP, AP or TSP instance");
  gen->add_option("--family", f.family, "KP, AP or TSP")->check(CLI::IsMember({"KP", "AP", "TSP"}));
  gen->add_option("--size", f.size, "Items, agents or cities")->check(CLI::PositiveNumber);
  gen->add_option("--objectives", f.objectives, "Number of objectives")->check(CLI::PositiveNumber);
  gen->add_option("--seed", f.seed, "Generator seed");
  gen->add_option("--out", f.out, "Output directory");

  auto* solve = app.add_subcommand("solve", "Run one WSM or epsilon-constraint configuration");
  add_run_flags(solve, f, false);
  auto* verify = app.add_subcommand("verify", "Run one configuration and check it against the oracle");
  add_run_flags(verify, f, false);
  auto* analyze = app.add_subcommand("analyze-order", "Warm-start / detection trade-off of every traversal order");
  add_run_flags(analyze, f, false);
  auto* report = app.add_subcommand("report", "Run an experiment matrix and write report, summary and plot CSVs");
  add_run_flags(report, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (gen->parsed()) return cmd_generate(f);
    if (solve->parsed()) return cmd_solve(f, false);
    if (verify->parsed()) return cmd_solve(f, true);
    if (analyze->parsed()) return cmd_analyze(f);
    if (report->parsed()) return cmd_report(f);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
