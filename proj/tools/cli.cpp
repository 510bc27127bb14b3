#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "gradsat/bench.hpp"
#include "gradsat/engine.hpp"
#include "gradsat/generators.hpp"
#include "gradsat/oracle.hpp"

namespace gradsat::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Formula load_formula(const std::string& path, std::ostream& err) {
  std::vector<std::string> warnings;
  Formula f = read_dimacs_file(path, &warnings);
  for (const auto& w : warnings) err << "c warning: " << path << ": " << w << '\n';
  return f;
}

OutputFormat format_for(const std::string& path, const std::string& requested) {
  if (requested == "json") return OutputFormat::json;
  if (requested == "csv") return OutputFormat::csv;
  return std::filesystem::path(path).extension() == ".json" ? OutputFormat::json : OutputFormat::csv;
}

struct SolveArgs {
  std::string path;
  double time_limit = 60.0;
  std::uint64_t seed = 0;
  double lr = 1e-4;
  int workers = 1;
  std::optional<std::uint64_t> restart_after;
  std::optional<std::size_t> target_cost;
  std::optional<std::uint64_t> max_iters;
  std::string precision = "f64";
  std::string trace_path;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err, const std::atomic<bool>* cancel) {
  const Formula f = load_formula(a.path, err);
  const CompiledFormula cf = preprocess(f);
  const IncidenceMatrix w = build_incidence(cf);

  SolveConfig cfg;
  cfg.time_limit_s = a.time_limit;
  cfg.seed = a.seed;
  cfg.learning_rate = a.lr;
  cfg.restart_after = a.restart_after;
  cfg.target_cost = a.target_cost;
  cfg.max_iters = a.max_iters;
  cfg.precision = a.precision == "f32" ? Precision::f32 : Precision::f64;

  auto on_improve = [&](double, std::size_t cost, const Assignment&) { out << "o " << cost << '\n' << std::flush; };
  const SolveReport rep = portfolio_solve(cf, w, cfg, a.workers, on_improve, cancel);

  if (!verify(f, rep.best_assignment, rep.best_cost))
    throw std::logic_error("internal error: best assignment does not re-verify");

  out << (rep.best_cost == 0 ? "s SATISFIABLE" : "s UNKNOWN") << '\n';
  out << format_v_line(rep.best_assignment) << '\n' << std::flush;

  err << "c termination " << to_string(rep.termination) << ", iterations " << rep.iterations << ", best cost "
      << rep.best_cost << " at " << rep.time_to_best() << " s\n";

  if (!a.trace_path.empty()) {
    std::ofstream trace(a.trace_path);
    if (!trace) throw std::runtime_error("cannot open trace file `" + a.trace_path + "`");
    trace << "elapsed_s,iteration,cost\n";
    for (const TraceEntry& e : rep.trace) trace << e.elapsed_s << ',' << e.iteration << ',' << e.cost << '\n';
  }
  return rep.best_cost == 0 ? kExitSatisfiable : kExitUnknown;
}

struct GenerateArgs {
  std::string family;
  std::optional<int> k;
  std::optional<int> suite;
  std::string out_dir = ".";
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const auto family = parse_family(a.family);
  if (!family) throw UsageError("unknown family `" + a.family + "` (expected php, gt, par or cb)");
  if (a.k.has_value() == a.suite.has_value()) throw UsageError("give exactly one of an instance index or --suite N");
  if (a.k && *a.k < 1) throw UsageError("instance index must be >= 1");
  if (a.suite && *a.suite < 1) throw UsageError("--suite count must be >= 1");

  std::filesystem::create_directories(a.out_dir);
  const int first = a.k ? *a.k : 1;
  const int last = a.k ? *a.k : *a.suite;
  for (int k = first; k <= last; ++k) {
    const Formula f = generate(*family, k);
    const auto path = std::filesystem::path(a.out_dir) / (std::string(to_string(*family)) + "_" + std::to_string(k) + ".cnf");
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot open `" + path.string() + "` for writing");
    file << "c family=" << to_string(*family) << " k=" << k << " vars=" << f.num_vars << " clauses=" << f.num_clauses()
         << '\n';
    write_dimacs(f, file);
    out << path.string() << '\n';
  }
  return 0;
}

int cmd_oracle(const std::string& path, int cap, std::ostream& out, std::ostream& err) {
  const Formula f = load_formula(path, err);
  const OracleResult r = brute_force(f, cap);
  out << "optimum " << r.optimal_cost << '\n';
  out << format_v_line(r.witness) << '\n';
  err << "c enumerated " << r.enumerated << " assignments\n";
  return 0;
}

int cmd_verify(const std::string& cnf_path, const std::string& solution_path, std::size_t claimed, std::ostream& out,
               std::ostream& err) {
  const Formula f = load_formula(cnf_path, err);
  std::ifstream in(solution_path);
  if (!in) throw std::runtime_error("cannot open assignment file `" + solution_path + "`");
  const Assignment a = read_assignment(in, f.num_vars);
  const std::size_t actual = evaluate(f, a);
  if (actual == claimed) {
    out << "verified cost " << actual << '\n';
    return 0;
  }
  out << "mismatch: claimed " << claimed << ", actual " << actual << '\n';
  return 1;
}

struct BenchArgs {
  std::string family;
  int count = 50;
  std::vector<double> time_limits{60.0};
  std::uint64_t seed = 0;
  double lr = 1e-4;
  int workers = 1;
  std::optional<std::size_t> target_cost;
  std::string out_path;
  std::string format;
  std::string baseline_path;
  std::string regret_out;
  std::string replay_path;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  // Fail on a bad baseline before spending time on solving.
  std::optional<Baseline> baseline;
  if (!a.baseline_path.empty()) baseline = read_baseline_file(a.baseline_path);

  std::vector<BenchRecord> records;
  if (!a.replay_path.empty()) {
    records = read_cost_table_file(a.replay_path);
    if (!a.family.empty()) {
      const auto fam = parse_family(a.family);
      if (!fam) throw UsageError("unknown family `" + a.family + "`");
      std::erase_if(records, [&](const BenchRecord& r) { return r.family != to_string(*fam); });
    }
  } else {
    if (a.family.empty()) throw UsageError("bench needs a family unless --replay is given");
    const auto fam = parse_family(a.family);
    if (!fam) throw UsageError("unknown family `" + a.family + "` (expected php, gt, par or cb)");
    if (a.count < 0) throw UsageError("--count must be >= 0");
    SolveConfig cfg;
    cfg.seed = a.seed;
    cfg.learning_rate = a.lr;
    cfg.target_cost = a.target_cost;
    records = run_suite(*fam, a.count, cfg, a.time_limits, a.workers, [&](const BenchRecord& r) {
      err << "c " << r.family << "_" << r.k << " T=" << r.time_limit_s << "s cost " << r.best_cost << " after "
          << r.time_to_best_s << " s\n";
    });
  }

  if (!a.out_path.empty()) emit(records, format_for(a.out_path, a.format), a.out_path);

  if (baseline) {
    const auto rows = regret(records, *baseline);
    write_regret_csv(rows, out);
    if (!a.regret_out.empty()) emit(rows, format_for(a.regret_out, a.format), a.regret_out);
  } else if (a.out_path.empty()) {
    write_records_csv(records, out);
  }
  return 0;
}

}  // namespace

Assignment read_assignment(std::istream& in, std::int32_t num_vars) {
  std::vector<std::string> lines;
  bool has_v = false;
  for (std::string line; std::getline(in, line);) {
    std::size_t p = line.find_first_not_of(" \t");
    if (p == std::string::npos) continue;
    line.erase(0, p);
    if (line[0] == 'v') has_v = true;
    lines.push_back(line);
  }
  std::vector<int> seen(num_vars, 0);
  Assignment a(static_cast<std::size_t>(num_vars));
  for (const std::string& line : lines) {
    const char tag = line[0];
    if (has_v && tag != 'v') continue;
    if (!has_v && (tag == 'c' || tag == 's' || tag == 'o')) continue;
    std::istringstream ss(tag == 'v' ? line.substr(1) : line);
    std::string tok;
    while (ss >> tok) {
      long long lit = 0;
      try {
        std::size_t used = 0;
        lit = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormulaError("invalid literal `" + tok + "` in assignment");
      }
      if (lit == 0) continue;
      const long long v = lit < 0 ? -lit : lit;
      if (v > num_vars) throw FormulaError("assignment mentions variable " + std::to_string(v) + " beyond " + std::to_string(num_vars));
      if (seen[v - 1]++) throw FormulaError("assignment mentions variable " + std::to_string(v) + " twice");
      a.bits[v - 1] = lit > 0;
    }
  }
  for (std::int32_t i = 0; i < num_vars; ++i)
    if (!seen[i]) throw FormulaError("assignment length mismatch: variable " + std::to_string(i + 1) + " missing");
  return a;
}

std::string format_v_line(const Assignment& a) {
  std::string s = "v";
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += ' ';
    if (!a[i]) s += '-';
    s += std::to_string(i + 1);
  }
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const std::atomic<bool>* cancel) {
  CLI::App app{"Gradient-descent MaxSAT solver and instance tools", "gradsat"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a DIMACS CNF instance, streaming o/s/v lines");
  solve_cmd->add_option("file", solve_args.path, "DIMACS CNF file")->required();
  solve_cmd->add_option("--time-limit", solve_args.time_limit, "Wall-clock limit in seconds")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--seed", solve_args.seed, "Random seed");
  solve_cmd->add_option("--lr", solve_args.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--workers", solve_args.workers, "Parallel seeds")
      ->envname("GRADSAT_THREADS")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--restart-after", solve_args.restart_after, "Re-randomize after N steps without improvement")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--target-cost", solve_args.target_cost, "Stop once this cost is reached");
  solve_cmd->add_option("--max-iters", solve_args.max_iters, "Iteration cap");
  solve_cmd->add_option("--precision", solve_args.precision, "Floating-point width")
      ->check(CLI::IsMember({"f32", "f64"}));
  solve_cmd->add_option("--trace", solve_args.trace_path, "Write the improvement trace as CSV");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Write php/gt/par/cb instances as <family>_<k>.cnf");
  gen_cmd->add_option("family", gen_args.family, "php, gt, par or cb")->required();
  gen_cmd->add_option("k", gen_args.k, "Instance index");
  gen_cmd->add_option("--suite", gen_args.suite, "Write instances 1..N");
  gen_cmd->add_option("--out", gen_args.out_dir, "Output directory");

  std::string oracle_path;
  int oracle_cap = kDefaultOracleVarCap;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact optimum by exhaustive enumeration");
  oracle_cmd->add_option("file", oracle_path, "DIMACS CNF file")->required();
  oracle_cmd->add_option("--cap", oracle_cap, "Maximum variable count")->check(CLI::Range(0, 40));

  std::string verify_cnf, verify_solution;
  std::size_t verify_claimed = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Check that an assignment has the claimed cost");
  verify_cmd->add_option("file", verify_cnf, "DIMACS CNF file")->required();
  verify_cmd->add_option("assignment", verify_solution, "Assignment file (v lines or signed literals)")->required();
  verify_cmd->add_option("cost", verify_claimed, "Claimed cost")->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Run a family suite under time limits and report costs/regret");
  bench_cmd->add_option("family", bench_args.family, "php, gt, par or cb");
  bench_cmd->add_option("--count", bench_args.count, "Instances 1..N");
  bench_cmd->add_option("--time-limits", bench_args.time_limits, "Comma-separated limits in seconds")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", bench_args.seed, "Random seed");
  bench_cmd->add_option("--lr", bench_args.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--workers", bench_args.workers, "Parallel seeds per instance")
      ->envname("GRADSAT_THREADS")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--target-cost", bench_args.target_cost, "Stop each run once this cost is reached");
  bench_cmd->add_option("--out", bench_args.out_path, "Records file (.csv or .json)");
  bench_cmd->add_option("--format", bench_args.format, "Force csv or json")->check(CLI::IsMember({"csv", "json"}));
  bench_cmd->add_option("--baseline", bench_args.baseline_path, "Baseline costs CSV (dataset,k,time_limit_s,cost)");
  bench_cmd->add_option("--regret-out", bench_args.regret_out, "Write the regret table here");
  bench_cmd->add_option("--replay", bench_args.replay_path,
                        "Use recorded costs (solver,dataset,k,time_limit_s,cost) instead of solving");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("gradsat");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << '\n';
    err << "run `gradsat --help` for usage\n";
    return kExitError;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args, out, err, cancel);
    if (*gen_cmd) return cmd_generate(gen_args, out);
    if (*oracle_cmd) return cmd_oracle(oracle_path, oracle_cap, out, err);
    if (*verify_cmd) return cmd_verify(verify_cnf, verify_solution, verify_claimed, out, err);
    if (*bench_cmd) return cmd_bench(bench_args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace gradsat::cli
