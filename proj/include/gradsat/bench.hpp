#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "gradsat/engine.hpp"
#include "gradsat/generators.hpp"

namespace gradsat {

struct BenchRecord {
  std::string solver = "gradsat";
  std::string family;
  int k = 0;
  long long num_vars = 0;
  long long num_clauses = 0;
  double time_limit_s = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::size_t best_cost = 0;
  double time_to_best_s = 0;
  std::uint64_t iterations = 0;
  std::vector<TraceEntry> trace;
  Assignment assignment;  // not serialized
};

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using RecordCallback = std::function<void(const BenchRecord&)>;

// One record per (instance, time limit), instances in ascending k. Each
// record is re-verified against its generated formula; a mismatch throws.
std::vector<BenchRecord> run_suite(Family family, int count, const SolveConfig& cfg,
                                   const std::vector<double>& time_limits, int workers = 1,
                                   const RecordCallback& on_record = {});

// (dataset, k, time limit in milliseconds)
using BaselineKey = std::tuple<std::string, int, long long>;
using Baseline = std::map<BaselineKey, std::size_t>;

BaselineKey baseline_key(const std::string& dataset, int k, double time_limit_s);

struct RegretRow {
  std::string solver;
  std::string dataset;
  double time_limit_s = 0;
  long long total_regret = 0;  // sum over instances of cost - baseline cost
  int instances = 0;
  long long mean_regret = 0;   // floor(total_regret / instances)
};

// Groups by (solver, dataset, time limit). Throws BenchError when a record
// has no baseline entry.
std::vector<RegretRow> regret(const std::vector<BenchRecord>& records, const Baseline& baseline);

enum class OutputFormat { csv, json };

inline constexpr const char* kRecordCsvHeader =
    "family,k,num_vars,num_clauses,time_limit_s,seed,workers,best_cost,time_to_best_s,iterations";

void write_records_csv(const std::vector<BenchRecord>& records, std::ostream& out);
void write_records_json(const std::vector<BenchRecord>& records, std::ostream& out);
std::vector<BenchRecord> read_records_csv(std::istream& in);
std::vector<BenchRecord> read_records_json(std::istream& in);

void write_regret_csv(const std::vector<RegretRow>& rows, std::ostream& out);
void write_regret_json(const std::vector<RegretRow>& rows, std::ostream& out);

void emit(const std::vector<BenchRecord>& records, OutputFormat format, const std::string& path);
void emit(const std::vector<RegretRow>& rows, OutputFormat format, const std::string& path);

// Baseline CSV: dataset,k,time_limit_s,cost
Baseline read_baseline_csv(std::istream& in);
Baseline read_baseline_file(const std::string& path);

// Recorded costs from other runs or solvers: solver,dataset,k,time_limit_s,cost.
// Produces records carrying only those fields.
std::vector<BenchRecord> read_cost_table_csv(std::istream& in);
std::vector<BenchRecord> read_cost_table_file(const std::string& path);

}  // namespace gradsat
