#include "gradsat/bench.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gradsat/oracle.hpp"

namespace gradsat {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_field(const std::string& s, const char* what, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw BenchError("line " + std::to_string(line_no) + ": invalid " + what + " `" + s + "`");
  return value;
}

// Reads the header and returns the data lines, each split into fields.
std::vector<std::vector<std::string>> read_table(std::istream& in, const std::string& expected_header) {
  std::string line;
  if (!std::getline(in, line)) throw BenchError("empty CSV input, expected header `" + expected_header + "`");
  while (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) throw BenchError("unexpected CSV header `" + line + "`, expected `" + expected_header + "`");
  std::vector<std::vector<std::string>> rows;
  std::size_t expected_fields = split_csv(expected_header).size();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv(line);
    if (fields.size() != expected_fields)
      throw BenchError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected_fields) +
                       " fields, got " + std::to_string(fields.size()));
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BenchError("cannot open `" + path + "` for writing");
  return out;
}

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::vector<BenchRecord> run_suite(Family family, int count, const SolveConfig& cfg,
                                   const std::vector<double>& time_limits, int workers,
                                   const RecordCallback& on_record) {
  validate(cfg);
  if (workers < 1) throw ConfigError("worker count must be at least 1");
  std::vector<BenchRecord> records;
  for (int k = 1; k <= count; ++k) {
    const Formula f = generate(family, k);
    const CompiledFormula cf = preprocess(f);
    const IncidenceMatrix w = build_incidence(cf);
    for (double limit : time_limits) {
      SolveConfig local = cfg;
      local.time_limit_s = limit;
      SolveReport rep = portfolio_solve(cf, w, local, workers);
      if (!verify(f, rep.best_assignment, rep.best_cost))
        throw BenchError(std::string(to_string(family)) + "(" + std::to_string(k) +
                         "): reported cost does not re-verify against its assignment");
      BenchRecord r;
      r.family = std::string(to_string(family));
      r.k = k;
      r.num_vars = f.num_vars;
      r.num_clauses = static_cast<long long>(f.num_clauses());
      r.time_limit_s = limit;
      r.seed = cfg.seed;
      r.workers = workers;
      r.best_cost = rep.best_cost;
      r.time_to_best_s = rep.time_to_best();
      r.iterations = rep.iterations;
      r.trace = std::move(rep.trace);
      r.assignment = std::move(rep.best_assignment);
      if (on_record) on_record(r);
      records.push_back(std::move(r));
    }
  }
  return records;
}

BaselineKey baseline_key(const std::string& dataset, int k, double time_limit_s) {
  return {dataset, k, std::llround(time_limit_s * 1000.0)};
}

std::vector<RegretRow> regret(const std::vector<BenchRecord>& records, const Baseline& baseline) {
  std::map<std::tuple<std::string, std::string, long long>, RegretRow> groups;
  for (const BenchRecord& r : records) {
    const auto key = baseline_key(r.family, r.k, r.time_limit_s);
    auto it = baseline.find(key);
    if (it == baseline.end())
      throw BenchError("no baseline cost for " + r.family + " k=" + std::to_string(r.k) +
                       " time_limit_s=" + fmt_double(r.time_limit_s));
    RegretRow& row = groups[{r.solver, r.family, std::get<2>(key)}];
    row.solver = r.solver;
    row.dataset = r.family;
    row.time_limit_s = r.time_limit_s;
    row.total_regret += static_cast<long long>(r.best_cost) - static_cast<long long>(it->second);
    ++row.instances;
  }
  std::vector<RegretRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, row] : groups) {
    row.mean_regret = floor_div(row.total_regret, row.instances);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_records_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << kRecordCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    out << r.family << ',' << r.k << ',' << r.num_vars << ',' << r.num_clauses << ',' << fmt_double(r.time_limit_s)
        << ',' << r.seed << ',' << r.workers << ',' << r.best_cost << ',' << fmt_double(r.time_to_best_s) << ','
        << r.iterations << '\n';
  }
}

void write_records_json(const std::vector<BenchRecord>& records, std::ostream& out) {
  json arr = json::array();
  for (const BenchRecord& r : records) {
    json trace = json::array();
    for (const TraceEntry& e : r.trace) trace.push_back({e.elapsed_s, e.cost});
    arr.push_back({{"solver", r.solver},
                   {"family", r.family},
                   {"k", r.k},
                   {"num_vars", r.num_vars},
                   {"num_clauses", r.num_clauses},
                   {"time_limit_s", r.time_limit_s},
                   {"seed", r.seed},
                   {"workers", r.workers},
                   {"best_cost", r.best_cost},
                   {"time_to_best_s", r.time_to_best_s},
                   {"iterations", r.iterations},
                   {"trace", trace}});
  }
  out << arr.dump(2) << '\n';
}

std::vector<BenchRecord> read_records_csv(std::istream& in) {
  std::vector<BenchRecord> records;
  std::size_t line_no = 1;
  for (const auto& f : read_table(in, kRecordCsvHeader)) {
    ++line_no;
    BenchRecord r;
    r.family = f[0];
    r.k = parse_field<int>(f[1], "k", line_no);
    r.num_vars = parse_field<long long>(f[2], "num_vars", line_no);
    r.num_clauses = parse_field<long long>(f[3], "num_clauses", line_no);
    r.time_limit_s = parse_field<double>(f[4], "time_limit_s", line_no);
    r.seed = parse_field<std::uint64_t>(f[5], "seed", line_no);
    r.workers = parse_field<int>(f[6], "workers", line_no);
    r.best_cost = parse_field<std::size_t>(f[7], "best_cost", line_no);
    r.time_to_best_s = parse_field<double>(f[8], "time_to_best_s", line_no);
    r.iterations = parse_field<std::uint64_t>(f[9], "iterations", line_no);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<BenchRecord> read_records_json(std::istream& in) {
  std::vector<BenchRecord> records;
  try {
    const json arr = json::parse(in);
    for (const json& j : arr) {
      BenchRecord r;
      r.solver = j.value("solver", std::string("gradsat"));
      r.family = j.at("family").get<std::string>();
      r.k = j.at("k").get<int>();
      r.num_vars = j.at("num_vars").get<long long>();
      r.num_clauses = j.at("num_clauses").get<long long>();
      r.time_limit_s = j.at("time_limit_s").get<double>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.workers = j.at("workers").get<int>();
      r.best_cost = j.at("best_cost").get<std::size_t>();
      r.time_to_best_s = j.at("time_to_best_s").get<double>();
      r.iterations = j.at("iterations").get<std::uint64_t>();
      for (const json& e : j.at("trace")) r.trace.push_back({e.at(0).get<double>(), 0, e.at(1).get<std::size_t>()});
      records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw BenchError(std::string("malformed records JSON: ") + e.what());
  }
  return records;
}

void write_regret_csv(const std::vector<RegretRow>& rows, std::ostream& out) {
  out << "solver,dataset,time_limit_s,total_regret,instances,mean_regret\n";
  for (const RegretRow& r : rows)
    out << r.solver << ',' << r.dataset << ',' << fmt_double(r.time_limit_s) << ',' << r.total_regret << ','
        << r.instances << ',' << r.mean_regret << '\n';
}

void write_regret_json(const std::vector<RegretRow>& rows, std::ostream& out) {
  json arr = json::array();
  for (const RegretRow& r : rows)
    arr.push_back({{"solver", r.solver},
                   {"dataset", r.dataset},
                   {"time_limit_s", r.time_limit_s},
                   {"total_regret", r.total_regret},
                   {"instances", r.instances},
                   {"mean_regret", r.mean_regret}});
  out << arr.dump(2) << '\n';
}

void emit(const std::vector<BenchRecord>& records, OutputFormat format, const std::string& path) {
  auto out = open_output(path);
  if (format == OutputFormat::csv)
    write_records_csv(records, out);
  else
    write_records_json(records, out);
  if (!out) throw BenchError("write to `" + path + "` failed");
}

void emit(const std::vector<RegretRow>& rows, OutputFormat format, const std::string& path) {
  auto out = open_output(path);
  if (format == OutputFormat::csv)
    write_regret_csv(rows, out);
  else
    write_regret_json(rows, out);
  if (!out) throw BenchError("write to `" + path + "` failed");
}

Baseline read_baseline_csv(std::istream& in) {
  Baseline b;
  std::size_t line_no = 1;
  for (const auto& f : read_table(in, "dataset,k,time_limit_s,cost")) {
    ++line_no;
    const auto key = baseline_key(f[0], parse_field<int>(f[1], "k", line_no),
                                  parse_field<double>(f[2], "time_limit_s", line_no));
    if (!b.emplace(key, parse_field<std::size_t>(f[3], "cost", line_no)).second)
      throw BenchError("line " + std::to_string(line_no) + ": duplicate baseline entry");
  }
  return b;
}

Baseline read_baseline_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BenchError("cannot open baseline file `" + path + "`");
  return read_baseline_csv(in);
}

std::vector<BenchRecord> read_cost_table_csv(std::istream& in) {
  std::vector<BenchRecord> records;
  std::size_t line_no = 1;
  for (const auto& f : read_table(in, "solver,dataset,k,time_limit_s,cost")) {
    ++line_no;
    BenchRecord r;
    r.solver = f[0];
    r.family = f[1];
    r.k = parse_field<int>(f[2], "k", line_no);
    r.time_limit_s = parse_field<double>(f[3], "time_limit_s", line_no);
    r.best_cost = parse_field<std::size_t>(f[4], "cost", line_no);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<BenchRecord> read_cost_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BenchError("cannot open cost table `" + path + "`");
  return read_cost_table_csv(in);
}

}  // namespace gradsat
