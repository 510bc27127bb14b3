#include "gradsat/formula.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gradsat {

namespace {

std::string_view trim_left(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
  return s.substr(i);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Int>
bool parse_int(std::string_view tok, Int& value) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::string at_line(std::size_t line_no) { return " (line " + std::to_string(line_no) + ")"; }

}  // namespace

Formula parse_dimacs(std::istream& in, std::vector<std::string>* warnings) {
  Formula f;
  bool have_header = false;
  std::int64_t declared_clauses = 0;
  Clause current;
  bool clause_open = false;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim_left(raw);
    if (line.empty()) continue;
    if (line.front() == 'c') {
      std::string_view body = line.substr(1);
      if (!body.empty() && (body.front() == ' ' || body.front() == '\t')) body.remove_prefix(1);
      while (!body.empty() && (body.back() == '\r' || body.back() == '\n')) body.remove_suffix(1);
      f.comments.emplace_back(body);
      continue;
    }
    if (line.front() == '%') break;  // SATLIB trailer
    if (line.front() == 'p') {
      if (have_header) throw DimacsError("duplicate problem line" + at_line(line_no));
      auto toks = split_ws(line);
      if (toks.size() >= 2 && toks[1] == "wcnf")
        throw DimacsError("weighted input unsupported: only unweighted `p cnf` instances are accepted");
      if (toks.size() != 4 || toks[0] != "p" || toks[1] != "cnf")
        throw DimacsError("malformed problem line, expected `p cnf <vars> <clauses>`" + at_line(line_no));
      std::int64_t nv = 0;
      if (!parse_int(toks[2], nv) || !parse_int(toks[3], declared_clauses) || nv < 0 ||
          declared_clauses < 0 || nv > INT32_MAX)
        throw DimacsError("malformed problem line, expected `p cnf <vars> <clauses>`" + at_line(line_no));
      f.num_vars = static_cast<std::int32_t>(nv);
      have_header = true;
      continue;
    }
    if (!have_header) throw DimacsError("missing `p cnf` problem line before clauses" + at_line(line_no));
    for (std::string_view tok : split_ws(line)) {
      std::int64_t v = 0;
      if (!parse_int(tok, v)) throw DimacsError("invalid literal `" + std::string(tok) + "`" + at_line(line_no));
      if (v == 0) {
        f.clauses.push_back(std::move(current));
        current.clear();
        clause_open = false;
        continue;
      }
      if (v > f.num_vars || -v > f.num_vars)
        throw DimacsError("literal " + std::to_string(v) + " exceeds declared variable count " +
                          std::to_string(f.num_vars) + at_line(line_no));
      current.push_back(static_cast<Literal>(v));
      clause_open = true;
    }
  }
  if (!have_header) throw DimacsError("missing `p cnf` problem line");
  if (clause_open) throw DimacsError("unterminated final clause (missing trailing 0)");
  if (static_cast<std::int64_t>(f.clauses.size()) != declared_clauses && warnings != nullptr) {
    warnings->push_back("header declares " + std::to_string(declared_clauses) + " clauses but " +
                        std::to_string(f.clauses.size()) + " were read");
  }
  return f;
}

Formula parse_dimacs(std::string_view text, std::vector<std::string>* warnings) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in, warnings);
}

Formula read_dimacs_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw DimacsError("cannot open `" + path + "` for reading");
  return parse_dimacs(in, warnings);
}

void write_dimacs(const Formula& f, std::ostream& out) {
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const Clause& c : f.clauses) {
    for (Literal lit : c) out << lit << ' ';
    out << "0\n";
  }
}

std::string to_dimacs(const Formula& f) {
  std::ostringstream out;
  write_dimacs(f, out);
  return out.str();
}

void validate(const Formula& f) {
  if (f.num_vars < 0) throw FormulaError("negative variable count");
  for (std::size_t j = 0; j < f.clauses.size(); ++j) {
    for (Literal lit : f.clauses[j]) {
      if (lit == 0) throw FormulaError("zero literal in clause " + std::to_string(j));
      if (var_of(lit) > f.num_vars)
        throw FormulaError("literal " + std::to_string(lit) + " in clause " + std::to_string(j) +
                           " exceeds variable count " + std::to_string(f.num_vars));
    }
  }
}

std::size_t evaluate(const Formula& f, const Assignment& a) {
  if (a.size() != static_cast<std::size_t>(f.num_vars))
    throw FormulaError("assignment length " + std::to_string(a.size()) + " does not match variable count " +
                       std::to_string(f.num_vars));
  std::size_t cost = 0;
  for (const Clause& c : f.clauses) {
    bool sat = std::any_of(c.begin(), c.end(), [&](Literal lit) { return a.satisfies(lit); });
    if (!sat) ++cost;
  }
  return cost;
}

CompiledFormula preprocess(const Formula& f) {
  validate(f);
  CompiledFormula cf;
  cf.source = f;
  Clause scratch;
  for (std::size_t j = 0; j < f.clauses.size(); ++j) {
    const Clause& c = f.clauses[j];
    if (c.empty()) {
      ++cf.base_cost;
      continue;
    }
    // Keep first-occurrence order so the active clause reads like the input.
    scratch.clear();
    bool tautology = false;
    for (Literal lit : c) {
      if (std::find(scratch.begin(), scratch.end(), lit) != scratch.end()) continue;
      if (std::find(scratch.begin(), scratch.end(), -lit) != scratch.end()) {
        tautology = true;
        break;
      }
      scratch.push_back(lit);
    }
    if (tautology) {
      ++cf.tautology_count;
      continue;
    }
    cf.active_clauses.push_back(scratch);
    cf.source_index.push_back(j);
  }
  return cf;
}

}  // namespace gradsat
