#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gradsat {

// DIMACS-style literal: |lit| is a 1-based variable index, the sign is the polarity.
using Literal = std::int32_t;
using Clause = std::vector<Literal>;

inline std::int32_t var_of(Literal lit) { return lit < 0 ? -lit : lit; }

// Plain CNF. Clause order and literal order are kept exactly as read, so the
// clause index j is stable across every module.
struct Formula {
  std::int32_t num_vars = 0;
  std::vector<Clause> clauses;
  // `c` lines seen on parse. Not part of equality and not written back out.
  std::vector<std::string> comments;

  std::size_t num_clauses() const { return clauses.size(); }

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.num_vars == b.num_vars && a.clauses == b.clauses;
  }
};

// One Boolean per variable. bits[i] is the value of variable i+1.
struct Assignment {
  std::vector<bool> bits;

  Assignment() = default;
  explicit Assignment(std::size_t n, bool value = false) : bits(n, value) {}
  explicit Assignment(std::vector<bool> b) : bits(std::move(b)) {}

  std::size_t size() const { return bits.size(); }
  bool operator[](std::size_t i) const { return bits[i]; }
  bool satisfies(Literal lit) const { return lit > 0 ? bits[lit - 1] : !bits[-lit - 1]; }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

class DimacsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormulaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parses `p cnf` DIMACS. A header/body clause-count mismatch is not an error;
// it is appended to `warnings` when provided. Weighted (`p wcnf`) input is
// rejected.
Formula parse_dimacs(std::istream& in, std::vector<std::string>* warnings = nullptr);
Formula parse_dimacs(std::string_view text, std::vector<std::string>* warnings = nullptr);
Formula read_dimacs_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

void write_dimacs(const Formula& f, std::ostream& out);
std::string to_dimacs(const Formula& f);

// Throws FormulaError if any literal is zero or out of range.
void validate(const Formula& f);

// Number of clauses with no satisfied literal. Empty clauses always count.
std::size_t evaluate(const Formula& f, const Assignment& a);

// Formula after normalization: duplicate literals collapsed, tautologies
// dropped, empty clauses folded into a constant cost.
struct CompiledFormula {
  Formula source;
  std::vector<Clause> active_clauses;
  std::vector<std::size_t> source_index;  // active clause -> index in source.clauses
  std::size_t base_cost = 0;
  std::size_t tautology_count = 0;

  std::int32_t num_vars() const { return source.num_vars; }
  std::size_t num_active() const { return active_clauses.size(); }
};

CompiledFormula preprocess(const Formula& f);

}  // namespace gradsat
