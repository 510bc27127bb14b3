#include "gradsat/oracle.hpp"

#include <bit>
#include <string>
#include <vector>

namespace gradsat {

OracleResult brute_force(const Formula& f, int var_cap) {
  validate(f);
  if (f.num_vars > var_cap)
    throw OracleRefusal("brute force refused: " + std::to_string(f.num_vars) + " variables exceed the cap of " +
                        std::to_string(var_cap));
  const int n = f.num_vars;

  // occurrences[v] lists (clause, polarity) pairs; repeated literals are
  // counted per occurrence so true_count stays consistent under flips.
  struct Occ {
    std::uint32_t clause;
    bool positive;
  };
  std::vector<std::vector<Occ>> occurrences(n);
  for (std::size_t j = 0; j < f.clauses.size(); ++j)
    for (Literal lit : f.clauses[j]) occurrences[var_of(lit) - 1].push_back({static_cast<std::uint32_t>(j), lit > 0});

  // Start from all-false.
  std::vector<std::uint32_t> true_count(f.clauses.size(), 0);
  std::size_t cost = 0;
  for (std::size_t j = 0; j < f.clauses.size(); ++j) {
    for (Literal lit : f.clauses[j])
      if (lit < 0) ++true_count[j];
    if (true_count[j] == 0) ++cost;
  }

  std::vector<bool> bits(n, false);
  OracleResult best;
  best.optimal_cost = cost;
  best.witness = Assignment(bits);
  best.enumerated = 1;

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total && best.optimal_cost > 0; ++step) {
    const int v = std::countr_zero(step);  // bit flipped between gray(step-1) and gray(step)
    const bool now_true = !bits[v];
    bits[v] = now_true;
    for (const Occ& o : occurrences[v]) {
      if (o.positive == now_true) {
        if (true_count[o.clause]++ == 0) --cost;
      } else {
        if (--true_count[o.clause] == 0) ++cost;
      }
    }
    ++best.enumerated;
    if (cost < best.optimal_cost) {
      best.optimal_cost = cost;
      best.witness = Assignment(bits);
      if (cost == 0) break;
    }
  }
  return best;
}

bool verify(const Formula& f, const Assignment& a, std::size_t claimed) { return evaluate(f, a) == claimed; }

}  // namespace gradsat
