#pragma once

#include <cstdint>
#include <stdexcept>

#include "gradsat/formula.hpp"

namespace gradsat {

struct OracleResult {
  std::size_t optimal_cost = 0;
  Assignment witness;
  std::uint64_t enumerated = 0;
};

class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultOracleVarCap = 26;

// Exhaustive minimum over all 2^n assignments, visited in reflected Gray-code
// order with incremental clause bookkeeping. The witness is the first
// assignment in that order attaining the minimum; enumeration stops early
// once cost 0 is seen. Refuses (OracleRefusal)
// when num_vars exceeds var_cap.
OracleResult brute_force(const Formula& f, int var_cap = kDefaultOracleVarCap);

// True iff evaluate(f, a) == claimed. Throws FormulaError on a length mismatch.
bool verify(const Formula& f, const Assignment& a, std::size_t claimed);

}  // namespace gradsat
