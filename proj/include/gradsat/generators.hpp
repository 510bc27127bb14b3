#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "gradsat/formula.hpp"

namespace gradsat {

// Unsatisfiable combinatorial-principle families.
enum class Family { PHP, GT, PAR, CB };

std::string_view to_string(Family f);  // lowercase: "php", "gt", "par", "cb"
std::optional<Family> parse_family(std::string_view name);  // case-insensitive

struct SuiteSpec {
  Family family;
  int index;  // k >= 1
};

// Pigeonhole: k+1 pigeons, k holes. v(i, j) = (i-1)k + j.
Formula php(int k);
// Ordering principle on k+1 elements: transitivity, antisymmetry, no minimum.
Formula gt(int k);
// Parity: perfect matching on 2k+1 elements.
Formula par(int k);
// Mutilated (2k+2)x(2k+2) chessboard with opposite corners removed, domino
// cover: per-cell at-least-one plus pairwise at-most-one.
Formula cb(int k);

Formula generate(Family family, int k);
inline Formula generate(const SuiteSpec& spec) { return generate(spec.family, spec.index); }

// Instances k = 1..count. Every generated clause survives preprocess.
std::vector<Formula> suite(Family family, int count = 50);

// Closed-form sizes, independent of the generators.
struct InstanceSize {
  long long vars;
  long long clauses;
};
InstanceSize expected_size(Family family, int k);

}  // namespace gradsat
