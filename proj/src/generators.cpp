#include "gradsat/generators.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

namespace gradsat {

namespace {

void require_index(int k, const char* name) {
  if (k < 1) throw std::invalid_argument(std::string(name) + ": instance index must be >= 1, got " + std::to_string(k));
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::PHP: return "php";
    case Family::GT: return "gt";
    case Family::PAR: return "par";
    case Family::CB: return "cb";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Family f : {Family::PHP, Family::GT, Family::PAR, Family::CB})
    if (lower == to_string(f)) return f;
  return std::nullopt;
}

Formula php(int k) {
  require_index(k, "php");
  const int pigeons = k + 1;
  const int holes = k;
  auto v = [&](int i, int j) { return (i - 1) * holes + j; };
  Formula f;
  f.num_vars = pigeons * holes;
  for (int i = 1; i <= pigeons; ++i) {
    Clause c;
    for (int j = 1; j <= holes; ++j) c.push_back(v(i, j));
    f.clauses.push_back(std::move(c));
  }
  for (int j = 1; j <= holes; ++j)
    for (int i = 1; i <= pigeons; ++i)
      for (int i2 = i + 1; i2 <= pigeons; ++i2) f.clauses.push_back({-v(i, j), -v(i2, j)});
  return f;
}

Formula gt(int k) {
  require_index(k, "gt");
  const int n = k + 1;
  // o(i, j) for i != j, 0-based elements, row-major with the diagonal skipped.
  auto o = [&](int i, int j) { return i * (n - 1) + (j < i ? j : j - 1) + 1; };
  Formula f;
  f.num_vars = n * (n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        if (i != j && j != l && i != l) f.clauses.push_back({-o(i, j), -o(j, l), o(i, l)});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) f.clauses.push_back({-o(i, j), -o(j, i)});
  for (int j = 0; j < n; ++j) {
    Clause c;
    for (int i = 0; i < n; ++i)
      if (i != j) c.push_back(o(i, j));
    f.clauses.push_back(std::move(c));
  }
  return f;
}

Formula par(int k) {
  require_index(k, "par");
  const int n = 2 * k + 1;
  // p(a, b) for a < b, 0-based, lexicographic.
  std::vector<std::vector<int>> id(n, std::vector<int>(n, 0));
  int next = 1;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) id[a][b] = id[b][a] = next++;
  Formula f;
  f.num_vars = next - 1;
  for (int i = 0; i < n; ++i) {
    Clause c;
    for (int j = 0; j < n; ++j)
      if (j != i) c.push_back(id[i][j]);
    f.clauses.push_back(std::move(c));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = j + 1; l < n; ++l)
        if (j != i && l != i) f.clauses.push_back({-id[i][j], -id[i][l]});
  return f;
}

Formula cb(int k) {
  require_index(k, "cb");
  const int size = 2 * k + 2;
  auto present = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= size || c >= size) return false;
    return !(r == 0 && c == 0) && !(r == size - 1 && c == size - 1);
  };
  // Dominoes numbered by (cell row-major, direction right then down).
  std::vector<std::vector<int>> covering(size * size);
  int next = 1;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      if (!present(r, c)) continue;
      if (present(r, c + 1)) {
        covering[r * size + c].push_back(next);
        covering[r * size + c + 1].push_back(next);
        ++next;
      }
      if (present(r + 1, c)) {
        covering[r * size + c].push_back(next);
        covering[(r + 1) * size + c].push_back(next);
        ++next;
      }
    }
  }
  for (auto& cell : covering) std::sort(cell.begin(), cell.end());

  Formula f;
  f.num_vars = next - 1;
  for (int cell = 0; cell < size * size; ++cell)
    if (present(cell / size, cell % size)) f.clauses.emplace_back(covering[cell].begin(), covering[cell].end());
  for (int cell = 0; cell < size * size; ++cell) {
    const auto& d = covering[cell];
    for (std::size_t a = 0; a < d.size(); ++a)
      for (std::size_t b = a + 1; b < d.size(); ++b) f.clauses.push_back({-d[a], -d[b]});
  }
  return f;
}

Formula generate(Family family, int k) {
  switch (family) {
    case Family::PHP: return php(k);
    case Family::GT: return gt(k);
    case Family::PAR: return par(k);
    case Family::CB: return cb(k);
  }
  throw std::invalid_argument("unknown family");
}

std::vector<Formula> suite(Family family, int count) {
  if (count < 0) throw std::invalid_argument("suite: count must be non-negative");
  std::vector<Formula> out;
  out.reserve(count);
  for (int k = 1; k <= count; ++k) {
    Formula f = generate(family, k);
    const CompiledFormula cf = preprocess(f);
    if (cf.num_active() != f.num_clauses())
      throw std::logic_error("suite: generated " + std::string(to_string(family)) + "(" + std::to_string(k) +
                             ") lost clauses in preprocessing");
    out.push_back(std::move(f));
  }
  return out;
}

InstanceSize expected_size(Family family, int k) {
  const long long kk = k;
  switch (family) {
    case Family::PHP: return {kk * (kk + 1), (kk + 1) + kk * (kk + 1) * kk / 2};
    case Family::GT: {
      const long long n = kk + 1;
      return {n * (n - 1), n * (n - 1) * (n - 2) + n * (n - 1) / 2 + n};
    }
    case Family::PAR: {
      const long long n = 2 * kk + 1;
      return {n * (n - 1) / 2, n * (1 + (2 * kk) * (2 * kk - 1) / 2)};
    }
    case Family::CB: return {8 * kk * kk + 12 * kk, 28 * kk * kk + 32 * kk - 4};
  }
  return {0, 0};
}

}  // namespace gradsat
