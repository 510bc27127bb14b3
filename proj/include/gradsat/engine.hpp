#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "gradsat/encoding.hpp"
#include "gradsat/formula.hpp"

namespace gradsat {

enum class Precision { f32, f64 };

struct SolveConfig {
  double time_limit_s = 60.0;
  std::optional<std::uint64_t> max_iters;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  std::optional<std::size_t> target_cost;
  // Re-randomize x (keeping the best) after this many steps without improvement.
  std::optional<std::uint64_t> restart_after;
  Precision precision = Precision::f64;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws ConfigError when a field is out of range.
void validate(const SolveConfig& cfg);

template <typename Real>
struct RelaxationState {
  std::vector<Real> x;
  std::vector<Real> adam_m;
  std::vector<Real> adam_v;
  std::uint64_t step = 0;
  std::uint64_t rng_seed = 0;
};

// x_i ~ Uniform(-1, 1) from a seeded mt19937_64, exact zeros re-drawn.
// Bit-identical for identical (n, seed) on every platform.
template <typename Real>
RelaxationState<Real> init_state(std::int32_t n, std::uint64_t seed);

// One bias-corrected Adam update. Throws NonFiniteError on a non-finite gradient.
template <typename Real>
void adam_step(RelaxationState<Real>& state, std::span<const Real> grad, const SolveConfig& cfg);

enum class Termination { time_limit, zero_loss, target_reached, iter_cap, interrupted };

std::string_view to_string(Termination t);

struct TraceEntry {
  double elapsed_s = 0;
  std::uint64_t iteration = 0;
  std::size_t cost = 0;
};

struct SolveReport {
  std::size_t best_cost = 0;
  Assignment best_assignment;
  std::vector<TraceEntry> trace;
  std::uint64_t iterations = 0;
  Termination termination = Termination::time_limit;
  std::uint64_t seed = 0;

  double time_to_best() const { return trace.empty() ? 0.0 : trace.back().elapsed_s; }
};

// Called on every strict improvement with (elapsed seconds, cost, assignment).
// Costs include the compiled formula's base cost.
using ImproveCallback = std::function<void(double, std::size_t, const Assignment&)>;

// The anytime loop: forward, project, mask, record improvement, masked loss,
// Adam step; until the time limit, zero loss, the target cost, the iteration
// cap, or `cancel` becomes true.
SolveReport solve(const CompiledFormula& cf, const IncidenceMatrix& w, const SolveConfig& cfg,
                  const ImproveCallback& on_improve = {}, const std::atomic<bool>* cancel = nullptr);

// Runs `worker_count` solves with seeds seed, seed+1, ... on separate threads
// and merges their improvement streams into one monotone stream.
SolveReport portfolio_solve(const CompiledFormula& cf, const IncidenceMatrix& w, const SolveConfig& cfg,
                            int worker_count, const ImproveCallback& on_improve = {},
                            const std::atomic<bool>* cancel = nullptr);

}  // namespace gradsat
