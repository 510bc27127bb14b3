#include "gradsat/engine.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>

namespace gradsat {

namespace {

// 53 random bits mapped onto [-1, 1); zero is rejected by the caller.
// Avoids std::uniform_real_distribution, whose output is library-specific.
double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

template <typename Real>
void randomize(std::mt19937_64& rng, std::vector<Real>& x) {
  for (Real& xi : x) {
    Real v;
    do {
      v = static_cast<Real>(uniform_pm1(rng));
    } while (v == Real(0) || v <= Real(-1) || v >= Real(1));
    xi = v;
  }
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

using TraceHook = std::function<void(const TraceEntry&, const Assignment&)>;

bool flagged(const std::atomic<bool>* flag) { return flag != nullptr && flag->load(std::memory_order_relaxed); }

template <typename Real>
SolveReport solve_impl(const CompiledFormula& cf, const IncidenceMatrix& w, const SolveConfig& cfg,
                       const TraceHook& on_improve, const std::atomic<bool>* cancel,
                       const std::atomic<bool>* sibling_stop) {
  validate(cfg);
  if (w.num_vars() != cf.num_vars() || static_cast<std::size_t>(w.num_clauses()) != cf.num_active())
    throw std::invalid_argument("solve: incidence matrix was not built from this formula");

  const auto start = Clock::now();
  const std::int32_t n = w.num_vars();
  const std::int32_t m = w.num_clauses();
  const auto& s = w.s();

  std::vector<bool> is_free(n);
  for (std::int32_t i = 0; i < n; ++i) is_free[i] = w.row_clauses(i).empty();

  std::mt19937_64 rng(cfg.seed);
  RelaxationState<Real> state;
  state.rng_seed = cfg.seed;
  state.x.resize(n);
  randomize(rng, state.x);
  state.adam_m.assign(n, Real(0));
  state.adam_v.assign(n, Real(0));

  SolveReport report;
  report.seed = cfg.seed;
  report.best_cost = std::numeric_limits<std::size_t>::max();

  Activation<Real> act;
  ClauseMask mask(m, 0);
  std::vector<Real> grad(n, Real(0));
  std::uint64_t iter = 0;
  std::uint64_t last_improvement = 0;

  for (;;) {
    forward_into<Real>(w, state.x, act);

    std::size_t unsat = 0;
    for (std::int32_t j = 0; j < m; ++j) {
      auto vars = w.column_vars(j);
      auto signs = w.column_signs(j);
      std::int32_t dot = 0;
      for (std::size_t e = 0; e < vars.size(); ++e) dot += (state.x[vars[e]] > Real(0) ? 1 : -1) * signs[e];
      mask[j] = dot == s[j];
      unsat += mask[j];
    }

    const std::size_t cost = cf.base_cost + unsat;
    if (cost < report.best_cost) {
      report.best_cost = cost;
      Assignment a(static_cast<std::size_t>(n));
      for (std::int32_t i = 0; i < n; ++i) a.bits[i] = !is_free[i] && state.x[i] > Real(0);
      report.best_assignment = std::move(a);
      const double t = seconds_since(start);
      report.trace.push_back({t, iter, cost});
      last_improvement = iter;
      if (on_improve) on_improve(report.trace.back(), report.best_assignment);
    }

    if (cfg.target_cost && report.best_cost <= *cfg.target_cost) {
      report.termination = Termination::target_reached;
      break;
    }
    if (unsat == 0) {
      report.termination = Termination::zero_loss;
      break;
    }
    if (cfg.max_iters && iter >= *cfg.max_iters) {
      report.termination = Termination::iter_cap;
      break;
    }
    if (seconds_since(start) >= cfg.time_limit_s) {
      report.termination = Termination::time_limit;
      break;
    }
    if (flagged(cancel) || flagged(sibling_stop)) {
      report.termination = Termination::interrupted;
      break;
    }

    const Real loss = loss_and_grad_into<Real>(w, act, mask, unsat, grad);
    if (!std::isfinite(loss))
      throw NonFiniteError("solve: loss became non-finite at iteration " + std::to_string(iter));
    adam_step<Real>(state, grad, cfg);
    ++iter;

    if (cfg.restart_after && iter - last_improvement >= *cfg.restart_after) {
      randomize(rng, state.x);
      std::fill(state.adam_m.begin(), state.adam_m.end(), Real(0));
      std::fill(state.adam_v.begin(), state.adam_v.end(), Real(0));
      state.step = 0;
      last_improvement = iter;
    }
  }
  report.iterations = iter;
  return report;
}

SolveReport solve_dispatch(const CompiledFormula& cf, const IncidenceMatrix& w, const SolveConfig& cfg,
                           const TraceHook& on_improve, const std::atomic<bool>* cancel,
                           const std::atomic<bool>* sibling_stop) {
  if (cfg.precision == Precision::f32) return solve_impl<float>(cf, w, cfg, on_improve, cancel, sibling_stop);
  return solve_impl<double>(cf, w, cfg, on_improve, cancel, sibling_stop);
}

}  // namespace

void validate(const SolveConfig& cfg) {
  if (!(cfg.learning_rate > 0) || !std::isfinite(cfg.learning_rate))
    throw ConfigError("learning rate must be positive");
  if (!(cfg.adam_beta1 >= 0 && cfg.adam_beta1 < 1)) throw ConfigError("adam beta1 must lie in [0, 1)");
  if (!(cfg.adam_beta2 >= 0 && cfg.adam_beta2 < 1)) throw ConfigError("adam beta2 must lie in [0, 1)");
  if (!(cfg.adam_eps > 0)) throw ConfigError("adam epsilon must be positive");
  if (std::isnan(cfg.time_limit_s) || cfg.time_limit_s < 0) throw ConfigError("time limit must be non-negative");
  if (cfg.restart_after && *cfg.restart_after == 0) throw ConfigError("restart interval must be positive");
}

template <typename Real>
RelaxationState<Real> init_state(std::int32_t n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("init_state: negative variable count");
  RelaxationState<Real> state;
  state.rng_seed = seed;
  state.x.resize(n);
  std::mt19937_64 rng(seed);
  randomize(rng, state.x);
  state.adam_m.assign(n, Real(0));
  state.adam_v.assign(n, Real(0));
  return state;
}

template <typename Real>
void adam_step(RelaxationState<Real>& state, std::span<const Real> grad, const SolveConfig& cfg) {
  const std::size_t n = state.x.size();
  if (grad.size() != n) throw std::invalid_argument("adam_step: gradient length mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(grad[i])) throw NonFiniteError("adam_step: gradient component " + std::to_string(i) + " is not finite");

  const std::uint64_t t = state.step + 1;
  const Real b1 = static_cast<Real>(cfg.adam_beta1);
  const Real b2 = static_cast<Real>(cfg.adam_beta2);
  const Real c1 = static_cast<Real>(1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t)));
  const Real c2 = static_cast<Real>(1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t)));
  const Real lr = static_cast<Real>(cfg.learning_rate);
  const Real eps = static_cast<Real>(cfg.adam_eps);
  for (std::size_t i = 0; i < n; ++i) {
    const Real g = grad[i];
    state.adam_m[i] = b1 * state.adam_m[i] + (Real(1) - b1) * g;
    state.adam_v[i] = b2 * state.adam_v[i] + (Real(1) - b2) * g * g;
    const Real m_hat = state.adam_m[i] / c1;
    const Real v_hat = state.adam_v[i] / c2;
    state.x[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
  state.step = t;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::time_limit: return "time_limit";
    case Termination::zero_loss: return "zero_loss";
    case Termination::target_reached: return "target_reached";
    case Termination::iter_cap: return "iter_cap";
    case Termination::interrupted: return "interrupted";
  }
  return "unknown";
}

SolveReport solve(const CompiledFormula& cf, const IncidenceMatrix& w, const SolveConfig& cfg,
                  const ImproveCallback& on_improve, const std::atomic<bool>* cancel) {
  TraceHook hook;
  if (on_improve) hook = [&](const TraceEntry& e, const Assignment& a) { on_improve(e.elapsed_s, e.cost, a); };
  return solve_dispatch(cf, w, cfg, hook, cancel, nullptr);
}

SolveReport portfolio_solve(const CompiledFormula& cf, const IncidenceMatrix& w, const SolveConfig& cfg,
                            int worker_count, const ImproveCallback& on_improve, const std::atomic<bool>* cancel) {
  if (worker_count < 1) throw ConfigError("worker count must be at least 1");
  validate(cfg);
  if (worker_count == 1) return solve(cf, w, cfg, on_improve, cancel);

  std::mutex mu;
  std::size_t global_best = std::numeric_limits<std::size_t>::max();
  std::vector<TraceEntry> merged;
  int best_worker = -1;
  std::atomic<bool> stop{false};
  const auto start = std::chrono::steady_clock::now();

  std::vector<SolveReport> reports(worker_count);
  std::vector<std::exception_ptr> errors(worker_count);
  std::vector<std::thread> threads;
  threads.reserve(worker_count);
  for (int k = 0; k < worker_count; ++k) {
    threads.emplace_back([&, k] {
      SolveConfig local = cfg;
      local.seed = cfg.seed + static_cast<std::uint64_t>(k);
      TraceHook relay = [&](const TraceEntry& e, const Assignment& a) {
        std::lock_guard lock(mu);
        if (e.cost >= global_best) return;
        global_best = e.cost;
        best_worker = k;
        // Workers start their clocks at slightly different moments; the
        // merged stream is stamped against one clock so it stays ordered.
        TraceEntry stamped = e;
        stamped.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        merged.push_back(stamped);
        if (on_improve) on_improve(stamped.elapsed_s, stamped.cost, a);
      };
      try {
        reports[k] = solve_dispatch(cf, w, local, relay, cancel, &stop);
        const auto term = reports[k].termination;
        if (term == Termination::zero_loss || term == Termination::target_reached) stop.store(true);
      } catch (...) {
        errors[k] = std::current_exception();
        stop.store(true);
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Report the worker that first reached the global best; its own trace ends
  // at the same cost as the merged stream.
  SolveReport out = reports[best_worker];
  out.trace = std::move(merged);
  out.iterations = 0;
  for (const SolveReport& r : reports) out.iterations += r.iterations;
  out.seed = cfg.seed;
  return out;
}

template RelaxationState<float> init_state<float>(std::int32_t, std::uint64_t);
template RelaxationState<double> init_state<double>(std::int32_t, std::uint64_t);
template void adam_step<float>(RelaxationState<float>&, std::span<const float>, const SolveConfig&);
template void adam_step<double>(RelaxationState<double>&, std::span<const double>, const SolveConfig&);

}  // namespace gradsat
