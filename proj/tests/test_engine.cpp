#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gradsat/engine.hpp"
#include "gradsat/generators.hpp"
#include "gradsat/oracle.hpp"
#include "test_util.hpp"

using namespace gradsat;

namespace {

Formula worked_example() {
  Formula f;
  f.num_vars = 2;
  f.clauses = {{-1}, {-2}, {1, 2}};
  return f;
}

SolveReport run(const Formula& f, SolveConfig cfg) {
  const CompiledFormula cf = preprocess(f);
  return solve(cf, build_incidence(cf), cfg);
}

void check_report(const Formula& f, const SolveReport& rep, bool single_worker = true) {
  CHECK(evaluate(f, rep.best_assignment) == rep.best_cost);
  REQUIRE_FALSE(rep.trace.empty());
  CHECK(rep.trace.back().cost == rep.best_cost);
  for (std::size_t e = 1; e < rep.trace.size(); ++e) {
    CHECK(rep.trace[e].cost < rep.trace[e - 1].cost);
    if (single_worker) CHECK(rep.trace[e].iteration > rep.trace[e - 1].iteration);
    CHECK(rep.trace[e].elapsed_s >= rep.trace[e - 1].elapsed_s);
  }
  if (single_worker) CHECK(rep.trace.front().iteration == 0);
}

}  // namespace

TEST_CASE("config validation") {
  SolveConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.learning_rate = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.time_limit_s = -1;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.adam_beta1 = 1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.adam_beta2 = -0.1;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.adam_eps = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.time_limit_s = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("initialization") {
  CHECK(init_state<double>(0, 1).x.empty());
  const auto a = init_state<double>(10000, 42);
  const auto b = init_state<double>(10000, 42);
  const auto c = init_state<double>(10000, 43);
  CHECK(a.x == b.x);
  CHECK(a.x != c.x);
  double sum = 0;
  for (double v : a.x) {
    CHECK(std::abs(v) < 1.0);
    CHECK(v != 0.0);
    sum += v;
  }
  CHECK(std::abs(sum / 10000) < 0.05);
  CHECK(a.step == 0);
  for (double v : a.adam_m) CHECK(v == 0.0);
  for (double v : a.adam_v) CHECK(v == 0.0);

  const auto f = init_state<float>(10000, 42);
  for (float v : f.x) CHECK(std::abs(v) < 1.0f);
}

TEST_CASE("adam: zero gradient leaves x fixed") {
  auto st = init_state<double>(3, 1);
  const auto before = st.x;
  const std::vector<double> g(3, 0.0);
  adam_step<double>(st, g, SolveConfig{});
  CHECK(st.x == before);
  CHECK(st.step == 1);
}

TEST_CASE("adam: first step moves by about the learning rate") {
  auto st = init_state<double>(3, 1);
  const auto before = st.x;
  const std::vector<double> g{1.0, -250.0, 0.003};
  adam_step<double>(st, g, SolveConfig{});
  CHECK(before[0] - st.x[0] == doctest::Approx(9.9999999e-05).epsilon(1e-6));
  CHECK(st.x[1] - before[1] == doctest::Approx(1e-4).epsilon(1e-6));
  CHECK(before[2] - st.x[2] == doctest::Approx(1e-4).epsilon(1e-4));
}

TEST_CASE("adam: constant gradient decreases x monotonically") {
  auto st = init_state<double>(1, 9);
  const std::vector<double> g{1.0};
  double prev = st.x[0];
  for (int t = 0; t < 1000; ++t) {
    adam_step<double>(st, g, SolveConfig{});
    CHECK(st.x[0] < prev);
    CHECK(st.adam_v[0] >= 0.0);
    prev = st.x[0];
  }
  CHECK(st.step == 1000);
}

TEST_CASE("adam: matches a hand-rolled reference over several steps") {
  SolveConfig cfg;
  cfg.learning_rate = 0.05;
  auto st = init_state<double>(1, 4);
  double x = st.x[0], m = 0, v = 0;
  const double grads[] = {0.7, -1.3, 2.0, 0.01, -0.5};
  for (int t = 1; t <= 5; ++t) {
    const double g = grads[t - 1];
    adam_step<double>(st, std::vector<double>{g}, cfg);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1 - std::pow(0.9, t));
    const double vh = v / (1 - std::pow(0.999, t));
    x -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
    CHECK(st.x[0] == doctest::Approx(x).epsilon(1e-14));
  }
}

TEST_CASE("adam: non-finite gradient is an error") {
  auto st = init_state<double>(2, 1);
  CHECK_THROWS_AS(adam_step<double>(st, std::vector<double>{1.0, std::nan("")}, SolveConfig{}), NonFiniteError);
}

TEST_CASE("solve: worked example reaches its optimum") {
  const Formula f = worked_example();
  SolveConfig cfg;
  cfg.time_limit_s = 5;
  cfg.target_cost = 1;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    cfg.seed = seed;
    const SolveReport rep = run(f, cfg);
    CHECK(rep.best_cost == 1);
    CHECK(rep.termination == Termination::target_reached);
    check_report(f, rep);
  }
}

TEST_CASE("solve: worked example without a target runs to the time limit") {
  SolveConfig cfg;
  cfg.time_limit_s = 0.2;
  const SolveReport rep = run(worked_example(), cfg);
  CHECK(rep.best_cost == 1);
  CHECK(rep.termination == Termination::time_limit);
}

TEST_CASE("solve: satisfiable formula ends on zero loss") {
  Formula f;
  f.num_vars = 2;
  f.clauses = {{1, 2}};
  SolveConfig cfg;
  cfg.time_limit_s = 5;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.seed = seed;
    const SolveReport rep = run(f, cfg);
    CHECK(rep.best_cost == 0);
    CHECK(rep.termination == Termination::zero_loss);
    check_report(f, rep);
  }
}

TEST_CASE("solve: empty clauses are a constant cost") {
  Formula f;
  f.num_vars = 1;
  f.clauses = {{}, {1}, {}};
  SolveConfig cfg;
  cfg.time_limit_s = 5;
  const SolveReport rep = run(f, cfg);
  CHECK(rep.best_cost == 2);
  CHECK(rep.termination == Termination::zero_loss);
  check_report(f, rep);
}

TEST_CASE("solve: free variables are false") {
  Formula f;
  f.num_vars = 4;
  f.clauses = {{2}, {-2, 3}};
  SolveConfig cfg;
  cfg.time_limit_s = 5;
  const SolveReport rep = run(f, cfg);
  CHECK(rep.best_cost == 0);
  CHECK_FALSE(rep.best_assignment[0]);
  CHECK_FALSE(rep.best_assignment[3]);
}

TEST_CASE("solve: no variables at all") {
  Formula f;
  const SolveReport rep = run(f, SolveConfig{});
  CHECK(rep.best_cost == 0);
  CHECK(rep.best_assignment.size() == 0);
}

TEST_CASE("solve: PHP(2) reaches cost 1") {
  const Formula f = php(2);
  SolveConfig cfg;
  cfg.time_limit_s = 10;
  cfg.target_cost = 1;
  const SolveReport rep = run(f, cfg);
  CHECK(rep.best_cost == 1);
  check_report(f, rep);
}

TEST_CASE("solve: iteration cap and determinism") {
  const Formula f = php(4);
  SolveConfig cfg;
  cfg.time_limit_s = 60;
  cfg.max_iters = 3000;
  cfg.seed = 7;
  const SolveReport a = run(f, cfg);
  const SolveReport b = run(f, cfg);
  CHECK(a.termination == Termination::iter_cap);
  CHECK(a.iterations == 3000);
  CHECK(a.best_cost == b.best_cost);
  CHECK(a.best_assignment == b.best_assignment);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t e = 0; e < a.trace.size(); ++e) {
    CHECK(a.trace[e].iteration == b.trace[e].iteration);
    CHECK(a.trace[e].cost == b.trace[e].cost);
  }
  check_report(f, a);

  cfg.precision = Precision::f32;
  const SolveReport c = run(f, cfg);
  const SolveReport d = run(f, cfg);
  CHECK(c.best_assignment == d.best_assignment);
  check_report(f, c);
}

TEST_CASE("solve: restarts keep the best and stay valid") {
  const Formula f = php(3);
  SolveConfig cfg;
  cfg.max_iters = 20000;
  cfg.restart_after = 500;
  const SolveReport rep = run(f, cfg);
  check_report(f, rep);
}

TEST_CASE("solve: cancellation") {
  const Formula f = php(5);
  std::atomic<bool> cancel{true};
  const CompiledFormula cf = preprocess(f);
  const SolveReport rep = solve(cf, build_incidence(cf), SolveConfig{}, {}, &cancel);
  CHECK(rep.termination == Termination::interrupted);
  check_report(f, rep);
}

TEST_CASE("solve: improvement callback mirrors the trace") {
  const Formula f = php(3);
  const CompiledFormula cf = preprocess(f);
  SolveConfig cfg;
  cfg.max_iters = 5000;
  std::vector<std::size_t> seen;
  const SolveReport rep = solve(cf, build_incidence(cf), cfg, [&](double, std::size_t cost, const Assignment& a) {
    CHECK(evaluate(f, a) == cost);
    seen.push_back(cost);
  });
  REQUIRE(seen.size() == rep.trace.size());
  for (std::size_t e = 0; e < seen.size(); ++e) CHECK(seen[e] == rep.trace[e].cost);
}

TEST_CASE("portfolio with one worker is solve") {
  const Formula f = php(4);
  const CompiledFormula cf = preprocess(f);
  const IncidenceMatrix w = build_incidence(cf);
  SolveConfig cfg;
  cfg.max_iters = 4000;
  cfg.seed = 3;
  const SolveReport a = solve(cf, w, cfg);
  const SolveReport b = portfolio_solve(cf, w, cfg, 1);
  CHECK(a.best_cost == b.best_cost);
  CHECK(a.best_assignment == b.best_assignment);
  CHECK(a.iterations == b.iterations);
  CHECK(a.trace.size() == b.trace.size());
}

TEST_CASE("portfolio is no worse than any of its seeds") {
  const Formula f = php(5);
  const CompiledFormula cf = preprocess(f);
  const IncidenceMatrix w = build_incidence(cf);
  SolveConfig cfg;
  cfg.max_iters = 3000;
  cfg.seed = 10;
  std::size_t best_single = std::numeric_limits<std::size_t>::max();
  for (std::uint64_t s = 10; s < 14; ++s) {
    SolveConfig one = cfg;
    one.seed = s;
    best_single = std::min(best_single, solve(cf, w, one).best_cost);
  }
  std::vector<std::size_t> streamed;
  const SolveReport p =
      portfolio_solve(cf, w, cfg, 4, [&](double, std::size_t cost, const Assignment&) { streamed.push_back(cost); });
  CHECK(p.best_cost <= best_single);
  check_report(f, p, false);
  for (std::size_t e = 1; e < streamed.size(); ++e) CHECK(streamed[e] < streamed[e - 1]);
  CHECK_THROWS_AS(portfolio_solve(cf, w, cfg, 0), ConfigError);
}

TEST_CASE("solve never beats the exact optimum and usually finds it") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> nd(2, 16);
  int hits = 0;
  const int formulas = 200;
  for (int trial = 0; trial < formulas; ++trial) {
    const int n = nd(rng);
    const Formula f = testing::random_formula(rng, n, 4 * n + 3, 1, 3);
    const std::size_t opt = brute_force(f).optimal_cost;
    const CompiledFormula cf = preprocess(f);
    const IncidenceMatrix w = build_incidence(cf);
    bool hit = false;
    for (std::uint64_t seed = 0; seed < 5 && !hit; ++seed) {
      SolveConfig cfg;
      cfg.time_limit_s = 2;
      cfg.seed = seed;
      cfg.target_cost = opt;
      const SolveReport rep = solve(cf, w, cfg);
      CHECK(rep.best_cost >= opt);
      CHECK(evaluate(f, rep.best_assignment) == rep.best_cost);
      hit = rep.best_cost == opt;
    }
    hits += hit;
  }
  MESSAGE("optimum reached on " << hits << " of " << formulas);
  CHECK(hits >= formulas * 9 / 10);
}
