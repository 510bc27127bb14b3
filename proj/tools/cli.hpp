#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

#include "gradsat/formula.hpp"

namespace gradsat::cli {

// Exit codes of `solve`.
inline constexpr int kExitError = 1;
inline constexpr int kExitSatisfiable = 10;
inline constexpr int kExitUnknown = 20;

// Runs one invocation. `args` excludes the program name. `cancel`, when set
// by a signal handler, stops a running solve; the best solution so far is
// still printed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* cancel = nullptr);

// Reads an assignment in solver output form (`v` lines) or as bare signed
// literals. Every variable 1..num_vars must appear exactly once.
Assignment read_assignment(std::istream& in, std::int32_t num_vars);

// `v` line with one signed literal per variable.
std::string format_v_line(const Assignment& a);

}  // namespace gradsat::cli
