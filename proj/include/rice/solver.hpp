#pragma once

// Box-constrained maximization with a projected limited-memory quasi-Newton
// method, plus a central-difference gradient for verification.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rice {

// Returns the objective at x and writes its gradient into grad (same length).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;
using ValueOnly = std::function<double(std::span<const double> x)>;

struct SolveOptions {
  int max_iterations = 2000;
  double gradient_tolerance = 1e-6;    // projected-gradient inf-norm, scaled problem
  double objective_tolerance = 1e-10;  // relative objective change
  int memory = 20;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  int multistart = 4;
  std::uint64_t seed = 0;
  double perturbation = 0.1;  // start perturbation, fraction of each box width
  // Relative objective gain a later start needs to beat an earlier one.
  double multistart_tie = 1e-8;
  // Multiplies the objective inside the solver; defaults to 1/|f(init)|.
  std::optional<double> objective_scale;
  // Diagonal change of variables x = scale * y; empty means identity.
  std::vector<double> variable_scale;
  unsigned threads = 1;  // concurrent multistart runs
};

enum class Termination { gradient, objective_change, max_iterations, line_search_failed };

std::string_view to_string(Termination t);

struct SolveReport {
  std::vector<double> x;
  double objective = 0;
  int iterations = 0;
  Termination reason = Termination::max_iterations;
  std::vector<double> objective_log;  // accepted iterates, starting with init
  int start_index = 0;                // winning multistart run
};

// Maximizes f over lower <= x <= upper starting from init (projected onto
// the box). With multistart > 1, runs 1.. start from bounded random
// perturbations of init; the best objective wins. Objectives within
// multistart_tie (relative) are ties, won by the lowest index.
// Throws std::invalid_argument if f is not finite at init.
SolveReport maximize(const Objective& f, std::span<const double> lower,
                     std::span<const double> upper, std::span<const double> init,
                     const SolveOptions& opts);

struct FdGradient {
  std::vector<double> gradient;
  std::vector<char> one_sided;  // coordinates where a bound forced one-sided differences
};

// Central differences with step h per coordinate; falls back to a one-sided
// difference where x +- h would leave the box.
FdGradient gradient_fd(const ValueOnly& f, std::span<const double> x, double h,
                       std::span<const double> lower = {}, std::span<const double> upper = {});

}  // namespace rice
