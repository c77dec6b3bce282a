#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rice {

// Input outside the mathematical domain of an operation (log of a
// non-positive stock, fractional power of a negative number, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Damage or abatement fraction reached zero or below: the economy produces
// nothing and the model is no longer meaningful.
class ModelBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A simulation step failed; carries the absolute step index.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

// Scenario failed validation; every violation is listed.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)),
        violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "scenario validation failed:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace rice
