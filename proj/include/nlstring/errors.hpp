#pragma once

#include <stdexcept>
#include <string>

namespace nlstring {

/// Failure during time stepping; carries the step index at which it occurred.
class SimulationError : public std::runtime_error {
 public:
  enum class Kind { divergence, non_finite, non_convergence, singular_system };

  SimulationError(Kind kind, long step, const std::string& message);

  Kind kind() const { return kind_; }
  long step() const { return step_; }
  static std::string kind_name(Kind kind);

 private:
  Kind kind_;
  long step_;
};

}  // namespace nlstring
