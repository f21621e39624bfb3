#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace irsopt {

// Thrown when a constraint set required by a solver step is empty, or when a
// QoS repair cannot fit the remaining budget. `user` is the SIC position of
// the binding user (-1 when not user-specific).
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string constraint, int user, const std::string& detail)
      : std::runtime_error("infeasible " + constraint + " (user " +
                           std::to_string(user) + "): " + detail),
        constraint_(std::move(constraint)),
        user_(user) {}

  const std::string& constraint() const noexcept { return constraint_; }
  int user() const noexcept { return user_; }

 private:
  std::string constraint_;
  int user_;
};

}  // namespace irsopt
