#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pricelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carries every violated invariant found during validation, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues);

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// A policy handed the simulator prices that break the episode contract
// (negative price or a move larger than delta_max).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace pricelab
