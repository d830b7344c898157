#pragma once

#include <stdexcept>
#include <string>

namespace circlab {

// Exit codes used by the command line runner.
enum class exit_code : int {
  success = 0,
  acceptance_failure = 2,
  invalid_config = 3,
  budget_refused = 4,
};

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual exit_code code() const noexcept { return exit_code::invalid_config; }
};

class invalid_dimension : public error {
 public:
  using error::error;
};

class index_error : public error {
 public:
  using error::error;
};

class invalid_input : public error {
 public:
  using error::error;
};

class io_error : public error {
 public:
  using error::error;
};

// Raised when an enumeration or allocation would exceed its configured budget.
class resource_error : public error {
 public:
  using error::error;
  exit_code code() const noexcept override { return exit_code::budget_refused; }
};

}  // namespace circlab
