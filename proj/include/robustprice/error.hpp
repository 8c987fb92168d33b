#pragma once

#include <stdexcept>
#include <string>

namespace robustprice {

enum class ErrorCode {
  invalid_input,              // malformed data, range or schema violations
  infeasible_set,             // uncertainty set admits no distribution
  numerical_failure,          // LP solver did not converge or lost accuracy
  old_constraint_infeasible,  // cross LP: r_old too tight for the solver
  inconsistent_inputs,        // a value beats its own optimum by more than tolerance
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable category. The CLI maps the category
/// onto its exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace robustprice
