#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aprfm {

enum class ErrorKind {
  invalid_argument,
  degenerate_cover,
  invalid_kernel,
  invalid_problem,
  unsupported_problem,
  no_convergence,
  degenerate_row,
  invalid_input,
  undefined_metric,
  io_failure,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Library-wide exception. `kind()` is stable and printed by the CLI as the
/// structured error name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the finite-difference oracle when source iteration stalls.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& message, double last_change, long iterations);

  double last_change() const noexcept { return last_change_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double last_change_;
  long iterations_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace aprfm
