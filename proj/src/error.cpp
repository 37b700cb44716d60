#include "aprfm/error.hpp"

namespace aprfm {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::degenerate_cover: return "degenerate-cover";
    case ErrorKind::invalid_kernel: return "invalid-kernel";
    case ErrorKind::invalid_problem: return "invalid-problem";
    case ErrorKind::unsupported_problem: return "unsupported-problem";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::degenerate_row: return "degenerate-row";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::undefined_metric: return "undefined-metric";
    case ErrorKind::io_failure: return "io-failure";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_name(kind)) + ": " + message), kind_(kind) {}

NoConvergence::NoConvergence(const std::string& message, double last_change, long iterations)
    : Error(ErrorKind::no_convergence, message),
      last_change_(last_change),
      iterations_(iterations) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace aprfm
