#include "aprfm/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "aprfm/error.hpp"

namespace aprfm {

int configure_threads_from_env() {
  if (const char* env = std::getenv("APRFM_THREADS"); env != nullptr && *env != '\0') {
    int cap = 0;
    try {
      cap = std::stoi(env);
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_argument, "APRFM_THREADS must be a positive integer");
    }
    if (cap < 1) fail(ErrorKind::invalid_argument, "APRFM_THREADS must be a positive integer");
    if (cap < omp_get_max_threads()) omp_set_num_threads(cap);
  }
  return omp_get_max_threads();
}

int max_threads() noexcept { return omp_get_max_threads(); }

}  // namespace aprfm
