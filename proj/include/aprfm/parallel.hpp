#pragma once

namespace aprfm {

/// Serial drivers are the reference implementations; parallel drivers must
/// reproduce them bit for bit.
enum class Execution { serial, parallel };

/// Applies the APRFM_THREADS cap (if set) to the OpenMP runtime and returns
/// the resulting thread count.
int configure_threads_from_env();

int max_threads() noexcept;

}  // namespace aprfm
