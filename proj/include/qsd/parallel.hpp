#pragma once

namespace qsd {

/// Caps the worker count used by the library; values < 1 restore the runtime default.
void set_thread_limit(int threads);
[[nodiscard]] int thread_limit();

}  // namespace qsd
