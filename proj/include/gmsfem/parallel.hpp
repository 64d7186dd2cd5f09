#pragma once

#include <functional>

namespace gmsfem {

/// Worker count: the GMSFEM_THREADS environment variable when set, else
/// `requested` when positive, else the hardware concurrency.
int resolve_thread_count(int requested = 0);

/// Index-parallel map; results must be written to per-index slots so the
/// outcome is independent of scheduling. Exceptions from workers are
/// collected and the first one rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

} // namespace gmsfem
