#pragma once
#include <cstddef>
#include <functional>

namespace holoq {

// Worker cap: HOLOQ_MAX_THREADS (>=1) if set, else hardware concurrency.
std::size_t max_threads();

// Runs fn(i) for i in [0, n). Each index must touch only its own output slots;
// chunk boundaries are deterministic so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace holoq
