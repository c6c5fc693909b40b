#pragma once

#include <cstdint>
#include <functional>

namespace mfbsde {

// Worker cap shared by all parallel loops. 0 means "use hardware_concurrency".
void set_max_threads(int threads);
int max_threads();

// Runs fn(begin, end) over [0, total) split into fixed-size chunks. Chunks are
// claimed dynamically but write disjoint data, and no floating-point reduction
// happens across chunk boundaries, so results are identical for any worker
// count. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::int64_t total, const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace mfbsde
