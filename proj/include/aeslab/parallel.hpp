#pragma once

#include <cstdint>
#include <functional>

namespace aeslab {

// Runs fn(i) for i in [0, count) on up to worker_count threads, pulling
// indices from a shared atomic counter. If any call throws, remaining work
// is abandoned, all workers are joined and the first exception is rethrown;
// callers treat the whole batch as failed. worker_count == 1 runs inline.
void parallel_for_index(std::uint64_t count, unsigned worker_count,
                        const std::function<void(std::uint64_t)>& fn);

}  // namespace aeslab
