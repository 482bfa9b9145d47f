#include "aeslab/parallel.hpp"

#include <atomic>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace aeslab {

void parallel_for_index(std::uint64_t count, unsigned worker_count,
                        const std::function<void(std::uint64_t)>& fn) {
    if (worker_count == 0) {
        throw std::invalid_argument("worker_count must be >= 1");
    }
    if (worker_count == 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                break;
            }
        }
    };

    std::vector<std::jthread> threads;
    const unsigned spawn = worker_count > count ? static_cast<unsigned>(count) : worker_count;
    threads.reserve(spawn);
    for (unsigned t = 0; t < spawn; ++t) threads.emplace_back(worker);
    threads.clear();  // join

    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace aeslab
