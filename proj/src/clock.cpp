#include "aeslab/clock.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "aeslab/rng.hpp"

namespace aeslab {

std::uint64_t RealMonotonicClock::now_ns() {
    const auto now = std::chrono::steady_clock::now().time_since_epoch();
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(now).count());
}

std::uint64_t RealMonotonicClock::measure(std::uint64_t, double injected_delay_ms,
                                          const std::function<void()>& work) {
    const auto start = std::chrono::steady_clock::now();
    if (injected_delay_ms > 0.0) {
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(injected_delay_ms));
    }
    work();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count();
    return ns > 0 ? static_cast<std::uint64_t>(ns) : 1;  // duration_ns must stay positive
}

SimulatedClock::SimulatedClock(double baseline_mean_ms, double baseline_jitter_ms,
                               std::uint64_t seed)
    : mean_ms_(baseline_mean_ms),
      jitter_ms_(baseline_jitter_ms),
      stream_base_(domain_seed(seed, SeedDomain::ClockStream)) {
    if (!(baseline_mean_ms > 0.0)) {
        throw std::invalid_argument("baseline mean must be > 0 ms");
    }
    if (baseline_jitter_ms < 0.0) {
        throw std::invalid_argument("baseline jitter must be >= 0 ms");
    }
}

double SimulatedClock::baseline_ms(std::uint64_t block_index) const {
    if (jitter_ms_ == 0.0) {
        return mean_ms_;
    }
    SplitMix64 rng(derive_seed(stream_base_, block_index));
    return rng.truncated_normal(mean_ms_, jitter_ms_, 0.1 * mean_ms_);
}

std::uint64_t SimulatedClock::measure(std::uint64_t block_index, double injected_delay_ms,
                                      const std::function<void()>& work) {
    work();
    const double total_ms = baseline_ms(block_index) + injected_delay_ms;
    return static_cast<std::uint64_t>(std::llround(total_ms * 1e6));
}

}  // namespace aeslab
