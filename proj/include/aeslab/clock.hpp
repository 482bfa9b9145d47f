#pragma once

#include <cstdint>
#include <functional>

namespace aeslab {

// Times one block's worth of work. `work` must run exactly once. A real
// clock physically stalls for the injected delay and reads a monotonic
// timer around (stall + work); a simulated clock runs the work unmeasured
// and synthesizes the duration as a pure function of (seed, block_index).
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::uint64_t measure(std::uint64_t block_index, double injected_delay_ms,
                                  const std::function<void()>& work) = 0;
};

class RealMonotonicClock final : public Clock {
public:
    std::uint64_t measure(std::uint64_t block_index, double injected_delay_ms,
                          const std::function<void()>& work) override;

    // Monotonic timestamp in ns, for callers that need raw readings.
    static std::uint64_t now_ns();
};

class SimulatedClock final : public Clock {
public:
    // Baseline per block is truncated_normal(mean, jitter, 0.1 * mean) in ms;
    // the reported duration is round((baseline + delay) * 1e6) ns.
    SimulatedClock(double baseline_mean_ms, double baseline_jitter_ms, std::uint64_t seed);

    std::uint64_t measure(std::uint64_t block_index, double injected_delay_ms,
                          const std::function<void()>& work) override;

    double baseline_ms(std::uint64_t block_index) const;

private:
    double mean_ms_;
    double jitter_ms_;
    std::uint64_t stream_base_;
};

}  // namespace aeslab
