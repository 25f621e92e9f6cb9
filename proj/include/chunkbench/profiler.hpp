#pragma once

#include <atomic>
#include <chrono>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "chunkbench/vectorstore.hpp"

namespace chunkbench {

// monotonic wall time around an action; non-void results pass through as
// {result, elapsed_s}, void actions return elapsed_s alone
template <typename F>
auto time_section(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<std::invoke_result_t<F&>>) {
        std::forward<F>(f)();
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } else {
        auto result = std::forward<F>(f)();
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::pair{std::move(result), elapsed};
    }
}

// background resident-set sampler, 10 ms cadence. stop() returns the peak
// delta over the construction-time baseline in MB, floored at 0, or -1 when
// the platform offers no RSS introspection.
class RssSampler {
public:
    RssSampler();
    ~RssSampler();
    RssSampler(const RssSampler&) = delete;
    RssSampler& operator=(const RssSampler&) = delete;

    double stop();

    static bool supported();

private:
    void run();

    bool supported_ = false;
    std::size_t baseline_bytes_ = 0;
    std::atomic<std::size_t> peak_bytes_{0};
    std::atomic<bool> done_{false};
    bool stopped_ = false;
    std::thread sampler_;
};

// peak RSS delta (MB) attributable to the action; -1 sentinel when unsupported
template <typename F>
double sample_peak_rss(F&& f) {
    RssSampler sampler;
    std::forward<F>(f)();
    return sampler.stop();
}

// per-query top_k wall times in ms; the first `warmups` lookups are run and
// discarded before sampling starts
std::vector<double> latency_trial(const VectorIndex& index, const std::vector<Vector>& queries,
                                  std::size_t k = 5, int warmups = 3);

}  // namespace chunkbench
