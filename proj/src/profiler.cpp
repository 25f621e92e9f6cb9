#include "chunkbench/profiler.hpp"

#include <fstream>
#include <optional>

#include <spdlog/spdlog.h>
#include <unistd.h>

#include "chunkbench/errors.hpp"

namespace chunkbench {

namespace {

std::optional<std::size_t> current_rss_bytes() {
    std::ifstream statm("/proc/self/statm");
    if (!statm) return std::nullopt;
    std::size_t total_pages = 0;
    std::size_t resident_pages = 0;
    if (!(statm >> total_pages >> resident_pages)) return std::nullopt;
    static const long page = sysconf(_SC_PAGESIZE);
    if (page <= 0) return std::nullopt;
    return resident_pages * static_cast<std::size_t>(page);
}

}  // namespace

bool RssSampler::supported() { return current_rss_bytes().has_value(); }

RssSampler::RssSampler() {
    const auto rss = current_rss_bytes();
    if (!rss) {
        spdlog::warn("resident-set sampling unavailable on this platform; reporting -1");
        return;
    }
    supported_ = true;
    baseline_bytes_ = *rss;
    peak_bytes_.store(*rss);
    sampler_ = std::thread(&RssSampler::run, this);
}

RssSampler::~RssSampler() {
    if (!stopped_) stop();
}

void RssSampler::run() {
    while (!done_.load()) {
        if (const auto rss = current_rss_bytes()) {
            std::size_t prev = peak_bytes_.load();
            while (*rss > prev && !peak_bytes_.compare_exchange_weak(prev, *rss)) {
            }
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
}

double RssSampler::stop() {
    if (stopped_) throw ContractError("sampler already stopped");
    stopped_ = true;
    if (!supported_) return -1.0;
    done_.store(true);
    sampler_.join();
    // one synchronous reading so actions shorter than the cadence still count
    if (const auto rss = current_rss_bytes()) {
        std::size_t prev = peak_bytes_.load();
        if (*rss > prev) peak_bytes_.store(*rss);
    }
    const std::size_t peak = peak_bytes_.load();
    const std::size_t delta = peak > baseline_bytes_ ? peak - baseline_bytes_ : 0;
    return static_cast<double>(delta) / (1024.0 * 1024.0);
}

std::vector<double> latency_trial(const VectorIndex& index, const std::vector<Vector>& queries,
                                  std::size_t k, int warmups) {
    if (index.count() == 0) throw Error("latency trial on an empty index");
    if (queries.empty()) throw Error("latency trial needs at least one query");

    for (int w = 0; w < warmups; ++w)
        (void)index.top_k(queries[static_cast<std::size_t>(w) % queries.size()], k);

    std::vector<double> samples_ms;
    samples_ms.reserve(queries.size());
    for (const auto& q : queries) {
        const auto t0 = std::chrono::steady_clock::now();
        (void)index.top_k(q, k);
        samples_ms.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count());
    }
    return samples_ms;
}

}  // namespace chunkbench
