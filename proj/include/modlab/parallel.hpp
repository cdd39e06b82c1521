#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace modlab {

// Default worker count: available hardware threads, at least one.
inline int default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Runs job(k) for k in [0, count) on up to `workers` threads. Jobs must write only to their
// own slot of any shared output. The first exception (by job index) is rethrown after all
// workers finish.
template <class Job>
void parallel_for(std::size_t count, int workers, Job&& job) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                job(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
    if (threads <= 1) {
        drain();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(drain);
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace modlab
