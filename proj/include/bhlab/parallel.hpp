#pragma once

#include <cstddef>
#include <future>
#include <thread>
#include <vector>

namespace bhlab {

// Runs f(0), ..., f(count-1) across a small thread pool and returns the
// results in index order. Each element must be computable independently;
// the output is then identical to the serial loop no matter how the work
// is scheduled.
template <class F>
auto parallel_map(std::size_t count, F&& f) {
    using R = decltype(f(std::size_t{0}));
    std::vector<R> results(count);
    if (count == 0) return results;

    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = hw == 0 ? 1 : hw;
    if (workers > count) workers = count;

    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = f(i);
        return results;
    }

    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < count; i += workers) results[i] = f(i);
        }));
    }
    for (auto& fut : futures) fut.get();
    return results;
}

}  // namespace bhlab
