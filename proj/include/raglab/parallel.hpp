#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace raglab {

/// Runs fn(0..n-1) across up to `parallelism` threads. Exceptions are
/// collected per index and the one with the lowest index is rethrown, so
/// error behavior does not depend on thread scheduling.
inline void parallel_for(std::size_t n, std::size_t parallelism,
                         const std::function<void(std::size_t)>& fn) {
    if (n == 0) {
        return;
    }
    if (parallelism <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::size_t workers = parallelism < n ? parallelism : n;
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto run = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        threads.emplace_back(run);
    }
    for (auto& t : threads) {
        t.join();
    }
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

} // namespace raglab
