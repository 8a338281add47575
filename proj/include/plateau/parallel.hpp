#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace plateau {

/// Worker count: PLATEAU_THREADS if set, else hardware concurrency.
inline int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PLATEAU_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) n = n > 0 ? std::min(n, v) : v;
        } catch (...) {
        }
    }
    return std::max(1, n);
}

/// Runs body(i) for i in [0, n). Work is handed out in fixed chunks and each
/// index writes only its own output slot, so results do not depend on the
/// number of workers. The first exception (lowest index) is rethrown.
template <class Body>
void parallel_for(int n, Body&& body) {
    const int workers = std::min(worker_count(), std::max(1, n / 8));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex errMutex;
    std::exception_ptr err;
    int errIndex = n;
    constexpr int chunk = 4;
    auto run = [&] {
        for (;;) {
            const int start = next.fetch_add(chunk);
            if (start >= n) return;
            for (int i = start; i < std::min(n, start + chunk); ++i) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(errMutex);
                    if (i < errIndex) {
                        errIndex = i;
                        err = std::current_exception();
                    }
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace plateau
