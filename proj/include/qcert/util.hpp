#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qcert {

// Fixed significant-digit formatting for CSV output: locale-independent,
// 12 significant digits by default.
inline std::string format_sig(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return std::string(buf);
}

// Runs fn(i) for i in [begin, end) on up to `threads` workers. Exceptions are
// collected and the first one rethrown after all workers join.
inline void parallel_for(int begin, int end, int threads, const std::function<void(int)>& fn) {
    int n = end - begin;
    if (n <= 0) return;
    int nw = std::min(std::max(1, threads), n);
    if (nw == 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::atomic<int> next(begin);
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= end) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace qcert
