// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "invren/parallel.h"

#include <algorithm>

namespace invren {

static int g_threads = 0;

int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void set_thread_count(int n) { g_threads = n; }

int thread_count() { return g_threads > 0 ? g_threads : hardware_threads(); }

void parallel_for(int64_t n, const std::function<void(int64_t, int)>& body) {
    if (n <= 0) return;
    int workers = std::min<int64_t>(thread_count(), n);
    if (workers <= 1) {
        for (int64_t i = 0; i < n; ++i) body(i, 0);
        return;
    }
    std::atomic<int64_t> next{0};
    const int64_t chunk = std::max<int64_t>(1, n / (workers * 8));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (;;) {
                int64_t begin = next.fetch_add(chunk);
                if (begin >= n) break;
                int64_t end = std::min(n, begin + chunk);
                for (int64_t i = begin; i < end; ++i) body(i, w);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace invren
