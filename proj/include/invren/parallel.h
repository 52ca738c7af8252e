// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace invren {

// Global worker count, settable from the CLI (--device-threads).
int hardware_threads();
void set_thread_count(int n);
int thread_count();

// Chunked parallel loop over [0, n). The body receives (index, worker_id)
// with worker_id < thread_count(). Falls back to inline execution for a
// single worker so small jobs stay deterministic and cheap.
void parallel_for(int64_t n, const std::function<void(int64_t, int)>& body);

}  // namespace invren
