#pragma once

#include <cstddef>
#include <functional>

namespace conformlets {

// Worker count: hardware concurrency capped by CONFORMLETS_THREADS when set.
std::size_t thread_count();

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker and
// bodies must only write to storage owned by their index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace conformlets
