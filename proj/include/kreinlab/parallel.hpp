#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kreinlab {

// Worker cap: KREINLAB_THREADS if set, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("KREINLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return unsigned(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, n), striped over workers. Each index is handled by
// exactly one worker, so writes to disjoint slots need no locking.
template <class F>
void parallel_for(int n, F&& body) {
  const unsigned workers = std::min<unsigned>(worker_count(), unsigned(std::max(n, 1)));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = int(w); i < n; i += int(workers)) body(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kreinlab
