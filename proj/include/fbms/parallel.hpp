#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace fbms {

// Worker count from FBMS_THREADS (default 1).
inline int configured_threads() {
  const char* env = std::getenv("FBMS_THREADS");
  if (env == nullptr) return 1;
  return std::clamp(std::atoi(env), 1, 64);
}

// Calls body(i) for i in [0, n) on up to configured_threads() workers, with a
// strided split. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(int n, Body&& body, int min_chunk = 256) {
  const int threads = std::min(configured_threads(), std::max(1, n / min_chunk));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += threads) body(i);
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace fbms
