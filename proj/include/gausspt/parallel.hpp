#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gausspt {

/// Worker-pool size: explicit request, else the GAUSSPT_THREADS environment
/// variable, else machine parallelism. 0 means "not requested".
inline unsigned resolve_thread_count(unsigned requested = 0) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("GAUSSPT_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 65536)
      return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Runs fn(i) for i in [0, count) on a pool of n_threads workers pulling
/// from a shared counter. fn must write results only to slots owned by
/// index i, which keeps output order independent of scheduling. The first
/// exception wins, stops the pool, and is rethrown on the caller.
template <typename Fn>
void parallel_for_index(std::size_t count, unsigned n_threads, Fn&& fn) {
  if (count == 0) return;
  if (n_threads < 1) n_threads = 1;
  if (static_cast<std::size_t>(n_threads) > count)
    n_threads = static_cast<unsigned>(count);
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
          cursor.store(count);
          return;
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace gausspt
