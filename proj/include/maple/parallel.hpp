#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace maple {

inline std::size_t default_threads() {
  if (const char* env = std::getenv("MAPLE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(worker, begin, end) over contiguous chunks of [0, count).
// threads == 0 means default_threads(). The first exception is rethrown.
template <typename Body>
void parallel_chunks(std::size_t count, std::size_t threads, Body&& body) {
  if (threads == 0) threads = default_threads();
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (count == 0) return;
  if (threads == 1) {
    body(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const std::size_t base = count / threads;
  const std::size_t extra = count % threads;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t end = begin + base + (w < extra ? 1 : 0);
    workers.emplace_back([&, w, begin, end] {
      try {
        body(w, begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

// body(i) for every i in [0, count), spread across threads.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  parallel_chunks(count, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

}  // namespace maple
