#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace dvz {

// How Monte-Carlo work is split. The sample budget is cut into fixed-size
// chunks, chunk c always draws from substream c, and chunk results are merged
// in chunk order, so outputs do not depend on the number of workers.
struct ExecPolicy {
  unsigned workers = 1;
  Eigen::Index chunk_size = 4096;
};

// Runs body(i) for i in [0, count) on up to `workers` threads. The first
// exception thrown by any task is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Number of chunks covering `samples` items.
inline std::size_t chunk_count(Eigen::Index samples, Eigen::Index chunk_size) {
  return static_cast<std::size_t>((samples + chunk_size - 1) / chunk_size);
}

}  // namespace dvz
