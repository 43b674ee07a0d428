#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace permchan {

// Worker count: hardware concurrency capped by the PERMCHAN_THREADS env var.
inline unsigned thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("PERMCHAN_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && static_cast<unsigned long>(v) < hw) hw = static_cast<unsigned>(v);
  }
  return hw;
}

// Runs fn(chunk_index, begin, end) over [0, count) split into a fixed number
// of chunks. The chunk layout depends only on count, never on the number of
// worker threads, so per-chunk results can be reduced in chunk order to get
// bit-identical output at any thread count.
inline void parallel_chunks(std::size_t count, std::size_t chunk_count,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  if (chunk_count == 0 || chunk_count > count) chunk_count = count;
  unsigned workers = std::min<std::size_t>(thread_cap(), chunk_count);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunk_count; ++c) {
      std::size_t begin = c * count / chunk_count;
      std::size_t end = (c + 1) * count / chunk_count;
      fn(c, begin, end);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t c = next.fetch_add(1);
        if (c >= chunk_count) return;
        std::size_t begin = c * count / chunk_count;
        std::size_t end = (c + 1) * count / chunk_count;
        fn(c, begin, end);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace permchan
