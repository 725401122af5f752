#pragma once

// Deterministic fan-out: shard i always does the same work no matter which
// thread picks it up, and results are reduced in shard order by the caller.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace superdiff::parallel {

/// SUPERDIFF_WORKERS if set and positive, else the hardware concurrency.
inline std::size_t default_workers() {
  if (const char* env = std::getenv("SUPERDIFF_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls task(i) for i in [0, shards) on up to `workers` threads. The first
/// exception in shard order is rethrown after all threads join.
template <class Task>
void for_each_shard(std::size_t shards, std::size_t workers, Task&& task) {
  if (shards == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, shards));
  std::vector<std::exception_ptr> errors(shards);
  auto run = [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < shards; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < shards;) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace superdiff::parallel
