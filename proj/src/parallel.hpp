#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace anonroute::detail {

inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

/// Splits [0, count) into contiguous shards, runs body(begin, end, acc) on each
/// and merges the per-shard accumulators in shard order. Results are
/// independent of the worker count whenever merge is associative and
/// commutative on the values body produces.
template <class Acc, class Init, class Body, class Merge>
Acc parallel_reduce(std::size_t count, std::size_t workers, Init init, Body body, Merge merge) {
  workers = std::max<std::size_t>(1, std::min(resolve_workers(workers), count));
  std::vector<Acc> parts;
  parts.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) parts.push_back(init());
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    try {
      body(begin, end, parts[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Acc total = init();
  for (auto& p : parts) merge(total, p);
  return total;
}

}  // namespace anonroute::detail
