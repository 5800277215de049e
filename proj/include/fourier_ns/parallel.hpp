#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace fourier_ns {

/// Worker count used when callers pass threads <= 0.
int default_threads();
void set_default_threads(int threads);

/// Runs body(begin, end) over [0, n) split into contiguous chunks. Each output
/// index is owned by exactly one chunk, so results never depend on the worker count.
template <typename Body>
void parallel_for(std::ptrdiff_t n, int threads, Body&& body) {
  if (threads <= 0) threads = default_threads();
  threads = int(std::min<std::ptrdiff_t>(threads, std::max<std::ptrdiff_t>(n, 1)));
  if (threads <= 1) {
    body(std::ptrdiff_t(0), n);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(std::size_t(threads));
  const std::ptrdiff_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::ptrdiff_t b = t * chunk;
    const std::ptrdiff_t e = std::min(n, b + chunk);
    if (b >= e) break;
    workers.emplace_back([&body, b, e] { body(b, e); });
  }
}

}  // namespace fourier_ns
