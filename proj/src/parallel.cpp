#include "fourier_ns/parallel.hpp"

#include <atomic>

namespace fourier_ns {

namespace {
std::atomic<int> g_threads{1};
}

int default_threads() { return g_threads.load(); }

void set_default_threads(int threads) { g_threads.store(threads > 0 ? threads : 1); }

}  // namespace fourier_ns
