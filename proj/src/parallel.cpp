#include "subclust/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace subclust {

namespace {
std::atomic<int> g_max_threads{0};

int hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Ranges below this size are not worth a thread launch.
constexpr std::size_t kSerialCutoff = 16;
}  // namespace

void set_max_threads(int n) { g_max_threads.store(n <= 0 ? 0 : n); }

int max_threads() {
  int n = g_max_threads.load();
  return n <= 0 ? hardware_threads() : n;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
  if (begin >= end) return;
  const std::size_t count = end - begin;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), count);

  if (workers <= 1 || count < kSerialCutoff) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }

  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto run_block = [&](std::size_t lo, std::size_t hi) {
    try {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  const std::size_t chunk = count / workers;
  const std::size_t rem = count % workers;
  std::size_t lo = begin;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t hi = lo + chunk + (w < rem ? 1 : 0);
    if (w + 1 == workers) {
      run_block(lo, hi);  // caller works the last block
    } else {
      threads.emplace_back(run_block, lo, hi);
    }
    lo = hi;
  }
  for (auto& t : threads) t.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace subclust
