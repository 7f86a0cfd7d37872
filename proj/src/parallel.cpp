#include "radscat/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace radscat {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_hint(int n) { g_threads = std::max(1, n); }
int thread_hint() { return g_threads; }

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int nt = std::min(thread_hint(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      const int lo = static_cast<int>(static_cast<long>(n) * w / nt);
      const int hi = static_cast<int>(static_cast<long>(n) * (w + 1) / nt);
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace radscat
