#ifndef MPFEM_PARALLEL_HPP
#define MPFEM_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mpfem::detail {

/// Worker count: hardware concurrency, capped by TROPICAL_HJ_THREADS.
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("TROPICAL_HJ_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) hw = static_cast<unsigned>(std::min(v, 256L));
  }
  return hw;
}

/** Runs body(i) for i in [0, n) across the thread budget. Each index is
    computed exactly once by one thread, so results do not depend on the
    partition. */
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  unsigned budget = thread_budget();
  if (budget <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(budget, n));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mpfem::detail

#endif  // MPFEM_PARALLEL_HPP
