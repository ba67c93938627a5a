#include "rigidity/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace rigidity {

void configure_threads(int threads) {
  if (threads <= 0) {
    if (const char* env = std::getenv("RIGIDITY_LAB_THREADS")) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        threads = 0;
      }
    }
  }
  if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

namespace detail {

void parallel_for_impl(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::exception_ptr first;
  std::mutex mu;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    {
      std::lock_guard<std::mutex> lock(mu);
      if (first) continue;
    }
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace detail
}  // namespace rigidity
