#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>

namespace rigidity {

enum class Execution { serial, parallel };

// Sets the OpenMP thread count. threads <= 0 reads RIGIDITY_LAB_THREADS, else leaves the default.
void configure_threads(int threads);
int max_threads();

namespace detail {
void parallel_for_impl(std::size_t n, const std::function<void(std::size_t)>& body);
}

// Runs body(i) for i in [0, n). Iterations must write disjoint outputs; results are then
// identical to the serial loop. The first exception thrown by any iteration is rethrown.
template <class Body>
void parallel_for(Execution exec, std::size_t n, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  detail::parallel_for_impl(n, std::function<void(std::size_t)>(std::forward<Body>(body)));
}

}  // namespace rigidity
