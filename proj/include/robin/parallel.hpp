#ifndef ROBIN_PARALLEL_HPP
#define ROBIN_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace robin {

// Selects the serial reference loop or the OpenMP loop for a kernel. Every
// kernel writes its results into per-index slots and reduces them in index
// order, so both policies produce bit-identical output.
enum class Exec { serial, parallel };

// Deterministic mode pins the OpenMP schedule to static chunks. Results do
// not depend on it; it only fixes which thread evaluates which index.
void set_deterministic(bool on) noexcept;
bool deterministic() noexcept;

int max_threads() noexcept;

// Runs body(i) for i in [0, count). An exception thrown by any iteration is
// rethrown after the loop; if several throw, the lowest index wins.
template <class Body>
void for_each_index(Exec exec, std::size_t count, Body&& body) {
  if (exec == Exec::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::mutex guard;
  std::exception_ptr first_error;
  long first_index = -1;
  auto record = [&](long i) {
    std::lock_guard<std::mutex> lock(guard);
    if (first_index < 0 || i < first_index) {
      first_index = i;
      first_error = std::current_exception();
    }
  };

  const long n = static_cast<long>(count);
  if (deterministic()) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        record(i);
      }
    }
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        record(i);
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace robin

#endif  // ROBIN_PARALLEL_HPP
