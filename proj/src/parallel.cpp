#include "robin/parallel.hpp"

#include <atomic>

namespace robin {

namespace {
std::atomic<bool> g_deterministic{false};
}

void set_deterministic(bool on) noexcept { g_deterministic.store(on); }

bool deterministic() noexcept { return g_deterministic.load(); }

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace robin
