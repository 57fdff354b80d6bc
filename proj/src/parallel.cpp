#include "ihb/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ihb::parallel {

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int configure_from_env() {
  if (const char* value = std::getenv("IHB_THREADS")) {
    try {
      const int threads = std::stoi(value);
      if (threads > 0) set_thread_count(threads);
    } catch (const std::exception&) {
      // ignored: an unparsable cap leaves the OpenMP default in place
    }
  }
  return thread_count();
}

namespace detail {

void ExceptionSlot::capture(std::size_t index) noexcept {
  std::lock_guard<std::mutex> lock(mu_);
  if (index < index_) {
    index_ = index;
    ptr_ = std::current_exception();
  }
}

void ExceptionSlot::rethrow_if_any() const {
  if (ptr_) std::rethrow_exception(ptr_);
}

}  // namespace detail
}  // namespace ihb::parallel
