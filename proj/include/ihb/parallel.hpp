#pragma once

// OpenMP helpers. Every parallel loop in the library goes through these so
// results never depend on the number of threads: reductions are accumulated
// in fixed-size blocks and folded in index order.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <vector>

namespace ihb::parallel {

inline constexpr std::size_t kBlockSize = 256;

int thread_count();
void set_thread_count(int threads);

/// Applies IHB_THREADS when it is set to a positive integer.
int configure_from_env();

namespace detail {

// Holds the exception raised at the lowest loop index so that a failing
// parallel loop reports the same error as its serial counterpart.
class ExceptionSlot {
 public:
  void capture(std::size_t index) noexcept;
  void rethrow_if_any() const;

 private:
  std::mutex mu_;
  std::size_t index_ = SIZE_MAX;
  std::exception_ptr ptr_;
};

}  // namespace detail

template <class Body>
void for_each_index_serial(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

template <class Body>
void for_each_index(std::size_t n, Body&& body) {
  if (n <= 1) {
    for_each_index_serial(n, body);
    return;
  }
  detail::ExceptionSlot slot;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      slot.capture(static_cast<std::size_t>(i));
    }
  }
  slot.rethrow_if_any();
}

template <class Acc, class Term>
Acc blocked_reduce(std::size_t n, Term&& term, bool parallel = true) {
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<Acc> partial(blocks);
  auto run_block = [&](std::size_t b) {
    Acc acc{};
    const std::size_t end = std::min(n, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) term(i, acc);
    partial[b] = acc;
  };
  if (parallel) {
    for_each_index(blocks, run_block);
  } else {
    for_each_index_serial(blocks, run_block);
  }
  Acc total{};
  for (const Acc& p : partial) total += p;
  return total;
}

/// Running sum and sum of squares, for Monte Carlo standard errors.
struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  Moments& operator+=(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
    return *this;
  }
};

/// SplitMix64 step; used to derive independent per-trial seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) {
  return mix_seed(mix_seed(master ^ mix_seed(stream)) + index);
}

}  // namespace ihb::parallel
