#include "bpsurv/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bpsurv {

namespace {
// Below this size the OpenMP fork/join overhead dominates.
constexpr std::size_t kParallelThreshold = 512;
}  // namespace

double pairwise_sum(const double* data, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = data[0];
    for (std::size_t i = 1; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

void parallel_fill(std::size_t n, double* out,
                   const std::function<double(std::size_t)>& fn) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
#endif
  for (std::ptrdiff_t i = 0; i < sn; ++i)
    out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
}

void parallel_for_index(std::size_t n,
                        const std::function<void(std::size_t)>& fn) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (std::ptrdiff_t i = 0; i < sn; ++i) fn(static_cast<std::size_t>(i));
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace bpsurv
