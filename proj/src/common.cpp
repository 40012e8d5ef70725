#include "ivse/common.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace ivse {

namespace {

constexpr std::size_t kLeafSize = 8;

double tree_sum(const double* data, std::size_t n) {
  if (n <= kLeafSize) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return tree_sum(data, half) + tree_sum(data + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return tree_sum(values.data(), values.size());
}

int worker_threads() { return omp_get_max_threads(); }

void configure_threads_from_env() {
  if (const char* env = std::getenv("IVSE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (const std::exception&) {
      // ignore malformed values, keep the OpenMP default
    }
  }
}

}  // namespace ivse
