#include "qsd/parallel.hpp"

#include <omp.h>

namespace qsd {

namespace {
int default_threads() {
  static const int n = omp_get_max_threads();
  return n;
}
}  // namespace

void set_thread_limit(int threads) {
  const int base = default_threads();
  omp_set_num_threads(threads < 1 ? base : threads);
}

int thread_limit() { return omp_get_max_threads(); }

}  // namespace qsd
