#include "nldlab/parallel.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nldlab {

void set_worker_count(int workers) {
  if (workers < 1) throw std::invalid_argument("worker count must be at least 1");
#ifdef _OPENMP
  omp_set_num_threads(workers);
#endif
}

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace nldlab
