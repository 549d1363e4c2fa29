#include "nfsim/parallel.hpp"

#if defined(NFSIM_HAVE_OPENMP)
#include <omp.h>
#endif

namespace nfsim {

#if defined(NFSIM_HAVE_OPENMP)
namespace {
const int kDefaultWorkers = omp_get_max_threads();
}

int worker_count() noexcept { return omp_get_max_threads(); }

void set_worker_count(int n) noexcept { omp_set_num_threads(n > 0 ? n : kDefaultWorkers); }
#else
int worker_count() noexcept { return 1; }

void set_worker_count(int) noexcept {}
#endif

}  // namespace nfsim
